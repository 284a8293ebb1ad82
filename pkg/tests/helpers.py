"""Small corpora and configurations shared by the test modules."""

from supertag.corpus import Sentence, build_charset, build_vocab_tagset
from supertag.features import FeatureConfig
from supertag.models import build_model
from supertag.networks import ModelConfig
from supertag.numerics import make_rng

# Two tags plus RARE: K = 3.
TINY_PAIRS = [
    [("dogs", "N"), ("Bark", "NP"), ("cats", "N")],
    [("IBM", "NP"), ("dogs", "N")],
    [("cats", "N"), ("cats", "N"), ("Bark", "NP"), ("dogs", "N")],
]


def tiny_corpus():
    return [Sentence.from_pairs(pairs) for pairs in TINY_PAIRS]


def tiny_config(architecture, gate_variant="scalar", **overrides):
    """F = 4 token features, radius 1, H = 3."""
    features = dict(word_dim=1, cap_dim=1, char_dim=1, chars_per_side=1, window_radius=1)
    for name in list(overrides):
        if name in features or name == "use_chars":
            features[name] = overrides.pop(name)
    settings = dict(architecture=architecture, gate_variant=gate_variant, hidden_size=3,
                    drop_rate=0.3, hidden_drop_rate=0.3, two_layer_hidden=2, init_scale=0.5)
    settings.update(overrides)
    return ModelConfig(features=FeatureConfig(**features), **settings)


def tiny_model(architecture, gate_variant="scalar", seed=0, corpus=None, **overrides):
    corpus = corpus or tiny_corpus()
    vocab, tagset = build_vocab_tagset(corpus)
    charset = build_charset(corpus)
    config = tiny_config(architecture, gate_variant, **overrides)
    return build_model(config, vocab, charset, tagset, rng=make_rng(seed))


# Flags of the bundled-corpus overfit run documented in the README.
ACCEPTANCE_FLAGS = ["--architecture", "bilstm", "--gate-variant", "scalar", "--hidden-size", "32",
                    "--word-dim", "16", "--cap-dim", "2", "--char-dim", "4",
                    "--chars-per-side", "2", "--drop-rate", "0.5", "--hidden-drop-rate", "0.0",
                    "--init-scale", "1.0", "--learning-rate", "0.1", "--epochs", "40",
                    "--seed", "0"]
