"""Architecture registry: build a tagger for a ModelConfig."""

from .lstm import BiLstmTagger, LstmTagger
from .networks import ElmanTagger, JordanTagger, MlpTagger
from .numerics import make_rng
from .options import Architecture

MODEL_CLASSES = {
    Architecture.MLP: MlpTagger,
    Architecture.ELMAN: ElmanTagger,
    Architecture.JORDAN: JordanTagger,
    Architecture.LSTM: LstmTagger,
    Architecture.BILSTM: BiLstmTagger,
}


def get_model_class(architecture):
    return MODEL_CLASSES[Architecture(architecture)]


def build_model(config, vocab, charset, tagset, rng=None, seed=0, embeddings=None,
                initialize=True):
    """Freshly initialized tagger; ``rng`` defaults to a generator seeded with ``seed``.

    With ``initialize=False`` no random draws are made and every parameter
    block is zero, for models whose weights are loaded next.
    """
    if not initialize:
        rng = None
    elif rng is None:
        rng = make_rng(seed)
    cls = get_model_class(config.architecture)
    return cls(config, vocab, charset, tagset, rng, embeddings)
