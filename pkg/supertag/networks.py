"""
Taggers with dynamic-window inputs: the shared input pipeline, the windowed
MLP and the Elman/Jordan RNNs with a reset gate on the recurrent input.

Every tagger keeps its parameters in one flat ``params`` dict (lookup
tables ``L_w``/``L_a``/``L_c``, gate weights ``gate.*`` and the network
weights), maps a sentence to per-token tag distributions, and returns exact
gradients of the sentence's mean negative log-likelihood for every entry of
``params``. Lookup-table gradients are row-sparse.

Recurrent models:

    Elman   h_t = tanh(W_xh x~_t + s_t W_hh h_{t-1} + b_h)
    Jordan  h_t = tanh(W_xh x~_t + s_t W_yh y_{t-1} + b_h)
    s_t = sigmoid(W_xs x_t + b_s)

The Elman reset gate is carried over from the Jordan form. At s_t = 0 both
reduce to the MLP.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .corpus import Sentence
from .dynwin import (GateCache, GateParams, apply_gates, gate_backward, gate_dropout,
                     gate_forward, gate_output_dim, gated_dim, init_gate_params)
from .errors import ConfigError, DimensionError
from .features import (FeatureConfig, LookupTables, encode_tokens, feature_matrix,
                       init_lookup_tables, pad_feature, tables_backward, windows,
                       windows_backward)
from .numerics import (ACTIVATIONS, dropout_mask, init_gaussian, init_orthogonal, init_zeros,
                       nll_loss, sigmoid, sigmoid_grad, softmax, tanh, tanh_grad)
from .options import (Architecture, DropoutTarget, GateVariant, get_architecture_properties)

logger = logging.getLogger(__name__)

MODES = ("train", "test")


@dataclass
class ModelConfig:
    architecture: Architecture = Architecture.BILSTM
    gate_variant: GateVariant = GateVariant.SCALAR_CONCAT
    use_gates: bool = True
    hidden_size: int = 512
    depth: Optional[int] = None  # None: architecture default
    drop_rate: float = 0.5
    hidden_drop_rate: float = 0.5
    dropout_target: DropoutTarget = DropoutTarget.GATES
    two_layer_hidden: int = 64
    detach_gate: bool = False
    use_bias: bool = True
    candidate_activation: str = "tanh"
    init_scale: float = 0.1
    features: FeatureConfig = field(default_factory=FeatureConfig)

    def __post_init__(self):
        self.architecture = Architecture(self.architecture)
        self.gate_variant = GateVariant(self.gate_variant)
        self.dropout_target = DropoutTarget(self.dropout_target)
        for name in ("drop_rate", "hidden_drop_rate"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ConfigError("must be in [0, 1)", name)
        if self.hidden_size < 1:
            raise ConfigError("must be >= 1", "hidden_size")
        if self.two_layer_hidden < 1:
            raise ConfigError("must be >= 1", "two_layer_hidden")
        if self.depth is not None and self.depth < 1:
            raise ConfigError("must be >= 1", "depth")
        if self.init_scale <= 0:
            raise ConfigError("must be > 0", "init_scale")
        if self.candidate_activation not in ACTIVATIONS:
            raise ConfigError(f"must be one of {sorted(ACTIVATIONS)}", "candidate_activation")

    def resolved(self):
        """Copy with architecture defaults filled in for window radius and depth."""
        props = get_architecture_properties(self.architecture)
        features = self.features
        if features.window_radius is None:
            features = replace(features, window_radius=props['window_radius'])
        depth = props['depth'] if self.depth is None else self.depth
        return replace(self, features=features, depth=depth)


@dataclass
class EncodedSentence:
    ids: object                      # features.TokenIds
    tags: Optional[np.ndarray]       # gold tag ids, RARE for unseen tags
    sentence: Optional[Sentence] = None

    def __len__(self):
        return len(self.ids)


class DropoutNoise(dict):
    """Dropout masks of one forward pass keyed by site, replayable to freeze dropout."""

    def mask(self, key, shape, drop_rate, rng):
        if key not in self:
            if rng is None:
                raise ValueError(f"train-mode forward needs an rng to sample the {key!r} mask")
            self[key] = dropout_mask(shape, drop_rate, rng)
        return self[key]


@dataclass
class InputCache:
    ids: object
    emb_scale: np.ndarray
    gate: GateCache


@dataclass
class ForwardCache:
    mode: str
    noise: DropoutNoise
    inputs: InputCache
    network: dict
    probs: np.ndarray


class Tagger:
    """Shared input pipeline: lookup tables -> windows -> filter gates -> x~."""

    architecture: Architecture = None

    def __init__(self, config, vocab, charset, tagset, rng, embeddings=None):
        config = config.resolved()
        if config.architecture is not self.architecture:
            raise ConfigError(f"{type(self).__name__} cannot build {config.architecture.value}",
                              "architecture")
        self.config = config
        self.vocab = vocab
        self.charset = charset
        self.tagset = tagset
        self.params = {}
        # Ablation hooks: fix the filter gates r or the reset gate s to a constant.
        self.forced_gate = None
        self.forced_reset = None

        # Independent streams keep shared weights equal across gate settings.
        # Without an rng every block starts at zero, ready for load_params.
        table_rng, gate_rng, net_rng = rng.spawn(3) if rng is not None else (None,) * 3
        fc = config.features
        scale = config.init_scale
        tables = init_lookup_tables(fc, vocab, charset, table_rng, embeddings, scale)
        self.params['L_w'] = tables.words
        self.params['L_a'] = tables.caps
        if tables.chars is not None:
            self.params['L_c'] = tables.chars
        if config.use_gates:
            gate = init_gate_params(config.gate_variant, fc.slots, fc.token_dim, gate_rng,
                                    config.two_layer_hidden, scale)
            for name, value in gate.as_dict().items():
                self.params['gate.' + name] = value
        self._init_network(net_rng)

    # -- shapes and views -------------------------------------------------

    @property
    def features(self):
        return self.config.features

    @property
    def num_tags(self):
        return len(self.tagset)

    @property
    def gate_variant(self):
        """Variant in effect; without learned gates the window is a plain concatenation."""
        if not self.config.use_gates:
            return GateVariant.SCALAR_CONCAT
        return self.config.gate_variant

    @property
    def input_dim(self):
        fc = self.features
        return gated_dim(self.gate_variant, fc.slots, fc.token_dim)

    @property
    def tables(self):
        return LookupTables(self.params['L_w'], self.params['L_a'], self.params.get('L_c'),
                            self.vocab, self.charset, self.features)

    @property
    def gate_params(self):
        if not self.config.use_gates:
            return None
        return GateParams.from_dict(self.params, prefix='gate.')

    def _bias(self, name):
        return self.params.get(name, 0.0)

    def parameter_count(self):
        return sum(v.size for v in self.params.values())

    def snapshot(self):
        return {name: value.copy() for name, value in self.params.items()}

    def restore(self, snapshot):
        self.load_params(snapshot)

    def load_params(self, params):
        """Replace parameters, checking every name and shape."""
        if set(params) != set(self.params):
            missing = sorted(set(self.params) - set(params))
            extra = sorted(set(params) - set(self.params))
            raise DimensionError(f"parameter mismatch: missing {missing}, unexpected {extra}")
        for name, value in params.items():
            if value.shape != self.params[name].shape:
                raise DimensionError(f"{name} has shape {value.shape}, "
                                     f"expected {self.params[name].shape}")
        for name, value in params.items():
            self.params[name] = np.array(value, dtype=np.float64)

    # -- encoding ---------------------------------------------------------

    def encode(self, sentence):
        """EncodedSentence from a Sentence, a list of surfaces, or an EncodedSentence."""
        if isinstance(sentence, EncodedSentence):
            return sentence
        if isinstance(sentence, Sentence):
            ids = encode_tokens(sentence.surfaces, self.vocab, self.charset, self.features)
            tags = np.array(self.tagset.ids(sentence.supertags), dtype=np.intp)
            return EncodedSentence(ids, tags, sentence)
        ids = encode_tokens(list(sentence), self.vocab, self.charset, self.features)
        return EncodedSentence(ids, None)

    # -- dropout ----------------------------------------------------------

    @staticmethod
    def _drop_scale(key, shape, drop_rate, mode, noise, rng):
        if mode == "test" or drop_rate == 0.0:
            return np.full(shape, 1.0 - drop_rate) if mode == "test" else np.ones(shape)
        return noise.mask(key, shape, drop_rate, rng)

    # -- input pipeline ---------------------------------------------------

    def _input_forward(self, ids, mode, noise, rng):
        config, fc = self.config, self.features
        x = windows(feature_matrix(self.tables, ids), pad_feature(self.tables), fc.window_radius)
        n = len(ids)

        emb_scale = np.ones(x.shape)
        if config.dropout_target is DropoutTarget.EMBEDDINGS:
            emb_scale = self._drop_scale('embeddings', x.shape, config.drop_rate, mode, noise, rng)
        x = x * emb_scale

        variant = self.gate_variant
        learned = config.use_gates and self.forced_gate is None
        if learned:
            r = gate_forward(self.gate_params, variant, x)
        else:
            value = 1.0 if self.forced_gate is None else self.forced_gate
            r = np.full((n, gate_output_dim(variant, fc.slots, fc.token_dim)), value)

        gate_scale = np.ones(r.shape)
        r_tilde = r
        if config.dropout_target is DropoutTarget.GATES:
            gate_scale = self._drop_scale('gates', r.shape, config.drop_rate, mode, noise, rng)
            r_tilde = gate_dropout(r, config.drop_rate, rng, mode, mask=gate_scale)
        x_tilde = apply_gates(x, r_tilde, variant)
        return x_tilde, InputCache(ids, emb_scale, GateCache(x, r, gate_scale, learned))

    def _input_backward(self, cache, d_x_tilde, grads, d_x_extra=None):
        config, fc = self.config, self.features
        learned = cache.gate.learned
        gate_grads, d_x = gate_backward(self.gate_params if learned else None, self.gate_variant,
                                        cache.gate, d_x_tilde, detach=config.detach_gate)
        if config.use_gates:
            for name, value in self.gate_params.as_dict().items():
                grads['gate.' + name] = (getattr(gate_grads, name) if gate_grads is not None
                                         else np.zeros_like(value))
        if d_x_extra is not None:
            d_x = d_x + d_x_extra
        d_x = d_x * cache.emb_scale
        d_features, d_pad = windows_backward(d_x, fc.window_radius, fc.token_dim)
        table_grads = tables_backward(self.tables, cache.ids, d_features, d_pad)
        grads['L_w'] = table_grads['words']
        grads['L_a'] = table_grads['caps']
        if 'chars' in table_grads:
            grads['L_c'] = table_grads['chars']

    # -- output layer -----------------------------------------------------

    def _init_output(self, width, rng):
        scale = self.config.init_scale
        self.params['W_hy'] = init_gaussian(self.num_tags, width, width, rng, scale)
        if self.config.use_bias:
            self.params['b_y'] = init_zeros(self.num_tags)

    def _emit(self, h):
        """Tag distribution for one (dropped-out) hidden vector."""
        return softmax(self.params['W_hy'] @ h + self._bias('b_y'))

    def _output_backward(self, d_logits, hidden, grads):
        grads['W_hy'] = d_logits.T @ hidden
        if self.config.use_bias:
            grads['b_y'] = d_logits.sum(axis=0)
        return d_logits @ self.params['W_hy']

    # -- public API -------------------------------------------------------

    def _init_network(self, rng):
        raise NotImplementedError

    def _network_forward(self, x_tilde, inputs, mode, noise, rng):
        raise NotImplementedError

    def _network_backward(self, cache, d_logits, grads):
        """Returns (grad on x~, extra grad on the raw window x or None)."""
        raise NotImplementedError

    def forward(self, sentence, mode="test", rng=None, noise=None):
        """Per-token tag distributions (T, K) and the cache needed by ``backward``.

        Train mode samples fresh dropout masks from ``rng`` unless ``noise``
        already holds them; test mode replaces dropout by 1 - p scaling.
        """
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        encoded = self.encode(sentence)
        noise = DropoutNoise() if noise is None else noise
        x_tilde, inputs = self._input_forward(encoded.ids, mode, noise, rng)
        probs, network = self._network_forward(x_tilde, inputs, mode, noise, rng)
        return probs, ForwardCache(mode, noise, inputs, network, probs)

    def backward(self, cache, gold):
        """Gradients of the mean NLL of ``gold`` for every parameter."""
        gold = np.asarray(gold, dtype=np.intp)
        n = len(gold)
        d_logits = cache.probs.copy()
        d_logits[np.arange(n), gold] -= 1.0
        d_logits /= n
        grads = {}
        d_x_tilde, d_x_extra = self._network_backward(cache, d_logits, grads)
        self._input_backward(cache.inputs, d_x_tilde, grads, d_x_extra)
        return grads

    def loss(self, sentence, mode="train", rng=None, noise=None):
        encoded = self.encode(sentence)
        probs, _ = self.forward(encoded, mode, rng, noise)
        return nll_loss(probs, encoded.tags)

    def loss_and_grads(self, sentence, mode="train", rng=None, noise=None):
        """(loss, grads, noise); pass ``noise`` back in to replay the same masks."""
        encoded = self.encode(sentence)
        probs, cache = self.forward(encoded, mode, rng, noise)
        loss = nll_loss(probs, encoded.tags)
        return loss, self.backward(cache, encoded.tags), cache.noise

    def apply_gradients(self, grads, learning_rate):
        for name, grad in grads.items():
            if hasattr(grad, 'apply'):
                grad.apply(self.params[name], learning_rate)
            else:
                self.params[name] -= learning_rate * grad

    def predict(self, sentence):
        """1-best tag ids (test mode)."""
        probs, _ = self.forward(sentence, "test")
        return np.argmax(probs, axis=1)

    def tag(self, surfaces):
        return [self.tagset.symbol(i) for i in self.predict(list(surfaces))]

    def gate_activations(self, sentence):
        """Raw filter gates r (T, gate dim) for each token, test mode, no dropout."""
        if not self.config.use_gates:
            raise ConfigError("model has no filter gates", "use_gates")
        encoded = self.encode(sentence)
        _, cache = self.forward(encoded, "test")
        return cache.inputs.gate.r


class MlpTagger(Tagger):
    """h_t = tanh(W_xh x~_t + b_h), y_t = softmax(W_hy h_t + b_y), per token."""

    architecture = Architecture.MLP

    def _init_network(self, rng):
        config = self.config
        d, h = self.input_dim, config.hidden_size
        self.params['W_xh'] = init_gaussian(h, d, d, rng, config.init_scale)
        if config.use_bias:
            self.params['b_h'] = init_zeros(h)
        self._init_output(h, rng)

    def _network_forward(self, x_tilde, inputs, mode, noise, rng):
        n, h_dim = x_tilde.shape[0], self.config.hidden_size
        pre = x_tilde @ self.params['W_xh'].T + self._bias('b_h')
        scale = self._drop_scale('hidden0', (n, h_dim), self.config.hidden_drop_rate,
                                 mode, noise, rng)
        # row by row so the recurrent taggers can match these outputs bit for bit
        hidden = np.empty((n, h_dim))
        probs = np.empty((n, self.num_tags))
        for t in range(n):
            hidden[t] = tanh(pre[t])
            probs[t] = self._emit(hidden[t] * scale[t])
        return probs, {'x_tilde': x_tilde, 'hidden': hidden, 'scale': scale}

    def _network_backward(self, cache, d_logits, grads):
        net = cache.network
        d_hidden = self._output_backward(d_logits, net['hidden'] * net['scale'], grads)
        d_pre = d_hidden * net['scale'] * tanh_grad(net['hidden'])
        grads['W_xh'] = d_pre.T @ net['x_tilde']
        if self.config.use_bias:
            grads['b_h'] = d_pre.sum(axis=0)
        return d_pre @ self.params['W_xh'], None


class _ResetGateRnn(Tagger):
    """Vanilla RNN whose recurrent input is scaled by a scalar reset gate s_t."""

    recurrent_weight = None

    def _recurrent_dim(self):
        raise NotImplementedError

    def _init_network(self, rng):
        config = self.config
        d, h = self.input_dim, config.hidden_size
        window_dim = self.features.window_dim
        scale = config.init_scale
        self.params['W_xh'] = init_gaussian(h, d, d, rng, scale)
        self.params[self.recurrent_weight] = init_orthogonal(h, self._recurrent_dim(), rng)
        self.params['W_xs'] = init_gaussian(1, window_dim, window_dim, rng, scale)
        if config.use_bias:
            self.params['b_h'] = init_zeros(h)
            self.params['b_s'] = init_zeros(1)
        self._init_output(h, rng)

    def _reset_gates(self, x, n):
        if self.forced_reset is not None:
            return np.full(n, float(self.forced_reset))
        return sigmoid(x @ self.params['W_xs'][0] + self._bias('b_s'))

    def _network_forward(self, x_tilde, inputs, mode, noise, rng):
        n, h_dim = x_tilde.shape[0], self.config.hidden_size
        w_rec = self.params[self.recurrent_weight]
        jordan = self.architecture is Architecture.JORDAN
        pre = x_tilde @ self.params['W_xh'].T + self._bias('b_h')
        s = self._reset_gates(inputs.gate.x, n)
        scale = self._drop_scale('hidden0', (n, h_dim), self.config.hidden_drop_rate,
                                 mode, noise, rng)
        hidden = np.empty((n, h_dim))
        probs = np.empty((n, self.num_tags))
        recurrent_in = np.zeros((n, self._recurrent_dim()))
        state = np.zeros(self._recurrent_dim())
        for t in range(n):
            recurrent_in[t] = state
            q = w_rec @ state
            hidden[t] = tanh(pre[t] + s[t] * q)
            probs[t] = self._emit(hidden[t] * scale[t])
            state = probs[t] if jordan else hidden[t]
        return probs, {'x_tilde': x_tilde, 'hidden': hidden, 'scale': scale, 's': s,
                       'recurrent_in': recurrent_in}

    def _network_backward(self, cache, d_logits, grads):
        net = cache.network
        config = self.config
        jordan = self.architecture is Architecture.JORDAN
        w_rec = self.params[self.recurrent_weight]
        w_hy = self.params['W_hy']
        hidden, scale, s, prev = net['hidden'], net['scale'], net['s'], net['recurrent_in']
        probs = cache.probs
        n = hidden.shape[0]

        g_hy = np.zeros_like(w_hy)
        g_by = np.zeros(self.num_tags)
        g_rec = np.zeros_like(w_rec)
        d_pre = np.zeros_like(hidden)
        d_s = np.zeros(n)
        carry = np.zeros(self._recurrent_dim())
        for t in reversed(range(n)):
            d_z = d_logits[t]
            if jordan:
                # softmax Jacobian for the gradient arriving through y_t
                d_z = d_z + probs[t] * (carry - carry @ probs[t])
            dropped = hidden[t] * scale[t]
            g_hy += np.outer(d_z, dropped)
            g_by += d_z
            d_h = (w_hy.T @ d_z) * scale[t]
            if not jordan:
                d_h = d_h + carry
            d_a = d_h * tanh_grad(hidden[t])
            d_pre[t] = d_a
            d_s[t] = d_a @ (w_rec @ prev[t])
            d_q = s[t] * d_a
            g_rec += np.outer(d_q, prev[t])
            carry = w_rec.T @ d_q

        grads['W_hy'] = g_hy
        if config.use_bias:
            grads['b_y'] = g_by
            grads['b_h'] = d_pre.sum(axis=0)
        grads[self.recurrent_weight] = g_rec
        grads['W_xh'] = d_pre.T @ net['x_tilde']

        x = cache.inputs.gate.x
        if self.forced_reset is None:
            d_zs = d_s * sigmoid_grad(s)
            grads['W_xs'] = (d_zs @ x)[None, :]
            if config.use_bias:
                grads['b_s'] = np.array([d_zs.sum()])
            d_x_extra = np.outer(d_zs, self.params['W_xs'][0])
        else:
            grads['W_xs'] = np.zeros_like(self.params['W_xs'])
            if config.use_bias:
                grads['b_s'] = np.zeros(1)
            d_x_extra = None
        return d_pre @ self.params['W_xh'], d_x_extra


class ElmanTagger(_ResetGateRnn):
    architecture = Architecture.ELMAN
    recurrent_weight = 'W_hh'

    def _recurrent_dim(self):
        return self.config.hidden_size


class JordanTagger(_ResetGateRnn):
    """Feeds the model's own previous output distribution back (no teacher forcing)."""

    architecture = Architecture.JORDAN
    recurrent_weight = 'W_yh'

    def _recurrent_dim(self):
        return self.num_tags


def _check_type(model, types, what):
    if not isinstance(model, types):
        raise TypeError(f"{what} expects {' or '.join(t.__name__ for t in types)}, "
                        f"got {type(model).__name__}")


def mlp_forward(model, sentence, mode="test", rng=None):
    _check_type(model, (MlpTagger,), "mlp_forward")
    return model.forward(sentence, mode, rng)[0]


def rnn_forward(model, sentence, mode="test", rng=None):
    _check_type(model, (ElmanTagger, JordanTagger), "rnn_forward")
    return model.forward(sentence, mode, rng)[0]


def backward_pass(model, sentence, gold=None, mode="train", rng=None, noise=None):
    """Gradients of the sentence NLL for every parameter of any tagger."""
    encoded = model.encode(sentence)
    if gold is not None:
        encoded = EncodedSentence(encoded.ids, np.asarray(gold, dtype=np.intp), encoded.sentence)
    _, grads, _ = model.loss_and_grads(encoded, mode, rng, noise)
    return grads
