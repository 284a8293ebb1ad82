"""
LSTM blocks and the forward / stacked bidirectional LSTM taggers.

Block weights are stacked in [candidate, input, forget, output] order:

    z = Wx x_t + Wh h_{t-1} + b
    c~ = tanh(z_c)   i, f, o = sigmoid(z_i), sigmoid(z_f), sigmoid(z_o)
    c_t = f * c_{t-1} + i * c~
    h_t = o * tanh(c_t)

States start at zero for every sentence. Layer l > 1 of the bidirectional
stack reads the concatenated [forward; backward] outputs of layer l - 1.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .networks import Tagger
from .numerics import get_activation, init_gaussian, init_orthogonal, sigmoid, sigmoid_grad, tanh, tanh_grad
from .options import Architecture

FORGET_BIAS = 1.0


@dataclass
class LstmLayer:
    Wx: np.ndarray                  # (4H, input)
    Wh: np.ndarray                  # (4H, H)
    b: Optional[np.ndarray] = None  # (4H,)
    candidate: str = "tanh"

    @property
    def hidden_size(self):
        return self.Wh.shape[1]

    @property
    def input_size(self):
        return self.Wx.shape[1]

    @classmethod
    def from_params(cls, params, prefix, candidate="tanh"):
        return cls(params[prefix + 'Wx'], params[prefix + 'Wh'], params.get(prefix + 'b'), candidate)


def init_lstm_params(input_size, hidden_size, rng, scale=0.1, use_bias=True):
    """Gaussian input weights, orthogonal recurrent blocks, forget bias 1."""
    h = hidden_size
    params = {
        'Wx': init_gaussian(4 * h, input_size, input_size, rng, scale),
        'Wh': np.vstack([init_orthogonal(h, h, rng) for _ in range(4)]),
    }
    if use_bias:
        b = np.zeros(4 * h)
        b[2 * h:3 * h] = FORGET_BIAS
        params['b'] = b
    return params


@dataclass
class StepCache:
    x: np.ndarray
    h_prev: np.ndarray
    c_prev: np.ndarray
    cand: np.ndarray
    i: np.ndarray
    f: np.ndarray
    o: np.ndarray
    c: np.ndarray
    tanh_c: np.ndarray


def _step(layer, x, h_prev, c_prev):
    h = layer.hidden_size
    z = layer.Wx @ x + layer.Wh @ h_prev
    if layer.b is not None:
        z = z + layer.b
    activation, _ = get_activation(layer.candidate)
    cand = activation(z[:h])
    i, f, o = sigmoid(z[h:2 * h]), sigmoid(z[2 * h:3 * h]), sigmoid(z[3 * h:])
    c = f * c_prev + i * cand
    tanh_c = tanh(c)
    return o * tanh_c, c, StepCache(x, h_prev, c_prev, cand, i, f, o, c, tanh_c)


def lstm_step(layer, x, h_prev, c_prev):
    """One block update; returns (h_t, c_t)."""
    h, c, _ = _step(layer, x, h_prev, c_prev)
    return h, c


def run_layer(layer, inputs, reverse=False):
    """Scan a (T, input) sequence; returns (T, H) outputs in sentence order and step caches."""
    n, h_dim = inputs.shape[0], layer.hidden_size
    outputs = np.empty((n, h_dim))
    caches = [None] * n
    h, c = np.zeros(h_dim), np.zeros(h_dim)
    order = range(n - 1, -1, -1) if reverse else range(n)
    for t in order:
        h, c, caches[t] = _step(layer, inputs[t], h, c)
        outputs[t] = h
    return outputs, caches


def layer_backward(layer, caches, d_outputs, reverse=False):
    """BPTT through one scanned layer; returns (grad on inputs, {'Wx','Wh'[,'b']})."""
    h_dim = layer.hidden_size
    _, candidate_grad = get_activation(layer.candidate)
    g_wx = np.zeros_like(layer.Wx)
    g_wh = np.zeros_like(layer.Wh)
    g_b = np.zeros(4 * h_dim)
    d_inputs = np.zeros((len(caches), layer.input_size))
    d_h_next = np.zeros(h_dim)
    d_c_next = np.zeros(h_dim)
    n = len(caches)
    order = range(n) if reverse else range(n - 1, -1, -1)
    for t in order:
        k = caches[t]
        d_h = d_outputs[t] + d_h_next
        d_o = d_h * k.tanh_c
        d_c = d_h * k.o * tanh_grad(k.tanh_c) + d_c_next
        d_z = np.concatenate([
            d_c * k.i * candidate_grad(k.cand),
            d_c * k.cand * sigmoid_grad(k.i),
            d_c * k.c_prev * sigmoid_grad(k.f),
            d_o * sigmoid_grad(k.o),
        ])
        g_wx += np.outer(d_z, k.x)
        g_wh += np.outer(d_z, k.h_prev)
        g_b += d_z
        d_inputs[t] = layer.Wx.T @ d_z
        d_h_next = layer.Wh.T @ d_z
        d_c_next = d_c * k.f
    grads = {'Wx': g_wx, 'Wh': g_wh}
    if layer.b is not None:
        grads['b'] = g_b
    return d_inputs, grads


class LstmTagger(Tagger):
    """Forward LSTM tagger; ``depth`` layers stacked on the gated window input."""

    architecture = Architecture.LSTM
    directions = ('fwd',)

    @staticmethod
    def prefix(level, direction):
        return f'lstm{level}.{direction}.'

    def layer(self, level, direction):
        return LstmLayer.from_params(self.params, self.prefix(level, direction),
                                     self.config.candidate_activation)

    def _init_network(self, rng):
        config = self.config
        h = config.hidden_size
        width = h * len(self.directions)
        for level in range(config.depth):
            input_size = self.input_dim if level == 0 else width
            for direction in self.directions:
                block = init_lstm_params(input_size, h, rng, config.init_scale, config.use_bias)
                for name, value in block.items():
                    self.params[self.prefix(level, direction) + name] = value
        self._init_output(width, rng)

    def _network_forward(self, x_tilde, inputs, mode, noise, rng):
        levels = []
        layer_input = x_tilde
        for level in range(self.config.depth):
            outputs, caches = {}, {}
            for direction in self.directions:
                outputs[direction], caches[direction] = run_layer(
                    self.layer(level, direction), layer_input, reverse=(direction == 'bwd'))
            joined = np.concatenate([outputs[d] for d in self.directions], axis=1)
            scale = self._drop_scale(f'hidden{level}', joined.shape, self.config.hidden_drop_rate,
                                     mode, noise, rng)
            levels.append({'outputs': outputs, 'caches': caches, 'scale': scale})
            layer_input = joined * scale
        probs = np.empty((x_tilde.shape[0], self.num_tags))
        for t in range(x_tilde.shape[0]):
            probs[t] = self._emit(layer_input[t])
        return probs, {'levels': levels, 'top': layer_input}

    def _network_backward(self, cache, d_logits, grads):
        net = cache.network
        h = self.config.hidden_size
        d_input = self._output_backward(d_logits, net['top'], grads)
        for level in reversed(range(self.config.depth)):
            record = net['levels'][level]
            d_joined = d_input * record['scale']
            d_input = 0.0
            for k, direction in enumerate(self.directions):
                d_x, layer_grads = layer_backward(
                    self.layer(level, direction), record['caches'][direction],
                    d_joined[:, k * h:(k + 1) * h], reverse=(direction == 'bwd'))
                for name, value in layer_grads.items():
                    grads[self.prefix(level, direction) + name] = value
                d_input = d_input + d_x
        return d_input, None

    def hidden_states(self, sentence, level=-1):
        """Test-mode outputs of one layer per direction, in sentence order."""
        _, cache = self.forward(sentence, "test")
        return cache.network['levels'][level]['outputs']


class BiLstmTagger(LstmTagger):
    architecture = Architecture.BILSTM
    directions = ('fwd', 'bwd')


def bilstm_stack_forward(model, sentence, mode="test", rng=None):
    if not isinstance(model, BiLstmTagger):
        raise TypeError(f"bilstm_stack_forward expects BiLstmTagger, got {type(model).__name__}")
    return model.forward(sentence, mode, rng)[0]
