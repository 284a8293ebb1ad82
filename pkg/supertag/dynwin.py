"""
Dynamic-window filter gates.

A gate network reads the raw window x and emits logistic gates r. The gated
window x~ keeps the slots (or dimensions) the gates let through:

    scalar, two_layer   x~ = [r_1 f_1; ...; r_S f_S]     (dim I)
    elementwise         x~ = r * x                        (dim I)
    average             x~ = sum_k r_k f_k                (dim F)

Dropout on the gates zeroes whole window slots, i.e. drops words. Every
function accepts a single window (I,) or a (T, I) stack.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError
from .numerics import dropout_mask, init_gaussian, outer_sum, sigmoid, sigmoid_grad
from .options import GateVariant, get_gate_variant_properties

__all__ = [
    "GateVariant", "GateParams", "GateCache", "gate_output_dim", "gated_dim",
    "init_gate_params", "gate_forward", "apply_gates", "gate_dropout", "gate_backward",
]


def is_slot_valued(variant):
    return get_gate_variant_properties(variant)['slot_valued']


def gate_output_dim(variant, slots, token_dim):
    return slots * token_dim if variant is GateVariant.ELEMENTWISE else slots


def gated_dim(variant, slots, token_dim):
    """Dimension of x~ fed to the network."""
    return token_dim if variant is GateVariant.WEIGHTED_AVERAGE else slots * token_dim


@dataclass
class GateParams:
    W_xr: Optional[np.ndarray] = None
    W_xu: Optional[np.ndarray] = None
    W_ur: Optional[np.ndarray] = None

    def as_dict(self):
        return {name: value for name, value in vars(self).items() if value is not None}

    @classmethod
    def from_dict(cls, params, prefix=""):
        return cls(**{name: params[prefix + name]
                      for name in ("W_xr", "W_xu", "W_ur") if prefix + name in params})

    def check(self, variant, slots, token_dim):
        window_dim = slots * token_dim
        out = gate_output_dim(variant, slots, token_dim)
        if variant is GateVariant.TWO_LAYER:
            if self.W_xu is None or self.W_ur is None:
                raise DimensionError("two-layer gates need W_xu and W_ur")
            hidden = self.W_xu.shape[0]
            expected = {"W_xu": (hidden, window_dim), "W_ur": (out, hidden)}
        else:
            expected = {"W_xr": (out, window_dim)}
        for name, shape in expected.items():
            actual = getattr(self, name).shape
            if actual != shape:
                raise DimensionError(f"gate {name} has shape {actual}, expected {shape}")


def init_gate_params(variant, slots, token_dim, rng, two_layer_hidden=64, scale=0.1):
    window_dim = slots * token_dim
    out = gate_output_dim(variant, slots, token_dim)
    if variant is GateVariant.TWO_LAYER:
        params = GateParams(
            W_xr=None,
            W_xu=init_gaussian(two_layer_hidden, window_dim, window_dim, rng, scale),
            W_ur=init_gaussian(out, two_layer_hidden, two_layer_hidden, rng, scale),
        )
    else:
        params = GateParams(W_xr=init_gaussian(out, window_dim, window_dim, rng, scale))
    params.check(variant, slots, token_dim)
    return params


def gate_forward(params, variant, x):
    """Logistic gates for window(s) x; every entry lies in (0, 1)."""
    if variant is GateVariant.TWO_LAYER:
        u = sigmoid(x @ params.W_xu.T)
        return sigmoid(u @ params.W_ur.T)
    return sigmoid(x @ params.W_xr.T)


def _slots(x, slots):
    return x.reshape(x.shape[:-1] + (slots, x.shape[-1] // slots))


def apply_gates(x, r, variant):
    if variant is GateVariant.ELEMENTWISE:
        return r * x
    slots = r.shape[-1]
    gated = r[..., None] * _slots(x, slots)
    if variant is GateVariant.WEIGHTED_AVERAGE:
        return gated.sum(axis=-2)
    return gated.reshape(x.shape)


def dropout_scale(shape, drop_rate, rng, mode, mask=None):
    """Multiplier standing in for dropout: a 0/1 mask in train mode, 1-p in test mode."""
    if mode == "test":
        return 1.0 - drop_rate
    if mode != "train":
        raise ValueError(f"mode must be 'train' or 'test', got {mode!r}")
    if mask is not None:
        return mask
    return dropout_mask(shape, drop_rate, rng)


def gate_dropout(r, drop_rate, rng, mode, mask=None):
    """Word-level dropout on the gates; test mode scales by 1 - drop_rate instead."""
    return r * dropout_scale(r.shape, drop_rate, rng, mode, mask)


@dataclass
class GateCache:
    x: np.ndarray             # gate input window(s)
    r: np.ndarray             # gates before dropout
    scale: object = 1.0       # dropout mask or test-time factor
    learned: bool = True      # False when r is a constant


def gate_backward(params, variant, cache, upstream, detach=False):
    """Gradients of x -> x~ for the gate parameters and for x.

    x reaches x~ both directly and through the gates; ``detach`` drops the
    gate-path term from the input gradient (the parameter gradient is kept).
    Returns ``(GateParams of gradients or None, grad_x)``.
    """
    x, r, scale = cache.x, cache.r, cache.scale
    r_tilde = r * scale
    if variant is GateVariant.ELEMENTWISE:
        grad_x = r_tilde * upstream
        d_r_tilde = upstream * x
    else:
        slots = r.shape[-1]
        xs = _slots(x, slots)
        if variant is GateVariant.WEIGHTED_AVERAGE:
            g = np.broadcast_to(upstream[..., None, :], xs.shape)
        else:
            g = _slots(upstream, slots)
        grad_x = (r_tilde[..., None] * g).reshape(x.shape)
        d_r_tilde = (g * xs).sum(axis=-1)
    if not cache.learned or params is None:
        return None, grad_x

    dz = d_r_tilde * scale * sigmoid_grad(r)
    if variant is GateVariant.TWO_LAYER:
        u = sigmoid(x @ params.W_xu.T)
        du = dz @ params.W_ur
        dzu = du * sigmoid_grad(u)
        grads = GateParams(W_xr=None, W_xu=outer_sum(dzu, x), W_ur=outer_sum(dz, u))
        gate_path = dzu @ params.W_xu
    else:
        grads = GateParams(W_xr=outer_sum(dz, x))
        gate_path = dz @ params.W_xr
    if not detach:
        grad_x = grad_x + gate_path
    return grads, grad_x
