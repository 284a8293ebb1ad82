"""
Dense numerics shared by every network: activations, initializers and
dropout masks.

Matrices and vectors are float64 numpy arrays; the random generator is a
``numpy.random.Generator``. Activations work along the last axis so they
accept a single vector or a (time, dim) stack of vectors.
"""

import numpy as np

Matrix = np.ndarray
Vector = np.ndarray
Rng = np.random.Generator

DTYPE = np.float64

# Multiplier on the 1/sqrt(fan_in) standard deviation.
INIT_SCALE = 0.1


def make_rng(seed):
    """Deterministic generator for a 64-bit seed."""
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def spawn_rngs(seed, count):
    """``count`` independent generators derived from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(int(seed)).spawn(count)]


def softmax(logits):
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=-1, keepdims=True)


def sigmoid(x):
    # exp(-log(1 + e^-x)) never overflows
    return np.exp(-np.logaddexp(0.0, -x))


def tanh(x):
    return np.tanh(x)


def sigmoid_grad(y):
    """Derivative of the logistic function given its output."""
    return y * (1.0 - y)


def tanh_grad(y):
    """Derivative of tanh given its output."""
    return 1.0 - y * y


ACTIVATIONS = {
    'tanh': (tanh, tanh_grad),
    'sigmoid': (sigmoid, sigmoid_grad),
}


def get_activation(name):
    if name not in ACTIVATIONS:
        raise ValueError(f"Unknown activation: {name}")
    return ACTIVATIONS[name]


def init_gaussian(rows, cols, fan_in, rng, scale=INIT_SCALE):
    """Entries drawn from N(0, sigma^2) with sigma = scale / sqrt(fan_in).

    ``cols=None`` returns a vector of length ``rows``. ``rng=None`` returns
    zeros of the same shape, for parameters that are loaded afterwards.
    """
    if rows < 1 or (cols is not None and cols < 1):
        raise ValueError(f"Zero dimension in {rows}x{cols} matrix")
    if fan_in < 1:
        raise ValueError(f"fan_in must be >= 1, got {fan_in}")
    shape = (rows,) if cols is None else (rows, cols)
    if rng is None:
        return init_zeros(*shape)
    sigma = scale / np.sqrt(fan_in)
    return rng.normal(0.0, sigma, size=shape).astype(DTYPE)


def init_orthogonal(rows, cols, rng):
    """Random matrix with orthonormal rows or columns, from the SVD of a Gaussian draw.

    For square output M.T @ M = I; otherwise the Gram matrix over the smaller
    dimension is the identity.
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"Zero dimension in {rows}x{cols} matrix")
    if rng is None:
        return init_zeros(rows, cols)
    a = rng.standard_normal((rows, cols))
    u, _, vt = np.linalg.svd(a, full_matrices=False)
    q = u if u.shape == (rows, cols) else vt
    return np.ascontiguousarray(q, dtype=DTYPE)


def init_zeros(*shape):
    return np.zeros(shape, dtype=DTYPE)


def dropout_mask(shape, drop_rate, rng):
    """0/1 mask; each entry is 0 independently with probability ``drop_rate``."""
    if not 0.0 <= drop_rate < 1.0:
        raise ValueError(f"drop_rate must be in [0, 1), got {drop_rate}")
    if drop_rate == 0.0:
        return np.ones(shape, dtype=DTYPE)
    return (rng.random(shape) >= drop_rate).astype(DTYPE)


def outer_sum(a, b):
    """Sum of outer products a[t] b[t]^T over any leading axes."""
    return a.reshape(-1, a.shape[-1]).T @ b.reshape(-1, b.shape[-1])


def nll_loss(probs, gold):
    """Mean negative log-likelihood of gold tag ids under per-token distributions."""
    gold = np.asarray(gold, dtype=np.intp)
    if probs.shape[0] != len(gold):
        raise ValueError(f"{probs.shape[0]} distributions for {len(gold)} gold tags")
    picked = probs[np.arange(len(gold)), gold]
    return float(-np.mean(np.log(np.maximum(picked, 1e-300))))
