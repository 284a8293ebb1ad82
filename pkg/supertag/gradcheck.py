"""
Finite-difference check of analytic gradients.

The oracle only evaluates the model's loss: each parameter coordinate is
nudged by +h and -h with the dropout masks of the analytic pass replayed,
and the central difference is compared with the analytic gradient using

    rel = |a - b| / max(|a|, |b|, 1e-8)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import GradientCheckError
from .networks import EncodedSentence

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-5
DEFAULT_THRESHOLD = 1e-4
REL_FLOOR = 1e-8


def relative_error(a, b, floor=REL_FLOOR):
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)


def finite_diff_grad(loss_fn, array, index, h=DEFAULT_STEP):
    """Central difference of ``loss_fn()`` with respect to ``array[index]``.

    ``array`` is perturbed in place and restored afterwards.
    """
    original = array[index]
    try:
        array[index] = original + h
        plus = loss_fn()
        array[index] = original - h
        minus = loss_fn()
    finally:
        array[index] = original
    if not (np.isfinite(plus) and np.isfinite(minus)):
        raise GradientCheckError(f"non-finite loss at coordinate {index}: "
                                 f"L(+h)={plus}, L(-h)={minus}")
    return (plus - minus) / (2.0 * h)


def _encode(model, sentence, gold=None):
    encoded = model.encode(sentence)
    if gold is not None:
        encoded = EncodedSentence(encoded.ids, np.asarray(gold, dtype=np.intp), encoded.sentence)
    return encoded


def finite_diff_model_grad(model, sentence, gold, coordinate, h=DEFAULT_STEP, mode="test",
                           noise=None):
    """Central difference of the sentence loss for one ``(block name, index)`` coordinate.

    ``gold`` overrides the sentence's own tags when given. In train mode pass
    the ``noise`` returned by ``loss_and_grads`` so both sides see its masks.
    """
    name, index = coordinate
    encoded = _encode(model, sentence, gold)
    return finite_diff_grad(lambda: model.loss(encoded, mode, noise=noise),
                            model.params[name], index, h)


@dataclass
class BlockReport:
    name: str
    max_rel_error: float
    argmax: Tuple[int, ...]
    analytic: float
    numeric: float
    checked: int
    passed: bool

    def line(self):
        status = "ok" if self.passed else "FAIL"
        return (f"{self.name:<16} {status:<4} max_rel={self.max_rel_error:.3e} "
                f"at {self.argmax} (analytic={self.analytic:.6e}, numeric={self.numeric:.6e}, "
                f"coords={self.checked})")


@dataclass
class GradReport:
    threshold: float
    blocks: Dict[str, BlockReport] = field(default_factory=dict)

    @property
    def passed(self):
        return all(block.passed for block in self.blocks.values())

    @property
    def failed_blocks(self):
        return [name for name, block in self.blocks.items() if not block.passed]

    @property
    def max_rel_error(self):
        return max((b.max_rel_error for b in self.blocks.values()), default=0.0)

    def lines(self):
        lines = [block.line() for block in self.blocks.values()]
        lines.append(f"{'PASS' if self.passed else 'FAIL'} threshold={self.threshold:g} "
                     f"max_rel={self.max_rel_error:.3e}")
        return lines


def _dense(grad):
    return grad.to_dense() if hasattr(grad, 'to_dense') else np.asarray(grad)


def _coordinates(shape, count, rng):
    size = int(np.prod(shape))
    if count >= size:
        flat = np.arange(size)
    else:
        flat = np.sort(rng.choice(size, size=count, replace=False))
    return [np.unravel_index(i, shape) for i in flat]


def compare_grads(model, sentence, gold=None, threshold=DEFAULT_THRESHOLD, h=DEFAULT_STEP,
                  mode="train", rng=None, max_coords=2000, sample_rng=None,
                  analytic: Optional[dict] = None, floor=REL_FLOOR):
    """Check every parameter block of ``model`` on one sentence.

    Models with at most ``max_coords`` parameters are swept exhaustively;
    larger ones get a seeded sample spread over blocks by size. ``analytic``
    replaces the model's own gradients (for fault injection). ``floor`` is the
    smallest denominator of the relative error.
    """
    encoded = _encode(model, sentence, gold)
    if rng is None:
        rng = np.random.default_rng(0)
    sample_rng = sample_rng or np.random.default_rng(1)

    _, grads, noise = model.loss_and_grads(encoded, mode, rng)
    if analytic is not None:
        grads = {**grads, **analytic}

    def loss_fn():
        return model.loss(encoded, mode, noise=noise)

    total = model.parameter_count()
    report = GradReport(threshold)
    for name, value in model.params.items():
        dense = _dense(grads[name])
        if total <= max_coords:
            count = value.size
        else:
            count = max(1, round(max_coords * value.size / total))
        worst = None
        coords = _coordinates(value.shape, count, sample_rng)
        for index in coords:
            numeric = finite_diff_grad(loss_fn, value, index, h)
            err = float(relative_error(dense[index], numeric, floor))
            if worst is None or err > worst[0]:
                worst = (err, tuple(int(i) for i in index), float(dense[index]), numeric)
        err, index, a, b = worst
        report.blocks[name] = BlockReport(name, err, index, a, b, len(coords), err <= threshold)
    for line in report.lines():
        logger.debug(line)
    return report
