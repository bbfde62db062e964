import logging
import math
from typing import Iterable

import numpy as np

log_handler = logging.StreamHandler()
log_handler.setFormatter(
    logging.Formatter(
        "%(asctime)s - [%(levelname)s] - <%(funcName)s> : %(message)s"
    )
)


def norm_inf(matrix: np.ndarray) -> float:
    """Max absolute row sum; 0 for empty arrays."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(matrix), axis=1)))


def vec_norm_inf(vector: np.ndarray) -> float:
    vector = np.asarray(vector, dtype=float)
    if vector.size == 0:
        return 0.0
    return float(np.max(np.abs(vector)))


def psd_tolerance(matrix: np.ndarray, eps: float) -> float:
    return eps * (1.0 + norm_inf(matrix))


def scalar_quadratic_roots(a2: float, a1: float, a0: float) -> list[float]:
    """Real roots of a2*t^2 + a1*t + a0 = 0, ascending.

    Returns an empty list for the degenerate equation 0 = a0 as well.
    """
    scale = max(abs(a2), abs(a1), abs(a0), 1e-300)
    if abs(a2) <= 1e-15 * scale:
        if abs(a1) <= 1e-15 * scale:
            return []
        return [-a0 / a1]
    disc = a1 * a1 - 4.0 * a2 * a0
    if disc < 0:
        if disc > -1e-14 * a1 * a1:
            disc = 0.0
        else:
            return []
    sq = math.sqrt(disc)
    # cancellation-free form
    q = -0.5 * (a1 + math.copysign(sq, a1))
    if q == 0.0:
        return [0.0]
    roots = sorted({q / a2, a0 / q})
    return roots


def pick_target(lo: float, hi: float) -> float:
    """Representative value of the interval [lo, hi] (possibly unbounded)."""
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    if math.isfinite(hi):
        return hi - max(1.0, abs(hi))
    if math.isfinite(lo):
        return lo + max(1.0, abs(lo))
    return 0.0


def format_float(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(float(value))


def format_vector(values: Iterable[float]) -> str:
    return "[" + ", ".join(format_float(v) for v in values) + "]"
