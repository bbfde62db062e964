"""Brute-force ground truth for small instances.

Uses only function evaluations and scalar root finding along lines and
along the active bound, so it shares no eigen machinery with the solvers
it is compared against.
"""
import logging
import math
from typing import Optional

import numpy as np

from app import settings
from app.core.models import GtrsInstance, Quadratic
from app.custom_types import OracleResult
from app.exceptions import OracleInfeasible
from app.utils import log_handler

logger = logging.getLogger(__name__)
logger.addHandler(log_handler)

Segment = tuple[float, float]


def _line(q: Quadratic, x: np.ndarray, d: np.ndarray) -> tuple[float, float, float]:
    """Coefficients of t -> q(x + t*d) from three evaluations."""
    c0 = q.evaluate(x)
    plus = q.evaluate(x + d)
    minus = q.evaluate(x - d)
    return 0.5 * (plus + minus) - c0, 0.5 * (plus - minus), c0


def _real_roots(c2: float, c1: float, c0: float) -> list[float]:
    if c2 == 0.0:
        return [] if c1 == 0.0 else [-c0 / c1]
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < 0.0:
        return []
    root = math.sqrt(disc)
    return sorted([(-c1 - root) / (2.0 * c2), (-c1 + root) / (2.0 * c2)])


def _band_tolerance(alpha: float, beta: float) -> float:
    finite = [abs(v) for v in (alpha, beta) if math.isfinite(v)]
    return 1e-12 * (1.0 + sum(finite))


def _band_segments(
    h_line: tuple[float, float, float],
    alpha: float,
    beta: float,
    t_lo: float,
    t_hi: float,
) -> list[Segment]:
    c2, c1, c0 = h_line

    def inside(t: float) -> bool:
        return alpha <= c2 * t * t + c1 * t + c0 <= beta

    breaks = {t_lo, t_hi}
    for bound in (alpha, beta):
        if math.isfinite(bound):
            breaks.update(
                r for r in _real_roots(c2, c1, c0 - bound) if t_lo < r < t_hi
            )
    breaks = sorted(breaks)
    segments = [
        (left, right)
        for left, right in zip(breaks, breaks[1:])
        if inside(0.5 * (left + right))
    ]
    for t in breaks:
        if not any(left <= t <= right for left, right in segments):
            segments.append((t, t))
    return segments


def _box_limits(x: np.ndarray, d: np.ndarray, radius: float) -> tuple[float, float]:
    t_lo, t_hi = -math.inf, math.inf
    for xi, di in zip(x, d):
        if di == 0.0:
            continue
        a, b = (-radius - xi) / di, (radius - xi) / di
        t_lo = max(t_lo, min(a, b))
        t_hi = min(t_hi, max(a, b))
    return min(t_lo, 0.0), max(t_hi, 0.0)


def _segment_min(f_line: tuple[float, float, float], segments: list[Segment]) -> float:
    c2, c1, c0 = f_line
    best_t, best_value = 0.0, math.inf
    for left, right in segments:
        candidates = [left, right]
        if c2 > 0.0:
            vertex = -c1 / (2.0 * c2)
            if left < vertex < right:
                candidates.append(vertex)
        for t in candidates:
            value = c2 * t * t + c1 * t + c0
            if value < best_value or (value == best_value and abs(t) < abs(best_t)):
                best_t, best_value = t, value
    return best_t


def _gradient(q: Quadratic, x: np.ndarray) -> np.ndarray:
    """Exact for quadratics: the odd part of q along each axis."""
    return np.array([_line(q, x, e)[1] for e in np.eye(x.size)])


class _LineSearcher:
    def __init__(self, inst: GtrsInstance, radius: float) -> None:
        self.inst = inst
        self.radius = radius
        self.tol = _band_tolerance(inst.alpha, inst.beta)
        self.slide_step: Optional[float] = None

    def feasible(self, x: np.ndarray) -> bool:
        if np.max(np.abs(x)) > self.radius:
            return False
        return self.inst.in_band(self.inst.h.evaluate(x), self.tol)

    def segments(self, x: np.ndarray, d: np.ndarray) -> list[Segment]:
        t_lo, t_hi = _box_limits(x, d, self.radius)
        h_line = _line(self.inst.h, x, d)
        return _band_segments(h_line, self.inst.alpha, self.inst.beta, t_lo, t_hi)

    def restore(self, x: np.ndarray, rng: np.random.Generator) -> Optional[np.ndarray]:
        """Move an infeasible start onto the band along some line."""
        n = x.size
        for attempt in range(settings.ORACLE_RESTORE_ATTEMPTS):
            if attempt < n:
                d = np.zeros(n)
                d[attempt] = 1.0
            else:
                d = rng.standard_normal(n)
                d /= np.linalg.norm(d)
            for left, right in sorted(
                self.segments(x, d), key=lambda s: min(abs(s[0]), abs(s[1]))
            ):
                t = min(max(0.0, left), right)
                candidate = x + t * d
                if self.feasible(candidate):
                    return candidate
        return None

    def active_level(self, x: np.ndarray) -> Optional[float]:
        value = self.inst.h.evaluate(x)
        for bound in (self.inst.alpha, self.inst.beta):
            if math.isfinite(bound) and abs(value - bound) <= 1e-9 * (1.0 + abs(bound)):
                return bound
        return None

    def retract(
        self, y: np.ndarray, normal: np.ndarray, level: float
    ) -> Optional[np.ndarray]:
        """Back onto {h = level} along `normal`, nearest root first."""
        c2, c1, c0 = _line(self.inst.h, y, normal)
        roots = _real_roots(c2, c1, c0 - level)
        if not roots:
            return None
        candidate = y + min(roots, key=abs) * normal
        return candidate if self.feasible(candidate) else None

    def _curve_search(
        self,
        x: np.ndarray,
        value: float,
        tangent: np.ndarray,
        normal: np.ndarray,
        level: float,
    ) -> tuple[np.ndarray, float]:
        f = self.inst.f
        scale = 1.0 + float(np.max(np.abs(x)))

        def at(t: float) -> tuple[Optional[np.ndarray], float]:
            y = self.retract(x + t * tangent, normal, level)
            return (y, math.inf) if y is None else (y, f.evaluate(y))

        step = 1e-2 * scale
        if self.slide_step is not None:
            step = min(step, 4.0 * self.slide_step)
        best_t, best_x, best_value = 0.0, x, value
        while step > 1e-13 * scale and best_t == 0.0:
            for t in (step, -step):
                y, y_value = at(t)
                if y_value < best_value:
                    best_t, best_x, best_value = t, y, y_value
                    break
            step *= 0.5
        if best_t == 0.0:
            return x, value

        while True:
            y, y_value = at(2.0 * best_t)
            if y_value >= best_value:
                break
            best_t, best_x, best_value = 2.0 * best_t, y, y_value
        self.slide_step = abs(best_t)
        return best_x, best_value

    def slide(
        self, x: np.ndarray, value: float, rng: np.random.Generator
    ) -> tuple[np.ndarray, float]:
        """Curved moves along the active bound, where straight lines leave the band."""
        level = self.active_level(x)
        if level is None:
            return x, value
        directions = [-_gradient(self.inst.f, x), rng.standard_normal(x.size)]
        for d in directions:
            normal = _gradient(self.inst.h, x)
            norm2 = float(normal @ normal)
            if norm2 == 0.0:
                break
            tangent = d - (float(d @ normal) / norm2) * normal
            length = float(np.linalg.norm(tangent))
            if length <= 1e-12 * (1.0 + float(np.linalg.norm(d))):
                continue
            x, value = self._curve_search(x, value, tangent / length, normal, level)
        return x, value

    def descend(
        self,
        x: np.ndarray,
        rng: np.random.Generator,
        stop_below: Optional[float] = None,
    ) -> tuple[np.ndarray, float]:
        f = self.inst.f
        n = x.size
        value = f.evaluate(x)
        for _ in range(settings.ORACLE_MAX_SWEEPS):
            start_value = value
            directions = list(np.eye(n))
            for _ in range(n):
                d = rng.standard_normal(n)
                directions.append(d / np.linalg.norm(d))
            for d in directions:
                segments = self.segments(x, d)
                if not segments:
                    continue
                t = _segment_min(_line(f, x, d), segments)
                candidate = x + t * d
                candidate_value = f.evaluate(candidate)
                if candidate_value < value - 1e-15 * (1.0 + abs(value)) and self.feasible(
                    candidate
                ):
                    x, value = candidate, candidate_value
                    if stop_below is not None and value < stop_below:
                        return x, value
            x, value = self.slide(x, value, rng)
            if stop_below is not None and value < stop_below:
                return x, value
            if start_value - value <= 1e-12 * (1.0 + abs(value)):
                break
        return x, value


def _unbounded_pattern(values: list[float]) -> bool:
    """Drops across the radius ladder keep growing with the radius."""
    if len(values) < 3 or not all(math.isfinite(v) for v in values):
        return False
    first_drop = values[0] - values[1]
    second_drop = values[1] - values[2]
    if first_drop <= 1e-6 * (1.0 + abs(values[0])):
        return False
    return second_drop >= settings.UNBOUNDED_GROWTH * first_drop


def _multistart(
    inst: GtrsInstance,
    seed: int,
    budget: int,
    stop_below: Optional[float] = None,
) -> OracleResult:
    best_x: Optional[np.ndarray] = None
    best_value = math.inf
    radius_values: list[float] = []
    radius_points: list[np.ndarray] = []

    for r_index, radius in enumerate(settings.ORACLE_RADII):
        searcher = _LineSearcher(inst, radius)
        level_best_x, level_best = best_x, best_value
        starts: list[tuple[int, Optional[np.ndarray]]] = [
            (start, None) for start in range(budget)
        ]
        if best_x is not None:
            starts.insert(0, (budget, best_x))

        for start_index, warm in starts:
            rng = np.random.default_rng([seed, r_index, start_index])
            x = warm if warm is not None else rng.uniform(-radius, radius, inst.n)
            if not searcher.feasible(x):
                x = searcher.restore(x, rng)
                if x is None:
                    continue
            x, value = searcher.descend(x, rng, stop_below)
            if value < level_best:
                level_best_x, level_best = x, value
            if stop_below is not None and value < stop_below:
                return OracleResult(value, x, False, radius_values, radius_points)

        if level_best_x is None:
            continue
        best_x, best_value = level_best_x, level_best
        radius_values.append(best_value)
        radius_points.append(best_x)

    if best_x is None:
        raise OracleInfeasible(f"no feasible start found with budget {budget}")
    suspected = _unbounded_pattern(radius_values)
    return OracleResult(best_value, best_x, suspected, radius_values, radius_points)


def oracle_min_gtrs(inst: GtrsInstance, seed: int = 0, budget: int = 16) -> OracleResult:
    """Multistart line-search descent with box radii 10, 100, 1000."""
    result = _multistart(inst, seed, budget)
    logger.info(
        f"oracle best {result.best_value}, per radius {result.radius_values}, "
        f"unbounded suspected {result.unbounded_suspected}"
    )
    return result


def oracle_system_search(
    f: Quadratic,
    h: Quadratic,
    alpha: float,
    beta: float,
    seed: int = 0,
    budget: int = 16,
) -> Optional[np.ndarray]:
    """Some x with f(x) < 0 and alpha <= h(x) <= beta, or None."""
    inst = GtrsInstance(f, h, alpha, beta)
    level = -settings.ORACLE_NEGATIVE_LEVEL
    try:
        result = _multistart(inst, seed, budget, stop_below=level)
    except OracleInfeasible:
        return None
    if result.best_value < level:
        return result.best_x
    return None
