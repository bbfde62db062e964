import logging
import math
from typing import Optional

import numpy as np

from app import settings
from app.core.linalg import eigh, pinv_apply
from app.core.models import GtrsInstance, QuadRange, Quadratic
from app.custom_types import FeasibilityCheck, QuadInf, RicqWitness, SlaterCheck
from app.exceptions import PreconditionViolation
from app.utils import log_handler, pick_target, psd_tolerance, scalar_quadratic_roots

logger = logging.getLogger(__name__)
logger.addHandler(log_handler)

MAX_DOUBLINGS = 200


def quad_inf(q: Quadratic) -> QuadInf:
    """Global infimum of q over R^n.

    When the infimum is -inf the result carries a direction along which q
    decreases without bound from any base point.
    """
    spectrum = eigh(q.M)
    if spectrum.min_eig < -psd_tolerance(q.M.full, settings.EPS_PSD):
        return QuadInf(value=-math.inf, attained=False, direction=spectrum.basis[:, 0])

    pinv = pinv_apply(q.M, q.m, spectrum=spectrum)
    if not pinv.in_range:
        residual = q.m - q.M.full @ pinv.solution
        direction = -residual / np.linalg.norm(residual)
        return QuadInf(value=-math.inf, attained=False, direction=direction)

    argmin = -pinv.solution
    return QuadInf(value=q.evaluate(argmin), attained=True, argmin=argmin)


def _range_info(q: Quadratic) -> tuple[QuadRange, QuadInf, QuadInf]:
    low = quad_inf(q)
    high = quad_inf(-q)
    sup = -high.value
    inf = low.value
    if low.attained and high.attained and inf > sup:
        # nearly constant data; both extremes collapse to one level
        inf = sup = 0.5 * (inf + sup)
    rng = QuadRange(
        inf=inf,
        sup=sup,
        inf_attained=low.attained,
        sup_attained=high.attained,
        argmin=low.argmin,
        argmax=high.argmin,
    )
    return rng, low, high


def quad_range(q: Quadratic) -> QuadRange:
    return _range_info(q)[0]


def _walk_below(q: Quadratic, target: float, low: QuadInf) -> np.ndarray:
    if low.attained:
        return low.argmin
    base = np.zeros(q.n)
    if q.evaluate(base) <= target:
        return base
    step = 1.0
    for _ in range(MAX_DOUBLINGS):
        x = base + step * low.direction
        if q.evaluate(x) <= target:
            return x
        step *= 2.0
    raise PreconditionViolation(
        condition="level reachable", detail=f"could not reach {target}"
    )


def level_point(
    q: Quadratic,
    target: float,
    low: Optional[QuadInf] = None,
    high: Optional[QuadInf] = None,
) -> np.ndarray:
    """A point x with q(x) = target, for target inside the range of q."""
    if low is None or high is None:
        _, low, high = _range_info(q)
    x_lo = _walk_below(q, target, low)
    x_hi = _walk_below(-q, -target, high)
    q_lo = q.evaluate(x_lo)
    if q_lo == target:
        return x_lo
    if q.evaluate(x_hi) == target:
        return x_hi

    step = x_hi - x_lo
    a2 = float(step @ q.M.full @ step)
    a1 = 2.0 * float((q.M.full @ x_lo + q.m) @ step)
    roots = [
        s
        for s in scalar_quadratic_roots(a2, a1, q_lo - target)
        if -1e-12 <= s <= 1.0 + 1e-12
    ]
    if roots:
        return x_lo + min(max(roots[0], 0.0), 1.0) * step

    inside, outside = 0.0, 1.0
    for _ in range(settings.BISECTION_MAX_ITER):
        mid = 0.5 * (inside + outside)
        if q.evaluate(x_lo + mid * step) <= target:
            inside = mid
        else:
            outside = mid
    return x_lo + inside * step


def negative_point(q: Quadratic, level: float = 0.0) -> Optional[np.ndarray]:
    """Some x with q(x) < level, or None when q >= level everywhere."""
    low = quad_inf(q)
    if low.attained:
        return low.argmin if q.evaluate(low.argmin) < level else None
    base = np.zeros(q.n)
    step = 1.0
    for _ in range(MAX_DOUBLINGS):
        x = base + step * low.direction
        if q.evaluate(x) < level:
            return x
        step *= 2.0
    return None


def _slater_margin(alpha: float, beta: float) -> float:
    if math.isfinite(alpha) and math.isfinite(beta):
        return settings.SLATER_MARGIN * (beta - alpha)
    finite = [abs(v) for v in (alpha, beta) if math.isfinite(v)]
    return settings.SLATER_MARGIN * (1.0 + (finite[0] if finite else 0.0))


def is_boundary_ambiguous(inst: GtrsInstance, rng: QuadRange) -> bool:
    """True when an extreme of h sits inside the strictness band of a bound."""
    margin = _slater_margin(inst.alpha, inst.beta)
    for extreme in (rng.inf, rng.sup):
        for bound in (inst.alpha, inst.beta):
            if math.isfinite(extreme) and math.isfinite(bound):
                if 0 < abs(extreme - bound) < margin:
                    return True
    return False


def check_interval_slater(inst: GtrsInstance) -> SlaterCheck:
    """Is there x with alpha < h(x) < beta?"""
    alpha, beta = inst.alpha, inst.beta
    if not alpha < beta:
        raise PreconditionViolation(
            condition="alpha < beta", detail=f"alpha={alpha}, beta={beta}"
        )
    margin = _slater_margin(alpha, beta)
    h = inst.h

    if h.is_constant(settings.EPS_ZERO):
        d = h.k
        holds = alpha < d < beta
        ambiguous = holds and min(d - alpha, beta - d) < margin
        witness = np.zeros(inst.n) if holds else None
        return SlaterCheck(holds=holds, witness=witness, boundary_ambiguous=ambiguous)

    rng, low, high = _range_info(h)
    ambiguous = is_boundary_ambiguous(inst, rng)
    if not (rng.inf < beta and rng.sup > alpha):
        return SlaterCheck(holds=False, boundary_ambiguous=ambiguous)

    target = pick_target(max(alpha, rng.inf), min(beta, rng.sup))
    witness = level_point(h, target, low, high)
    value = h.evaluate(witness)
    clearance = min(value - alpha, beta - value)
    if clearance < margin:
        logger.warning(f"Slater witness clearance {clearance} below margin {margin}")
        ambiguous = True
    return SlaterCheck(holds=True, witness=witness, boundary_ambiguous=ambiguous)


def feasibility_tolerance(inst: GtrsInstance) -> float:
    finite = [abs(v) for v in (inst.alpha, inst.beta) if math.isfinite(v)]
    return settings.FEASIBILITY_TOL * (1.0 + max(finite, default=0.0))


def check_feasible(inst: GtrsInstance) -> FeasibilityCheck:
    """Does [alpha, beta] meet the range of h? Returns a feasible point if so."""
    rng, low, high = _range_info(inst.h)
    lower = max(inst.alpha, rng.inf)
    upper = min(inst.beta, rng.sup)
    tol = feasibility_tolerance(inst)

    if lower <= upper:
        point = level_point(inst.h, pick_target(lower, upper), low, high)
        return FeasibilityCheck(feasible=True, point=point)
    if lower <= upper + tol:
        if rng.inf_attained and rng.inf > inst.beta:
            return FeasibilityCheck(feasible=True, point=rng.argmin)
        if rng.sup_attained and rng.sup < inst.alpha:
            return FeasibilityCheck(feasible=True, point=rng.argmax)
    logger.info(f"band [{inst.alpha}, {inst.beta}] misses range of h")
    return FeasibilityCheck(feasible=False)


def lifted_constraint_value(inst: GtrsInstance, x_hat: np.ndarray, epsilon: float) -> float:
    """B . X(eps) + 2 b'x + d for X(eps) = x x' + eps*I."""
    lifted = np.outer(x_hat, x_hat) + epsilon * np.eye(inst.n)
    return float(np.sum(inst.B * lifted) + 2.0 * inst.b @ x_hat + inst.d)


def ricq_witness(inst: GtrsInstance) -> RicqWitness:
    """Relative interior constraint qualification from a Slater witness."""
    slater = check_interval_slater(inst)
    if not slater.holds:
        return RicqWitness(holds=False)

    x_hat = slater.witness
    h_hat = inst.h.evaluate(x_hat)
    trace = inst.h.M.trace()
    for exponent in range(settings.RICQ_MAX_EXPONENT + 1):
        epsilon = 2.0**-exponent
        if inst.alpha < trace * epsilon + h_hat < inst.beta:
            return RicqWitness(holds=True, x_hat=x_hat, epsilon=epsilon)
    logger.error(f"no dyadic epsilon found for h(x_hat)={h_hat}, trace={trace}")
    return RicqWitness(holds=False)
