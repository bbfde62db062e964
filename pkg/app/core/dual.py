import logging
import math

import numpy as np

from app import settings
from app.core.linalg import (
    affine_family,
    bisect_boundary,
    eigh,
    maximize_concave,
    maximize_min_eig_affine,
    pinv_apply,
)
from app.core.models import DualResult, DualStatus, GtrsInstance, PsdInterval
from app.utils import log_handler, norm_inf, psd_tolerance

logger = logging.getLogger(__name__)
logger.addHandler(log_handler)

SEMIDEFINITE_EPS = 1e-14


def pencil(inst: GtrsInstance, mu: float) -> tuple[np.ndarray, np.ndarray]:
    """Leading block A + mu*B and linear part a + mu*b of the Lagrangian."""
    return inst.A + mu * inst.B, inst.a + mu * inst.b


def bound_constant(inst: GtrsInstance, mu: float) -> float:
    """c + mu*d - mu_plus*beta + mu_minus*alpha; -inf when an infinite
    bound carries a nonzero multiplier."""
    constant = inst.c + mu * inst.d
    if mu > 0:
        if math.isinf(inst.beta):
            return -math.inf
        constant -= mu * inst.beta
    elif mu < 0:
        if math.isinf(inst.alpha):
            return -math.inf
        constant -= mu * inst.alpha
    return constant


def lagrangian_block(inst: GtrsInstance, mu: float, level: float = 0.0) -> np.ndarray:
    """[[A + mu*B, a + mu*b], [., bound_constant - level]]."""
    P, q = pencil(inst, mu)
    n = inst.n
    block = np.empty((n + 1, n + 1))
    block[:n, :n] = P
    block[:n, n] = q
    block[n, :n] = q
    block[n, n] = bound_constant(inst, mu) - level
    return block


def multiplier_domain(inst: GtrsInstance) -> tuple[float, float]:
    """Multipliers that put no weight on an infinite bound."""
    lo = 0.0 if inst.alpha == -math.inf else -math.inf
    hi = 0.0 if inst.beta == math.inf else math.inf
    return lo, hi


def _is_semidefinite(M: np.ndarray, sign: float) -> bool:
    spectrum = eigh(sign * M)
    return spectrum.min_eig >= -SEMIDEFINITE_EPS * (1.0 + norm_inf(M))


def _expand_until_outside(predicate, start: float, direction: float) -> tuple[float, float] | None:
    """Doubling steps from `start`; returns (last inside, first outside) or
    None when the cap is reached while still inside."""
    inside = start
    step = max(1.0, abs(start))
    while True:
        trial = start + direction * step
        if abs(trial) >= settings.MU_CAP:
            trial = math.copysign(settings.MU_CAP, direction)
            if predicate(trial):
                return None
            return inside, trial
        if not predicate(trial):
            return inside, trial
        inside = trial
        step *= 2.0


def psd_interval(A: np.ndarray, B: np.ndarray) -> PsdInterval:
    """{mu : lambda_min(A + mu*B) >= -EPS_PSD * (1 + ||A + mu*B||)}.

    Endpoints are located by bisection on the sign of lambda_min, so a
    returned endpoint pencil is PSD up to rounding and singular in the hard
    case.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    peak = maximize_min_eig_affine(A, B)
    lambda_min = affine_family(A, B)
    if peak.min_eig_best < -psd_tolerance(A + peak.mu_best * B, settings.EPS_PSD):
        logger.info(f"pencil never PSD, best lambda_min {peak.min_eig_best}")
        return PsdInterval.empty()

    threshold = min(0.0, peak.min_eig_best)

    def predicate(mu: float) -> bool:
        return lambda_min(mu) >= threshold

    capped = False
    if _is_semidefinite(B, 1.0):
        hi = math.inf
    else:
        bracket = _expand_until_outside(predicate, peak.mu_best, 1.0)
        if bracket is None:
            hi, capped = math.inf, True
        else:
            hi = bisect_boundary(predicate, *bracket)

    if _is_semidefinite(B, -1.0):
        lo = -math.inf
    else:
        bracket = _expand_until_outside(predicate, peak.mu_best, -1.0)
        if bracket is None:
            lo, capped = -math.inf, True
        else:
            lo = bisect_boundary(predicate, *bracket)

    if capped:
        logger.warning(f"PSD interval side reached the cap {settings.MU_CAP}")
    return PsdInterval(lo, hi, capped)


def dual_value(inst: GtrsInstance, mu: float) -> float:
    """Lagrangian dual function g(mu); -inf off the dual-feasible set."""
    constant = bound_constant(inst, mu)
    if constant == -math.inf:
        return -math.inf
    P, q = pencil(inst, mu)
    spectrum = eigh(P)
    if spectrum.min_eig < -psd_tolerance(P, settings.EPS_PSD):
        return -math.inf
    pinv = pinv_apply(P, q, spectrum=spectrum)
    if not pinv.in_range:
        return -math.inf
    return float(constant - q @ pinv.solution)


def is_singular_pencil(inst: GtrsInstance, mu: float) -> bool:
    P, _ = pencil(inst, mu)
    spectrum = eigh(P)
    cutoff = settings.EPS_PSD * (1.0 + norm_inf(P))
    return bool(np.any(np.abs(spectrum.eigenvalues) <= cutoff))


def dual_slope(inst: GtrsInstance, mu: float) -> float:
    """Derivative of g at mu != 0 where A + mu*B is positive definite:
    h(x(mu)) minus the bound mu weights, x(mu) = -(A + mu*B)^+ (a + mu*b)."""
    P, q = pencil(inst, mu)
    x = -pinv_apply(P, q).solution
    bound = inst.beta if mu > 0 else inst.alpha
    return inst.h.evaluate(x) - bound


def refine_multiplier(inst: GtrsInstance, mu: float, lo: float, hi: float) -> float:
    """Root of the dual slope next to `mu`, to machine precision.

    Stays on the sign side of mu and strictly inside (lo, hi). Returns mu
    unchanged when no sign change of the slope is found.
    """
    if mu == 0.0 or not math.isfinite(mu):
        return mu
    if mu > 0:
        lo = max(lo, 0.0)
    else:
        hi = min(hi, 0.0)
    slope = dual_slope(inst, mu)
    if slope == 0.0 or not math.isfinite(slope):
        return mu
    direction = 1.0 if slope > 0 else -1.0
    wall = hi if direction > 0 else lo

    inside, outside = mu, None
    step = settings.MU_TOL * max(1.0, abs(mu))
    for _ in range(settings.BISECTION_MAX_ITER):
        trial = inside + direction * step
        if math.isfinite(wall) and (trial - wall) * direction >= 0:
            trial = 0.5 * (inside + wall)
        if trial == inside or abs(trial) > settings.MU_CAP:
            break
        trial_slope = dual_slope(inst, trial)
        if not math.isfinite(trial_slope):
            break
        if trial_slope * direction <= 0:
            outside = trial
            break
        inside = trial
        step *= 2.0
    if outside is None:
        return mu

    for _ in range(settings.BISECTION_MAX_ITER):
        mid = 0.5 * (inside + outside)
        if mid in (inside, outside):
            break
        if dual_slope(inst, mid) * direction > 0:
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)


def dual_search_interval(inst: GtrsInstance) -> PsdInterval:
    return psd_interval(inst.A, inst.B).intersect(*multiplier_domain(inst))


def maximize_dual(inst: GtrsInstance) -> DualResult:
    """Maximize the concave dual function over the PSD interval."""
    interval = psd_interval(inst.A, inst.B)
    domain = interval.intersect(*multiplier_domain(inst))
    if domain.is_empty:
        logger.info("dual infeasible: empty PSD interval")
        return DualResult(
            status=DualStatus.DUAL_INFEASIBLE,
            mu_star=None,
            value=-math.inf,
            psd_interval=interval,
        )

    def g(mu: float) -> float:
        return dual_value(inst, mu)

    anchor = maximize_min_eig_affine(inst.A, inst.B, domain.lo, domain.hi).mu_best
    search = maximize_concave(g, domain.lo, domain.hi, anchor=anchor)
    mu_star, value = search.argmax, search.maximum

    at_cap = abs(mu_star) >= settings.MU_CAP * (1.0 - 1e-6)
    if search.capped and at_cap and value > -math.inf:
        logger.info(f"dual unbounded above: still increasing at mu={mu_star}")
        return DualResult(
            status=DualStatus.UNBOUNDED_ABOVE,
            mu_star=None,
            value=math.inf,
            psd_interval=interval,
        )

    # endpoints and the kink at mu = 0 are evaluated exactly; they win ties
    snapped = False
    for endpoint in (domain.lo, domain.hi, 0.0):
        if not math.isfinite(endpoint) or not domain.contains(endpoint):
            continue
        endpoint_value = g(endpoint)
        if endpoint_value == -math.inf:
            continue
        if endpoint_value >= value - 1e-12 * (1.0 + abs(value)):
            mu_star, value, snapped = endpoint, endpoint_value, True
            break

    if value == -math.inf:
        logger.info("dual infeasible: range condition fails on the PSD interval")
        return DualResult(
            status=DualStatus.DUAL_INFEASIBLE,
            mu_star=None,
            value=-math.inf,
            psd_interval=interval,
        )

    interior = not snapped and domain.lo < mu_star < domain.hi
    if interior and not is_singular_pencil(inst, mu_star):
        refined = refine_multiplier(inst, mu_star, domain.lo, domain.hi)
        refined_value = g(refined)
        if refined_value >= value - 1e-12 * (1.0 + abs(value)):
            logger.debug(f"multiplier refined from {mu_star} to {refined}")
            mu_star, value = refined, refined_value

    at_endpoint = mu_star in (domain.lo, domain.hi)
    hard_case = at_endpoint and is_singular_pencil(inst, mu_star)
    logger.info(f"SUCCESS, dual optimum {value} at mu={mu_star}, hard case {hard_case}")
    return DualResult(
        status=DualStatus.OPTIMAL,
        mu_star=mu_star,
        value=value,
        psd_interval=interval,
        hard_case=hard_case,
    )


def _scan_points(lo: float, hi: float, count: int) -> list[float]:
    points = [v for v in (lo, hi) if math.isfinite(v)]
    if math.isfinite(lo) and math.isfinite(hi):
        points += [lo + (hi - lo) * j / (count + 1) for j in range(1, count + 1)]
    elif math.isfinite(lo):
        points += [lo + 2.0 ** (j - count // 2) for j in range(count)]
    elif math.isfinite(hi):
        points += [hi - 2.0 ** (j - count // 2) for j in range(count)]
    else:
        points += [0.0] + [s * 2.0**j for j in range(count // 2) for s in (1.0, -1.0)]
    return points


def dual_feasible(inst: GtrsInstance) -> tuple[bool, float | None]:
    """Some mu in the PSD interval with a + mu*b in Range(A + mu*B)?

    Scans the interval endpoints and a fixed set of interior points.
    """
    domain = dual_search_interval(inst)
    if domain.is_empty:
        return False, None
    for mu in _scan_points(domain.lo, domain.hi, settings.DUAL_FEASIBILITY_SCAN):
        if dual_value(inst, mu) > -math.inf:
            return True, mu
    return False, None
