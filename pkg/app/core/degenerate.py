"""Explicit solutions for instances outside the regular dual path.

    B = 0:          the constraint is affine in x, so the band is a slab and
                    f reduces to a scalar problem in z = h(x) - d.
    Slater fails:   the band touches the range of h only at an extreme
                    value, so the feasible set is an affine subspace.
    Product form:   (h - alpha)(h - beta) <= 0 replaces the slab for B = 0
                    and makes the classical S-lemma exact again.
"""
import logging
import math
from typing import Optional

import numpy as np

from app import settings
from app.core.linalg import eigh, maximize_min_eig_affine, nullspace_basis, pinv_apply
from app.core.models import (
    GtrsInstance,
    InfeasiblePrimal,
    Multiplier,
    Quadratic,
    SymMatrix,
    UnboundedBelow,
)
from app.core.quadratic_range import (
    check_feasible,
    feasibility_tolerance,
    quad_inf,
    quad_range,
)
from app.custom_types import DegenerateSolution, ProductReformulation, SolveStatus
from app.exceptions import PreconditionViolation
from app.utils import log_handler, norm_inf, pick_target, psd_tolerance, vec_norm_inf

logger = logging.getLogger(__name__)
logger.addHandler(log_handler)


def is_affine_constraint(inst: GtrsInstance) -> bool:
    return inst.h.M.is_zero(settings.EPS_ZERO * (1.0 + inst.h.M.norm_inf))


def _is_zero_vector(v: np.ndarray) -> bool:
    return vec_norm_inf(v) <= settings.EPS_ZERO


def minimize_scalar_quadratic(
    p2: float, p1: float, p0: float, lo: float, hi: float
) -> tuple[float, Optional[float], float]:
    """Minimize p2*z^2 + 2*p1*z + p0 over [lo, hi] (ends may be infinite).

    Returns (value, argmin, escape) where escape is the sign of the
    direction along which the value tends to -inf (0 when bounded).
    Ties between the two ends go to the lower end.
    """

    def phi(z: float) -> float:
        return p2 * z * z + 2.0 * p1 * z + p0

    scale = max(abs(p2), abs(p1), 1.0)
    if abs(p2) <= settings.EPS_ZERO * scale:
        p2 = 0.0

    if p2 > 0:
        z = min(max(-p1 / p2, lo), hi)
        return phi(z), z, 0.0
    if p2 < 0:
        if math.isinf(lo):
            return -math.inf, None, -1.0
        if math.isinf(hi):
            return -math.inf, None, 1.0
        return (phi(lo), lo, 0.0) if phi(lo) <= phi(hi) else (phi(hi), hi, 0.0)
    if p1 > 0:
        return (-math.inf, None, -1.0) if math.isinf(lo) else (phi(lo), lo, 0.0)
    if p1 < 0:
        return (-math.inf, None, 1.0) if math.isinf(hi) else (phi(hi), hi, 0.0)
    z = min(max(0.0, lo), hi)
    return p0, z, 0.0


def _unconstrained(inst: GtrsInstance) -> DegenerateSolution:
    info = quad_inf(inst.f)
    if info.attained:
        return DegenerateSolution(SolveStatus.OPTIMAL, info.value, x_star=info.argmin)
    certificate = UnboundedBelow(direction_hint=info.direction, point=np.zeros(inst.n))
    return DegenerateSolution(SolveStatus.UNBOUNDED, -math.inf, certificate=certificate)


def solve_b_zero(inst: GtrsInstance) -> DegenerateSolution:
    """Solve an instance whose constraint h = 2b'x + d is affine."""
    if not is_affine_constraint(inst):
        raise PreconditionViolation(condition="B = 0", detail="constraint is quadratic")

    if _is_zero_vector(inst.b):
        if not inst.in_band(inst.d):
            logger.info(f"constant constraint {inst.d} outside the band")
            return DegenerateSolution(
                SolveStatus.INFEASIBLE, math.inf, certificate=InfeasiblePrimal()
            )
        return _unconstrained(inst)

    b = inst.b
    w = b / (2.0 * float(b @ b))
    V = nullspace_basis(b)
    A = inst.A
    H = V.T @ A @ V
    z_lo, z_hi = inst.alpha - inst.d, inst.beta - inst.d
    z_feasible = pick_target(z_lo, z_hi)

    spectrum = eigh(H)
    if spectrum.min_eig < -psd_tolerance(H, settings.EPS_PSD):
        logger.info("restriction of A to the null space of b is indefinite")
        certificate = UnboundedBelow(
            direction_hint=V @ spectrum.basis[:, 0], point=z_feasible * w
        )
        return DegenerateSolution(SolveStatus.UNBOUNDED, -math.inf, certificate=certificate)

    # y-linear term r(z) = r0 + z*r1 must stay in Range(H)
    r0 = V.T @ inst.a
    r1 = V.T @ A @ w
    N = spectrum.null_basis(settings.EPS_PSD * (1.0 + norm_inf(H)))
    n_r0, n_r1 = N.T @ r0, N.T @ r1
    tol = settings.RANGE_TOL * (1.0 + vec_norm_inf(r0) + vec_norm_inf(r1))
    if z_lo == z_hi:
        bounded = vec_norm_inf(n_r0 + z_lo * n_r1) <= tol
    else:
        bounded = vec_norm_inf(n_r0) <= tol and vec_norm_inf(n_r1) <= tol
    if not bounded:
        z0 = z_feasible
        if z_lo != z_hi and vec_norm_inf(n_r0 + z0 * n_r1) <= tol:
            z0 = z_lo if math.isfinite(z_lo) and z_lo != z0 else z0 + 1.0
        escape = -(N @ (n_r0 + z0 * n_r1))
        logger.info("linear term leaves the range of the restricted Hessian")
        certificate = UnboundedBelow(direction_hint=V @ escape, point=z0 * w)
        return DegenerateSolution(SolveStatus.UNBOUNDED, -math.inf, certificate=certificate)

    h_r0 = pinv_apply(H, r0, spectrum=spectrum).solution
    h_r1 = pinv_apply(H, r1, spectrum=spectrum).solution
    p2 = float(w @ A @ w - r1 @ h_r1)
    p1 = float(inst.a @ w - r1 @ h_r0)
    p0 = float(inst.c - r0 @ h_r0)
    value, z_star, escape = minimize_scalar_quadratic(p2, p1, p0, z_lo, z_hi)

    # x(z) = z*(w - V H^+ r1) - V H^+ r0 minimizes over y for fixed z
    slope = w - V @ h_r1
    offset = -(V @ h_r0)
    if z_star is None:
        logger.info("reduced scalar objective unbounded on the slab")
        certificate = UnboundedBelow(
            direction_hint=escape * slope, point=offset + z_feasible * slope
        )
        return DegenerateSolution(SolveStatus.UNBOUNDED, -math.inf, certificate=certificate)

    x_star = offset + z_star * slope
    logger.info(f"SUCCESS, affine-constraint optimum {value} at z={z_star}")
    return DegenerateSolution(SolveStatus.OPTIMAL, inst.f.evaluate(x_star), x_star=x_star)


def solve_boundary_collapse(inst: GtrsInstance) -> DegenerateSolution:
    """Feasible set is the minimizer (or maximizer) set of h, {Bx + b = 0}."""
    if is_affine_constraint(inst):
        raise PreconditionViolation(condition="B != 0", detail="affine constraint")
    if not check_feasible(inst).feasible:
        raise PreconditionViolation(condition="feasible", detail="band misses range of h")

    rng = quad_range(inst.h)
    tol = feasibility_tolerance(inst)
    at_min = rng.inf_attained and abs(rng.inf - inst.beta) <= tol
    at_max = rng.sup_attained and abs(rng.sup - inst.alpha) <= tol
    if not (at_min or at_max):
        raise PreconditionViolation(
            condition="Slater fails",
            detail=f"range [{rng.inf}, {rng.sup}] meets the band interior",
        )

    spectrum = eigh(inst.B)
    x_p = -pinv_apply(inst.B, inst.b, spectrum=spectrum).solution
    N = spectrum.null_basis(settings.EPS_PSD * (1.0 + norm_inf(inst.B)))
    reduced = inst.f.restrict(x_p, N)
    info = quad_inf(reduced)
    if not info.attained:
        logger.info(f"objective unbounded on the {N.shape[1]}-dimensional level set")
        certificate = UnboundedBelow(direction_hint=N @ info.direction, point=x_p)
        return DegenerateSolution(SolveStatus.UNBOUNDED, -math.inf, certificate=certificate)

    x_star = x_p + N @ info.argmin
    value = inst.f.evaluate(x_star)
    logger.info(f"SUCCESS, collapsed optimum {value}")
    return DegenerateSolution(SolveStatus.OPTIMAL, value, x_star=x_star)


def product_constraint(inst: GtrsInstance) -> Quadratic:
    """(h - alpha)(h - beta) for affine h = 2b'x + d."""
    b, d = inst.b, inst.d
    alpha, beta = inst.alpha, inst.beta
    return Quadratic(
        SymMatrix.from_full(4.0 * np.outer(b, b)),
        (2.0 * d - alpha - beta) * b,
        (d - alpha) * (d - beta),
    )


def _level_certificate(
    f: Quadratic, g: Quadratic, level: float
) -> tuple[bool, float]:
    """Is there mu >= 0 with f - level + mu*g >= 0? Returns (holds, mu)."""
    base = f.shifted(-level).homogenized()
    search = maximize_min_eig_affine(base, g.homogenized(), 0.0, math.inf)
    # tolerance scaled without the level term
    matrix = f.homogenized() + search.mu_best * g.homogenized()
    holds = search.min_eig_best >= -psd_tolerance(matrix, settings.EPS_PSD)
    return holds, search.mu_best


def product_reformulation(inst: GtrsInstance) -> ProductReformulation:
    """Optimal value under the constraint (h - alpha)(h - beta) <= 0.

    The value is the largest level s with a classical S-lemma multiplier
    for f - s >= 0 on {(h - alpha)(h - beta) <= 0}, found by bisection.
    """
    if not is_affine_constraint(inst) or _is_zero_vector(inst.b):
        raise PreconditionViolation(condition="B = 0 and b != 0")
    if not inst.is_interval:
        raise PreconditionViolation(
            condition="-inf < alpha < beta < inf",
            detail=f"alpha={inst.alpha}, beta={inst.beta}",
        )

    g = product_constraint(inst)
    reformulated = GtrsInstance(inst.f, g, -math.inf, 0.0)
    f = inst.f

    point = check_feasible(inst).point
    f_point = f.evaluate(point)
    upper = f_point + 1.0 + abs(f_point)
    lower: Optional[float] = None
    mu_lower = 0.0
    for k in range(settings.PRODUCT_BRACKET_DOUBLINGS):
        candidate = upper - 2.0**k * (1.0 + abs(upper))
        holds, mu = _level_certificate(f, g, candidate)
        if holds:
            lower, mu_lower = candidate, mu
            break
    if lower is None:
        logger.info("no certified level found, product form unbounded below")
        return ProductReformulation(g, reformulated, -math.inf)

    for _ in range(settings.PRODUCT_BISECTION_ITER):
        middle = 0.5 * (lower + upper)
        if middle in (lower, upper):
            break
        holds, mu = _level_certificate(f, g, middle)
        if holds:
            lower, mu_lower = middle, mu
        else:
            upper = middle

    certificate = Multiplier.from_mu(-mu_lower, level=lower)
    logger.info(f"SUCCESS, product form value {lower} with multiplier {mu_lower}")
    return ProductReformulation(g, reformulated, lower, certificate)
