import logging
import math
from typing import Optional

import numpy as np

from app import settings
from app.core.degenerate import is_affine_constraint, solve_b_zero
from app.core.linalg import eigh, maximize_min_eig_affine, nullspace_basis
from app.core.models import (
    Counterexample,
    ExceptionNu,
    GtrsInstance,
    Multiplier,
    Quadratic,
    SlemmaVerdict,
    SymMatrix,
    UnboundedBelow,
    VerdictKind,
)
from app.core.oracle import oracle_system_search
from app.core.quadratic_range import (
    check_interval_slater,
    negative_point,
    quad_inf,
    quad_range,
)
from app.core.solver import solve
from app.custom_types import SlemmaRun, SolveStatus
from app.exceptions import NumericalFailure, PreconditionViolation
from app.utils import log_handler, psd_tolerance, vec_norm_inf

logger = logging.getLogger(__name__)
logger.addHandler(log_handler)

SLEMMA_KINDS = ("interval", "eq", "ineq")
MAX_RAY_DOUBLINGS = 200


##########################
#  COUNTEREXAMPLE SEARCH #
##########################


def _walk_ray(inst: GtrsInstance, cert: UnboundedBelow) -> Optional[np.ndarray]:
    if cert.point is None or cert.direction_hint is None:
        return cert.evidence[-1] if cert.evidence else None
    step = 1.0
    for _ in range(MAX_RAY_DOUBLINGS):
        x = cert.point + step * cert.direction_hint
        if inst.f.evaluate(x) < 0:
            return x
        step *= 2.0
    return None


def _solver_candidates(inst: GtrsInstance, seed: int, budget: int) -> list[np.ndarray]:
    if is_affine_constraint(inst):
        solution = solve_b_zero(inst)
        if solution.status is SolveStatus.OPTIMAL:
            return [solution.x_star]
        if isinstance(solution.certificate, UnboundedBelow):
            point = _walk_ray(inst, solution.certificate)
            return [point] if point is not None else []
        return []

    report = solve(inst, seed=seed, budget=budget, use_oracle=False)
    candidates = [report.x_star] if report.x_star is not None else []
    for cert in report.certificates:
        if isinstance(cert, UnboundedBelow):
            point = _walk_ray(inst, cert)
            if point is not None:
                candidates.append(point)
    return candidates


def find_counterexample(inst: GtrsInstance, seed: int = 0, budget: int = 16) -> Counterexample:
    """A point with f < 0 on the band: solver first, multistart search second."""
    tol = settings.FEASIBILITY_TOL * (
        1.0 + sum(abs(v) for v in (inst.alpha, inst.beta) if math.isfinite(v))
    )
    for x in _solver_candidates(inst, seed, budget):
        if inst.f.evaluate(x) < 0 and inst.in_band(inst.h.evaluate(x), tol):
            return Counterexample.at(inst, x)
    logger.info("solver gave no counterexample, falling back to multistart search")
    x = oracle_system_search(inst.f, inst.h, inst.alpha, inst.beta, seed, budget)
    if x is not None:
        return Counterexample.at(inst, x)
    raise NumericalFailure("no multiplier exists but no violating point was found")


##########################
#  CLASSICAL S-LEMMAS    #
##########################


def _s2_search(
    f: Quadratic, g: Quadratic, lo: float, hi: float
) -> tuple[bool, float, float]:
    """Best mu in [lo, hi] for f + mu*g >= 0; returns (holds, mu, lambda_min)."""
    F, G = f.homogenized(), g.homogenized()
    search = maximize_min_eig_affine(F, G, lo, hi)
    holds = search.min_eig_best >= -psd_tolerance(F + search.mu_best * G, settings.EPS_PSD)
    return holds, search.mu_best, search.min_eig_best


def slemma_ineq(
    f: Quadratic, h: Quadratic, *, seed: int = 0, budget: int = 16
) -> SlemmaVerdict:
    """Decide unsolvability of {f(x) < 0, h(x) <= 0}."""
    if not quad_inf(h).value < 0:
        raise PreconditionViolation(condition="Slater: h(x) < 0 for some x")

    holds, mu, lam = _s2_search(f, h, 0.0, math.inf)
    if holds:
        logger.info(f"SUCCESS, inequality multiplier {mu} (lambda_min {lam})")
        return SlemmaVerdict(
            VerdictKind.S2_HOLDS, Multiplier.from_mu(-mu), case="inequality"
        )
    inst = GtrsInstance(f, h, -math.inf, 0.0)
    return SlemmaVerdict(
        VerdictKind.S1_FAILS, find_counterexample(inst, seed, budget), case="inequality"
    )


def has_exception_signature(f: Quadratic, h: Quadratic) -> bool:
    """A with exactly one negative eigenvalue, B = 0 and b != 0."""
    spectrum = eigh(f.M)
    negatives = spectrum.count_below(-psd_tolerance(f.M.full, settings.EPS_PSD))
    b_nonzero = vec_norm_inf(h.m) > settings.EPS_ZERO
    B_zero = h.M.is_zero(settings.EPS_ZERO * (1.0 + h.M.norm_inf))
    return negatives == 1 and B_zero and b_nonzero


def equality_exception_data(f: Quadratic, h: Quadratic) -> tuple[np.ndarray, np.ndarray]:
    """x0 = -d/(2b'b) * b on {h = 0} and V spanning the null space of b."""
    b = h.m
    x0 = -h.k / (2.0 * float(b @ b)) * b
    return x0, nullspace_basis(b)


def build_exception_matrix_equality(f: Quadratic, h: Quadratic) -> np.ndarray:
    """[[V'AV, V'(Ax0 + a)], [., f(x0)]], i.e. f restricted to {h = 0}."""
    x0, V = equality_exception_data(f, h)
    return f.restrict(x0, V).homogenized()


def slemma_eq(
    f: Quadratic, h: Quadratic, *, seed: int = 0, budget: int = 16
) -> SlemmaVerdict:
    """Decide unsolvability of {f(x) < 0, h(x) = 0}."""
    rng = quad_range(h)
    if not rng.inf < 0 < rng.sup:
        raise PreconditionViolation(
            condition="Slater: h(x') < 0 < h(x'')",
            detail=f"range of h is [{rng.inf}, {rng.sup}]",
        )

    if has_exception_signature(f, h):
        x0, V = equality_exception_data(f, h)
        reduced = f.restrict(x0, V)
        matrix = reduced.homogenized()
        lam = eigh(matrix).min_eig
        if lam >= -psd_tolerance(matrix, settings.EPS_PSD):
            logger.info(f"SUCCESS, equality exception matrix PSD (lambda_min {lam})")
            return SlemmaVerdict(
                VerdictKind.EXCEPTION_HOLDS, ExceptionNu(0.0, lam), case="equality exception"
            )
        y = negative_point(reduced)
        if y is None:
            raise NumericalFailure("exception matrix indefinite but f >= 0 on {h = 0}")
        x = x0 + V @ y
        return SlemmaVerdict(
            VerdictKind.BOTH_FAIL_EXCEPTION_CASE,
            Counterexample(x, f.evaluate(x), h.evaluate(x)),
            case="equality exception",
        )

    holds, mu, lam = _s2_search(f, h, -math.inf, math.inf)
    if holds:
        logger.info(f"SUCCESS, equality multiplier {mu} (lambda_min {lam})")
        return SlemmaVerdict(VerdictKind.S2_HOLDS, Multiplier.from_mu(-mu), case="equality")
    inst = GtrsInstance(f, h, 0.0, 0.0)
    return SlemmaVerdict(
        VerdictKind.S1_FAILS, find_counterexample(inst, seed, budget), case="equality"
    )


##########################
#  INTERVAL S-LEMMA      #
##########################


def build_exception_matrix_interval(
    f: Quadratic, h: Quadratic, alpha: float, beta: float, nu: float
) -> SymMatrix:
    """Exception matrix in the variables (y, z, 1) with x = z*b/(2b'b) + V*y."""
    if not h.M.is_zero(settings.EPS_ZERO * (1.0 + h.M.norm_inf)):
        raise PreconditionViolation(condition="B = 0")
    b = h.m
    V = nullspace_basis(b)
    A, a, c, d = f.M.full, f.m, f.k, h.k
    bb2 = 2.0 * float(b @ b)
    k = V.shape[1]
    out = np.zeros((k + 2, k + 2))
    out[:k, :k] = V.T @ A @ V
    out[k, :k] = V.T @ A @ b / bb2
    out[k + 1, :k] = V.T @ a
    out[k, k] = float(b @ A @ b) / bb2**2 + nu
    out[k + 1, k] = float(a @ b) / bb2 - 0.5 * nu * (alpha + beta - 2.0 * d)
    out[k + 1, k + 1] = c + nu * (alpha - d) * (beta - d)
    return SymMatrix.from_full(out)


def _rebased(inst: GtrsInstance, verdict: SlemmaVerdict) -> SlemmaVerdict:
    if verdict.kind is VerdictKind.S1_FAILS:
        return SlemmaVerdict(
            VerdictKind.S1_FAILS, Counterexample.at(inst, verdict.certificate.x), verdict.case
        )
    return verdict


def slemma_interval(
    inst: GtrsInstance, *, seed: int = 0, budget: int = 16
) -> SlemmaVerdict:
    """Decide unsolvability of {f(x) < 0, alpha <= h(x) <= beta}."""
    if not inst.is_interval:
        raise PreconditionViolation(
            condition="-inf < alpha < beta < inf",
            detail=f"alpha={inst.alpha}, beta={inst.beta}",
        )
    slater = check_interval_slater(inst)
    if not slater.holds:
        raise PreconditionViolation(condition="Slater: alpha < h(x) < beta for some x")
    ambiguous = slater.boundary_ambiguous
    f, h = inst.f, inst.h
    alpha, beta = inst.alpha, inst.beta
    rng = quad_range(h)

    if rng.inf >= alpha and rng.sup <= beta:
        logger.info("case: range of h inside the band")
        info = quad_inf(f)
        if info.attained and info.value >= -psd_tolerance(f.M.full, settings.EPS_PSD):
            return SlemmaVerdict(
                VerdictKind.S2_HOLDS, Multiplier.from_mu(0.0), "range inside", ambiguous
            )
        x = negative_point(f)
        return SlemmaVerdict(
            VerdictKind.S1_FAILS, Counterexample.at(inst, x), "range inside", ambiguous
        )

    if rng.inf >= alpha:
        logger.info("case: only the upper bound cuts the range")
        verdict = slemma_ineq(f, h.shifted(-beta), seed=seed, budget=budget)
        verdict = _rebased(inst, verdict)
        return SlemmaVerdict(verdict.kind, verdict.certificate, "upper bound only", ambiguous)

    if rng.sup <= beta:
        logger.info("case: only the lower bound cuts the range")
        verdict = slemma_ineq(f, (-h).shifted(alpha), seed=seed, budget=budget)
        if verdict.kind is VerdictKind.S2_HOLDS:
            certificate = Multiplier.from_mu(-verdict.certificate.mu)
            return SlemmaVerdict(VerdictKind.S2_HOLDS, certificate, "lower bound only", ambiguous)
        verdict = _rebased(inst, verdict)
        return SlemmaVerdict(verdict.kind, verdict.certificate, "lower bound only", ambiguous)

    A_psd = eigh(f.M).min_eig >= -psd_tolerance(f.M.full, settings.EPS_PSD)
    if A_psd or not is_affine_constraint(inst):
        logger.info("case: range straddles the band, two multiplier branches")
        lower_holds, t_lower, lam_lower = _s2_search(f, (-h).shifted(alpha), 0.0, math.inf)
        upper_holds, t_upper, lam_upper = _s2_search(f, h.shifted(-beta), 0.0, math.inf)
        if lower_holds or upper_holds:
            # mu > 0 weights alpha - h, mu < 0 weights h - beta
            use_lower = lower_holds and (not upper_holds or lam_lower >= lam_upper)
            mu = t_lower if use_lower else -t_upper
            return SlemmaVerdict(
                VerdictKind.S2_HOLDS, Multiplier.from_mu(mu), "straddle", ambiguous
            )
        return SlemmaVerdict(
            VerdictKind.S1_FAILS, find_counterexample(inst, seed, budget), "straddle", ambiguous
        )

    logger.info("case: straddle with indefinite A and affine h")
    M0 = build_exception_matrix_interval(f, h, alpha, beta, 0.0).full
    M1 = build_exception_matrix_interval(f, h, alpha, beta, 1.0).full - M0
    search = maximize_min_eig_affine(M0, M1, 0.0, math.inf)
    matrix = M0 + search.mu_best * M1
    if (
        search.min_eig_best >= -psd_tolerance(matrix, settings.EPS_PSD)
        and has_exception_signature(f, h)
    ):
        logger.info(f"SUCCESS, exception matrix PSD at nu={search.mu_best}")
        return SlemmaVerdict(
            VerdictKind.EXCEPTION_HOLDS,
            ExceptionNu(search.mu_best, search.min_eig_best),
            "exception",
            ambiguous,
        )

    certificate = find_counterexample(inst, seed, budget)
    kind = (
        VerdictKind.BOTH_FAIL_EXCEPTION_CASE
        if has_exception_signature(f, h)
        else VerdictKind.S1_FAILS
    )
    return SlemmaVerdict(kind, certificate, "exception", ambiguous)


def slemma_for_instance(
    inst: GtrsInstance, kind: str, *, seed: int = 0, budget: int = 16
) -> SlemmaRun:
    """Run one S-lemma on the instance it induces.

    ineq uses h - beta (or alpha - h when beta is infinite) with bound 0,
    eq uses h - alpha, interval uses the instance as it is.
    """
    if kind == "interval":
        return SlemmaRun(inst, slemma_interval(inst, seed=seed, budget=budget))
    if kind == "ineq":
        if math.isfinite(inst.beta):
            g = inst.h.shifted(-inst.beta)
        elif math.isfinite(inst.alpha):
            g = (-inst.h).shifted(inst.alpha)
        else:
            raise PreconditionViolation(condition="a finite bound", detail="both bounds infinite")
        derived = GtrsInstance(inst.f, g, -math.inf, 0.0)
        return SlemmaRun(derived, slemma_ineq(inst.f, g, seed=seed, budget=budget))
    if kind == "eq":
        if not math.isfinite(inst.alpha):
            raise PreconditionViolation(condition="finite alpha", detail="equality level")
        g = inst.h.shifted(-inst.alpha)
        derived = GtrsInstance(inst.f, g, 0.0, 0.0)
        return SlemmaRun(derived, slemma_eq(inst.f, g, seed=seed, budget=budget))
    raise PreconditionViolation(condition=f"kind in {SLEMMA_KINDS}", detail=kind)
