import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from app import settings
from app.core.models import SymMatrix
from app.custom_types import AffineSearchResult, PinvResult, ScalarSearchResult
from app.exceptions import PreconditionViolation
from app.utils import log_handler, norm_inf, vec_norm_inf

logger = logging.getLogger(__name__)
logger.addHandler(log_handler)

PHI_RATIO = 2 / (1 + math.sqrt(5))
DEFINITE_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    basis: np.ndarray

    @property
    def min_eig(self) -> float:
        if self.eigenvalues.size == 0:
            return math.inf
        return float(self.eigenvalues[0])

    @property
    def max_eig(self) -> float:
        if self.eigenvalues.size == 0:
            return -math.inf
        return float(self.eigenvalues[-1])

    def count_below(self, threshold: float) -> int:
        return int(np.sum(self.eigenvalues < threshold))

    def null_basis(self, tol: float) -> np.ndarray:
        return self.basis[:, np.abs(self.eigenvalues) <= tol]

    def reconstruct(self) -> np.ndarray:
        return self.basis @ np.diag(self.eigenvalues) @ self.basis.T


def as_symmetric(M: SymMatrix | np.ndarray) -> np.ndarray:
    """Working copy; arrays are symmetrized from their lower triangle."""
    if isinstance(M, SymMatrix):
        return np.array(M.full)
    lower = np.tril(np.atleast_2d(np.asarray(M, dtype=float)))
    return lower + np.tril(lower, -1).T


def _rotate(a: np.ndarray, basis: np.ndarray, p: int, q: int, c: float, s: float):
    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    vec_p = basis[:, p].copy()
    vec_q = basis[:, q].copy()
    basis[:, p] = c * vec_p - s * vec_q
    basis[:, q] = s * vec_p + c * vec_q


def eigh(M: SymMatrix | np.ndarray) -> Spectrum:
    """Cyclic Jacobi eigendecomposition.

    Sweeps run in fixed (p, q) order until the off-diagonal Frobenius norm
    drops below JACOBI_TOL * ||M||_inf, so the output is a deterministic
    function of the input. Eigenvector signs are normalized so that the
    largest-magnitude entry of every column is positive.
    """
    a = as_symmetric(M)
    n = a.shape[0]
    basis = np.eye(n)
    scale = norm_inf(a)
    threshold = settings.JACOBI_TOL * scale

    for _ in range(settings.JACOBI_MAX_SWEEPS):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * scale:
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                _rotate(a, basis, p, q, c, t * c)
    else:
        logger.warning(f"Jacobi sweep budget exhausted for order {n}")

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    basis = basis[:, order]
    for j in range(n):
        pivot = int(np.argmax(np.abs(basis[:, j])))
        if basis[pivot, j] < 0:
            basis[:, j] = -basis[:, j]
    eigenvalues.setflags(write=False)
    basis.setflags(write=False)
    return Spectrum(eigenvalues, basis)


def pinv_apply(
    M: SymMatrix | np.ndarray,
    v: np.ndarray,
    *,
    spectrum: Spectrum | None = None,
) -> PinvResult:
    """M^+ v together with the test v in Range(M)."""
    matrix = as_symmetric(M)
    v = np.asarray(v, dtype=float).reshape(-1)
    spectrum = spectrum or eigh(matrix)
    cutoff = settings.EPS_PSD * (1.0 + norm_inf(matrix))
    keep = np.abs(spectrum.eigenvalues) > cutoff
    kept = spectrum.basis[:, keep]
    solution = kept @ ((kept.T @ v) / spectrum.eigenvalues[keep])
    residual = matrix @ solution - v
    in_range = vec_norm_inf(residual) <= settings.RANGE_TOL * (1.0 + vec_norm_inf(v))
    return PinvResult(solution=solution, in_range=bool(in_range))


def nullspace_basis(b: np.ndarray) -> np.ndarray:
    """Orthonormal n x (n-1) basis of {x : b'x = 0} from a Householder reflector.

    The reflector maps b onto the axis of its largest-magnitude entry;
    the remaining columns of the reflector span the null space.
    """
    b = np.asarray(b, dtype=float).reshape(-1)
    if b.size == 0 or vec_norm_inf(b) == 0.0:
        raise PreconditionViolation(condition="b != 0", detail="null space of b")
    n = b.size
    pivot = int(np.argmax(np.abs(b)))
    u = b / np.linalg.norm(b)
    w = u.copy()
    w[pivot] += math.copysign(1.0, u[pivot])
    w /= np.linalg.norm(w)
    reflector = np.eye(n) - 2.0 * np.outer(w, w)
    return np.delete(reflector, pivot, axis=1)


####################
#  1-D SEARCHES    #
####################


def golden_section_maximize(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    tol: float = settings.MU_TOL,
    max_iterations: int = settings.GOLDEN_MAX_ITER,
) -> ScalarSearchResult:
    """Maximize a concave function on the finite interval [lo, hi]."""
    lo0, hi0 = lo, hi
    f_lo0, f_hi0 = func(lo0), func(hi0)
    if hi - lo <= tol * max(1.0, abs(lo), abs(hi)):
        best = max([(f_lo0, lo0), (f_hi0, hi0)], key=lambda pair: pair[0])
        return ScalarSearchResult(argmax=best[1], maximum=best[0], iterations=0)

    x1 = hi - PHI_RATIO * (hi - lo)
    x2 = lo + PHI_RATIO * (hi - lo)
    f1, f2 = func(x1), func(x2)
    iteration = 0
    while iteration < max_iterations and (hi - lo) > tol * max(
        1.0, abs(lo), abs(hi)
    ):
        if f2 < f1:
            hi = x2
            x2, f2 = x1, f1
            x1 = hi - PHI_RATIO * (hi - lo)
            f1 = func(x1)
        else:
            lo = x1
            x1, f1 = x2, f2
            x2 = lo + PHI_RATIO * (hi - lo)
            f2 = func(x2)
        iteration += 1

    best_f, best_x = (f1, x1) if f1 >= f2 else (f2, x2)
    for x, fx in ((lo0, f_lo0), (hi0, f_hi0)):
        if fx > best_f:
            best_f, best_x = fx, x
    return ScalarSearchResult(argmax=best_x, maximum=best_f, iterations=iteration)


def _expand_bracket(
    func: Callable[[float], float],
    anchor: float,
    f_anchor: float,
    direction: float,
    limit: float,
) -> tuple[float, bool]:
    """Walk away from `anchor` with doubling steps until a concave function
    stops increasing. Returns the outer bracket end and whether the walk
    was stopped by the cap rather than by the function."""
    prev_f = f_anchor
    step = 1.0
    while True:
        x = anchor + direction * step
        stopped_by_limit = (x - limit) * direction >= 0
        if stopped_by_limit:
            x = limit
        fx = func(x)
        if stopped_by_limit:
            return x, fx >= prev_f
        if fx <= prev_f and not (fx == prev_f == -math.inf):
            return x, False
        prev_f = fx
        step *= 2.0


def maximize_concave(
    func: Callable[[float], float],
    lo: float = -math.inf,
    hi: float = math.inf,
    *,
    anchor: float | None = None,
) -> ScalarSearchResult:
    """Bracket (exponential expansion capped at |mu| <= MU_CAP) and then
    golden-section search a concave function over a closed interval."""
    if lo == hi:
        return ScalarSearchResult(argmax=lo, maximum=func(lo), iterations=0)
    if anchor is None:
        anchor = 0.0
    anchor = min(max(anchor, lo), hi)
    anchor = min(max(anchor, -settings.MU_CAP), settings.MU_CAP)
    f_anchor = func(anchor)

    capped = False
    left, right = lo, hi
    if not math.isfinite(lo):
        left, capped_left = _expand_bracket(
            func, anchor, f_anchor, -1.0, -settings.MU_CAP
        )
        capped = capped or capped_left
    if not math.isfinite(hi):
        right, capped_right = _expand_bracket(
            func, anchor, f_anchor, 1.0, settings.MU_CAP
        )
        capped = capped or capped_right
    if capped:
        logger.warning(f"bracket expansion reached the cap {settings.MU_CAP}")

    result = golden_section_maximize(func, left, right)
    result.capped = capped
    return result


def bisect_boundary(
    predicate: Callable[[float], bool],
    inside: float,
    outside: float,
    *,
    max_iterations: int = settings.BISECTION_MAX_ITER,
) -> float:
    """Last point from `inside` towards `outside` where `predicate` holds."""
    for _ in range(max_iterations):
        if abs(outside - inside) <= 1e-12 * max(1.0, abs(inside)):
            break
        mid = 0.5 * (inside + outside)
        if predicate(mid):
            inside = mid
        else:
            outside = mid
    return inside


def affine_family(M0: np.ndarray, M1: np.ndarray) -> Callable[[float], float]:
    M0 = as_symmetric(M0)
    M1 = as_symmetric(M1)

    def lambda_min(mu: float) -> float:
        return eigh(M0 + mu * M1).min_eig

    return lambda_min


def _walk_to_psd(
    lambda_min: Callable[[float], float], anchor: float, direction: float
) -> AffineSearchResult:
    """Monotone family: step away from anchor until lambda_min >= 0."""
    mu = anchor
    value = lambda_min(mu)
    step = 1.0
    while value < 0.0:
        mu = anchor + direction * step
        if abs(mu) >= settings.MU_CAP:
            mu = math.copysign(settings.MU_CAP, direction)
            value = lambda_min(mu)
            logger.warning("monotone walk reached the cap without a PSD member")
            return AffineSearchResult(mu, value, capped=True, unbounded=True)
        value = lambda_min(mu)
        step *= 2.0
    return AffineSearchResult(mu, value, capped=False, unbounded=True)


def _prefer_small_mu(
    lambda_min: Callable[[float], float],
    mu_best: float,
    value: float,
    lo: float,
    hi: float,
) -> tuple[float, float]:
    """Among (numerically) equal maximizers move to the one closest to zero."""
    home = min(max(0.0, lo), hi)
    if mu_best == home:
        return mu_best, value
    target = value - 1e-12 * (1.0 + abs(value))
    home_value = lambda_min(home)
    if home_value >= target:
        return home, home_value
    trial = mu_best + (home - mu_best) * min(1.0, 1e-6 * (1.0 + abs(mu_best)))
    if lambda_min(trial) < target:
        return mu_best, value
    inside, outside = mu_best, home
    for _ in range(settings.TIE_BREAK_ITER):
        mid = 0.5 * (inside + outside)
        if lambda_min(mid) >= target:
            inside = mid
        else:
            outside = mid
    return inside, lambda_min(inside)


def maximize_min_eig_affine(
    M0: np.ndarray,
    M1: np.ndarray,
    lo: float = -math.inf,
    hi: float = math.inf,
) -> AffineSearchResult:
    """Maximize the concave map mu -> lambda_min(M0 + mu*M1) over [lo, hi].

    When M1 is definite and the domain is unbounded on the side where the
    family grows, the maximum is +inf; the search then returns the first
    tried mu with a PSD member and sets `unbounded`.
    """
    if lo > hi:
        raise PreconditionViolation(condition="domain nonempty", detail=f"[{lo}, {hi}]")
    lambda_min = affine_family(M0, M1)
    anchor = min(max(0.0, lo), hi)

    direction_spectrum = eigh(M1)
    if hi == math.inf and direction_spectrum.min_eig >= DEFINITE_EPS:
        return _walk_to_psd(lambda_min, anchor, 1.0)
    if lo == -math.inf and direction_spectrum.max_eig <= -DEFINITE_EPS:
        return _walk_to_psd(lambda_min, anchor, -1.0)

    search = maximize_concave(lambda_min, lo, hi, anchor=anchor)
    mu_best, value = _prefer_small_mu(
        lambda_min, search.argmax, search.maximum, lo, hi
    )
    return AffineSearchResult(mu_best, value, capped=search.capped)
