"""Independent certificate checks.

Everything here is rebuilt from the raw instance data with LAPACK routines
from numpy.linalg, never with the Jacobi kernel or the range helpers the
producers use. Invalid certificates return False; nothing here raises.
"""
import logging
import math

import numpy as np

from app import settings
from app.core.models import (
    Certificate,
    Counterexample,
    ExceptionNu,
    GtrsInstance,
    InfeasiblePrimal,
    Multiplier,
    UnboundedBelow,
)
from app.utils import log_handler

logger = logging.getLogger(__name__)
logger.addHandler(log_handler)


def _inf_norm(M: np.ndarray) -> float:
    return float(np.abs(M).sum(axis=1).max()) if M.size else 0.0


def _lowest_eigenvalue(M: np.ndarray) -> float:
    if M.size == 0:
        return math.inf
    return float(np.linalg.eigvalsh(M)[0])


def _accepted_psd(M: np.ndarray) -> bool:
    return _lowest_eigenvalue(M) >= -settings.EPS_PSD * (1.0 + _inf_norm(M))


def _block(M: np.ndarray, m: np.ndarray, k: float) -> np.ndarray:
    n = m.size
    out = np.zeros((n + 1, n + 1))
    out[:n, :n] = M
    out[:n, n] = m
    out[n, :n] = m
    out[n, n] = k
    return out


def _corner(n: int) -> np.ndarray:
    out = np.zeros((n + 1, n + 1))
    out[n, n] = 1.0
    return out


def _band_slack(inst: GtrsInstance) -> float:
    finite = [abs(v) for v in (inst.alpha, inst.beta) if math.isfinite(v)]
    return settings.FEASIBILITY_TOL * (1.0 + sum(finite))


def _svd_null_basis(b: np.ndarray) -> np.ndarray:
    """Orthonormal basis of {x : b'x = 0} from the SVD of b'."""
    _, _, vt = np.linalg.svd(b.reshape(1, -1))
    return vt[1:].T


def _matrix_is_zero(M: np.ndarray) -> bool:
    return M.size == 0 or float(np.abs(M).max()) <= settings.EPS_ZERO * (1.0 + _inf_norm(M))


##################
#  MULTIPLIER    #
##################


def _check_multiplier(inst: GtrsInstance, cert: Multiplier) -> bool:
    if cert.mu_plus < 0 or cert.mu_minus < 0 or cert.mu_plus * cert.mu_minus != 0:
        return False
    if cert.mu_plus - cert.mu_minus != cert.mu:
        return False
    n = inst.n
    F = _block(inst.A, inst.a, inst.c)
    H = _block(inst.B, inst.b, inst.d)
    corner = _corner(n)
    matrix = F - cert.level * corner
    if cert.mu_minus > 0:
        if math.isinf(inst.beta):
            return False
        matrix = matrix + cert.mu_minus * (H - inst.beta * corner)
    if cert.mu_plus > 0:
        if math.isinf(inst.alpha):
            return False
        matrix = matrix + cert.mu_plus * (inst.alpha * corner - H)
    return _accepted_psd(matrix)


##################
#  EXCEPTION     #
##################


def _exception_signature(inst: GtrsInstance) -> bool:
    A = inst.A
    eigenvalues = np.linalg.eigvalsh(A)
    negatives = int(np.sum(eigenvalues < -settings.EPS_PSD * (1.0 + _inf_norm(A))))
    b_nonzero = inst.b.size > 0 and float(np.abs(inst.b).max()) > settings.EPS_ZERO
    return negatives == 1 and _matrix_is_zero(inst.B) and b_nonzero


def _equality_exception_matrix(inst: GtrsInstance) -> np.ndarray:
    b = inst.b
    d = inst.d - inst.alpha
    x0 = -d / (2.0 * float(b @ b)) * b
    V = _svd_null_basis(b)
    A, a = inst.A, inst.a
    f_x0 = float(x0 @ A @ x0 + 2.0 * a @ x0 + inst.c)
    return _block(V.T @ A @ V, V.T @ (A @ x0 + a), f_x0)


def _interval_exception_matrix(inst: GtrsInstance, nu: float) -> np.ndarray:
    b = inst.b
    bb2 = 2.0 * float(b @ b)
    V = _svd_null_basis(b)
    A, a, c, d = inst.A, inst.a, inst.c, inst.d
    alpha, beta = inst.alpha, inst.beta
    k = V.shape[1]
    out = np.zeros((k + 2, k + 2))
    out[:k, :k] = V.T @ A @ V
    out[:k, k] = out[k, :k] = V.T @ A @ b / bb2
    out[:k, k + 1] = out[k + 1, :k] = V.T @ a
    out[k, k] = float(b @ A @ b) / bb2**2 + nu
    out[k, k + 1] = out[k + 1, k] = float(a @ b) / bb2 - 0.5 * nu * (alpha + beta - 2.0 * d)
    out[k + 1, k + 1] = c + nu * (alpha - d) * (beta - d)
    return out


def _check_exception(inst: GtrsInstance, cert: ExceptionNu) -> bool:
    if cert.nu < 0 or not _exception_signature(inst):
        return False
    if inst.is_equality:
        matrix = _equality_exception_matrix(inst)
    elif inst.is_interval:
        matrix = _interval_exception_matrix(inst, cert.nu)
    else:
        return False
    lowest = _lowest_eigenvalue(matrix)
    if abs(lowest - cert.matrix_min_eig) > 1e-8 * (1.0 + abs(lowest)):
        return False
    return _accepted_psd(matrix)


####################
#  COUNTEREXAMPLE  #
####################


def _relative_match(a: float, b: float) -> bool:
    return abs(a - b) <= settings.CERTIFICATE_REL_TOL * max(1.0, abs(a), abs(b))


def _check_counterexample(inst: GtrsInstance, cert: Counterexample) -> bool:
    x = cert.x
    if x.size != inst.n:
        return False
    f_value = float(x @ inst.A @ x + 2.0 * inst.a @ x + inst.c)
    h_value = float(x @ inst.B @ x + 2.0 * inst.b @ x + inst.d)
    if not (_relative_match(f_value, cert.f_value) and _relative_match(h_value, cert.h_value)):
        return False
    slack = _band_slack(inst)
    return f_value < 0 and inst.alpha - slack <= h_value <= inst.beta + slack


####################
#  INFEASIBILITY   #
####################


def _extreme(M: np.ndarray, m: np.ndarray, k: float) -> float:
    """inf of x'Mx + 2m'x + k via eigvalsh and least squares."""
    if m.size == 0:
        return k
    if _lowest_eigenvalue(M) < -settings.EPS_PSD * (1.0 + _inf_norm(M)):
        return -math.inf
    x, *_ = np.linalg.lstsq(M, -m, rcond=None)
    if np.abs(M @ x + m).max() > settings.RANGE_TOL * (1.0 + np.abs(m).max()):
        return -math.inf
    return float(x @ M @ x + 2.0 * m @ x + k)


def _check_infeasible(inst: GtrsInstance) -> bool:
    lowest = _extreme(inst.B, inst.b, inst.d)
    highest = -_extreme(-inst.B, -inst.b, -inst.d)
    slack = _band_slack(inst)
    return lowest > inst.beta + slack or highest < inst.alpha - slack


####################
#  UNBOUNDEDNESS   #
####################


def _in_band(inst: GtrsInstance, x: np.ndarray) -> bool:
    h_value = float(x @ inst.B @ x + 2.0 * inst.b @ x + inst.d)
    slack = _band_slack(inst)
    return inst.alpha - slack <= h_value <= inst.beta + slack


def _check_ray(inst: GtrsInstance, point: np.ndarray, direction: np.ndarray) -> bool:
    if point.size != inst.n or direction.size != inst.n or not _in_band(inst, point):
        return False
    scale = float(direction @ direction)
    if scale == 0.0:
        return False
    slack = _band_slack(inst)

    h2 = float(direction @ inst.B @ direction)
    h1 = 2.0 * float((inst.B @ point + inst.b) @ direction)
    h0 = float(point @ inst.B @ point + 2.0 * inst.b @ point + inst.d)
    tol2 = settings.EPS_PSD * (1.0 + _inf_norm(inst.B)) * scale
    tol1 = settings.EPS_PSD * (1.0 + abs(h0)) * math.sqrt(scale)
    h2 = 0.0 if abs(h2) <= tol2 else h2
    h1 = 0.0 if abs(h1) <= tol1 else h1
    rising = h2 > 0 or (h2 == 0 and h1 > 0)
    falling = h2 < 0 or (h2 == 0 and h1 < 0)
    if rising and math.isfinite(inst.beta):
        return False
    if falling and math.isfinite(inst.alpha):
        return False
    if h2 != 0 and -h1 / (2.0 * h2) > 0:
        vertex_value = h0 - h1 * h1 / (4.0 * h2)
        if not inst.alpha - slack <= vertex_value <= inst.beta + slack:
            return False

    f2 = float(direction @ inst.A @ direction)
    f1 = 2.0 * float((inst.A @ point + inst.a) @ direction)
    f_tol2 = settings.EPS_PSD * (1.0 + _inf_norm(inst.A)) * scale
    if f2 < -f_tol2:
        return True
    return abs(f2) <= f_tol2 and f1 < -settings.EPS_PSD * math.sqrt(scale)


def _check_evidence(inst: GtrsInstance, evidence: tuple[np.ndarray, ...]) -> bool:
    if len(evidence) < 3 or any(p.size != inst.n for p in evidence):
        return False
    if not all(_in_band(inst, p) for p in evidence):
        return False
    values = [float(p @ inst.A @ p + 2.0 * inst.a @ p + inst.c) for p in evidence]
    drops = [left - right for left, right in zip(values, values[1:])]
    if drops[0] <= 0:
        return False
    return all(
        later >= settings.UNBOUNDED_GROWTH * earlier for earlier, later in zip(drops, drops[1:])
    )


def _check_unbounded(inst: GtrsInstance, cert: UnboundedBelow) -> bool:
    if cert.point is not None and cert.direction_hint is not None:
        return _check_ray(inst, cert.point, cert.direction_hint)
    return _check_evidence(inst, cert.evidence)


_CHECKS = {
    Multiplier: _check_multiplier,
    ExceptionNu: _check_exception,
    Counterexample: _check_counterexample,
    UnboundedBelow: _check_unbounded,
}


def verify_certificate(inst: GtrsInstance, cert: Certificate) -> bool:
    try:
        if isinstance(cert, InfeasiblePrimal):
            verdict = _check_infeasible(inst)
        else:
            check = _CHECKS.get(type(cert))
            verdict = bool(check(inst, cert)) if check else False
    except (ValueError, TypeError, ArithmeticError, np.linalg.LinAlgError) as e:
        logger.warning(f"certificate {cert.kind} rejected: {e!r}")
        return False
    if not verdict:
        logger.info(f"certificate {cert.kind} rejected")
    return verdict
