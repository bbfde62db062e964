import logging
import math
from typing import Iterator, Optional

import numpy as np

from app import settings
from app.core.dual import pencil
from app.core.linalg import eigh, pinv_apply
from app.core.models import DualResult, GtrsInstance
from app.custom_types import RecoveryResult, RecoveryTarget
from app.exceptions import PreconditionViolation
from app.utils import log_handler, norm_inf, scalar_quadratic_roots

logger = logging.getLogger(__name__)
logger.addHandler(log_handler)


def complementarity_target(mu: float) -> RecoveryTarget:
    if mu > settings.EPS_MU:
        return RecoveryTarget.UPPER_BOUND
    if mu < -settings.EPS_MU:
        return RecoveryTarget.LOWER_BOUND
    return RecoveryTarget.INTERIOR


def _target_level(inst: GtrsInstance, target: RecoveryTarget, h_hat: float) -> Optional[float]:
    if target is RecoveryTarget.UPPER_BOUND:
        return inst.beta
    if target is RecoveryTarget.LOWER_BOUND:
        return inst.alpha
    if h_hat > inst.beta:
        return inst.beta
    if h_hat < inst.alpha:
        return inst.alpha
    return None


def _ordered_roots(a2: float, a1: float, a0: float) -> list[float]:
    """Smaller |t| first, then the positive one."""
    return sorted(scalar_quadratic_roots(a2, a1, a0), key=lambda t: (abs(t), -t))


def _candidates(
    inst: GtrsInstance, x_hat: np.ndarray, null_directions: np.ndarray, level: float
) -> Iterator[np.ndarray]:
    h_hat = inst.h.evaluate(x_hat)
    slope = inst.B @ x_hat + inst.b
    for j in range(null_directions.shape[1]):
        v = null_directions[:, j]
        roots = _ordered_roots(float(v @ inst.B @ v), 2.0 * float(slope @ v), h_hat - level)
        if not roots:
            logger.info(f"null direction {j} gives a degenerate level equation")
            continue
        yield x_hat + roots[0] * v


def _acceptable(
    inst: GtrsInstance, x: np.ndarray, value: float, level: Optional[float]
) -> tuple[bool, float]:
    h_x = inst.h.evaluate(x)
    tol = settings.RECOVERY_FEAS_TOL
    gap = inst.f.evaluate(x) - value
    if not inst.in_band(h_x, tol * (1.0 + abs(h_x))):
        return False, gap
    if level is not None and abs(h_x - level) > tol * (1.0 + abs(level)):
        return False, gap
    scale = 1.0 + abs(value)
    return -tol * scale <= gap <= settings.RECOVERY_GAP_TOL * scale, gap


def recover(inst: GtrsInstance, dual: DualResult) -> RecoveryResult:
    """Primal point from the optimal multiplier, with hard-case correction."""
    if not dual.is_optimal:
        raise PreconditionViolation(
            condition="dual optimal", detail=f"status {dual.status.value}"
        )

    mu = dual.mu_star
    P, q = pencil(inst, mu)
    spectrum = eigh(P)
    x_hat = -pinv_apply(P, q, spectrum=spectrum).solution
    target = complementarity_target(mu)
    h_hat = inst.h.evaluate(x_hat)

    level = _target_level(inst, target, h_hat)
    accepted, gap = _acceptable(inst, x_hat, dual.value, level)
    if accepted:
        logger.info(f"SUCCESS, base point accepted, gap {gap}")
        return RecoveryResult(x_star=x_hat, gap=gap, target=target)

    null_directions = spectrum.null_basis(settings.EPS_PSD * (1.0 + norm_inf(P)))
    if level is None or null_directions.shape[1] == 0:
        diagnostic = (
            f"no primal point recovered at mu={mu}: h(x_hat)={h_hat}, "
            f"null space dimension {null_directions.shape[1]}"
        )
        if target is RecoveryTarget.INTERIOR:
            logger.error(diagnostic)
        else:
            logger.warning(diagnostic)
        return RecoveryResult(x_star=None, gap=math.inf, target=target, diagnostic=diagnostic)

    for x in _candidates(inst, x_hat, null_directions, level):
        accepted, gap = _acceptable(inst, x, dual.value, level)
        if accepted:
            logger.info(f"SUCCESS, hard-case point recovered, gap {gap}")
            return RecoveryResult(x_star=x, gap=gap, target=target)

    diagnostic = f"attainment failure at mu={mu}: no null direction reaches h={level}"
    logger.warning(diagnostic)
    return RecoveryResult(x_star=None, gap=math.inf, target=target, diagnostic=diagnostic)
