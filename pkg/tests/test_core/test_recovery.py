import math

import pytest

from app.core.dual import maximize_dual
from app.core.recovery import complementarity_target, recover
from app.custom_types import RecoveryTarget
from app.exceptions import PreconditionViolation

from ..conf import constants
from ..test_utils import make_instance

TOL = constants["VALUE_TOL"]


@pytest.mark.parametrize(
    "mu, expected",
    (
        (1.0, RecoveryTarget.UPPER_BOUND),
        (-1.0, RecoveryTarget.LOWER_BOUND),
        (0.0, RecoveryTarget.INTERIOR),
    ),
    ids=("positive", "negative", "zero"),
)
def test_complementarity_target(mu, expected):
    assert complementarity_target(mu) is expected


def test_recover_hard_case_upper_bound(e1):
    dual = maximize_dual(e1)
    result = recover(e1, dual)
    assert result.succeeded
    assert result.target is RecoveryTarget.UPPER_BOUND
    assert result.x_star.tolist() == [2.0]
    assert abs(e1.f.evaluate(result.x_star) - dual.value) <= TOL
    assert abs(e1.h.evaluate(result.x_star) - e1.beta) <= TOL


def test_recover_hard_case_lower_bound(e3):
    dual = maximize_dual(e3)
    result = recover(e3, dual)
    assert result.succeeded
    assert result.target is RecoveryTarget.LOWER_BOUND
    assert abs(e3.f.evaluate(result.x_star) - dual.value) <= TOL
    assert abs(e3.h.evaluate(result.x_star) - e3.alpha) <= TOL


def test_recover_interior(interior):
    result = recover(interior, maximize_dual(interior))
    assert result.target is RecoveryTarget.INTERIOR
    assert result.x_star.tolist() == [2.0]
    assert result.gap == 0.0


@pytest.mark.xfail(raises=PreconditionViolation, strict=True)
def test_recover_requires_optimal_dual(e2):
    recover(e2, maximize_dual(e2))


def test_recover_failure_carries_diagnostic(e1):
    dual = maximize_dual(e1)
    # a wrong value makes every candidate miss the gap test
    shifted = type(dual)(dual.status, dual.mu_star, dual.value - 1.0, dual.psd_interval)
    result = recover(e1, shifted)
    assert not result.succeeded
    assert result.gap == math.inf
    assert "attainment failure" in result.diagnostic


def test_recover_nonsingular_active_upper_bound():
    # f = (x - 3)^2 on 1 <= x^2 <= 4: the minimizer x = 2 sits on the upper bound
    inst = make_instance([[1.0]], [-3.0], 9.0, [[1.0]], [0.0], 0.0, 1.0, 4.0)
    dual = maximize_dual(inst)
    result = recover(inst, dual)
    assert result.succeeded
    assert result.target is RecoveryTarget.UPPER_BOUND
    assert result.x_star == pytest.approx([2.0], abs=1e-10)
    assert inst.f.evaluate(result.x_star) == pytest.approx(1.0, abs=TOL)
    assert abs(result.gap) <= TOL


def test_recover_nonsingular_active_lower_bound():
    # f = (x - 1/2)^2 on 1 <= x^2 <= 4: the minimizer x = 1 sits on the lower bound
    inst = make_instance([[1.0]], [-0.5], 0.25, [[1.0]], [0.0], 0.0, 1.0, 4.0)
    dual = maximize_dual(inst)
    assert dual.mu_star == pytest.approx(-0.5, abs=1e-12)
    result = recover(inst, dual)
    assert result.succeeded
    assert result.target is RecoveryTarget.LOWER_BOUND
    assert result.x_star == pytest.approx([1.0], abs=1e-10)
    assert inst.f.evaluate(result.x_star) == pytest.approx(0.25, abs=TOL)
