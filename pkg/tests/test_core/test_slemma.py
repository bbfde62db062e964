import numpy as np
import pytest

from app.core.models import (
    Counterexample,
    ExceptionNu,
    Multiplier,
    VerdictKind,
)
from app.core.slemma import (
    build_exception_matrix_equality,
    build_exception_matrix_interval,
    find_counterexample,
    has_exception_signature,
    slemma_eq,
    slemma_for_instance,
    slemma_ineq,
    slemma_interval,
)
from app.core.quadratic_range import check_interval_slater
from app.core.verification import verify_certificate
from app.exceptions import PreconditionViolation

from ..conf import constants
from ..test_utils import (
    INF,
    grid_minimum,
    grid_minimum_2d,
    make_instance,
    quadratic,
    random_instance,
)

BUDGET = constants["BUDGET"]


def x_squared(shift: float = 0.0, scale: float = 1.0):
    return quadratic([[scale]], [0.0], shift)


##################
#  INEQUALITY    #
##################


def test_slemma_ineq_holds():
    f, h = x_squared(1.0, -1.0), x_squared(-1.0)
    verdict = slemma_ineq(f, h)
    assert verdict.kind is VerdictKind.S2_HOLDS
    assert isinstance(verdict.certificate, Multiplier)
    assert verdict.certificate.classical == pytest.approx(1.0, abs=1e-6)
    assert verdict.s1_holds


def test_slemma_ineq_fails_with_counterexample():
    f, h = x_squared(0.0, -1.0), x_squared(-1.0)
    verdict = slemma_ineq(f, h, budget=BUDGET)
    assert verdict.kind is VerdictKind.S1_FAILS
    cert = verdict.certificate
    assert abs(cert.x[0]) == pytest.approx(1.0)
    assert cert.f_value < 0
    assert verify_certificate(make_instance([[-1.0]], [0.0], 0.0, [[1.0]], [0.0], -1.0, -INF, 0.0), cert)


@pytest.mark.xfail(raises=PreconditionViolation, strict=True)
def test_slemma_ineq_needs_strict_point():
    slemma_ineq(x_squared(), x_squared(1.0))


##################
#  EQUALITY      #
##################


def test_slemma_eq_holds_with_negative_multiplier():
    f = h = x_squared(-1.0)
    verdict = slemma_eq(f, h)
    assert verdict.kind is VerdictKind.S2_HOLDS
    assert verdict.certificate.classical == pytest.approx(-1.0, abs=1e-6)


def test_slemma_eq_exception_holds():
    f = x_squared(1.0, -1.0)
    h = quadratic([[0.0]], [1.0], 0.0)
    verdict = slemma_eq(f, h)
    assert verdict.kind is VerdictKind.EXCEPTION_HOLDS
    assert isinstance(verdict.certificate, ExceptionNu)
    assert verdict.certificate.nu == 0.0
    assert verdict.certificate.matrix_min_eig == pytest.approx(1.0)
    assert verdict.s1_holds


def test_slemma_eq_both_fail():
    f = x_squared(-1.0, -1.0)
    h = quadratic([[0.0]], [1.0], 0.0)
    verdict = slemma_eq(f, h)
    assert verdict.kind is VerdictKind.BOTH_FAIL_EXCEPTION_CASE
    assert verdict.certificate.x == pytest.approx([0.0])
    assert verdict.certificate.f_value == pytest.approx(-1.0)


@pytest.mark.xfail(raises=PreconditionViolation, strict=True)
def test_slemma_eq_needs_sign_change():
    slemma_eq(x_squared(-1.0), x_squared())


def test_equality_exception_matrix():
    f = x_squared(1.0, -1.0)
    h = quadratic([[0.0]], [1.0], 0.0)
    assert has_exception_signature(f, h)
    assert build_exception_matrix_equality(f, h).tolist() == [[1.0]]


##################
#  INTERVAL      #
##################


def test_interval_exception_case(e2):
    verdict = slemma_interval(e2)
    assert verdict.kind is VerdictKind.EXCEPTION_HOLDS
    assert verdict.case == "exception"
    assert 0.25 - 1e-6 <= verdict.certificate.nu <= 0.5 + 1e-6
    assert verdict.certificate.nu == pytest.approx(0.375, abs=1e-6)
    assert verdict.certificate.matrix_min_eig == pytest.approx(0.125, abs=1e-6)
    assert verify_certificate(e2, verdict.certificate)


def test_interval_exception_case_both_fail():
    # f = -x^2 on -1 <= 2x <= 1: no nu works once c = 0
    inst = make_instance([[-1.0]], [0.0], 0.0, [[0.0]], [1.0], 0.0, -1.0, 1.0)
    verdict = slemma_interval(inst, budget=BUDGET)
    assert verdict.kind is VerdictKind.BOTH_FAIL_EXCEPTION_CASE
    assert verdict.case == "exception"
    assert not verdict.s1_holds
    cert = verdict.certificate
    assert isinstance(cert, Counterexample)
    assert cert.f_value < 0
    assert -1.0 <= 2.0 * cert.x[0] <= 1.0
    assert verify_certificate(inst, cert)


def test_interval_exception_matrix_corners(e2):
    M = build_exception_matrix_interval(e2.f, e2.h, e2.alpha, e2.beta, 0.25).full
    assert np.allclose(M, [[0.0, 0.0], [0.0, 0.25]])


def test_interval_upper_bound_only(e4):
    verdict = slemma_interval(e4)
    assert verdict.kind is VerdictKind.S2_HOLDS
    assert verdict.case == "upper bound only"
    assert verdict.certificate.mu == pytest.approx(-1.0, abs=1e-6)
    assert verify_certificate(e4, verdict.certificate)


def test_interval_straddle_counterexample(e1):
    verdict = slemma_interval(e1, budget=BUDGET)
    assert verdict.kind is VerdictKind.S1_FAILS
    assert verdict.case == "straddle"
    assert verify_certificate(e1, verdict.certificate)


def test_interval_range_inside_band():
    # constant h = 0 sits inside [-1, 1]
    inst = make_instance([[1.0]], [0.0], 1.0, [[0.0]], [0.0], 0.0, -1.0, 1.0)
    verdict = slemma_interval(inst)
    assert verdict.kind is VerdictKind.S2_HOLDS
    assert verify_certificate(inst, verdict.certificate)


@pytest.mark.xfail(raises=PreconditionViolation, strict=True)
def test_interval_needs_finite_band(unbounded):
    slemma_interval(unbounded)


##################
#  DISPATCH      #
##################


def test_slemma_for_instance_interval(e2):
    run = slemma_for_instance(e2, "interval")
    assert run.instance is e2
    assert run.verdict.kind is VerdictKind.EXCEPTION_HOLDS


def test_slemma_for_instance_ineq_uses_lower_bound(unbounded):
    run = slemma_for_instance(unbounded, "ineq", budget=BUDGET)
    assert run.instance.beta == 0.0
    assert run.verdict.kind is VerdictKind.S1_FAILS
    assert verify_certificate(run.instance, run.verdict.certificate)


def test_slemma_for_instance_eq():
    inst = make_instance([[1.0]], [0.0], -1.0, [[1.0]], [0.0], 0.0, 1.0, 1.0)
    run = slemma_for_instance(inst, "eq")
    assert run.instance.alpha == run.instance.beta == 0.0
    assert run.verdict.kind is VerdictKind.S2_HOLDS
    assert verify_certificate(run.instance, run.verdict.certificate)


@pytest.mark.xfail(raises=PreconditionViolation, strict=True)
def test_slemma_for_instance_unknown_kind(e1):
    slemma_for_instance(e1, "product")


def test_find_counterexample_on_hard_case(e1):
    cert = find_counterexample(e1, budget=BUDGET)
    assert isinstance(cert, Counterexample)
    assert cert.f_value < 0


##################
#  RANDOM SUITE  #
##################


@pytest.mark.slow
def test_interval_verdict_matches_grid():
    rng = np.random.default_rng(31)
    checked = 0
    while checked < 200:
        n = int(rng.integers(1, 3))
        inst = random_instance(rng, n)
        slater = check_interval_slater(inst)
        if not slater.holds or slater.boundary_ambiguous:
            continue
        verdict = slemma_interval(inst, seed=0, budget=BUDGET)
        assert verify_certificate(inst, verdict.certificate)
        grid = grid_minimum(inst) if n == 1 else grid_minimum_2d(inst)
        # a negative grid value is a point solving the system
        if grid < -1e-6 * (1.0 + abs(grid)):
            assert not verdict.s1_holds
        if verdict.s1_holds:
            assert grid >= -1e-6
        checked += 1
