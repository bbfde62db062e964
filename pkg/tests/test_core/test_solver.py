import math

import numpy as np
import pytest

from app.core import solver
from app.core.models import (
    DualResult,
    DualStatus,
    InfeasiblePrimal,
    Multiplier,
    PsdInterval,
    Route,
    UnboundedBelow,
)
from app.core.oracle import oracle_min_gtrs
from app.core.solver import GAP_NOTE, check_assumptions, slater_holds, solve
from app.core.verification import verify_certificate
from app.exceptions import NumericalFailure

from ..conf import constants
from ..test_utils import make_instance, random_instance

SEED, BUDGET = constants["SEED"], constants["BUDGET"]
VALUE_TOL = constants["VALUE_TOL"]


##################
#  DUAL PATH     #
##################


def test_solve_hard_case_upper_bound(e1):
    report = solve(e1, seed=SEED, budget=BUDGET)
    assert report.route is Route.DUAL_PATH
    assert report.value == pytest.approx(-4.0, abs=VALUE_TOL)
    assert abs(report.x_star[0]) == pytest.approx(2.0, abs=1e-6)
    assert report.dual.hard_case
    (cert,) = report.certificates
    assert isinstance(cert, Multiplier)
    assert cert.mu == pytest.approx(-1.0, abs=1e-8)
    assert report.gap_note is None


def test_solve_hard_case_lower_bound(e3):
    report = solve(e3, seed=SEED, budget=BUDGET)
    assert report.route is Route.DUAL_PATH
    assert report.value == pytest.approx(0.0, abs=VALUE_TOL)
    assert np.linalg.norm(report.x_star) == pytest.approx(1.0, abs=1e-6)
    assert report.dual.mu_star == pytest.approx(-1.0, abs=1e-8)


def test_solve_interior_minimizer(interior):
    report = solve(interior, seed=SEED, budget=BUDGET)
    assert report.value == pytest.approx(-4.0, abs=VALUE_TOL)
    assert report.x_star == pytest.approx([2.0])
    assert report.dual.mu_star == 0.0


def test_solve_active_bound_recovers_point():
    inst = make_instance([[1.0]], [-3.0], 9.0, [[1.0]], [0.0], 0.0, 1.0, 4.0)
    report = solve(inst, seed=SEED, budget=BUDGET)
    assert report.route is Route.DUAL_PATH
    assert report.value == pytest.approx(1.0, abs=VALUE_TOL)
    assert report.x_star == pytest.approx([2.0], abs=1e-10)
    assert report.diagnostic is None
    assert report.dual.mu_star == pytest.approx(0.5, abs=1e-12)


@pytest.mark.xfail(raises=NumericalFailure, strict=True)
def test_solve_rejects_unbounded_dual_on_feasible_instance(monkeypatch, e1):
    capped = DualResult(
        status=DualStatus.UNBOUNDED_ABOVE,
        mu_star=None,
        value=math.inf,
        psd_interval=PsdInterval(1.0, math.inf),
    )
    monkeypatch.setattr(solver, "maximize_dual", lambda inst: capped)
    solve(e1, seed=SEED, budget=BUDGET)


def test_solve_unbounded(unbounded):
    report = solve(unbounded, seed=SEED, budget=BUDGET)
    assert report.route is Route.DUAL_PATH
    assert report.value == -math.inf
    assert report.x_star is None
    (cert,) = report.certificates
    assert isinstance(cert, UnboundedBelow)
    assert not report.assumptions.item4.holds
    assert not report.assumptions.item5.holds


##################
#  OTHER ROUTES  #
##################


def test_solve_exception_case(e2):
    report = solve(e2, seed=SEED, budget=BUDGET)
    assert report.route is Route.B_ZERO_PATH
    assert report.value == pytest.approx(0.25, abs=VALUE_TOL)
    assert abs(report.x_star[0]) == pytest.approx(0.5)
    assert report.gap_note == GAP_NOTE
    assert report.product_value == pytest.approx(0.25, abs=1e-6)
    assert report.certificates == ()
    assert not report.assumptions.item1.holds


def test_solve_infeasible(infeasible):
    report = solve(infeasible, seed=SEED, budget=BUDGET)
    assert report.route is Route.INFEASIBLE_PATH
    assert report.value == math.inf
    assert isinstance(report.certificates[0], InfeasiblePrimal)
    assert not report.assumptions.item2.holds
    assert report.assumptions.item4.holds is None


def test_solve_boundary_collapse():
    inst = make_instance([[1.0]], [-1.0], 1.0, [[1.0]], [0.0], 0.0, -3.0, 0.0)
    assert slater_holds(inst) == (False, False)
    report = solve(inst, seed=SEED, budget=BUDGET)
    assert report.route is Route.BOUNDARY_COLLAPSE_PATH
    assert report.value == pytest.approx(1.0)
    assert report.x_star == pytest.approx([0.0])


def test_solve_reports_seed(e1):
    assert solve(e1, seed=7, budget=BUDGET).seed == 7


def test_solve_is_deterministic(e3):
    first = solve(e3, seed=SEED, budget=BUDGET)
    second = solve(e3, seed=SEED, budget=BUDGET)
    assert first.value == second.value
    assert np.array_equal(first.x_star, second.x_star)
    assert first.notes == second.notes


##################
#  ASSUMPTIONS   #
##################


def test_assumptions_regular_instance(e1):
    report = check_assumptions(e1, seed=SEED, budget=BUDGET)
    assert [item.holds for _, item in report.items()] == [True] * 5
    assert "epsilon" in report.item3.note


def test_assumptions_without_oracle(e1):
    report = check_assumptions(e1, use_oracle=False, value=-4.0)
    assert report.item4.holds
    assert report.item4.note == "solver value -4.0"


def test_assumptions_equality_has_no_interior():
    inst = make_instance([[1.0]], [0.0], 0.0, [[1.0]], [0.0], 0.0, 1.0, 1.0)
    report = check_assumptions(inst, use_oracle=False)
    assert not report.item3.holds
    assert report.item4.holds is None


##################
#  RANDOM SUITE  #
##################


@pytest.mark.slow
def test_solver_agrees_with_oracle():
    rng = np.random.default_rng(2024)
    checked = 0
    for _ in range(constants["RANDOM_SUITE_SIZE"]):
        inst = random_instance(rng, int(rng.integers(1, 5)))
        report = solve(inst, seed=SEED, budget=16)
        for cert in report.certificates:
            assert verify_certificate(inst, cert)
        holds, ambiguous = slater_holds(inst)
        if (
            report.route is not Route.DUAL_PATH
            or not holds
            or ambiguous
            or not math.isfinite(report.value)
        ):
            continue
        if not report.dual.hard_case:
            assert report.x_star is not None, report.diagnostic
        if report.x_star is None:
            continue
        oracle = oracle_min_gtrs(inst, seed=SEED, budget=16)
        if oracle.unbounded_suspected:
            continue
        assert report.value == pytest.approx(
            oracle.best_value, abs=constants["ORACLE_TOL"] * (1.0 + abs(report.value))
        )
        checked += 1
    assert checked > 0


@pytest.mark.slow
def test_boundedness_matches_dual_feasibility():
    rng = np.random.default_rng(606)
    checked = 0
    while checked < 60:
        inst = random_instance(rng, int(rng.integers(1, 3)))
        report = check_assumptions(inst, seed=SEED, budget=16)
        if not (report.item1.holds and report.item2.holds and report.item3.holds):
            continue
        assert report.item4.holds == report.item5.holds, (report.item4.note, report.item5.note)
        checked += 1
