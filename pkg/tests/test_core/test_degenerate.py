import math

import numpy as np
import pytest

from app.core.degenerate import (
    is_affine_constraint,
    minimize_scalar_quadratic,
    product_constraint,
    product_reformulation,
    solve_b_zero,
    solve_boundary_collapse,
)
from app.core.models import InfeasiblePrimal, UnboundedBelow
from app.core.oracle import oracle_min_gtrs
from app.core.verification import verify_certificate
from app.custom_types import SolveStatus
from app.exceptions import PreconditionViolation

from ..conf import constants
from ..test_utils import INF, make_instance, random_affine_instance

scalar_test_ids = (
    "convex_vertex_inside",
    "convex_vertex_clipped",
    "concave_lower_end_wins_tie",
    "concave_unbounded",
    "linear_unbounded_left",
    "flat",
)
scalar_cases = (
    ((1.0, -1.0, 0.0, -5.0, 5.0), (-1.0, 1.0, 0.0)),
    ((1.0, -1.0, 0.0, 2.0, 5.0), (0.0, 2.0, 0.0)),
    ((-1.0, 0.0, 1.0, -1.0, 1.0), (0.0, -1.0, 0.0)),
    ((-1.0, 0.0, 1.0, 0.0, INF), (-INF, None, 1.0)),
    ((0.0, 1.0, 0.0, -INF, 0.0), (-INF, None, -1.0)),
    ((0.0, 0.0, 3.0, 1.0, 2.0), (3.0, 1.0, 0.0)),
)


##################
#  SCALAR PIECE  #
##################


@pytest.mark.parametrize("args, expected", scalar_cases, ids=scalar_test_ids)
def test_minimize_scalar_quadratic(args, expected):
    assert minimize_scalar_quadratic(*args) == expected


##################
#  AFFINE h      #
##################


def test_is_affine_constraint(e1, e2):
    assert is_affine_constraint(e2)
    assert not is_affine_constraint(e1)


def test_solve_b_zero_exception_case(e2):
    solution = solve_b_zero(e2)
    assert solution.status is SolveStatus.OPTIMAL
    assert solution.value == pytest.approx(0.25, abs=1e-9)
    assert abs(solution.x_star[0]) == pytest.approx(0.5, abs=1e-12)


def test_solve_b_zero_convex():
    inst = make_instance([[1.0]], [0.0], 0.0, [[0.0]], [1.0], 0.0, 1.0, 3.0)
    solution = solve_b_zero(inst)
    assert solution.value == pytest.approx(0.25)
    assert solution.x_star == pytest.approx([0.5])


def test_solve_b_zero_constant_constraint_outside_band():
    inst = make_instance([[1.0]], [0.0], 0.0, [[0.0]], [0.0], 5.0, 0.0, 1.0)
    solution = solve_b_zero(inst)
    assert solution.status is SolveStatus.INFEASIBLE
    assert isinstance(solution.certificate, InfeasiblePrimal)


def test_solve_b_zero_indefinite_on_slab():
    # f = x1^2 - x2^2, slab 0 <= 2 x1 <= 1: x2 is free
    inst = make_instance(
        [[1.0, 0.0], [0.0, -1.0]], [0.0, 0.0], 0.0,
        [[0.0, 0.0], [0.0, 0.0]], [1.0, 0.0], 0.0,
        0.0, 1.0,
    )
    solution = solve_b_zero(inst)
    assert solution.status is SolveStatus.UNBOUNDED
    assert solution.value == -math.inf
    assert verify_certificate(inst, solution.certificate)


def test_solve_b_zero_unbounded_half_line():
    # f = -x^2 with 2x >= 0: x -> +inf
    inst = make_instance([[-1.0]], [0.0], 0.0, [[0.0]], [1.0], 0.0, 0.0, INF)
    solution = solve_b_zero(inst)
    assert solution.status is SolveStatus.UNBOUNDED
    assert isinstance(solution.certificate, UnboundedBelow)
    assert verify_certificate(inst, solution.certificate)


@pytest.mark.xfail(raises=PreconditionViolation, strict=True)
def test_solve_b_zero_rejects_quadratic_constraint(e1):
    solve_b_zero(e1)


##################
#  COLLAPSE      #
##################


def test_boundary_collapse_to_minimizer():
    # h = x^2 on [-3, 0] is the single point 0
    inst = make_instance([[1.0]], [-1.0], 1.0, [[1.0]], [0.0], 0.0, -3.0, 0.0)
    solution = solve_boundary_collapse(inst)
    assert solution.status is SolveStatus.OPTIMAL
    assert solution.x_star == pytest.approx([0.0])
    assert solution.value == pytest.approx(1.0)


def test_boundary_collapse_on_subspace():
    # h = x1^2 on [-1, 0] leaves x2 free; f = x2^2 + 2 x2 has minimum -1
    inst = make_instance(
        [[0.0, 0.0], [0.0, 1.0]], [0.0, 1.0], 0.0,
        [[1.0, 0.0], [0.0, 0.0]], [0.0, 0.0], 0.0,
        -1.0, 0.0,
    )
    solution = solve_boundary_collapse(inst)
    assert solution.value == pytest.approx(-1.0)
    assert solution.x_star == pytest.approx([0.0, -1.0])


@pytest.mark.xfail(raises=PreconditionViolation, strict=True)
def test_boundary_collapse_requires_failed_slater(e1):
    solve_boundary_collapse(e1)


##################
#  PRODUCT FORM  #
##################


def test_product_constraint_e2(e2):
    g = product_constraint(e2)
    assert g.M.full.tolist() == [[4.0]]
    assert g.m.tolist() == [0.0]
    assert g.k == -1.0


def test_product_reformulation_closes_gap(e2):
    result = product_reformulation(e2)
    assert result.value == pytest.approx(0.25, abs=1e-6)
    assert verify_certificate(result.instance, result.certificate)


@pytest.mark.xfail(raises=PreconditionViolation, strict=True)
def test_product_reformulation_requires_finite_band():
    inst = make_instance([[-1.0]], [0.0], 0.0, [[0.0]], [1.0], 0.0, 0.0, INF)
    product_reformulation(inst)


##################
#  RANDOM SUITE  #
##################


@pytest.mark.slow
def test_solve_b_zero_agrees_with_oracle():
    rng = np.random.default_rng(77)
    for _ in range(40):
        inst = random_affine_instance(rng, int(rng.integers(1, 3)))
        solution = solve_b_zero(inst)
        oracle = oracle_min_gtrs(inst, seed=0, budget=constants["BUDGET"])
        if solution.status is SolveStatus.OPTIMAL:
            assert solution.value == pytest.approx(
                oracle.best_value, abs=constants["ORACLE_TOL"] * (1.0 + abs(solution.value))
            )
        else:
            assert solution.status is SolveStatus.UNBOUNDED
            assert verify_certificate(inst, solution.certificate)
            assert oracle.radius_values[-1] < oracle.radius_values[0]


@pytest.mark.slow
def test_product_reformulation_matches_affine_solution():
    rng = np.random.default_rng(78)
    for _ in range(30):
        inst = random_affine_instance(rng, int(rng.integers(1, 3)))
        solution = solve_b_zero(inst)
        result = product_reformulation(inst)
        if solution.status is SolveStatus.OPTIMAL:
            assert result.value == pytest.approx(
                solution.value, abs=constants["ORACLE_TOL"] * (1.0 + abs(solution.value))
            )
        else:
            assert result.value == -math.inf
