import logging
import math
from typing import Optional

from app.core.degenerate import (
    is_affine_constraint,
    product_reformulation,
    solve_b_zero,
    solve_boundary_collapse,
)
from app.core.dual import dual_feasible, maximize_dual
from app.core.models import (
    AssumptionReport,
    Certificate,
    DualStatus,
    GtrsInstance,
    InfeasiblePrimal,
    ItemVerdict,
    Multiplier,
    Route,
    SolveReport,
    UnboundedBelow,
)
from app.core.oracle import oracle_min_gtrs
from app.core.quadratic_range import (
    check_feasible,
    check_interval_slater,
    lifted_constraint_value,
    quad_range,
    ricq_witness,
)
from app.core.recovery import recover
from app.core.verification import verify_certificate
from app.custom_types import DegenerateSolution, FeasibilityCheck, OracleResult, SolveStatus
from app.exceptions import NumericalFailure, OracleInfeasible
from app.utils import format_float, format_vector, log_handler, vec_norm_inf
from config import config

logger = logging.getLogger(__name__)
logger.addHandler(log_handler)

GAP_NOTE = "duality gap is +infinity"


def _run_oracle(inst: GtrsInstance, seed: int, budget: int) -> Optional[OracleResult]:
    try:
        return oracle_min_gtrs(inst, seed=seed, budget=budget)
    except OracleInfeasible as e:
        logger.warning(f"oracle unavailable: {e}")
        return None


def slater_holds(inst: GtrsInstance) -> tuple[bool, bool]:
    """Strict feasibility; for alpha = beta the range of h must straddle alpha.

    Returns (holds, boundary_ambiguous).
    """
    if inst.is_equality:
        rng = quad_range(inst.h)
        return rng.inf < inst.alpha < rng.sup, False
    check = check_interval_slater(inst)
    return check.holds, check.boundary_ambiguous


####################
#  ASSUMPTIONS     #
####################


def _item_bounded(
    feasible: bool, value: Optional[float], oracle: Optional[OracleResult], use_oracle: bool
) -> ItemVerdict:
    if not feasible:
        return ItemVerdict(None, "not applicable: infeasible")
    if use_oracle and oracle is not None:
        values = ", ".join(format_float(v) for v in oracle.radius_values)
        return ItemVerdict(
            not oracle.unbounded_suspected, f"oracle best per radius [{values}]"
        )
    if value is None:
        return ItemVerdict(None, "not checked")
    return ItemVerdict(value > -math.inf, f"solver value {format_float(value)}")


def check_assumptions(
    inst: GtrsInstance,
    *,
    seed: Optional[int] = None,
    budget: Optional[int] = None,
    use_oracle: bool = True,
    value: Optional[float] = None,
    feasibility: Optional[FeasibilityCheck] = None,
    oracle: Optional[OracleResult] = None,
) -> AssumptionReport:
    """Verdicts for B != 0, feasibility, RICQ, boundedness and dual feasibility."""
    seed = config.seed if seed is None else seed
    budget = config.oracle_budget if budget is None else budget
    feasibility = feasibility or check_feasible(inst)

    affine = is_affine_constraint(inst)
    item1 = ItemVerdict(not affine, "B = 0" if affine else "B != 0")

    if feasibility.feasible:
        item2 = ItemVerdict(True, f"point {format_vector(feasibility.point)}")
    else:
        item2 = ItemVerdict(False, "band misses the range of h")

    if inst.alpha < inst.beta:
        ricq = ricq_witness(inst)
        if ricq.holds:
            lifted = lifted_constraint_value(inst, ricq.x_hat, ricq.epsilon)
            item3 = ItemVerdict(
                True,
                f"x_hat {format_vector(ricq.x_hat)}, epsilon {format_float(ricq.epsilon)}, "
                f"lifted value {format_float(lifted)}",
            )
        else:
            item3 = ItemVerdict(False, "no x with alpha < h(x) < beta")
    else:
        item3 = ItemVerdict(False, "alpha = beta leaves no relative interior")

    if use_oracle and oracle is None and feasibility.feasible:
        oracle = _run_oracle(inst, seed, budget)
    item4 = _item_bounded(feasibility.feasible, value, oracle, use_oracle)

    holds, mu = dual_feasible(inst)
    item5 = ItemVerdict(holds, f"mu {format_float(mu)}" if holds else "no dual-feasible mu")
    return AssumptionReport(item1, item2, item3, item4, item5)


####################
#  ROUTES          #
####################


def _verified(inst: GtrsInstance, certificates: list[Certificate]) -> tuple[list[Certificate], list[str]]:
    kept, notes = [], []
    for cert in certificates:
        if verify_certificate(inst, cert):
            kept.append(cert)
        else:
            logger.error(f"dropping {cert.kind} certificate that failed verification")
            notes.append(f"{cert.kind} certificate failed verification")
    return kept, notes


def _unbounded_certificate(
    inst: GtrsInstance, oracle: Optional[OracleResult]
) -> Optional[UnboundedBelow]:
    if oracle is None or not oracle.unbounded_suspected:
        return None
    points = oracle.radius_points
    ray = UnboundedBelow(direction_hint=points[-1] - points[-2], point=points[-2])
    if verify_certificate(inst, ray):
        return ray
    evidence = UnboundedBelow(evidence=tuple(points))
    if verify_certificate(inst, evidence):
        return evidence
    return None


def _solution_certificates(solution: DegenerateSolution) -> list[Certificate]:
    return [solution.certificate] if solution.certificate is not None else []


def _b_zero_route(inst: GtrsInstance) -> dict:
    solution = solve_b_zero(inst)
    dual = maximize_dual(inst)
    certificates = _solution_certificates(solution)
    notes = []
    if dual.is_optimal and solution.status is SolveStatus.OPTIMAL:
        certificates.append(Multiplier.from_mu(-dual.mu_star, level=dual.value))

    product_value = None
    if vec_norm_inf(inst.b) > 0 and inst.is_interval:
        product_value = product_reformulation(inst).value
        notes.append(f"product reformulation value {format_float(product_value)}")

    gap_note = None
    exception_regime = dual.status is DualStatus.DUAL_INFEASIBLE
    if exception_regime and solution.status is SolveStatus.OPTIMAL:
        gap_note = GAP_NOTE
        logger.info("exception regime: primal finite while the dual is infeasible")
    return dict(
        route=Route.B_ZERO_PATH,
        value=solution.value,
        x_star=solution.x_star,
        certificates=certificates,
        dual=dual,
        product_value=product_value,
        gap_note=gap_note,
        notes=notes,
    )


def _collapse_route(inst: GtrsInstance) -> dict:
    solution = solve_boundary_collapse(inst)
    return dict(
        route=Route.BOUNDARY_COLLAPSE_PATH,
        value=solution.value,
        x_star=solution.x_star,
        certificates=_solution_certificates(solution),
        dual=maximize_dual(inst),
    )


def _dual_route(
    inst: GtrsInstance, seed: int, budget: int
) -> tuple[dict, Optional[OracleResult]]:
    dual = maximize_dual(inst)
    if dual.status is DualStatus.UNBOUNDED_ABOVE:
        # weak duality bounds the dual by any feasible value
        raise NumericalFailure(
            f"dual unbounded above on a feasible instance: {dual.status.description}"
        )
    if dual.is_optimal:
        recovery = recover(inst, dual)
        certificate = Multiplier.from_mu(-dual.mu_star, level=dual.value)
        return (
            dict(
                route=Route.DUAL_PATH,
                value=dual.value,
                x_star=recovery.x_star,
                certificates=[certificate],
                dual=dual,
                diagnostic=recovery.diagnostic,
                notes=[f"complementarity target {recovery.target.value}"],
            ),
            None,
        )

    oracle = _run_oracle(inst, seed, budget)
    certificate = _unbounded_certificate(inst, oracle)
    notes = [] if certificate else ["oracle evidence of unboundedness inconclusive"]
    return (
        dict(
            route=Route.DUAL_PATH,
            value=-math.inf,
            certificates=[certificate] if certificate else [],
            dual=dual,
            notes=notes,
        ),
        oracle,
    )


def solve(
    inst: GtrsInstance,
    *,
    seed: Optional[int] = None,
    budget: Optional[int] = None,
    use_oracle: bool = True,
) -> SolveReport:
    """Route the instance, solve it and assemble a certified report."""
    seed = config.seed if seed is None else seed
    budget = config.oracle_budget if budget is None else budget
    feasibility = check_feasible(inst)
    ambiguous = False
    oracle = None

    if not feasibility.feasible:
        fields = dict(route=Route.INFEASIBLE_PATH, value=math.inf, certificates=[InfeasiblePrimal()])
    elif is_affine_constraint(inst):
        fields = _b_zero_route(inst)
    else:
        holds, ambiguous = slater_holds(inst)
        if not holds:
            fields = _collapse_route(inst)
        else:
            fields, oracle = _dual_route(inst, seed, budget)
    logger.info(f"route {fields['route'].value}, value {fields['value']}")

    certificates, failures = _verified(inst, fields.pop("certificates"))
    notes = fields.pop("notes", []) + failures
    assumptions = check_assumptions(
        inst,
        seed=seed,
        budget=budget,
        use_oracle=use_oracle,
        value=fields["value"],
        feasibility=feasibility,
        oracle=oracle,
    )
    return SolveReport(
        assumptions=assumptions,
        certificates=tuple(certificates),
        boundary_ambiguous=ambiguous,
        seed=seed,
        notes=tuple(notes),
        **fields,
    )
