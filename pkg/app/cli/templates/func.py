import math
from typing import Optional

from app.cli import string_constants as sc
from app.cli.templates import texts
from app.core import serialization
from app.core.models import (
    AssumptionReport,
    Certificate,
    Counterexample,
    ExceptionNu,
    InfeasiblePrimal,
    Multiplier,
    SlemmaVerdict,
    SolveReport,
    UnboundedBelow,
)
from app.custom_types import OracleResult
from app.exceptions import ParseError, PreconditionViolation
from app.utils import format_float, format_vector

from .base import Template


##################
#  Certificates  #
##################
def render_certificate(cert: Certificate) -> str:
    if isinstance(cert, Multiplier):
        return texts.multiplier_text.format(
            mu=format_float(cert.mu),
            mu_plus=format_float(cert.mu_plus),
            mu_minus=format_float(cert.mu_minus),
            level=format_float(cert.level),
        )
    if isinstance(cert, ExceptionNu):
        return texts.exception_text.format(
            nu=format_float(cert.nu),
            matrix_min_eig=format_float(cert.matrix_min_eig),
        )
    if isinstance(cert, Counterexample):
        return texts.counterexample_text.format(
            x=format_vector(cert.x),
            f_value=format_float(cert.f_value),
            h_value=format_float(cert.h_value),
        )
    if isinstance(cert, InfeasiblePrimal):
        return texts.infeasible_text
    if isinstance(cert, UnboundedBelow):
        if cert.point is not None and cert.direction_hint is not None:
            return texts.unbounded_ray_text.format(
                direction=format_vector(cert.direction_hint),
                point=format_vector(cert.point),
            )
        return texts.unbounded_evidence_text.format(count=len(cert.evidence))
    return cert.kind


def _verdict_word(holds: Optional[bool]) -> str:
    if holds is None:
        return "n/a"
    return "holds" if holds else "fails"


def render_assumptions(report: AssumptionReport) -> list[str]:
    lines = [texts.assumptions_header]
    for name, item in report.items():
        lines.append(
            texts.item_line.format(
                name=name,
                title=texts.item_titles[name],
                verdict=_verdict_word(item.holds),
                note=item.note,
            )
        )
    return lines


###########
#  Solve  #
###########
def _dual_line(report: SolveReport) -> str:
    dual = report.dual
    lo, hi = dual.psd_interval.as_pair()
    return texts.dual_line.format(
        status=dual.status.value,
        mu_star="n/a" if dual.mu_star is None else format_float(dual.mu_star),
        lo=format_float(lo),
        hi=format_float(hi),
        capped=" (capped)" if dual.psd_interval.capped else "",
        hard_case="yes" if dual.hard_case else "no",
    )


def render_solve_report(report: SolveReport) -> str:
    lines = [
        texts.route_line.format(
            route=report.route.value, description=report.route.description
        ),
        texts.value_line.format(value=format_float(report.value)),
    ]
    if report.x_star is not None:
        lines.append(texts.x_star_line.format(x_star=format_vector(report.x_star)))
    elif math.isfinite(report.value):
        lines.append(texts.x_star_missing)
    if report.dual is not None:
        lines.append(_dual_line(report))
    if report.gap_note:
        lines.append(texts.gap_line.format(gap_note=report.gap_note))
    if report.product_value is not None:
        lines.append(texts.product_line.format(value=format_float(report.product_value)))
    if report.diagnostic:
        lines.append(texts.diagnostic_line.format(diagnostic=report.diagnostic))
    if report.boundary_ambiguous:
        lines.append(texts.boundary_ambiguous_note)

    if report.certificates:
        lines.append(texts.certificates_header)
        lines.extend(f"  {render_certificate(c)}" for c in report.certificates)
    else:
        lines.append(texts.no_certificates)
    lines.extend(render_assumptions(report.assumptions))
    if report.notes:
        lines.append(texts.notes_header)
        lines.extend(f"  {note}" for note in report.notes)
    lines.append(texts.seed_line.format(seed=report.seed))
    return "\n".join(lines)


def show_solve_report(report: SolveReport, as_json: bool) -> Template:
    if as_json:
        text = serialization.dump_model(serialization.solve_report_file(report)).rstrip("\n")
    else:
        text = render_solve_report(report)
    return Template(text)


def show_assumptions(report: AssumptionReport, seed: int) -> Template:
    lines = render_assumptions(report)
    lines.append(texts.seed_line.format(seed=seed))
    return Template("\n".join(lines))


############
#  Slemma  #
############
def _verdict_summary(verdict: SlemmaVerdict) -> str:
    cert = verdict.certificate
    if isinstance(cert, ExceptionNu):
        return f"nu={format_float(cert.nu)}"
    if isinstance(cert, Multiplier):
        return f"mu={format_float(cert.mu)}"
    if isinstance(cert, Counterexample):
        return f"x={format_vector(cert.x)}"
    return ""


def show_slemma_verdict(verdict: SlemmaVerdict, as_json: bool, seed: int) -> Template:
    if as_json:
        text = serialization.dump_model(serialization.slemma_verdict_file(verdict))
        return Template(text.rstrip("\n"))
    lines = [
        texts.slemma_verdict_line.format(
            verdict=verdict.kind.value, summary=_verdict_summary(verdict)
        ),
        texts.slemma_case_line.format(case=verdict.case),
        f"  {render_certificate(verdict.certificate)}",
    ]
    if verdict.boundary_ambiguous:
        lines.append(texts.boundary_ambiguous_note)
    lines.append(texts.seed_line.format(seed=seed))
    return Template("\n".join(lines))


############
#  Oracle  #
############
def show_oracle_compare(
    report: SolveReport, oracle: Optional[OracleResult], seed: int
) -> Template:
    lines = [
        texts.oracle_compare_header,
        texts.oracle_row.format(name="solver", value=format_float(report.value)),
    ]
    if oracle is None:
        lines.append(texts.oracle_unavailable)
    else:
        lines.append(texts.oracle_row.format(name="oracle", value=format_float(oracle.best_value)))
        if math.isfinite(report.value) and math.isfinite(oracle.best_value):
            absolute = abs(report.value - oracle.best_value)
            relative = absolute / (1.0 + abs(report.value))
            lines.append(
                texts.oracle_gap_line.format(
                    absolute=format_float(absolute), relative=format_float(relative)
                )
            )
        if oracle.unbounded_suspected:
            lines.append(texts.oracle_suspected)
    lines.append(texts.seed_line.format(seed=seed))
    return Template("\n".join(lines))


#############
#  Certify  #
#############
def show_certificate_verdict(cert: Certificate, valid: bool) -> Template:
    if valid:
        return Template(texts.certificate_accepted.format(kind=cert.kind))
    return Template(
        texts.certificate_rejected.format(kind=cert.kind),
        exit_code=sc.EXIT_CERTIFICATE_REJECTED,
    )


###########
#  Error  #
###########
def parse_error(exception: ParseError) -> Template:
    return Template(
        texts.show_parse_error(exception), err=True, exit_code=sc.EXIT_PARSE_ERROR
    )


def precondition_violation(exception: PreconditionViolation) -> Template:
    return Template(
        texts.show_precondition_violation(exception),
        err=True,
        exit_code=sc.EXIT_PRECONDITION,
    )


def numerical_failure(exception: Exception) -> Template:
    return Template(
        texts.show_numerical_failure(exception),
        err=True,
        exit_code=sc.EXIT_NUMERICAL_FAILURE,
    )
