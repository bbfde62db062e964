"""Canonical JSON forms of instances, certificates and reports.

Floats are written as the shortest decimal that round-trips the double,
infinite values as the strings "inf" / "-inf".
"""
import json
import logging
import math
import re
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    FiniteFloat,
    PlainSerializer,
    TypeAdapter,
    ValidationError,
    model_validator,
)

from app.core.models import (
    AssumptionReport,
    Certificate,
    Counterexample,
    ExceptionNu,
    GtrsInstance,
    InfeasiblePrimal,
    Multiplier,
    Quadratic,
    SlemmaVerdict,
    SolveReport,
    SymMatrix,
    UnboundedBelow,
    triangle_size,
)
from app.exceptions import CertificateParseError, InstanceParseError, ModelException, ParseError
from app.utils import log_handler

logger = logging.getLogger(__name__)
logger.addHandler(log_handler)

JSON_INDENT = 2
_INFINITIES = {"inf": math.inf, "+inf": math.inf, "-inf": -math.inf}


def _parse_extended(value: Any) -> Any:
    if isinstance(value, str):
        try:
            return _INFINITIES[value.strip().lower()]
        except KeyError:
            raise ValueError(f"expected a number or 'inf'/'-inf', got {value!r}")
    return value


def _dump_extended(value: float) -> float | str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


ExtendedFloat = Annotated[
    float,
    BeforeValidator(_parse_extended),
    PlainSerializer(_dump_extended, when_used="json"),
]
Vector = list[FiniteFloat]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=False)


##############
#  INSTANCE  #
##############


class InstanceFile(StrictModel):
    n: int = Field(ge=1)
    A: Vector
    a: Vector
    c: FiniteFloat
    B: Vector
    b: Vector
    d: FiniteFloat
    alpha: ExtendedFloat
    beta: ExtendedFloat

    @model_validator(mode="after")
    def check_shapes(self) -> "InstanceFile":
        size = triangle_size(self.n)
        for name in ("A", "B"):
            if len(getattr(self, name)) != size:
                raise ValueError(f"{name}: expected {size} lower-triangle entries")
        for name in ("a", "b"):
            if len(getattr(self, name)) != self.n:
                raise ValueError(f"{name}: expected {self.n} entries")
        return self

    def to_instance(self) -> GtrsInstance:
        f = Quadratic(SymMatrix(self.n, self.A), self.a, self.c)
        h = Quadratic(SymMatrix(self.n, self.B), self.b, self.d)
        return GtrsInstance(f, h, self.alpha, self.beta)

    @classmethod
    def from_instance(cls, inst: GtrsInstance) -> "InstanceFile":
        return cls(
            n=inst.n,
            A=inst.f.M.lower.tolist(),
            a=inst.a.tolist(),
            c=inst.c,
            B=inst.h.M.lower.tolist(),
            b=inst.b.tolist(),
            d=inst.d,
            alpha=inst.alpha,
            beta=inst.beta,
        )


##################
#  CERTIFICATES  #
##################


class MultiplierFile(StrictModel):
    kind: Literal["multiplier"] = "multiplier"
    mu: FiniteFloat
    mu_plus: Optional[FiniteFloat] = None
    mu_minus: Optional[FiniteFloat] = None
    level: FiniteFloat = 0.0

    def to_certificate(self) -> Multiplier:
        if self.mu_plus is None and self.mu_minus is None:
            return Multiplier.from_mu(self.mu, level=self.level)
        mu_plus = max(self.mu, 0.0) if self.mu_plus is None else self.mu_plus
        mu_minus = -min(self.mu, 0.0) if self.mu_minus is None else self.mu_minus
        return Multiplier(self.mu, mu_plus, mu_minus, self.level)


class ExceptionNuFile(StrictModel):
    kind: Literal["exception_nu"] = "exception_nu"
    nu: FiniteFloat
    matrix_min_eig: FiniteFloat

    def to_certificate(self) -> ExceptionNu:
        return ExceptionNu(self.nu, self.matrix_min_eig)


class CounterexampleFile(StrictModel):
    kind: Literal["counterexample"] = "counterexample"
    x: Vector
    f_value: FiniteFloat
    h_value: FiniteFloat

    def to_certificate(self) -> Counterexample:
        return Counterexample(self.x, self.f_value, self.h_value)


class InfeasiblePrimalFile(StrictModel):
    kind: Literal["infeasible_primal"] = "infeasible_primal"

    def to_certificate(self) -> InfeasiblePrimal:
        return InfeasiblePrimal()


class UnboundedBelowFile(StrictModel):
    kind: Literal["unbounded_below"] = "unbounded_below"
    direction_hint: Optional[Vector] = None
    point: Optional[Vector] = None
    evidence: list[Vector] = Field(default_factory=list)

    def to_certificate(self) -> UnboundedBelow:
        return UnboundedBelow(self.direction_hint, self.point, tuple(self.evidence))


CertificateFile = Annotated[
    Union[
        MultiplierFile,
        ExceptionNuFile,
        CounterexampleFile,
        InfeasiblePrimalFile,
        UnboundedBelowFile,
    ],
    Field(discriminator="kind"),
]
certificate_adapter = TypeAdapter(CertificateFile)


def _tolist(array) -> Optional[list[float]]:
    return None if array is None else array.tolist()


def certificate_file(cert: Certificate) -> BaseModel:
    if isinstance(cert, Multiplier):
        return MultiplierFile(
            mu=cert.mu, mu_plus=cert.mu_plus, mu_minus=cert.mu_minus, level=cert.level
        )
    if isinstance(cert, ExceptionNu):
        return ExceptionNuFile(nu=cert.nu, matrix_min_eig=cert.matrix_min_eig)
    if isinstance(cert, Counterexample):
        return CounterexampleFile(x=cert.x.tolist(), f_value=cert.f_value, h_value=cert.h_value)
    if isinstance(cert, InfeasiblePrimal):
        return InfeasiblePrimalFile()
    if isinstance(cert, UnboundedBelow):
        return UnboundedBelowFile(
            direction_hint=_tolist(cert.direction_hint),
            point=_tolist(cert.point),
            evidence=[p.tolist() for p in cert.evidence],
        )
    raise TypeError(f"unknown certificate type {type(cert).__name__}")


#############
#  REPORTS  #
#############


class ItemFile(StrictModel):
    holds: Optional[bool]
    note: str


class DualFile(StrictModel):
    status: str
    mu_star: Optional[FiniteFloat]
    value: ExtendedFloat
    psd_interval: tuple[ExtendedFloat, ExtendedFloat]
    hard_case: bool


class SolveReportFile(StrictModel):
    route: str
    value: ExtendedFloat
    x_star: Optional[Vector] = None
    certificates: list[CertificateFile] = Field(default_factory=list)
    gap_note: Optional[str] = None
    dual: Optional[DualFile] = None
    product_value: Optional[ExtendedFloat] = None
    boundary_ambiguous: bool = False
    diagnostic: Optional[str] = None
    assumptions: dict[str, ItemFile]
    seed: int
    notes: list[str] = Field(default_factory=list)


class SlemmaVerdictFile(StrictModel):
    verdict: str
    case: str
    boundary_ambiguous: bool
    certificate: CertificateFile


def _assumptions_file(report: AssumptionReport) -> dict[str, ItemFile]:
    return {name: ItemFile(holds=item.holds, note=item.note) for name, item in report.items()}


def solve_report_file(report: SolveReport) -> SolveReportFile:
    dual = None
    if report.dual is not None:
        dual = DualFile(
            status=report.dual.status.value,
            mu_star=report.dual.mu_star,
            value=report.dual.value,
            psd_interval=report.dual.psd_interval.as_pair(),
            hard_case=report.dual.hard_case,
        )
    return SolveReportFile(
        route=report.route.value,
        value=report.value,
        x_star=_tolist(report.x_star),
        certificates=[certificate_file(c) for c in report.certificates],
        gap_note=report.gap_note,
        dual=dual,
        product_value=report.product_value,
        boundary_ambiguous=report.boundary_ambiguous,
        diagnostic=report.diagnostic,
        assumptions=_assumptions_file(report.assumptions),
        seed=report.seed,
        notes=list(report.notes),
    )


def slemma_verdict_file(verdict: SlemmaVerdict) -> SlemmaVerdictFile:
    return SlemmaVerdictFile(
        verdict=verdict.kind.value,
        case=verdict.case,
        boundary_ambiguous=verdict.boundary_ambiguous,
        certificate=certificate_file(verdict.certificate),
    )


##############
#  READ/WRITE #
##############


def dump_model(model: BaseModel) -> str:
    """Canonical text: fixed key order, two-space indent, trailing newline."""
    return json.dumps(model.model_dump(mode="json"), indent=JSON_INDENT) + "\n"


def _field_line(text: str, field: str) -> int:
    match = re.search(rf'"{re.escape(field)}"\s*:', text)
    if match is None:
        return 1
    return text.count("\n", 0, match.start()) + 1


def _load_json(text: str, error_cls: type[ParseError]) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise error_cls(field="<document>", line=e.lineno, reason=e.msg) from e


def _validation_error(text: str, e: ValidationError, error_cls: type[ParseError]) -> ParseError:
    first = e.errors()[0]
    location = [str(part) for part in first["loc"] if not isinstance(part, int)]
    # discriminated unions prefix the location with the tag value
    field = location[-1] if location else "<document>"
    if first["type"].startswith("union_tag"):
        field = "kind"
    elif not location:
        named = re.match(r"Value error, (\w+):", first["msg"])
        field = named.group(1) if named else field
    if first["type"] == "missing":
        line = 1
    else:
        line = _field_line(text, field)
    return error_cls(field=field, line=line, reason=first["msg"])


def parse_instance(text: str) -> GtrsInstance:
    data = _load_json(text, InstanceParseError)
    try:
        parsed = InstanceFile.model_validate(data)
    except ValidationError as e:
        raise _validation_error(text, e, InstanceParseError) from e
    try:
        return parsed.to_instance()
    except ModelException as e:
        field = "beta" if "beta" in str(e) else "<document>"
        raise InstanceParseError(field=field, line=_field_line(text, field), reason=str(e)) from e


def dump_instance(inst: GtrsInstance) -> str:
    return dump_model(InstanceFile.from_instance(inst))


def parse_certificate(text: str) -> Certificate:
    data = _load_json(text, CertificateParseError)
    try:
        parsed = certificate_adapter.validate_python(data)
    except ValidationError as e:
        raise _validation_error(text, e, CertificateParseError) from e
    try:
        return parsed.to_certificate()
    except ModelException as e:
        raise CertificateParseError(field=parsed.kind, line=1, reason=str(e)) from e


def dump_certificate(cert: Certificate) -> str:
    return dump_model(certificate_file(cert))


def _read(path: Path, error_cls: type[ParseError]) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise error_cls(field="<file>", line=0, reason=str(e)) from e


def load_instance(path: Path) -> GtrsInstance:
    inst = parse_instance(_read(path, InstanceParseError))
    logger.info(f"loaded instance of order {inst.n} from {path}")
    return inst


def load_certificate(path: Path) -> Certificate:
    return parse_certificate(_read(path, CertificateParseError))
