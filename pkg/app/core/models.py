import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, ClassVar, Optional

import numpy as np

from app.exceptions import DimensionMismatch, InvalidModelData
from app.utils import norm_inf


def frozen_array(values: Any, *, ndim: int, what: str) -> np.ndarray:
    """Copy `values` into a read-only float array with finite entries."""
    try:
        array = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidModelData(f"{what} is not numeric") from e
    if array.ndim != ndim:
        raise InvalidModelData(f"{what} must have {ndim} dimension(s)")
    if not np.all(np.isfinite(array)):
        raise InvalidModelData(f"{what} has non-finite entries")
    array.setflags(write=False)
    return array


def optional_array(values: Any, *, what: str) -> np.ndarray | None:
    if values is None:
        return None
    return frozen_array(values, ndim=1, what=what)


def triangle_size(n: int) -> int:
    return n * (n + 1) // 2


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Symmetric matrix kept as its row-major lower triangle."""

    n: int
    lower: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise InvalidModelData(f"matrix order must be >= 0, got {self.n}")
        lower = frozen_array(self.lower, ndim=1, what="lower triangle")
        if lower.size != triangle_size(self.n):
            raise DimensionMismatch(
                expected=triangle_size(self.n),
                received=lower.size,
                what="lower triangle",
            )
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "lower", lower)

    @classmethod
    def zeros(cls, n: int) -> "SymMatrix":
        return cls(n, np.zeros(triangle_size(n)))

    @classmethod
    def from_full(cls, matrix: Any) -> "SymMatrix":
        """Take the lower triangle of a square array; the upper part is ignored."""
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if matrix.shape[0] != matrix.shape[1]:
            raise InvalidModelData(f"matrix must be square, got {matrix.shape}")
        n = matrix.shape[0]
        return cls(n, matrix[np.tril_indices(n)])

    @cached_property
    def full(self) -> np.ndarray:
        matrix = np.zeros((self.n, self.n))
        rows, cols = np.tril_indices(self.n)
        matrix[rows, cols] = self.lower
        matrix[cols, rows] = self.lower
        matrix.setflags(write=False)
        return matrix

    @property
    def norm_inf(self) -> float:
        return norm_inf(self.full)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.lower.size == 0 or float(np.max(np.abs(self.lower))) <= tol

    def trace(self) -> float:
        return float(np.trace(self.full))

    def scaled(self, factor: float) -> "SymMatrix":
        return SymMatrix(self.n, factor * self.lower)

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        if other.n != self.n:
            raise DimensionMismatch(
                expected=self.n, received=other.n, what="matrix order"
            )
        return SymMatrix(self.n, self.lower + other.lower)

    def __neg__(self) -> "SymMatrix":
        return self.scaled(-1.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.lower, other.lower)

    __hash__ = None

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(n={self.n}, lower={self.lower.tolist()})"


@dataclass(frozen=True, eq=False)
class Quadratic:
    """q(x) = x'Mx + 2m'x + k."""

    M: SymMatrix
    m: np.ndarray
    k: float

    def __post_init__(self) -> None:
        m = frozen_array(self.m, ndim=1, what="linear term")
        if m.size != self.M.n:
            raise DimensionMismatch(
                expected=self.M.n, received=m.size, what="linear term"
            )
        k = float(self.k)
        if not math.isfinite(k):
            raise InvalidModelData("constant term must be finite")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "k", k)

    @classmethod
    def from_arrays(cls, M: Any, m: Any, k: float) -> "Quadratic":
        return cls(SymMatrix.from_full(M), np.atleast_1d(m), k)

    @classmethod
    def constant(cls, n: int, k: float) -> "Quadratic":
        return cls(SymMatrix.zeros(n), np.zeros(n), k)

    @property
    def n(self) -> int:
        return self.M.n

    def evaluate(self, x: Any) -> float:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.n:
            raise DimensionMismatch(expected=self.n, received=x.size, what="point")
        return float(x @ self.M.full @ x + 2.0 * self.m @ x + self.k)

    def __call__(self, x: Any) -> float:
        return self.evaluate(x)

    def homogenized(self) -> np.ndarray:
        """The (n+1)x(n+1) matrix [[M, m], [m', k]]."""
        n = self.n
        block = np.empty((n + 1, n + 1))
        block[:n, :n] = self.M.full
        block[:n, n] = self.m
        block[n, :n] = self.m
        block[n, n] = self.k
        return block

    def shifted(self, delta: float) -> "Quadratic":
        return Quadratic(self.M, self.m, self.k + delta)

    def scaled(self, factor: float) -> "Quadratic":
        return Quadratic(self.M.scaled(factor), factor * self.m, factor * self.k)

    def __neg__(self) -> "Quadratic":
        return self.scaled(-1.0)

    def __add__(self, other: "Quadratic") -> "Quadratic":
        return Quadratic(self.M + other.M, self.m + other.m, self.k + other.k)

    def is_constant(self, tol: float = 0.0) -> bool:
        return self.M.is_zero(tol) and (
            self.m.size == 0 or float(np.max(np.abs(self.m))) <= tol
        )

    def restrict(self, x0: Any, basis: Any) -> "Quadratic":
        """Quadratic in y obtained by substituting x = x0 + basis @ y."""
        x0 = np.asarray(x0, dtype=float).reshape(-1)
        basis = np.asarray(basis, dtype=float).reshape(self.n, -1)
        M = basis.T @ self.M.full @ basis
        m = basis.T @ (self.M.full @ x0 + self.m)
        return Quadratic(SymMatrix.from_full(M), m, self.evaluate(x0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Quadratic):
            return NotImplemented
        return (
            self.M == other.M
            and np.array_equal(self.m, other.m)
            and self.k == other.k
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(M={self.M.full.tolist()}, "
            f"m={self.m.tolist()}, k={self.k})"
        )


def evaluate(q: Quadratic, x: Any) -> float:
    return q.evaluate(x)


@dataclass(frozen=True, eq=False)
class GtrsInstance:
    """inf f(x) s.t. alpha <= h(x) <= beta."""

    f: Quadratic
    h: Quadratic
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if self.f.n != self.h.n:
            raise DimensionMismatch(
                expected=self.f.n, received=self.h.n, what="constraint dimension"
            )
        alpha, beta = float(self.alpha), float(self.beta)
        if math.isnan(alpha) or math.isnan(beta):
            raise InvalidModelData("bounds must not be NaN")
        if alpha > beta:
            raise InvalidModelData(f"alpha={alpha} exceeds beta={beta}")
        if alpha == math.inf or beta == -math.inf:
            raise InvalidModelData("bounds leave an empty band")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def A(self) -> np.ndarray:
        return self.f.M.full

    @property
    def a(self) -> np.ndarray:
        return self.f.m

    @property
    def c(self) -> float:
        return self.f.k

    @property
    def B(self) -> np.ndarray:
        return self.h.M.full

    @property
    def b(self) -> np.ndarray:
        return self.h.m

    @property
    def d(self) -> float:
        return self.h.k

    @property
    def is_equality(self) -> bool:
        return self.alpha == self.beta

    @property
    def is_interval(self) -> bool:
        return (
            math.isfinite(self.alpha)
            and math.isfinite(self.beta)
            and self.alpha < self.beta
        )

    def in_band(self, value: float, tol: float = 0.0) -> bool:
        return self.alpha - tol <= value <= self.beta + tol

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GtrsInstance):
            return NotImplemented
        return (
            self.f == other.f
            and self.h == other.h
            and self.alpha == other.alpha
            and self.beta == other.beta
        )

    __hash__ = None


##################
#  CERTIFICATES  #
##################


@dataclass(frozen=True, eq=False)
class Certificate:
    kind: ClassVar[str] = "certificate"


@dataclass(frozen=True, eq=False)
class Multiplier(Certificate):
    """Witness of f - level + mu_minus*(h - beta) + mu_plus*(alpha - h) >= 0."""

    kind: ClassVar[str] = "multiplier"

    mu: float
    mu_plus: float
    mu_minus: float
    level: float = 0.0

    def __post_init__(self) -> None:
        values = [float(v) for v in (self.mu, self.mu_plus, self.mu_minus)]
        if not all(math.isfinite(v) for v in values) or not math.isfinite(
            float(self.level)
        ):
            raise InvalidModelData("multiplier entries must be finite")
        mu, mu_plus, mu_minus = values
        if mu_plus != max(mu, 0.0) or mu_minus != -min(mu, 0.0):
            raise InvalidModelData(
                f"inconsistent split: mu={mu}, mu_plus={mu_plus}, "
                f"mu_minus={mu_minus}"
            )
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "mu_plus", mu_plus)
        object.__setattr__(self, "mu_minus", mu_minus)
        object.__setattr__(self, "level", float(self.level))

    @classmethod
    def from_mu(cls, mu: float, level: float = 0.0) -> "Multiplier":
        mu = float(mu) + 0.0
        return cls(mu, max(mu, 0.0), -min(mu, 0.0) + 0.0, level)

    @property
    def classical(self) -> float:
        """Multiplier of h in f + mu*h for the instances (f,h,-inf,0) / (f,h,0,0)."""
        return self.mu_minus - self.mu_plus


@dataclass(frozen=True, eq=False)
class ExceptionNu(Certificate):
    kind: ClassVar[str] = "exception_nu"

    nu: float
    matrix_min_eig: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "matrix_min_eig", float(self.matrix_min_eig))


@dataclass(frozen=True, eq=False)
class Counterexample(Certificate):
    kind: ClassVar[str] = "counterexample"

    x: np.ndarray
    f_value: float
    h_value: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", frozen_array(self.x, ndim=1, what="x"))
        object.__setattr__(self, "f_value", float(self.f_value))
        object.__setattr__(self, "h_value", float(self.h_value))

    @classmethod
    def at(cls, inst: "GtrsInstance", x: Any) -> "Counterexample":
        return cls(x, inst.f.evaluate(x), inst.h.evaluate(x))


@dataclass(frozen=True, eq=False)
class InfeasiblePrimal(Certificate):
    kind: ClassVar[str] = "infeasible_primal"


@dataclass(frozen=True, eq=False)
class UnboundedBelow(Certificate):
    """Ray (point + t*direction_hint) or escalating feasible points."""

    kind: ClassVar[str] = "unbounded_below"

    direction_hint: Optional[np.ndarray] = None
    point: Optional[np.ndarray] = None
    evidence: tuple[np.ndarray, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "direction_hint",
            optional_array(self.direction_hint, what="direction_hint"),
        )
        object.__setattr__(self, "point", optional_array(self.point, what="point"))
        object.__setattr__(
            self,
            "evidence",
            tuple(frozen_array(p, ndim=1, what="evidence") for p in self.evidence),
        )


#################
#  RESULT DATA  #
#################


@dataclass(frozen=True, eq=False)
class QuadRange:
    inf: float
    sup: float
    inf_attained: bool
    sup_attained: bool
    argmin: Optional[np.ndarray] = None
    argmax: Optional[np.ndarray] = None

    @property
    def is_constant(self) -> bool:
        return self.inf == self.sup


@dataclass(frozen=True)
class PsdInterval:
    """{mu : A + mu*B is PSD}; `capped` marks a side stopped at MU_CAP."""

    lo: float
    hi: float
    capped: bool = False

    @classmethod
    def empty(cls) -> "PsdInterval":
        return cls(math.inf, -math.inf)

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    def contains(self, mu: float) -> bool:
        return self.lo <= mu <= self.hi

    def intersect(self, lo: float, hi: float) -> "PsdInterval":
        new_lo, new_hi = max(self.lo, lo), min(self.hi, hi)
        if new_lo > new_hi:
            return PsdInterval.empty()
        return PsdInterval(new_lo, new_hi, self.capped)

    def as_pair(self) -> tuple[float, float]:
        return self.lo, self.hi


class DualStatus(enum.Enum):
    OPTIMAL = ("optimal", "dual optimum attained")
    DUAL_INFEASIBLE = ("dual_infeasible", "no multiplier gives a finite dual")
    UNBOUNDED_ABOVE = (
        "dual_unbounded_above", "dual function still increasing at the multiplier cap"
    )

    def __init__(self, value, description) -> None:
        self._value_ = value
        self._description = description

    @property
    def description(self) -> str:
        return self._description


@dataclass(frozen=True)
class DualResult:
    status: DualStatus
    mu_star: Optional[float]
    value: float
    psd_interval: PsdInterval
    hard_case: bool = False

    @property
    def is_optimal(self) -> bool:
        return self.status is DualStatus.OPTIMAL


class VerdictKind(enum.Enum):
    S2_HOLDS = ("S2Holds", "multiplier certificate exists", True)
    S1_FAILS = ("S1Fails", "the system is solvable", False)
    EXCEPTION_HOLDS = (
        "ExceptionHolds",
        "system unsolvable but no multiplier exists",
        True,
    )
    BOTH_FAIL_EXCEPTION_CASE = (
        "BothFailExceptionCase",
        "exception signature, system solvable",
        False,
    )

    def __init__(self, value, description, s1_holds) -> None:
        self._value_ = value
        self._description = description
        self._s1_holds = s1_holds

    @property
    def description(self) -> str:
        return self._description

    @property
    def s1_holds(self) -> bool:
        return self._s1_holds


_VERDICT_CERTIFICATES = {
    VerdictKind.S2_HOLDS: Multiplier,
    VerdictKind.S1_FAILS: Counterexample,
    VerdictKind.EXCEPTION_HOLDS: ExceptionNu,
    VerdictKind.BOTH_FAIL_EXCEPTION_CASE: Counterexample,
}


@dataclass(frozen=True)
class SlemmaVerdict:
    kind: VerdictKind
    certificate: Certificate
    case: str = ""
    boundary_ambiguous: bool = False

    def __post_init__(self) -> None:
        expected = _VERDICT_CERTIFICATES[self.kind]
        if not isinstance(self.certificate, expected):
            raise InvalidModelData(
                f"{self.kind.value} requires a {expected.kind} certificate"
            )

    @property
    def s1_holds(self) -> bool:
        return self.kind.s1_holds


class Route(enum.Enum):
    DUAL_PATH = ("DualPath", "Lagrangian dual and primal recovery")
    B_ZERO_PATH = ("BZeroPath", "affine constraint, explicit solution")
    BOUNDARY_COLLAPSE_PATH = (
        "BoundaryCollapsePath",
        "feasible set collapses to an extreme level set of h",
    )
    INFEASIBLE_PATH = ("InfeasiblePath", "band misses the range of h")

    def __init__(self, value, description) -> None:
        self._value_ = value
        self._description = description

    @property
    def description(self) -> str:
        return self._description


@dataclass(frozen=True)
class ItemVerdict:
    holds: Optional[bool]
    note: str = ""


@dataclass(frozen=True)
class AssumptionReport:
    item1: ItemVerdict
    item2: ItemVerdict
    item3: ItemVerdict
    item4: ItemVerdict
    item5: ItemVerdict

    def items(self) -> list[tuple[str, ItemVerdict]]:
        return [
            ("item1", self.item1),
            ("item2", self.item2),
            ("item3", self.item3),
            ("item4", self.item4),
            ("item5", self.item5),
        ]


@dataclass(frozen=True, eq=False)
class SolveReport:
    assumptions: AssumptionReport
    route: Route
    value: float
    x_star: Optional[np.ndarray] = None
    certificates: tuple[Certificate, ...] = ()
    gap_note: Optional[str] = None
    dual: Optional[DualResult] = None
    product_value: Optional[float] = None
    boundary_ambiguous: bool = False
    diagnostic: Optional[str] = None
    seed: int = 0
    notes: tuple[str, ...] = field(default_factory=tuple)
