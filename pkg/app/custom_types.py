import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.core.models import (
    Certificate,
    GtrsInstance,
    Multiplier,
    Quadratic,
    SlemmaVerdict,
)


@dataclass
class GenericResult:
    """Plain record returned by the numerical routines."""


@dataclass
class PinvResult(GenericResult):
    solution: np.ndarray
    in_range: bool


@dataclass
class AffineSearchResult(GenericResult):
    mu_best: float
    min_eig_best: float
    capped: bool = False
    unbounded: bool = False


@dataclass
class ScalarSearchResult(GenericResult):
    argmax: float
    maximum: float
    iterations: int
    capped: bool = False


@dataclass
class QuadInf(GenericResult):
    value: float
    attained: bool
    argmin: Optional[np.ndarray] = None
    direction: Optional[np.ndarray] = None


@dataclass
class SlaterCheck(GenericResult):
    holds: bool
    witness: Optional[np.ndarray] = None
    boundary_ambiguous: bool = False


@dataclass
class FeasibilityCheck(GenericResult):
    feasible: bool
    point: Optional[np.ndarray] = None


@dataclass
class RicqWitness(GenericResult):
    holds: bool
    x_hat: Optional[np.ndarray] = None
    epsilon: Optional[float] = None


class RecoveryTarget(enum.Enum):
    LOWER_BOUND = ("LowerBound", "h(x*) = alpha")
    UPPER_BOUND = ("UpperBound", "h(x*) = beta")
    INTERIOR = ("Interior", "alpha <= h(x*) <= beta")

    def __init__(self, value, description) -> None:
        self._value_ = value
        self._description = description

    @property
    def description(self) -> str:
        return self._description


@dataclass
class RecoveryResult(GenericResult):
    x_star: Optional[np.ndarray]
    gap: float
    target: RecoveryTarget
    diagnostic: Optional[str] = None

    @property
    def succeeded(self) -> bool:
        return self.x_star is not None


class SolveStatus(enum.Enum):
    OPTIMAL = ("Optimal", "finite optimum attained")
    UNBOUNDED = ("Unbounded", "objective unbounded below on the band")
    INFEASIBLE = ("Infeasible", "empty feasible set")

    def __init__(self, value, description) -> None:
        self._value_ = value
        self._description = description

    @property
    def description(self) -> str:
        return self._description


@dataclass
class DegenerateSolution(GenericResult):
    status: SolveStatus
    value: float
    x_star: Optional[np.ndarray] = None
    certificate: Optional[Certificate] = None


@dataclass
class ProductReformulation(GenericResult):
    constraint: Quadratic
    instance: GtrsInstance
    value: float
    certificate: Optional[Multiplier] = None


@dataclass
class SlemmaRun(GenericResult):
    """Verdict together with the instance its certificate refers to."""

    instance: GtrsInstance
    verdict: SlemmaVerdict


@dataclass
class OracleResult(GenericResult):
    best_value: float
    best_x: np.ndarray
    unbounded_suspected: bool
    radius_values: list[float] = field(default_factory=list)
    radius_points: list[np.ndarray] = field(default_factory=list)
