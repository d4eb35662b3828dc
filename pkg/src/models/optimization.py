"""Optimization objective and result models."""

import math
from enum import Enum

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .device import TWO_PI, DeviceParams
from .fock import FockState
from .herald import CENTRAL_MODE, HeraldReport, HeraldSpec


class ObjectiveMode(str, Enum):
    """How fidelity and click probability are traded off."""

    FIDELITY_FIRST = "fidelity_first"
    WEIGHTED_SUM = "weighted_sum"


class OptimizationStatus(str, Enum):
    """Termination state of an optimization run."""

    CONVERGED = "converged"
    STALLED = "stalled"
    INFEASIBLE = "infeasible"


class ParameterBox(BaseModel):
    """Closed search bounds for (tau0, tau1, theta).

    Both ring phases share the theta bounds.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    tau0: tuple[float, float] = Field((0.0, 1.0), description="tau0 bounds")
    tau1: tuple[float, float] = Field((0.0, 1.0), description="tau1 bounds")
    theta: tuple[float, float] = Field((0.0, TWO_PI), description="Ring phase bounds")

    @field_validator("tau0", "tau1")
    @classmethod
    def validate_transmission_bounds(
        cls, v: tuple[float, float]
    ) -> tuple[float, float]:
        """Transmission bounds are ordered and inside [0, 1]."""
        lo, hi = v
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError("transmission bounds must satisfy 0 <= lo <= hi <= 1")
        return v

    @field_validator("theta")
    @classmethod
    def validate_phase_bounds(cls, v: tuple[float, float]) -> tuple[float, float]:
        """Phase bounds are finite and ordered."""
        lo, hi = v
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
            raise ValueError("phase bounds must be finite with lo <= hi")
        return v

    def lower(self, tie_thetas: bool = True) -> NDArray[np.float64]:
        """Lower corner of the search box."""
        values = [self.tau0[0], self.tau1[0], self.theta[0]]
        if not tie_thetas:
            values.append(self.theta[0])
        return np.array(values)

    def upper(self, tie_thetas: bool = True) -> NDArray[np.float64]:
        """Upper corner of the search box."""
        values = [self.tau0[1], self.tau1[1], self.theta[1]]
        if not tie_thetas:
            values.append(self.theta[1])
        return np.array(values)

    def clamp(
        self, x: NDArray[np.float64], tie_thetas: bool = True
    ) -> NDArray[np.float64]:
        """Project a point onto the box."""
        return np.clip(x, self.lower(tie_thetas), self.upper(tie_thetas))

    def to_params(self, x: NDArray[np.float64], tie_thetas: bool = True) -> DeviceParams:
        """Device parameters for a (clamped) search-space point."""
        x = self.clamp(np.asarray(x, dtype=np.float64), tie_thetas)
        if tie_thetas:
            return DeviceParams.tied(float(x[0]), float(x[1]), float(x[2]))
        return DeviceParams(
            tau0=float(x[0]), tau1=float(x[1]), theta1=float(x[2]), theta2=float(x[3])
        )


class Objective(BaseModel):
    """What to optimize and where."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    input: FockState
    herald: HeraldSpec
    n_target: int = Field(..., ge=0, description="NOON order N")
    mode: ObjectiveMode = ObjectiveMode.FIDELITY_FIRST
    weight: float = Field(
        0.5, ge=0.0, le=1.0, description="Fidelity weight for the weighted sum"
    )
    box: ParameterBox = Field(default_factory=ParameterBox)
    tie_thetas: bool = Field(True, description="Share one phase between both rings")
    initial_guess: DeviceParams | None = Field(
        None, description="Point used as the first restart"
    )

    @model_validator(mode="after")
    def validate_experiment(self) -> "Objective":
        """The experiment must be runnable on the 3-mode device."""
        if self.input.modes != 3:
            raise ValueError("the device has exactly three modes")
        if self.herald.mode != CENTRAL_MODE:
            raise ValueError("only the central mode can be heralded")
        if self.herald.count > self.input.n:
            raise ValueError("herald count exceeds the input photon number")
        if self.n_target != self.input.n - self.herald.count:
            raise ValueError("n_target must equal input photons minus herald count")
        return self

    @property
    def dimension(self) -> int:
        """Number of free search parameters."""
        return 3 if self.tie_thetas else 4


class SimplexResult(BaseModel):
    """Endpoint of one Nelder-Mead run."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: np.ndarray
    cost: float
    iterations: int
    evaluations: int
    diameter: float
    status: OptimizationStatus


class RestartRecord(BaseModel):
    """One restart's endpoint, as written to the trace CSV."""

    model_config = ConfigDict(frozen=True)

    restart: int
    stage: int
    point: tuple[float, ...]
    cost: float
    evaluations: int
    status: OptimizationStatus


class OptimizationTrace(BaseModel):
    """Bookkeeping of a finished optimization."""

    iterations: int = 0
    evaluations: int = 0
    restarts: int = 0
    simplex_size: float = 0.0
    records: list[RestartRecord] = Field(default_factory=list)


class OptimizationResult(BaseModel):
    """Best parameters found with a freshly recomputed report."""

    model_config = ConfigDict(frozen=True)

    best: DeviceParams
    report: HeraldReport
    trace: OptimizationTrace
    status: OptimizationStatus
    mode: ObjectiveMode


class ManifoldSample(BaseModel):
    """Distinct optimal parameter sets around a converged optimum."""

    model_config = ConfigDict(frozen=True)

    members: list[DeviceParams] = Field(default_factory=list)
    reports: list[HeraldReport] = Field(default_factory=list)
    dimension: int = Field(0, ge=0, description="Estimated tangent dimension")
    singular_values: list[float] = Field(default_factory=list)
    min_distance: float | None = None
    mean_distance: float | None = None
    max_distance: float | None = None
    warning: str | None = Field(None, description="Set when too few optima were found")

    @property
    def ok(self) -> bool:
        """At least two distinct optima were found."""
        return self.warning is None
