"""Stored reproduction targets and reproduction results."""

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from .device import DeviceParams
from .herald import HeraldReport


class TargetKind(str, Enum):
    """How a target row is checked."""

    REFERENCE = "reference"
    EXACT = "exact"
    PARETO = "pareto"
    TREND = "trend"


class RowStatus(str, Enum):
    """Outcome of one reproduction row."""

    PASS = "PASS"
    FAIL = "FAIL"


class PhaseGuess(BaseModel):
    """Tied-phase starting point."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tau0: float
    tau1: float
    theta: float

    def to_params(self) -> DeviceParams:
        """As device parameters with both rings at ``theta``."""
        return DeviceParams.tied(self.tau0, self.tau1, self.theta)


class SweepSpec(BaseModel):
    """Line sweep over tau0 at fixed tau1 and phase."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tau0: tuple[float, float, int]
    tau1: float
    theta: float


class FigureTarget(BaseModel):
    """One row of a stored figure."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(..., ge=2, description="NOON order")
    kind: TargetKind
    input: list[int]
    herald: int | None = Field(None, ge=0, description="Photons detected in b")
    p_click: float | None = None
    f_noon: float | None = None
    p_tolerance: float = 0.0
    f_tolerance: float = 0.0
    initial_guess: PhaseGuess | None = None
    theta_window: float | None = Field(
        None, gt=0.0, le=math.pi, description="Half-width of the phase box around pi"
    )
    theta_tolerance: float | None = Field(
        None, gt=0.0, description="Largest allowed distance of the reported phase from pi"
    )
    sweep: SweepSpec | None = None
    sweep_tolerance: float | None = None
    provenance: str


class FigureTargets(BaseModel):
    """Versioned target file."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    version: int
    name: str
    description: str
    entries: list[FigureTarget]


class ReproductionRow(BaseModel):
    """Computed value for one target row."""

    n: int
    label: str
    p_click: float
    f_noon: float | None
    params: DeviceParams | None = None
    status: RowStatus
    detail: str = ""


class ReproductionReport(BaseModel):
    """All rows of a reproduced figure plus the Pareto data behind them."""

    name: str
    rows: list[ReproductionRow]
    pareto: list[HeraldReport] = Field(default_factory=list)
    trend_ok: bool = True

    @property
    def passed(self) -> bool:
        """Every row passed and the N-trend holds."""
        return self.trend_ok and all(row.status == RowStatus.PASS for row in self.rows)
