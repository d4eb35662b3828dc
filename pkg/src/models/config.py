"""Command-line run configuration models.

A ``--config`` JSON file and explicit flags are merged into one
:class:`RunConfig`; unknown keys are rejected.
"""

import json
import math
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.exceptions import ConfigurationError
from .device import TWO_PI, DeviceParams
from .fock import FockState
from .herald import HeraldSpec
from .optimization import ObjectiveMode, ParameterBox
from .sweep import ParameterGrid

GridAxis = tuple[float, float, int]


class ParamsConfig(BaseModel):
    """Device parameters as given on the command line or in a file."""

    model_config = ConfigDict(extra="forbid")

    tau0: float | None = None
    tau1: float | None = None
    theta: float | None = Field(None, description="Shared ring phase")
    theta1: float | None = None
    theta2: float | None = None

    @classmethod
    def from_file(cls, path: Path) -> "ParamsConfig":
        """Read parameters from a params, herald-report or optimization JSON."""
        data = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(data, dict) and isinstance(data.get("best"), dict):
            data = data["best"]
        elif isinstance(data, dict) and isinstance(data.get("params"), dict):
            data = data["params"]
        return cls.model_validate(data)

    def to_params(self) -> DeviceParams:
        """Validated device parameters; a shared phase fills unset ring phases."""
        theta1 = self.theta1 if self.theta1 is not None else self.theta
        theta2 = self.theta2 if self.theta2 is not None else self.theta
        missing = [
            name
            for name, value in (
                ("tau0", self.tau0),
                ("tau1", self.tau1),
                ("theta1", theta1),
                ("theta2", theta2),
            )
            if value is None
        ]
        if missing:
            raise ConfigurationError(f"missing device parameters: {', '.join(missing)}")
        return DeviceParams(tau0=self.tau0, tau1=self.tau1, theta1=theta1, theta2=theta2)


class GridConfig(BaseModel):
    """Sweep axes as (start, stop, points)."""

    model_config = ConfigDict(extra="forbid")

    tau0: GridAxis = (0.0, 1.0, 21)
    tau1: GridAxis = (0.0, 1.0, 21)
    theta: GridAxis = (0.0, TWO_PI, 25)
    theta2: GridAxis | None = None

    def to_grid(self) -> ParameterGrid:
        """Materialize the grid."""
        grid = ParameterGrid.linspace(self.tau0, self.tau1, self.theta)
        if self.theta2 is None:
            return grid
        return grid.model_copy(update={"theta2": np.linspace(*self.theta2).tolist()})


class RunConfig(BaseModel):
    """Validated options of one CLI invocation."""

    model_config = ConfigDict(extra="forbid")

    params: ParamsConfig = Field(default_factory=ParamsConfig)
    input: list[int] | None = None
    herald: int | None = Field(None, ge=0)
    n: int | None = Field(None, ge=0, description="NOON order")
    seed: int = 0
    format: Literal["json", "csv"] | None = Field(
        None, description="Output format; sweeps default to csv, the rest to json"
    )
    out: Path | None = None
    precision: int | None = Field(None, ge=1, le=17)
    workers: int | None = Field(None, ge=1)
    arc_split: float = Field(0.5, ge=0.0, le=1.0)

    mode: ObjectiveMode | None = None
    weight: float = Field(0.5, ge=0.0, le=1.0)
    untied: bool = False
    box: ParameterBox = Field(default_factory=ParameterBox)
    initial_guess: ParamsConfig | None = None
    trace_csv: Path | None = None
    manifold: bool = False
    manifold_samples: int | None = Field(None, ge=1)

    grid: GridConfig = Field(default_factory=GridConfig)
    pareto: Path | None = None

    @model_validator(mode="after")
    def validate_grid_sizes(self) -> "RunConfig":
        """Grid axes need at least one point and finite ends."""
        axes = [self.grid.tau0, self.grid.tau1, self.grid.theta]
        if self.grid.theta2 is not None:
            axes.append(self.grid.theta2)
        for start, stop, points in axes:
            if points < 1 or not (math.isfinite(start) and math.isfinite(stop)):
                raise ValueError("grid axes need finite ends and at least one point")
        return self

    @classmethod
    def from_sources(
        cls, config_file: Path | None, overrides: dict[str, Any]
    ) -> "RunConfig":
        """Merge a JSON config file with explicit flags (flags win)."""
        data: dict[str, Any] = {}
        if config_file is not None:
            loaded = json.loads(config_file.read_text(encoding="utf-8"))
            if not isinstance(loaded, dict):
                raise ConfigurationError("config file must hold a JSON object")
            data.update(loaded)
        for key, value in overrides.items():
            if value is None:
                continue
            if key in ("params", "grid") and isinstance(data.get(key), dict):
                data[key] = {**data[key], **value}
            else:
                data[key] = value
        return cls.model_validate(data)

    def fock_input(self) -> FockState:
        """Input state; required by every photon-level command."""
        if self.input is None:
            raise ConfigurationError("an input state is required (--input 1,2,1)")
        return FockState(occ=tuple(self.input))

    def herald_spec(self) -> HeraldSpec:
        """Herald on the central waveguide."""
        if self.herald is None:
            raise ConfigurationError("a herald count is required (--herald K)")
        return HeraldSpec(count=self.herald)

    def target_order(self) -> int:
        """NOON order, defaulting to input photons minus herald count."""
        if self.n is not None:
            return self.n
        return self.fock_input().n - self.herald_spec().count
