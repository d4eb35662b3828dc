"""Parameter grid model for sweeps."""

import itertools
from collections.abc import Iterator

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .device import DeviceParams


class ParameterGrid(BaseModel):
    """Cartesian grid of device parameters, iterated in row-major order.

    ``theta2 = None`` ties the lower ring to ``theta1`` point by point.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    tau0: list[float] = Field(default_factory=list)
    tau1: list[float] = Field(default_factory=list)
    theta1: list[float] = Field(default_factory=list)
    theta2: list[float] | None = None

    @field_validator("tau0", "tau1")
    @classmethod
    def validate_transmissions(cls, v: list[float]) -> list[float]:
        """Grid transmissions lie in [0, 1]."""
        if any(not 0.0 <= t <= 1.0 for t in v):
            raise ValueError("grid transmissions must lie in [0, 1]")
        return v

    @classmethod
    def linspace(
        cls,
        tau0: tuple[float, float, int],
        tau1: tuple[float, float, int],
        theta: tuple[float, float, int],
    ) -> "ParameterGrid":
        """Evenly spaced axes given as (start, stop, points), phases tied."""
        return cls(
            tau0=np.linspace(*tau0).tolist(),
            tau1=np.linspace(*tau1).tolist(),
            theta1=np.linspace(*theta).tolist(),
        )

    @classmethod
    def single(cls, params: DeviceParams) -> "ParameterGrid":
        """One-point grid."""
        return cls(
            tau0=[params.tau0],
            tau1=[params.tau1],
            theta1=[params.theta1],
            theta2=[params.theta2],
        )

    @classmethod
    def theta_axis(cls, points: int, tau0: float, tau1: float) -> "ParameterGrid":
        """Tied-phase sweep over [0, 2pi] at fixed couplings."""
        return cls(
            tau0=[tau0],
            tau1=[tau1],
            theta1=np.linspace(0.0, 2.0 * np.pi, points).tolist(),
        )

    @property
    def size(self) -> int:
        """Number of grid points."""
        size = len(self.tau0) * len(self.tau1) * len(self.theta1)
        return size if self.theta2 is None else size * len(self.theta2)

    def points(self) -> Iterator[DeviceParams]:
        """Grid points with tau0 outermost and the last phase innermost."""
        if self.theta2 is None:
            for tau0, tau1, theta in itertools.product(
                self.tau0, self.tau1, self.theta1
            ):
                yield DeviceParams.tied(tau0, tau1, theta)
            return
        for tau0, tau1, theta1, theta2 in itertools.product(
            self.tau0, self.tau1, self.theta1, self.theta2
        ):
            yield DeviceParams(tau0=tau0, tau1=tau1, theta1=theta1, theta2=theta2)
