"""Device parameter and transfer-matrix models.

Mode order is (a, b, c) for both rows (outputs) and columns (inputs) everywhere
in the project. Waveguide b is the central, heralded mode.
"""

import math
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_serializer,
    model_validator,
)

TWO_PI = 2.0 * math.pi

JUNCTION_TOLERANCE = 1e-12
SMATRIX_TOLERANCE = 1e-10


def unitarity_residual(matrix: NDArray[np.complex128]) -> float:
    """Max-norm of U^dagger U - I."""
    size = matrix.shape[0]
    gram = matrix.conj().T @ matrix
    return float(np.max(np.abs(gram - np.eye(size))))


class DeviceParams(BaseModel):
    """Tunable parameters of the double-ring device."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tau0: float = Field(..., description="Outer directional coupler transmission")
    tau1: float = Field(..., description="Central 3-mode junction parameter")
    theta1: float = Field(..., description="Upper ring round-trip phase (rad)")
    theta2: float = Field(..., description="Lower ring round-trip phase (rad)")

    @field_validator("tau0", "tau1")
    @classmethod
    def validate_transmission(cls, v: float) -> float:
        """Transmissions must lie in [0, 1]."""
        if not math.isfinite(v) or not 0.0 <= v <= 1.0:
            raise ValueError("transmission must lie in [0, 1]")
        return float(v)

    @field_validator("theta1", "theta2")
    @classmethod
    def reduce_phase(cls, v: float) -> float:
        """Reduce ring phases to [0, 2pi)."""
        if not math.isfinite(v):
            raise ValueError("phase must be finite")
        reduced = math.fmod(float(v), TWO_PI)
        if reduced < 0.0:
            reduced += TWO_PI
        # fmod of values just below a multiple of 2pi can round up to 2pi
        return 0.0 if reduced >= TWO_PI else reduced

    @classmethod
    def tied(cls, tau0: float, tau1: float, theta: float) -> "DeviceParams":
        """Build parameters with both rings sharing one round-trip phase."""
        return cls(tau0=tau0, tau1=tau1, theta1=theta, theta2=theta)

    @property
    def is_tied(self) -> bool:
        """True when both rings share the same phase."""
        return self.theta1 == self.theta2

    @property
    def is_degenerate(self) -> bool:
        """Fully transmitting outer couplers with a resonant ring."""
        return self.tau0 == 1.0 and (self.theta1 == 0.0 or self.theta2 == 0.0)

    def as_vector(self, tie_thetas: bool = True) -> NDArray[np.float64]:
        """Flatten to (tau0, tau1, theta) or (tau0, tau1, theta1, theta2)."""
        if tie_thetas:
            return np.array([self.tau0, self.tau1, self.theta1])
        return np.array([self.tau0, self.tau1, self.theta1, self.theta2])


class JunctionMatrix2(BaseModel):
    """Directional coupler [[tau, kappa], [-kappa*, tau]]."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tau: float
    kappa: complex
    entries: np.ndarray

    @model_validator(mode="after")
    def validate_form(self) -> "JunctionMatrix2":
        """Check shape, the coupler form and unitarity."""
        if self.entries.shape != (2, 2):
            raise ValueError("coupler matrix must be 2x2")
        expected = np.array(
            [[self.tau, self.kappa], [-np.conj(self.kappa), self.tau]],
            dtype=np.complex128,
        )
        if not np.allclose(self.entries, expected, rtol=0.0, atol=JUNCTION_TOLERANCE):
            raise ValueError("coupler matrix does not have the [[t, k], [-k*, t]] form")
        if unitarity_residual(self.entries) > JUNCTION_TOLERANCE:
            raise ValueError("coupler matrix is not unitary")
        return self


class JunctionMatrix3(BaseModel):
    """Real orthogonal central junction parametrized by tau1."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tau1: float
    entries: np.ndarray

    @model_validator(mode="after")
    def validate_orthogonal(self) -> "JunctionMatrix3":
        """Check shape and orthogonality."""
        if self.entries.shape != (3, 3):
            raise ValueError("junction matrix must be 3x3")
        if unitarity_residual(self.entries.astype(np.complex128)) > JUNCTION_TOLERANCE:
            raise ValueError("junction matrix is not orthogonal")
        return self

    @property
    def kappa_prime(self) -> float:
        """Waveguide-ring coupling magnitude sqrt(2 tau1 (1 - tau1))."""
        return math.sqrt(2.0 * self.tau1 * (1.0 - self.tau1))

    @property
    def gamma(self) -> float:
        """Ring-to-ring coupling -(1 - tau1)."""
        return self.tau1 - 1.0


class ScatteringMatrix(BaseModel):
    """Single-photon transfer matrix of the device, rows = outputs."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray
    params: DeviceParams | None = None

    @model_validator(mode="before")
    @classmethod
    def parse_pairs(cls, data: Any) -> Any:
        """Accept the row-major [re, im] pair format."""
        if isinstance(data, dict) and isinstance(data.get("entries"), list):
            rows = data["entries"]
            data = dict(data)
            data["entries"] = np.array(
                [[complex(re, im) for re, im in row] for row in rows],
                dtype=np.complex128,
            )
        return data

    @model_validator(mode="after")
    def validate_unitary(self) -> "ScatteringMatrix":
        """Scattering matrices of a lossless device are unitary."""
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ValueError("scattering matrix must be square")
        if unitarity_residual(self.entries) > SMATRIX_TOLERANCE:
            raise ValueError("scattering matrix is not unitary")
        return self

    @property
    def modes(self) -> int:
        """Number of modes the matrix acts on."""
        return int(self.entries.shape[0])

    @property
    def residual(self) -> float:
        """Unitarity residual of the stored entries."""
        return unitarity_residual(self.entries)

    @model_serializer(mode="plain")
    def serialize(self) -> dict[str, Any]:
        """Row-major list of [re, im] pairs plus the source parameters."""
        return {
            "entries": [
                [[float(z.real), float(z.imag)] for z in row] for row in self.entries
            ],
            "params": None if self.params is None else self.params.model_dump(),
        }
