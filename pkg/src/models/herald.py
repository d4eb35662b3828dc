"""Herald specification and report models."""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_serializer

from .device import DeviceParams
from .fock import FockVector

CENTRAL_MODE = 1


class HeraldSpec(BaseModel):
    """Number-resolved detection outcome on one mode."""

    model_config = ConfigDict(frozen=True)

    mode: int = Field(CENTRAL_MODE, ge=0, description="Heralded mode index")
    count: int = Field(..., ge=0, description="Photons detected")


class HeraldReport(BaseModel):
    """Outcome of one heralded experiment.

    ``f_noon`` is ``None`` when the herald cannot fire (``p_click`` == 0).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    p_click: float = Field(..., ge=0.0, le=1.0 + 1e-10)
    conditional: FockVector
    f_noon: float | None = Field(None, ge=0.0, le=1.0 + 1e-10)
    n_target: int = Field(..., ge=0)
    params: DeviceParams | None = None

    @property
    def heralded(self) -> bool:
        """Whether the herald outcome has non-zero probability."""
        return self.f_noon is not None

    @model_serializer(mode="plain")
    def serialize(self) -> dict[str, Any]:
        """JSON layout shared with the CLI."""
        return {
            "p_click": self.p_click,
            "f_noon": self.f_noon,
            "n_target": self.n_target,
            "conditional": self.conditional.model_dump(),
            "params": None if self.params is None else self.params.model_dump(),
        }
