"""Fock-space data models.

Basis order contract (version 1): the states of a fixed-photon-number sector
are listed in reverse-lexicographic order of their occupation tuples, e.g. for
n = 2 over three modes: (2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1), (0,0,2).
"""

from functools import lru_cache
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, model_serializer, model_validator

BASIS_ORDER_VERSION = 1
NORM_TOLERANCE = 1e-10
JSON_AMPLITUDE_CUTOFF = 1e-14


@lru_cache(maxsize=256)
def compositions(n: int, modes: int) -> tuple[tuple[int, ...], ...]:
    """All occupation tuples of ``n`` photons over ``modes`` modes."""
    if modes == 1:
        return ((n,),)
    states: list[tuple[int, ...]] = []
    for first in range(n, -1, -1):
        for rest in compositions(n - first, modes - 1):
            states.append((first, *rest))
    return tuple(states)


@lru_cache(maxsize=256)
def basis_index(n: int, modes: int) -> dict[tuple[int, ...], int]:
    """Position of every occupation tuple in its sector basis."""
    return {occ: i for i, occ in enumerate(compositions(n, modes))}


class FockState(BaseModel):
    """Occupation-number basis element."""

    model_config = ConfigDict(frozen=True)

    occ: tuple[int, ...]

    @model_validator(mode="after")
    def validate_occupations(self) -> "FockState":
        """Occupations are non-negative and at least one mode exists."""
        if not self.occ:
            raise ValueError("a Fock state needs at least one mode")
        if any(count < 0 for count in self.occ):
            raise ValueError("occupation numbers must be non-negative")
        return self

    @classmethod
    def of(cls, *occ: int) -> "FockState":
        """Shorthand constructor, ``FockState.of(1, 2, 1)``."""
        return cls(occ=tuple(occ))

    @classmethod
    def parse(cls, text: str) -> "FockState":
        """Parse a comma-separated occupation list such as ``1,2,1``."""
        try:
            occ = tuple(int(part) for part in text.split(","))
        except ValueError as e:
            raise ValueError(f"invalid occupation list: {text!r}") from e
        return cls(occ=occ)

    @property
    def n(self) -> int:
        """Total photon number."""
        return sum(self.occ)

    @property
    def modes(self) -> int:
        """Number of modes."""
        return len(self.occ)

    def __str__(self) -> str:
        return "|" + ",".join(str(count) for count in self.occ) + ">"


class FockVector(BaseModel):
    """Complex amplitudes over one fixed-photon-number sector.

    Amplitudes are stored densely in basis order. Sub-normalized vectors are
    allowed, which is what a herald projection produces before renormalizing.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    modes: int
    amplitudes: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def parse_sparse(cls, data: Any) -> Any:
        """Accept the sparse ``[{"occ", "re", "im"}]`` JSON form."""
        if not isinstance(data, dict) or not isinstance(data.get("amplitudes"), list):
            return data
        if data.get("basis_order", BASIS_ORDER_VERSION) != BASIS_ORDER_VERSION:
            raise ValueError(f"unsupported basis order version {data['basis_order']!r}")
        entries = data["amplitudes"]
        modes = data.get("modes")
        if modes is None:
            if not entries:
                raise ValueError("modes is required when no amplitudes are listed")
            modes = len(entries[0]["occ"])
        n = data["n"]
        index = basis_index(n, modes)
        dense = np.zeros(len(index), dtype=np.complex128)
        for entry in entries:
            occ = tuple(entry["occ"])
            if occ not in index:
                raise ValueError(f"state {occ} is outside the n={n} sector")
            dense[index[occ]] = complex(entry["re"], entry["im"])
        return {"n": n, "modes": modes, "amplitudes": dense}

    @model_validator(mode="after")
    def validate_sector(self) -> "FockVector":
        """Check sector size and norm."""
        if self.n < 0 or self.modes < 1:
            raise ValueError("photon number must be >= 0 and modes >= 1")
        expected = len(compositions(self.n, self.modes))
        if self.amplitudes.shape != (expected,):
            raise ValueError(
                f"expected {expected} amplitudes for n={self.n}, modes={self.modes}"
            )
        if self.norm_squared() > 1.0 + NORM_TOLERANCE:
            raise ValueError("state norm exceeds one")
        return self

    @property
    def basis(self) -> tuple[tuple[int, ...], ...]:
        """Occupation tuples in storage order."""
        return compositions(self.n, self.modes)

    def norm_squared(self) -> float:
        """Sum of squared amplitude magnitudes."""
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def amplitude(self, occ: tuple[int, ...] | FockState) -> complex:
        """Amplitude of one basis state (zero outside the sector)."""
        key = occ.occ if isinstance(occ, FockState) else tuple(occ)
        position = basis_index(self.n, self.modes).get(key)
        if position is None:
            return 0j
        return complex(self.amplitudes[position])

    @classmethod
    def basis_state(cls, state: FockState) -> "FockVector":
        """Unit vector on a single Fock state."""
        index = basis_index(state.n, state.modes)
        dense = np.zeros(len(index), dtype=np.complex128)
        dense[index[state.occ]] = 1.0
        return cls(n=state.n, modes=state.modes, amplitudes=dense)

    @model_serializer(mode="plain")
    def serialize(self) -> dict[str, Any]:
        """Sparse JSON form, dropping negligible amplitudes."""
        return {
            "n": self.n,
            "modes": self.modes,
            "basis_order": BASIS_ORDER_VERSION,
            "amplitudes": [
                {"occ": list(occ), "re": float(amp.real), "im": float(amp.imag)}
                for occ, amp in zip(self.basis, self.amplitudes, strict=True)
                if abs(amp) >= JSON_AMPLITUDE_CUTOFF
            ],
        }
