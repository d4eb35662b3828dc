"""Multi-photon evolution through a linear-optical transfer matrix.

The amplitude of output |m> for input |n> is

    <m| U |n> = Per(S[m, n]) / sqrt(prod n_i! prod m_j!)

where S[m, n] repeats column i of S n_i times and row j m_j times.
"""

import math
from functools import lru_cache

import numpy as np
import structlog
from numpy.typing import NDArray

from ..models.device import JunctionMatrix2, ScatteringMatrix
from ..models.fock import FockState, FockVector, compositions
from ..utils.config import get_settings
from ..utils.exceptions import CapacityError, DomainError

logger = structlog.get_logger()

TransferMatrix = ScatteringMatrix | JunctionMatrix2 | NDArray[np.complex128]


class PermanentWorkspace:
    """Gray-code tables and scratch buffers for Ryser's formula.

    One workspace serves one caller at a time; parallel workers each build
    their own. Buffer contents carry no state between calls.
    """

    def __init__(self, max_photons: int):
        if max_photons < 0:
            raise DomainError("max_photons must be non-negative")
        self.max_photons = max_photons
        self._tables: dict[
            int, tuple[NDArray[np.intp], NDArray[np.float64], NDArray[np.float64]]
        ] = {}
        self._scratch = np.empty((0, 0), dtype=np.complex128)

    def check_capacity(self, n: int) -> None:
        """Raise CapacityError when ``n`` photons exceed the cap."""
        if n > self.max_photons:
            raise CapacityError(
                f"{n} photons exceed the configured maximum of {self.max_photons}"
            )

    def gray_tables(
        self, k: int
    ) -> tuple[NDArray[np.intp], NDArray[np.float64], NDArray[np.float64]]:
        """Column toggled, toggle direction and term sign for each Gray step."""
        if k not in self._tables:
            steps = np.arange(1, 1 << k)
            gray = steps ^ (steps >> 1)
            toggled = np.array(
                [(int(j) & -int(j)).bit_length() - 1 for j in steps], dtype=np.intp
            )
            added = (gray >> toggled) & 1
            direction = np.where(added == 1, 1.0, -1.0)
            popcount = np.array([int(g).bit_count() for g in gray])
            term_sign = np.where((popcount + k) % 2 == 0, 1.0, -1.0)
            self._tables[k] = (toggled, direction, term_sign)
        return self._tables[k]

    def scratch(self, k: int) -> NDArray[np.complex128]:
        """Row-sum buffer with room for every Gray step of a k x k matrix."""
        rows = (1 << k) - 1
        if self._scratch.shape[0] < rows or self._scratch.shape[1] < k:
            self._scratch = np.empty(
                (max(rows, self._scratch.shape[0]), max(k, self._scratch.shape[1])),
                dtype=np.complex128,
            )
        return self._scratch[:rows, :k]


@lru_cache(maxsize=1)
def default_workspace() -> PermanentWorkspace:
    """Process-wide workspace sized from ``NOONFORGE_MAX_PHOTONS``."""
    return PermanentWorkspace(get_settings().max_photons)


def _workspace(workspace: PermanentWorkspace | None) -> PermanentWorkspace:
    return default_workspace() if workspace is None else workspace


def enumerate_basis(
    n: int, modes: int = 3, workspace: PermanentWorkspace | None = None
) -> list[FockState]:
    """Fixed-photon-number basis in reverse-lexicographic order."""
    if n < 0 or modes < 1:
        raise DomainError("need n >= 0 and modes >= 1")
    _workspace(workspace).check_capacity(n)
    return [FockState(occ=occ) for occ in compositions(n, modes)]


def permanent(
    m: NDArray[np.complex128], workspace: PermanentWorkspace | None = None
) -> complex:
    """Exact permanent by Ryser's formula in Gray-code order, O(2^k k)."""
    matrix = np.asarray(m)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"permanent needs a square matrix, got {matrix.shape}")
    k = matrix.shape[0]
    ws = _workspace(workspace)
    ws.check_capacity(k)
    if k == 0:
        return 1 + 0j
    if k == 1:
        return complex(matrix[0, 0])

    toggled, direction, term_sign = ws.gray_tables(k)
    rowsums = ws.scratch(k)
    # Each Gray step adds or removes one column from the running row sums
    np.multiply(matrix.T[toggled], direction[:, None], out=rowsums)
    np.cumsum(rowsums, axis=0, out=rowsums)
    return complex(term_sign @ np.prod(rowsums, axis=1))


def _entries(s: TransferMatrix) -> NDArray[np.complex128]:
    if isinstance(s, ScatteringMatrix | JunctionMatrix2):
        return s.entries.astype(np.complex128, copy=False)
    matrix = np.asarray(s, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"transfer matrix must be square, got {matrix.shape}")
    return matrix


def _occupation_norm(occ: tuple[int, ...]) -> float:
    return math.prod(math.factorial(count) for count in occ)


def evolve(
    s: TransferMatrix,
    input: FockState,
    workspace: PermanentWorkspace | None = None,
) -> FockVector:
    """Evolve a Fock state through S, returning the full output sector."""
    u = _entries(s)
    modes = u.shape[0]
    if input.modes != modes:
        raise DomainError(
            f"input has {input.modes} modes but the transfer matrix has {modes}"
        )
    ws = _workspace(workspace)
    n = input.n
    ws.check_capacity(n)

    mode_index = np.arange(modes)
    columns = u[:, np.repeat(mode_index, input.occ)]
    input_norm = _occupation_norm(input.occ)

    outputs = compositions(n, modes)
    amplitudes = np.empty(len(outputs), dtype=np.complex128)
    for position, occ in enumerate(outputs):
        block = columns[np.repeat(mode_index, occ)]
        amplitudes[position] = permanent(block, ws) / math.sqrt(
            input_norm * _occupation_norm(occ)
        )

    return FockVector(n=n, modes=modes, amplitudes=amplitudes)


def evolve_all(
    s: TransferMatrix, n: int, workspace: PermanentWorkspace | None = None
) -> NDArray[np.complex128]:
    """Fock-space representation of S on the n-photon sector.

    Entry (r, c) is <basis[r]| U |basis[c]>.
    """
    u = _entries(s)
    basis = enumerate_basis(n, u.shape[0], workspace)
    matrix = np.empty((len(basis), len(basis)), dtype=np.complex128)
    for column, state in enumerate(basis):
        matrix[:, column] = evolve(u, state, workspace).amplitudes
    return matrix
