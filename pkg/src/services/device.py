"""Scattering matrix of the double-ring, triple-waveguide device.

Each ring is cut by its two coupling points into two arcs. With ring j the
unknown internal amplitudes are

* ``s_j``: field leaving outer junction j into the ring,
* ``u_j``: field leaving the central junction into ring j.

The boundary conditions are

    (a_out, s1) = U2(tau0) (a_in, u1 r1)
    (u1, b_out, u2) = U3(tau1) (s1 e1, b_in, s2 e2)
    (c_out, s2) = U2(tau0) (c_in, u2 r2)

with ``e_j = exp(i f theta_j)`` on the arc towards the central junction and
``r_j = exp(i (1 - f) theta_j)`` on the way back. The split ``f`` is a gauge:
it only conjugates S by diagonal phases.

The general central junction carries free off-diagonal phases eta_ij, with
unitarity forcing eta_12 + eta_23 + eta_31 = pi (mod 2 pi). Choosing all three
equal to pi and a single real tau1 for both rings leaves the real orthogonal
form built by :func:`junction3`.
"""

import math

import numpy as np
import structlog
from scipy.linalg import lu_factor, lu_solve

from ..models.device import (
    DeviceParams,
    JunctionMatrix2,
    JunctionMatrix3,
    ScatteringMatrix,
    unitarity_residual,
)
from ..utils.exceptions import DegenerateDeviceError, DomainError

logger = structlog.get_logger()

DEFAULT_CONDITION_LIMIT = 1e12
DEFAULT_ARC_SPLIT = 0.5
_RESIDUAL_LIMIT = 1e-10


def _check_transmission(name: str, value: float) -> None:
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def coupler2(tau0: float) -> JunctionMatrix2:
    """Outer directional coupler with real, non-negative cross-coupling."""
    _check_transmission("tau0", tau0)
    kappa = math.sqrt(max(0.0, 1.0 - tau0 * tau0))
    entries = np.array([[tau0, kappa], [-kappa, tau0]], dtype=np.complex128)
    return JunctionMatrix2(tau=tau0, kappa=complex(kappa), entries=entries)


def junction3(tau1: float) -> JunctionMatrix3:
    """Central 3-mode junction.

    Rows and columns are (ring 1, b, ring 2). The waveguide-ring couplings all
    carry the same sign, which keeps the matrix orthogonal for every tau1.
    """
    _check_transmission("tau1", tau1)
    k = math.sqrt(2.0 * tau1 * (1.0 - tau1))
    entries = np.array(
        [
            [tau1, -k, tau1 - 1.0],
            [-k, 1.0 - 2.0 * tau1, -k],
            [tau1 - 1.0, -k, tau1],
        ],
        dtype=np.float64,
    )
    return JunctionMatrix3(tau1=tau1, entries=entries)


def build_smatrix(
    p: DeviceParams,
    arc_split: float = DEFAULT_ARC_SPLIT,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
) -> ScatteringMatrix:
    """Solve the ring boundary conditions for the 3x3 device S-matrix.

    The 4x4 internal system is factorized once and solved for the three unit
    inputs together. Raises :class:`DegenerateDeviceError` when its condition
    number exceeds ``condition_limit``.
    """
    if not 0.0 <= arc_split <= 1.0:
        raise DomainError(f"arc_split must lie in [0, 1], got {arc_split}")

    u2 = coupler2(p.tau0).entries
    u3 = junction3(p.tau1).entries

    e1 = np.exp(1j * arc_split * p.theta1)
    e2 = np.exp(1j * arc_split * p.theta2)
    r1 = np.exp(1j * (1.0 - arc_split) * p.theta1)
    r2 = np.exp(1j * (1.0 - arc_split) * p.theta2)

    # Unknowns ordered (s1, u1, s2, u2)
    system = np.array(
        [
            [1.0, -u2[1, 1] * r1, 0.0, 0.0],
            [-u3[0, 0] * e1, 1.0, -u3[0, 2] * e2, 0.0],
            [0.0, 0.0, 1.0, -u2[1, 1] * r2],
            [-u3[2, 0] * e1, 0.0, -u3[2, 2] * e2, 1.0],
        ],
        dtype=np.complex128,
    )
    # Columns are the unit inputs a, b, c
    sources = np.zeros((4, 3), dtype=np.complex128)
    sources[0, 0] = u2[1, 0]
    sources[1, 1] = u3[0, 1]
    sources[2, 2] = u2[1, 0]
    sources[3, 1] = u3[2, 1]

    condition = float(np.linalg.cond(system))
    if not math.isfinite(condition) or condition > condition_limit:
        logger.warning(
            "Degenerate device parameters",
            params=p.model_dump(),
            condition_number=condition,
        )
        raise DegenerateDeviceError(
            f"internal ring system is singular for {p.model_dump()} "
            f"(condition number {condition:.3e})",
            params=p,
            condition_number=condition,
        )

    internal = lu_solve(lu_factor(system), sources)

    direct = np.diag([u2[0, 0], u3[1, 1], u2[0, 0]]).astype(np.complex128)
    coupling = np.zeros((3, 4), dtype=np.complex128)
    coupling[0, 1] = u2[0, 1] * r1
    coupling[1, 0] = u3[1, 0] * e1
    coupling[1, 2] = u3[1, 2] * e2
    coupling[2, 3] = u2[0, 1] * r2

    entries = direct + coupling @ internal

    residual = unitarity_residual(entries)
    if residual > _RESIDUAL_LIMIT:
        raise DegenerateDeviceError(
            f"S-matrix lost unitarity ({residual:.3e}) for {p.model_dump()}",
            params=p,
            condition_number=condition,
        )

    return ScatteringMatrix(entries=entries, params=p)
