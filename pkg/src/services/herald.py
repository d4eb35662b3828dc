"""Heralded projection and NOON-state fidelity."""

import math

import numpy as np
import structlog

from ..models.device import DeviceParams
from ..models.fock import NORM_TOLERANCE, FockState, FockVector, basis_index
from ..models.herald import CENTRAL_MODE, HeraldReport, HeraldSpec
from ..utils.exceptions import DomainError
from .device import DEFAULT_ARC_SPLIT, DEFAULT_CONDITION_LIMIT, build_smatrix, coupler2
from .fock import PermanentWorkspace, evolve

logger = structlog.get_logger()

# Herald probabilities below this are indistinguishable from an impossible click
ZERO_PROBABILITY = 1e-15


def _check_normalized(out: FockVector) -> None:
    norm = out.norm_squared()
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise DomainError(f"output state must be normalized, got norm^2 = {norm:.3e}")


def project_herald(out: FockVector, h: HeraldSpec) -> tuple[float, FockVector]:
    """Project onto ``h.count`` photons in ``h.mode`` and drop that mode.

    Returns the click probability and the renormalized conditional state of
    the remaining modes. An impossible herald gives probability 0 and an
    all-zero conditional.
    """
    if h.mode >= out.modes:
        raise DomainError(f"herald mode {h.mode} outside a {out.modes}-mode state")
    if h.count > out.n:
        raise DomainError(f"herald count {h.count} exceeds the {out.n} photons present")
    _check_normalized(out)

    remaining = out.n - h.count
    target_index = basis_index(remaining, out.modes - 1)
    projected = np.zeros(len(target_index), dtype=np.complex128)
    for occ, amp in zip(out.basis, out.amplitudes, strict=True):
        if occ[h.mode] == h.count:
            rest = occ[: h.mode] + occ[h.mode + 1 :]
            projected[target_index[rest]] = amp

    p_click = float(np.sum(np.abs(projected) ** 2))
    if p_click < ZERO_PROBABILITY:
        p_click = 0.0
        projected[:] = 0.0
    else:
        projected /= math.sqrt(p_click)

    conditional = FockVector(n=remaining, modes=out.modes - 1, amplitudes=projected)
    return min(p_click, 1.0), conditional


def herald_distribution(out: FockVector, mode: int = CENTRAL_MODE) -> list[float]:
    """Click probability for every herald count 0..n on ``mode``."""
    return [
        project_herald(out, HeraldSpec(mode=mode, count=count))[0]
        for count in range(out.n + 1)
    ]


def noon_fidelity(conditional: FockVector, n: int) -> float:
    """Overlap with (|N,0> + e^{i phi}|0,N>)/sqrt(2), maximized over phi.

    The maximum is (|c_N0| + |c_0N|)^2 / 2. For N = 0 the target is the
    vacuum itself.
    """
    if conditional.modes != 2:
        raise DomainError(f"NOON fidelity needs a 2-mode state, got {conditional.modes}")
    if n < 0 or conditional.n != n:
        raise DomainError(
            f"conditional state has {conditional.n} photons, target NOON order is {n}"
        )
    if n == 0:
        return min(1.0, abs(conditional.amplitude((0, 0))) ** 2)
    overlap = abs(conditional.amplitude((n, 0))) + abs(conditional.amplitude((0, n)))
    return min(1.0, overlap * overlap / 2.0)


def run_experiment(
    p: DeviceParams,
    input: FockState,
    h: HeraldSpec,
    n_target: int,
    arc_split: float = DEFAULT_ARC_SPLIT,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
    workspace: PermanentWorkspace | None = None,
) -> HeraldReport:
    """Device S-matrix, Fock evolution, herald projection and fidelity."""
    if h.count > input.n:
        raise DomainError(f"herald count {h.count} exceeds the {input.n} input photons")
    if n_target != input.n - h.count:
        raise DomainError(
            f"NOON order {n_target} does not match {input.n} photons "
            f"minus {h.count} heralded"
        )

    s = build_smatrix(p, arc_split=arc_split, condition_limit=condition_limit)
    out = evolve(s, input, workspace)
    p_click, conditional = project_herald(out, h)
    f_noon = None if p_click == 0.0 else noon_fidelity(conditional, n_target)

    return HeraldReport(
        p_click=p_click,
        conditional=conditional,
        f_noon=f_noon,
        n_target=n_target,
        params=p,
    )


def beam_splitter_reference() -> HeraldReport:
    """Two-photon NOON state from (1,1) on a 50/50 coupler.

    No herald is involved, so the click probability is one.
    """
    out = evolve(coupler2(1.0 / math.sqrt(2.0)), FockState.of(1, 1))
    f_noon = noon_fidelity(out, 2)
    logger.debug("Beam splitter reference", f_noon=f_noon)
    return HeraldReport(p_click=1.0, conditional=out, f_noon=f_noon, n_target=2)
