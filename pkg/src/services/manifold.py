"""Sampling the set of equally optimal device settings.

Around a converged optimum the optimal set is the zero set of a constraint
map: the unnormalized accidental amplitudes in the herald branch, the
imbalance |c_N0| - |c_0N|, and the click-probability deficit. Its tangent
dimension is the number of parameters minus the numerical rank of the
map's Jacobian.
"""

import numpy as np
import structlog
from numpy.typing import NDArray
from scipy.spatial.distance import pdist

from ..models.device import DeviceParams
from ..models.optimization import ManifoldSample, Objective, OptimizationResult
from ..processors.factory import ObjectiveStrategyFactory
from ..utils.config import Settings, get_settings
from ..utils.debug import time_function
from .device import DEFAULT_CONDITION_LIMIT, build_smatrix
from .fock import evolve
from .herald import run_experiment
from .optimizer import (
    FIRST_STAGE_STEP,
    REFINE_STAGE_STEP,
    evaluate_report,
    optimize,
    run_restart,
)

logger = structlog.get_logger()

DISTINCT_DISTANCE = 1e-4
RANK_TOLERANCE = 1e-6
JACOBIAN_STEP = 1e-6
CONTINUATION_STEP = 0.05


def _params_at(objective: Objective, x: NDArray[np.float64]) -> DeviceParams:
    """Device parameters at ``x`` with phases wrapped instead of clamped."""
    if objective.tie_thetas:
        return DeviceParams.tied(float(x[0]), float(x[1]), float(x[2]))
    return DeviceParams(
        tau0=float(x[0]), tau1=float(x[1]), theta1=float(x[2]), theta2=float(x[3])
    )


def constraint_map(
    objective: Objective,
    x: NDArray[np.float64],
    p_star: float,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
) -> NDArray[np.float64]:
    """Residuals that vanish exactly on the optimal set."""
    params = _params_at(objective, x)
    out = evolve(build_smatrix(params, condition_limit=condition_limit), objective.input)
    n, herald = objective.n_target, objective.herald

    residuals: list[float] = []
    p_click = 0.0
    for occ, amp in zip(out.basis, out.amplitudes, strict=True):
        if occ[herald.mode] != herald.count:
            continue
        p_click += abs(amp) ** 2
        rest = occ[: herald.mode] + occ[herald.mode + 1 :]
        if rest not in ((n, 0), (0, n)):
            residuals.extend((amp.real, amp.imag))

    noon_a = abs(out.amplitude((n, herald.count, 0)))
    noon_c = abs(out.amplitude((0, herald.count, n)))
    residuals.append(noon_a - noon_c)
    residuals.append(p_click - p_star)
    return np.array(residuals)


def constraint_jacobian(
    objective: Objective,
    x: NDArray[np.float64],
    p_star: float,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
) -> NDArray[np.float64]:
    """Finite-difference Jacobian of :func:`constraint_map`.

    Differences are central, except one-sided for a transmission within one
    step of 0 or 1. Phases are periodic and always central.
    """
    x = np.asarray(x, dtype=np.float64)
    x = np.concatenate([np.clip(x[:2], 0.0, 1.0), x[2:]])
    columns = []
    for i in range(len(x)):
        shift = np.zeros_like(x)
        shift[i] = JACOBIAN_STEP
        if i < 2 and x[i] + JACOBIAN_STEP > 1.0:
            forward, backward, span = x, x - shift, JACOBIAN_STEP
        elif i < 2 and x[i] - JACOBIAN_STEP < 0.0:
            forward, backward, span = x + shift, x, JACOBIAN_STEP
        else:
            forward, backward, span = x + shift, x - shift, 2.0 * JACOBIAN_STEP
        columns.append(
            (
                constraint_map(objective, forward, p_star, condition_limit)
                - constraint_map(objective, backward, p_star, condition_limit)
            )
            / span
        )
    return np.column_stack(columns)


def tangent_space(
    objective: Objective,
    x: NDArray[np.float64],
    p_star: float,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
) -> tuple[int, list[float], list[NDArray[np.float64]]]:
    """Tangent dimension, singular values and null directions at ``x``."""
    _, singular, vt = np.linalg.svd(
        constraint_jacobian(objective, x, p_star, condition_limit)
    )
    if singular.size == 0 or singular[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(singular > RANK_TOLERANCE * singular[0]))
    return len(x) - rank, [float(s) for s in singular], list(vt[rank:])


def _polish(
    objective: Objective, settings: Settings, x0: NDArray[np.float64]
) -> NDArray[np.float64]:
    strategy = ObjectiveStrategyFactory(settings).get_strategy(objective)
    width = objective.box.upper(objective.tie_thetas) - objective.box.lower(
        objective.tie_thetas
    )
    x = x0
    for stage in range(strategy.stage_count):
        step = width * (FIRST_STAGE_STEP if stage == 0 else REFINE_STAGE_STEP)
        x = run_restart(objective, strategy, stage, step, settings, x).x
    return x


@time_function
def explore_manifold(
    obj: Objective,
    n_samples: int,
    seed: int,
    settings: Settings | None = None,
    result: OptimizationResult | None = None,
) -> ManifoldSample:
    """Collect up to ``n_samples`` distinct optimal parameter sets for ``obj``.

    Continuation along the null directions of the constraint Jacobian at the
    best point comes first, then uniform random restarts. Every member is
    re-verified with :func:`run_experiment`.
    """
    settings = settings or get_settings()
    result = result or optimize(obj, seed, settings)
    p_star = result.report.p_click

    def accepts(x: NDArray[np.float64]) -> bool:
        report = evaluate_report(obj, x, settings.condition_limit)
        return (
            report is not None
            and report.f_noon is not None
            and report.f_noon >= 1.0 - settings.fidelity_tolerance
            and report.p_click >= p_star - settings.probability_tolerance
        )

    best_x = result.best.as_vector(obj.tie_thetas)
    if not accepts(best_x):
        message = "no optimum with unit fidelity to explore"
        logger.warning("Manifold exploration skipped", reason=message)
        return ManifoldSample(warning=message)

    dimension, singular, directions = tangent_space(
        obj, best_x, p_star, settings.condition_limit
    )
    members: list[NDArray[np.float64]] = [best_x]

    def add(x: NDArray[np.float64]) -> None:
        if len(members) >= n_samples or not accepts(x):
            return
        if all(np.linalg.norm(x - m) > DISTINCT_DISTANCE for m in members):
            members.append(x)

    for direction in directions:
        for sign in (1.0, -1.0):
            start = obj.box.clamp(
                best_x + sign * CONTINUATION_STEP * direction, obj.tie_thetas
            )
            add(_polish(obj, settings, start))

    rng = np.random.default_rng(seed)
    lower = obj.box.lower(obj.tie_thetas)
    upper = obj.box.upper(obj.tie_thetas)
    for _ in range(2 * n_samples):
        if len(members) >= n_samples:
            break
        add(_polish(obj, settings, rng.uniform(lower, upper)))

    params = [obj.box.to_params(x, obj.tie_thetas) for x in members]
    reports = [
        run_experiment(
            p, obj.input, obj.herald, obj.n_target, condition_limit=settings.condition_limit
        )
        for p in params
    ]

    if len(members) < 2:
        message = "fewer than two distinct optima found"
        logger.warning("Manifold exploration incomplete", reason=message)
        return ManifoldSample(
            members=params,
            reports=reports,
            dimension=0,
            singular_values=singular,
            warning=message,
        )

    distances = pdist(np.array(members))
    logger.info(
        "Manifold exploration completed",
        samples=len(members),
        dimension=dimension,
        min_distance=float(distances.min()),
    )
    return ManifoldSample(
        members=params,
        reports=reports,
        dimension=dimension,
        singular_values=singular,
        min_distance=float(distances.min()),
        mean_distance=float(distances.mean()),
        max_distance=float(distances.max()),
    )
