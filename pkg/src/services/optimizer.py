"""Grid-seeded multi-start Nelder-Mead search over the device parameters."""

import itertools
import math
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import TypeVar

import numpy as np
import structlog
from numpy.typing import NDArray

from ..models.device import TWO_PI
from ..models.fock import FockState
from ..models.herald import HeraldReport, HeraldSpec
from ..models.optimization import (
    Objective,
    ObjectiveMode,
    OptimizationResult,
    OptimizationStatus,
    OptimizationTrace,
    RestartRecord,
    SimplexResult,
)
from ..processors.base import BaseObjectiveStrategy
from ..processors.factory import ObjectiveStrategyFactory
from ..utils.config import Settings, get_settings
from ..utils.debug import time_function
from ..utils.exceptions import DegenerateDeviceError
from .herald import run_experiment
from .simplex import nelder_mead

logger = structlog.get_logger()

T = TypeVar("T")
R = TypeVar("R")

DEGENERATE_PENALTY = 1e3
FIRST_STAGE_STEP = 0.05
REFINE_STAGE_STEP = 1e-3
MAX_REBUILDS = 3
REBUILD_IMPROVEMENT = 1e-12
PREFERRED_PHASE = math.pi
MIRROR_THRESHOLD = math.pi / 2


def default_objective(
    input: FockState, herald: HeraldSpec, n_target: int | None = None
) -> Objective:
    """Fidelity-first up to N = 3, equal-weight trade-off beyond."""
    n = input.n - herald.count if n_target is None else n_target
    mode = ObjectiveMode.FIDELITY_FIRST if n <= 3 else ObjectiveMode.WEIGHTED_SUM
    return Objective(input=input, herald=herald, n_target=n, mode=mode, weight=0.5)


def evaluate_report(
    objective: Objective, x: NDArray[np.float64], condition_limit: float
) -> HeraldReport | None:
    """Herald report at a search-space point, ``None`` when degenerate."""
    params = objective.box.to_params(x, objective.tie_thetas)
    try:
        return run_experiment(
            params,
            objective.input,
            objective.herald,
            objective.n_target,
            condition_limit=condition_limit,
        )
    except DegenerateDeviceError:
        return None


def point_cost(
    objective: Objective,
    strategy: BaseObjectiveStrategy,
    stage: int,
    condition_limit: float,
    x: NDArray[np.float64],
) -> float:
    """Stage cost at one point; degenerate devices get a flat penalty."""
    report = evaluate_report(objective, x, condition_limit)
    if report is None:
        return DEGENERATE_PENALTY
    return strategy.cost(objective, report, stage)


def _chunk_costs(
    objective: Objective,
    strategy: BaseObjectiveStrategy,
    condition_limit: float,
    points: NDArray[np.float64],
) -> list[float]:
    return [point_cost(objective, strategy, 0, condition_limit, x) for x in points]


def run_restart(
    objective: Objective,
    strategy: BaseObjectiveStrategy,
    stage: int,
    step: NDArray[np.float64],
    settings: Settings,
    x0: NDArray[np.float64],
) -> SimplexResult:
    """Nelder-Mead runs of ``stage`` from ``x0``.

    The simplex is rebuilt around each endpoint until a rebuild stops
    improving the cost, all within one evaluation budget.
    """
    cost = partial(point_cost, objective, strategy, stage, settings.condition_limit)
    lower = objective.box.lower(objective.tie_thetas)
    upper = objective.box.upper(objective.tie_thetas)

    result: SimplexResult | None = None
    iterations = evaluations = 0
    for _ in range(MAX_REBUILDS + 1):
        run = nelder_mead(
            cost,
            x0 if result is None else result.x,
            lower,
            upper,
            step,
            tolerance=settings.simplex_tolerance,
            stall_iterations=settings.stall_iterations,
            max_evaluations=settings.max_evaluations - evaluations,
        )
        iterations += run.iterations
        evaluations += run.evaluations
        improved = result is None or run.cost < result.cost - REBUILD_IMPROVEMENT
        if result is None or run.cost <= result.cost:
            result = run
        if not improved or run.status == OptimizationStatus.STALLED:
            break
        if evaluations >= settings.max_evaluations:
            break

    assert result is not None
    return result.model_copy(update={"iterations": iterations, "evaluations": evaluations})


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: int) -> list[R]:
    """Map in input order, across processes when ``workers > 1``."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def seed_points(
    objective: Objective,
    strategy: BaseObjectiveStrategy,
    settings: Settings,
    rng: np.random.Generator,
) -> tuple[list[NDArray[np.float64]], int]:
    """Best coarse-grid points, jittered, as restart origins.

    The grid ties both ring phases. Returns the starts and the number of grid
    evaluations spent.
    """
    box = objective.box
    lower, upper = box.lower(True), box.upper(True)
    axes = [
        np.linspace(lower[i], upper[i], count)
        for i, count in enumerate(settings.grid_shape)
    ]
    grid = np.array(list(itertools.product(*axes)))
    spacing = np.array(
        [
            (upper[i] - lower[i]) / max(count - 1, 1)
            for i, count in enumerate(settings.grid_shape)
        ]
    )
    if not objective.tie_thetas:
        grid = np.column_stack([grid, grid[:, 2]])
        spacing = np.append(spacing, spacing[2])

    chunks = np.array_split(grid, max(settings.workers, 1))
    costs = np.concatenate(
        [
            np.asarray(chunk_costs, dtype=np.float64)
            for chunk_costs in ordered_map(
                partial(_chunk_costs, objective, strategy, settings.condition_limit),
                chunks,
                settings.workers,
            )
        ]
    )

    chosen = np.argsort(costs, kind="stable")[: settings.restarts]
    jitter = rng.uniform(-0.5, 0.5, size=(len(chosen), objective.dimension)) * spacing
    starts = [
        box.clamp(point, objective.tie_thetas) for point in grid[chosen] + jitter
    ]

    if objective.initial_guess is not None:
        guess = box.clamp(
            objective.initial_guess.as_vector(objective.tie_thetas),
            objective.tie_thetas,
        )
        starts = [guess, *starts[: settings.restarts - 1]]

    logger.debug(
        "Seeded restarts from grid",
        grid_points=len(grid),
        restarts=len(starts),
        best_grid_cost=float(costs[chosen[0]]) if len(chosen) else None,
    )
    return starts, len(grid)


def phase_distance(x: NDArray[np.float64]) -> float:
    """Largest distance of the ring phases of a search point from pi."""
    return float(np.max(np.abs(np.asarray(x[2:]) - PREFERRED_PHASE)))


def mirror_point(x: NDArray[np.float64]) -> NDArray[np.float64]:
    """Partner setting (tau0, 1 - tau1, theta + pi) of a search point.

    Flipping the junction transmission to ``1 - tau1`` is the same as a
    sign change of the junction up to mode relabelling, which the ring phases
    absorb as a half turn.
    """
    mirrored = np.array(x, dtype=np.float64)
    mirrored[1] = 1.0 - mirrored[1]
    mirrored[2:] = np.mod(mirrored[2:] + math.pi, TWO_PI)
    return mirrored


def prefer_central_phase(
    objective: Objective,
    strategy: BaseObjectiveStrategy,
    stage: int,
    step: NDArray[np.float64],
    settings: Settings,
    runs: list[SimplexResult],
) -> tuple[SimplexResult, int]:
    """Among endpoints tied within the probability tolerance, the one nearest pi.

    An endpoint far from pi also gets its mirror partner polished and
    considered. Returns the chosen run and the evaluations spent polishing.
    """
    best = min(runs, key=lambda run: run.cost)
    tied = best.cost + settings.probability_tolerance
    candidates = [run for run in runs if run.cost <= tied]

    evaluations = 0
    if phase_distance(best.x) > MIRROR_THRESHOLD:
        mirrored = mirror_point(best.x)
        lower = objective.box.lower(objective.tie_thetas)
        upper = objective.box.upper(objective.tie_thetas)
        if np.all(mirrored >= lower) and np.all(mirrored <= upper):
            polished = run_restart(objective, strategy, stage, step, settings, mirrored)
            evaluations = polished.evaluations
            if polished.cost <= tied:
                candidates.append(polished)

    chosen = min(candidates, key=lambda run: (phase_distance(run.x), run.cost))
    if chosen is not best:
        logger.debug(
            "Preferred tied endpoint nearer pi",
            cost=chosen.cost,
            best_cost=best.cost,
            phase_distance=phase_distance(chosen.x),
        )
    return chosen, evaluations


@time_function
def optimize(
    obj: Objective, seed: int, settings: Settings | None = None
) -> OptimizationResult:
    """Search the parameter box for the objective's best device setting.

    Deterministic for a given ``seed``: the seed only drives the jitter of
    the grid-seeded restart origins, and restarts are reduced in index order.
    """
    settings = settings or get_settings()
    strategy = ObjectiveStrategyFactory(settings).get_strategy(obj)
    rng = np.random.default_rng(seed)

    logger.info(
        "Starting optimization",
        input=str(obj.input),
        herald_count=obj.herald.count,
        n_target=obj.n_target,
        mode=obj.mode.value,
        seed=seed,
        workers=settings.workers,
    )

    starts, grid_evaluations = seed_points(obj, strategy, settings, rng)
    width = obj.box.upper(obj.tie_thetas) - obj.box.lower(obj.tie_thetas)

    trace = OptimizationTrace(evaluations=grid_evaluations, restarts=len(starts))
    status: OptimizationStatus | None = None
    best_run: SimplexResult | None = None

    for stage in range(strategy.stage_count):
        step = width * (FIRST_STAGE_STEP if stage == 0 else REFINE_STAGE_STEP)
        runs = ordered_map(
            partial(run_restart, obj, strategy, stage, step, settings),
            starts,
            settings.workers,
        )

        for index, run in enumerate(runs):
            trace.iterations += run.iterations
            trace.evaluations += run.evaluations
            trace.records.append(
                RestartRecord(
                    restart=index,
                    stage=stage,
                    point=tuple(float(v) for v in run.x),
                    cost=run.cost,
                    evaluations=run.evaluations,
                    status=run.status,
                )
            )

        ranked = sorted(range(len(runs)), key=lambda i: (runs[i].cost, i))
        best_run = runs[ranked[0]]
        logger.info(
            "Optimization stage finished",
            stage=stage,
            best_cost=best_run.cost,
            best_restart=ranked[0],
        )

        if stage + 1 < strategy.stage_count:
            feasible = []
            for i in ranked:
                report = evaluate_report(obj, runs[i].x, settings.condition_limit)
                if report is not None and strategy.is_feasible(report):
                    feasible.append(runs[i].x)
            if not feasible:
                logger.warning(
                    "No feasible point after fidelity stage",
                    best_cost=best_run.cost,
                )
                status = OptimizationStatus.INFEASIBLE
                break
            starts = feasible
        else:
            best_run, polish_evaluations = prefer_central_phase(
                obj, strategy, stage, step, settings, runs
            )
            trace.evaluations += polish_evaluations

    assert best_run is not None
    best = obj.box.to_params(best_run.x, obj.tie_thetas)
    report = run_experiment(
        best,
        obj.input,
        obj.herald,
        obj.n_target,
        condition_limit=settings.condition_limit,
    )
    if status is None:
        status = (
            best_run.status
            if strategy.is_feasible(report)
            else OptimizationStatus.INFEASIBLE
        )
    trace.simplex_size = best_run.diameter

    logger.info(
        "Optimization completed",
        status=status.value,
        p_click=report.p_click,
        f_noon=report.f_noon,
        evaluations=trace.evaluations,
    )
    return OptimizationResult(
        best=best, report=report, trace=trace, status=status, mode=obj.mode
    )
