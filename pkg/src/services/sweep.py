"""Grid sweeps, CSV tables and Pareto fronts."""

import csv
from collections.abc import Iterable, Iterator
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import TextIO

import structlog

from ..models.device import DeviceParams
from ..models.fock import FockState
from ..models.herald import HeraldReport, HeraldSpec
from ..models.sweep import ParameterGrid
from ..utils.config import Settings, get_settings
from ..utils.exceptions import CapacityError, DegenerateDeviceError
from ..utils.serialization import format_float
from .herald import run_experiment

logger = structlog.get_logger()

SWEEP_HEADER = ("tau0", "tau1", "theta1", "theta2", "p_click", "f_noon")
SWEEP_CHUNK = 256
PROGRESS_INTERVAL = 100_000


def _evaluate_point(
    input: FockState,
    herald: HeraldSpec,
    n_target: int,
    condition_limit: float,
    params: DeviceParams,
) -> HeraldReport | None:
    try:
        return run_experiment(
            params, input, herald, n_target, condition_limit=condition_limit
        )
    except DegenerateDeviceError:
        return None


def sweep(
    grid: ParameterGrid,
    input: FockState,
    herald: HeraldSpec,
    n_target: int,
    settings: Settings | None = None,
) -> Iterator[HeraldReport]:
    """Stream one report per grid point in grid order.

    Degenerate points are logged and skipped. Raises CapacityError before any
    evaluation when the grid exceeds ``max_sweep_points``.
    """
    settings = settings or get_settings()
    if grid.size > settings.max_sweep_points:
        raise CapacityError(
            f"sweep of {grid.size} points exceeds the limit of "
            f"{settings.max_sweep_points}"
        )

    logger.info("Starting sweep", points=grid.size, workers=settings.workers)
    evaluate = partial(
        _evaluate_point, input, herald, n_target, settings.condition_limit
    )

    if settings.workers <= 1:
        yield from _collect(grid, map(evaluate, grid.points()))
        return
    with ProcessPoolExecutor(max_workers=settings.workers) as executor:
        yield from _collect(
            grid, executor.map(evaluate, grid.points(), chunksize=SWEEP_CHUNK)
        )


def _collect(
    grid: ParameterGrid, results: Iterable[HeraldReport | None]
) -> Iterator[HeraldReport]:
    skipped = 0
    for index, (params, report) in enumerate(
        zip(grid.points(), results, strict=True), start=1
    ):
        if report is None:
            skipped += 1
            logger.warning("Skipping degenerate grid point", params=params.model_dump())
        else:
            yield report
        if index % PROGRESS_INTERVAL == 0:
            logger.info("Sweep progress", done=index, total=grid.size)
    logger.info("Sweep completed", points=grid.size, skipped=skipped)


def write_sweep_csv(
    reports: Iterable[HeraldReport], stream: TextIO, precision: int | None = None
) -> int:
    """Write the sweep table; returns the number of data rows."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    rows = 0
    for report in reports:
        params = report.params
        values = (
            (params.tau0, params.tau1, params.theta1, params.theta2)
            if params is not None
            else (None, None, None, None)
        )
        writer.writerow(
            [format_float(v, precision) for v in (*values, report.p_click, report.f_noon)]
        )
        rows += 1
    return rows


def pareto_front(reports: Iterable[HeraldReport]) -> list[HeraldReport]:
    """Reports not dominated in (p_click, f_noon), by decreasing p_click.

    Reports without a defined fidelity are ignored.
    """
    candidates = [r for r in reports if r.f_noon is not None]
    ordered = sorted(candidates, key=lambda r: (-r.p_click, -(r.f_noon or 0.0)))
    front: list[HeraldReport] = []
    best_fidelity = float("-inf")
    for report in ordered:
        assert report.f_noon is not None
        if report.f_noon > best_fidelity:
            front.append(report)
            best_fidelity = report.f_noon
    return front
