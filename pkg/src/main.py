"""Command-line entrypoint for noonforge."""

import argparse
import csv
import sys
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any, TextIO

import numpy as np
import structlog

from .models.config import ParamsConfig, RunConfig
from .models.herald import HeraldReport
from .models.optimization import Objective, OptimizationResult
from .services.device import build_smatrix
from .services.fock import evolve
from .services.herald import run_experiment
from .services.manifold import explore_manifold
from .services.optimizer import default_objective, optimize
from .services.reproduce import format_summary, reproduce_fig2, write_figure_csv
from .services.sweep import pareto_front, sweep, write_sweep_csv
from .utils.config import Settings, get_settings
from .utils.exceptions import DegenerateDeviceError, NoonForgeError
from .utils.logging import configure_logging
from .utils.serialization import dumps, format_float, write_text

EXIT_OK = 0
EXIT_REPRODUCTION_FAILED = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3

TRACE_HEADER = (
    "restart",
    "stage",
    "tau0",
    "tau1",
    "theta1",
    "theta2",
    "cost",
    "evaluations",
    "status",
)


def setup_logging(settings: Settings, log_level: str | None = None) -> None:
    """Setup logging configuration."""
    configure_logging(log_level or settings.log_level, json_format=settings.log_json)


def _occupations(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid occupation list: {text!r}") from e


def _axis(text: str) -> tuple[float, float, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected START,STOP,POINTS, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid grid axis: {text!r}") from e


def _guess(text: str) -> dict[str, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected TAU0,TAU1,THETA, got {text!r}")
    try:
        tau0, tau1, theta = (float(part) for part in parts)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid initial guess: {text!r}") from e
    return {"tau0": tau0, "tau1": tau1, "theta": theta}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with run options")
    common.add_argument("--seed", type=int, help="Seed for stochastic choices")
    common.add_argument("--format", choices=["json", "csv"], help="Output format")
    common.add_argument("--out", type=Path, help="Output path (default: stdout)")
    common.add_argument("--precision", type=int, help="Significant digits in output")
    common.add_argument("--workers", type=int, help="Worker processes")
    common.add_argument("--log-level", help="Log level (logs go to stderr)")

    device = argparse.ArgumentParser(add_help=False)
    device.add_argument("--params", type=Path, help="JSON file with device parameters")
    device.add_argument("--tau0", type=float, help="Outer coupler transmission")
    device.add_argument("--tau1", type=float, help="Central junction parameter")
    device.add_argument("--theta", type=float, help="Shared ring phase (rad)")
    device.add_argument("--theta1", type=float, help="Upper ring phase (rad)")
    device.add_argument("--theta2", type=float, help="Lower ring phase (rad)")
    device.add_argument("--arc-split", type=float, help="Phase fraction before b")

    experiment = argparse.ArgumentParser(add_help=False)
    experiment.add_argument("--input", type=_occupations, help="Input state, e.g. 1,2,1")
    experiment.add_argument("--herald", type=int, help="Photons detected in b")
    experiment.add_argument("--n", type=int, help="NOON order (default: input - herald)")

    parser = argparse.ArgumentParser(
        prog="noonforge",
        description="Heralded NOON-state generation in a double-ring device.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser(
        "smatrix", parents=[common, device], help="Print the device S-matrix"
    )

    evolve_parser = commands.add_parser(
        "evolve", parents=[common, device], help="Evolve a Fock state"
    )
    evolve_parser.add_argument("--input", type=_occupations, help="Input state")

    commands.add_parser(
        "herald", parents=[common, device, experiment], help="Run one experiment"
    )

    optimize_parser = commands.add_parser(
        "optimize", parents=[common, experiment], help="Optimize device parameters"
    )
    optimize_parser.add_argument(
        "--mode", choices=["fidelity_first", "weighted_sum"], help="Objective mode"
    )
    optimize_parser.add_argument("--weight", type=float, help="Fidelity weight")
    optimize_parser.add_argument(
        "--untied", action="store_const", const=True, help="Free theta1 and theta2"
    )
    optimize_parser.add_argument(
        "--initial-guess", type=_guess, help="First restart TAU0,TAU1,THETA"
    )
    optimize_parser.add_argument("--trace-csv", type=Path, help="Restart trace CSV")
    optimize_parser.add_argument(
        "--manifold",
        action="store_const",
        const=True,
        help="Also sample the optimal manifold (NOONFORGE_MANIFOLD_SAMPLES points)",
    )
    optimize_parser.add_argument(
        "--manifold-samples", type=int, help="Sample the optimal manifold with this many points"
    )

    sweep_parser = commands.add_parser(
        "sweep", parents=[common, experiment], help="Evaluate a parameter grid"
    )
    sweep_parser.add_argument("--grid-tau0", type=_axis, help="START,STOP,POINTS")
    sweep_parser.add_argument("--grid-tau1", type=_axis, help="START,STOP,POINTS")
    sweep_parser.add_argument("--grid-theta", type=_axis, help="START,STOP,POINTS")
    sweep_parser.add_argument("--grid-theta2", type=_axis, help="Untied lower ring")
    sweep_parser.add_argument("--pareto", type=Path, help="Pareto front CSV")

    reproduce_parser = commands.add_parser(
        "reproduce", parents=[common], help="Reproduce stored figure targets"
    )
    reproduce_parser.add_argument("name", choices=["fig2"])

    return parser


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge ``--config``, ``--params`` and explicit flags into a RunConfig."""
    params: dict[str, Any] = {}
    params_file = getattr(args, "params", None)
    if params_file is not None:
        params.update(ParamsConfig.from_file(params_file).model_dump(exclude_none=True))
    for name in ("tau0", "tau1", "theta", "theta1", "theta2"):
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value

    grid: dict[str, Any] = {}
    for name in ("tau0", "tau1", "theta", "theta2"):
        value = getattr(args, f"grid_{name}", None)
        if value is not None:
            grid[name] = value

    overrides: dict[str, Any] = {
        "params": params or None,
        "grid": grid or None,
    }
    for name in (
        "input",
        "herald",
        "n",
        "seed",
        "format",
        "out",
        "precision",
        "workers",
        "arc_split",
        "mode",
        "weight",
        "untied",
        "initial_guess",
        "trace_csv",
        "manifold",
        "manifold_samples",
        "pareto",
    ):
        overrides[name] = getattr(args, name, None)

    return RunConfig.from_sources(args.config, overrides)


@contextmanager
def open_output(out: Path | None) -> Iterator[TextIO]:
    """Stream to a file when a path is given, otherwise to stdout."""
    if out is None:
        yield sys.stdout
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8", newline="") as stream:
        yield stream


def _report_csv(report: HeraldReport, config: RunConfig) -> None:
    with open_output(config.out) as stream:
        write_sweep_csv([report], stream, config.precision)


def cmd_smatrix(config: RunConfig, settings: Settings) -> int:
    """Print the S-matrix and its unitarity residual."""
    s = build_smatrix(
        config.params.to_params(),
        arc_split=config.arc_split,
        condition_limit=settings.condition_limit,
    )
    if config.format == "csv":
        with open_output(config.out) as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(("row", "col", "re", "im"))
            for (row, col), value in np.ndenumerate(s.entries):
                writer.writerow(
                    (
                        row,
                        col,
                        format_float(value.real, config.precision),
                        format_float(value.imag, config.precision),
                    )
                )
        return EXIT_OK

    payload = {"smatrix": s.model_dump(), "unitarity_residual": s.residual}
    write_text(dumps(payload, config.precision), config.out, sys.stdout)
    return EXIT_OK


def cmd_evolve(config: RunConfig, settings: Settings) -> int:
    """Print the full output state of a Fock input."""
    s = build_smatrix(
        config.params.to_params(),
        arc_split=config.arc_split,
        condition_limit=settings.condition_limit,
    )
    state = config.fock_input()
    out = evolve(s, state)

    if config.format == "csv":
        with open_output(config.out) as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(("n_a", "n_b", "n_c", "re", "im"))
            for occ, amp in zip(out.basis, out.amplitudes, strict=True):
                writer.writerow(
                    (
                        *occ,
                        format_float(amp.real, config.precision),
                        format_float(amp.imag, config.precision),
                    )
                )
        return EXIT_OK

    payload = {"input": list(state.occ), "output": out.model_dump()}
    write_text(dumps(payload, config.precision), config.out, sys.stdout)
    return EXIT_OK


def cmd_herald(config: RunConfig, settings: Settings) -> int:
    """Run one heralded experiment."""
    report = run_experiment(
        config.params.to_params(),
        config.fock_input(),
        config.herald_spec(),
        config.target_order(),
        arc_split=config.arc_split,
        condition_limit=settings.condition_limit,
    )
    if config.format == "csv":
        _report_csv(report, config)
        return EXIT_OK
    write_text(dumps(report.model_dump(), config.precision), config.out, sys.stdout)
    return EXIT_OK


def build_objective(config: RunConfig) -> Objective:
    """Objective from run options, with mode defaulting by NOON order."""
    input = config.fock_input()
    herald = config.herald_spec()
    n_target = config.target_order()
    mode = config.mode or default_objective(input, herald, n_target).mode
    return Objective(
        input=input,
        herald=herald,
        n_target=n_target,
        mode=mode,
        weight=config.weight,
        box=config.box,
        tie_thetas=not config.untied,
        initial_guess=(
            None if config.initial_guess is None else config.initial_guess.to_params()
        ),
    )


def write_trace_csv(
    result: OptimizationResult, stream: TextIO, precision: int | None = None
) -> None:
    """Per-restart endpoints of every stage."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for record in result.trace.records:
        point = list(record.point)
        if len(point) == 3:
            point.append(point[2])
        writer.writerow(
            (
                record.restart,
                record.stage,
                *(format_float(v, precision) for v in point),
                format_float(record.cost, precision),
                record.evaluations,
                record.status.value,
            )
        )


def cmd_optimize(config: RunConfig, settings: Settings) -> int:
    """Optimize, optionally sampling the optimal manifold afterwards."""
    objective = build_objective(config)
    result = optimize(objective, config.seed, settings)

    if config.trace_csv is not None:
        with open_output(config.trace_csv) as stream:
            write_trace_csv(result, stream, config.precision)

    if config.format == "csv":
        _report_csv(result.report, config)
        return EXIT_OK

    payload = result.model_dump(mode="json")
    samples = config.manifold_samples
    if samples is None and config.manifold:
        samples = settings.manifold_samples
    if samples is not None:
        sample = explore_manifold(objective, samples, config.seed, settings, result)
        payload["manifold"] = sample.model_dump(mode="json")
    write_text(dumps(payload, config.precision), config.out, sys.stdout)
    return EXIT_OK


def cmd_sweep(config: RunConfig, settings: Settings) -> int:
    """Evaluate a grid, streaming CSV by default."""
    reports = sweep(
        config.grid.to_grid(),
        config.fock_input(),
        config.herald_spec(),
        config.target_order(),
        settings,
    )
    kept: list[HeraldReport] = []

    def tee() -> Iterator[HeraldReport]:
        for report in reports:
            if config.pareto is not None:
                kept.append(report)
            yield report

    if config.format == "json":
        payload = [report.model_dump() for report in tee()]
        write_text(dumps(payload, config.precision), config.out, sys.stdout)
    else:
        with open_output(config.out) as stream:
            write_sweep_csv(tee(), stream, config.precision)

    if config.pareto is not None:
        with open_output(config.pareto) as stream:
            write_sweep_csv(pareto_front(kept), stream, config.precision)
    return EXIT_OK


def cmd_reproduce(config: RunConfig, settings: Settings) -> int:
    """Write figure CSVs to ``--out`` (default: current directory)."""
    logger = structlog.get_logger()
    out_dir = config.out or Path(".")
    report = reproduce_fig2(config.seed, settings)

    with open_output(out_dir / "fig2.csv") as stream:
        write_figure_csv(report, stream, config.precision)
    with open_output(out_dir / "fig2_pareto.csv") as stream:
        write_sweep_csv(report.pareto, stream, config.precision)
    sys.stdout.write(format_summary(report))

    if not report.passed:
        logger.warning("Reproduction failed", name=report.name)
        return EXIT_REPRODUCTION_FAILED
    return EXIT_OK


COMMANDS: dict[str, Callable[[RunConfig, Settings], int]] = {
    "smatrix": cmd_smatrix,
    "evolve": cmd_evolve,
    "herald": cmd_herald,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "reproduce": cmd_reproduce,
}


def main(argv: list[str] | None = None) -> None:
    """Main function."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = get_settings()
    except ValueError as e:
        print(f"noonforge: invalid settings: {e}", file=sys.stderr)
        sys.exit(EXIT_USAGE)

    setup_logging(settings, args.log_level)
    logger = structlog.get_logger()

    try:
        config = load_run_config(args)
        if config.workers is not None:
            settings = settings.model_copy(update={"workers": config.workers})
        logger.info("Starting noonforge command", command=args.command)
        code = COMMANDS[args.command](config, settings)

    except DegenerateDeviceError as e:
        logger.error(
            "Degenerate device", error=str(e), condition_number=e.condition_number
        )
        print(f"noonforge: {e}", file=sys.stderr)
        sys.exit(EXIT_DEGENERATE)
    except (NoonForgeError, ValueError, OSError) as e:
        logger.error("Invalid request", command=args.command, error=str(e))
        parser.print_usage(sys.stderr)
        print(f"noonforge: {e}", file=sys.stderr)
        sys.exit(EXIT_USAGE)

    if code != EXIT_OK:
        sys.exit(code)


if __name__ == "__main__":
    main()
