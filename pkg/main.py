import argparse
import logging
import sys
from pathlib import Path

from config import aliasing_config, benchmark_config, phase_space_config, runtime_config
from src import (
    AliasingPipeline,
    BenchmarkPipeline,
    InputValidationError,
    NumericalDefectError,
    PhaseSpacePipeline,
    SimulatePipeline,
    ValidatePipeline,
    set_up_logger,
)

DIR_PATH = Path(__file__).parent.resolve()

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, default=None, help="Fichier de sortie (stdout par défaut)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Admittance solver for multilayer walls")
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="Threads for the harmonic loop (RICCATI_THREADS par défaut)",
    )
    parser.add_argument("--log-level", default=runtime_config.log_level)
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="Simulate interior temperature and flux")
    simulate.add_argument("config", type=Path)
    simulate.add_argument("weather", type=Path)
    simulate.add_argument("--perturbed", action="store_true", help="First-order gradient correction")
    simulate.add_argument("--radiative", action="store_true", help="Nonlinear sky exchange correction")
    simulate.add_argument("--history", type=Path, help="Weather preceding the run, used as warm-up")
    _add_output(simulate)

    benchmark = commands.add_parser("benchmark", help="Single-step correction vs sliced chains")
    benchmark.add_argument("config", type=Path)
    benchmark.add_argument("--weather", type=Path, default=None)
    benchmark.add_argument("--ms-list", type=_ints, default=benchmark_config.slices)
    benchmark.add_argument("--no-timing", action="store_true", help="Leave wall_time_ms empty")
    _add_output(benchmark)

    phase_space = commands.add_parser("phase-space", help="Transfer-matrix overflow thicknesses")
    phase_space.add_argument("--alpha-min", type=float, default=phase_space_config.alpha_min)
    phase_space.add_argument("--alpha-max", type=float, default=phase_space_config.alpha_max)
    phase_space.add_argument("--alpha-count", type=int, default=phase_space_config.alpha_count)
    phase_space.add_argument("--periods", type=_floats, default=phase_space_config.periods_s)
    _add_output(phase_space)

    aliasing = commands.add_parser("aliasing", help="Warm-up padding convergence")
    aliasing.add_argument("config", type=Path)
    aliasing.add_argument("weather", type=Path)
    aliasing.add_argument("--padding-days", type=_floats, default=aliasing_config.padding_days)
    aliasing.add_argument("--history", type=Path, help="Weather preceding the run, used as warm-up")
    _add_output(aliasing)

    validate = commands.add_parser("validate", help="Check a wall configuration")
    validate.add_argument("config", type=Path)
    _add_output(validate)

    return parser


def run_command(args: argparse.Namespace) -> None:
    if args.command == "simulate":
        SimulatePipeline(
            config_path=args.config,
            weather_path=args.weather,
            perturbed=args.perturbed,
            radiative=args.radiative,
            out_path=args.out,
            fmt=args.fmt,
            threads=args.threads,
            history_path=args.history,
        ).run()

    if args.command == "benchmark":
        BenchmarkPipeline(
            config_path=args.config,
            weather_path=args.weather,
            slices=args.ms_list,
            timing=not args.no_timing,
            out_path=args.out,
            fmt=args.fmt,
        ).run()

    if args.command == "phase-space":
        PhaseSpacePipeline(
            alpha_min=args.alpha_min,
            alpha_max=args.alpha_max,
            periods=args.periods,
            alpha_count=args.alpha_count,
            out_path=args.out,
            fmt=args.fmt,
        ).run()

    if args.command == "aliasing":
        AliasingPipeline(
            config_path=args.config,
            weather_path=args.weather,
            padding_days=args.padding_days,
            out_path=args.out,
            fmt=args.fmt,
            threads=args.threads,
            history_path=args.history,
        ).run()

    if args.command == "validate":
        ValidatePipeline(config_path=args.config, out_path=args.out, fmt=args.fmt).run()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    log_dir_path = Path(runtime_config.log_dir)
    if not log_dir_path.is_absolute():
        log_dir_path = DIR_PATH / log_dir_path
    log_dir_path.mkdir(parents=True, exist_ok=True)
    set_up_logger(
        name="app",
        log_file_path=log_dir_path / "app.log",
        level=logging.getLevelName(str(args.log_level).upper()),
    )

    try:
        if args.threads is not None and args.threads < 1:
            raise InputValidationError("--threads must be >= 1")
        run_command(args)
    except InputValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalDefectError as e:
        print(f"numerical defect: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
