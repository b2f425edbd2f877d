"""``uavcover`` command line: generate, solve, validate, bench, suite.

Exit codes: 0 success, 1 infeasible or invalid schedule, 2 usage or input
error, 3 search budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import ConfigError, load_config, run_experiment, write_outputs
from .instances import (GeneratorParams, InstanceFormatError, generate_random, handcrafted_suite,
                        load_instance, load_schedule, save_instance, save_schedule, suite_names)
from .model import validate_schedule
from .planners import ALGORITHMS, PlannerConfig, run_planner
from .transport import ResourceCapError

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _ratio(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    return lo, hi


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def cmd_generate(args) -> int:
    params = GeneratorParams(args.targets, args.uavs, args.width, args.ratio, args.coord,
                             args.demand, fuel_capacity=args.fuel_capacity,
                             loiter_fuel=args.loiter,
                             require_depot_return=not args.no_depot_return)
    try:
        instance = generate_random(params, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    Path(args.out).write_text(save_instance(instance))
    return EXIT_OK


def cmd_solve(args) -> int:
    instance = load_instance(_read(args.instance))
    if args.no_depot_return:
        instance = instance.with_depot_return(False)
    config = PlannerConfig(cluster_threshold=args.threshold)
    try:
        result = run_planner(args.algorithm, instance, config)
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    schedule = result.schedule
    Path(args.out).write_text(save_schedule(schedule, result.algorithm))
    report = validate_schedule(instance, schedule)
    print(f"algorithm={result.algorithm} fuel={schedule.total_fuel:g} "
          f"complete={'yes' if schedule.complete else 'no'} "
          f"served={schedule.served}/{instance.total_demand} elapsed={result.elapsed:.4f}s")
    for code, message in report.violations:
        print(f"{code}: {message}", file=sys.stderr)
    return EXIT_OK if report.ok and schedule.complete else EXIT_INFEASIBLE


def cmd_validate(args) -> int:
    instance = load_instance(_read(args.instance))
    schedule = load_schedule(_read(args.schedule))
    report = validate_schedule(instance, schedule)
    for code, message in report.violations:
        print(f"{code}: {message}", file=sys.stderr)
    if args.strict and not schedule.complete:
        print(f"{len(schedule.unmet)} target(s) declared unmet", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK if report.ok else EXIT_INFEASIBLE


def cmd_bench(args) -> int:
    config = load_config(_read(args.config))
    if args.workers is not None:
        config.workers = args.workers
    report = run_experiment(config)
    for path in write_outputs(report, config, args.out):
        print(path)
    return EXIT_OK


def cmd_suite(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, instance in zip(suite_names(), handcrafted_suite()):
        (out / f"{name}.json").write_text(save_instance(instance))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uavcover", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random instance")
    p.add_argument("--targets", type=int, required=True)
    p.add_argument("--uavs", type=int, required=True)
    p.add_argument("--width", type=int, required=True, help="time window width (steps)")
    p.add_argument("--ratio", type=_ratio, required=True,
                   help="consecutive-window intersection ratio range LO:HI")
    p.add_argument("--coord", type=int, required=True, help="largest grid coordinate")
    p.add_argument("--demand", type=int, required=True, help="UAVs needed per target")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fuel-capacity", type=float, default=None)
    p.add_argument("--loiter", type=float, default=1.0)
    p.add_argument("--no-depot-return", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="plan an instance")
    p.add_argument("--algorithm", required=True, type=str.upper, choices=ALGORITHMS)
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=0.7)
    p.add_argument("--no-depot-return", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a schedule against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--strict", action="store_true", help="also fail on declared shortfall")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="run the experiment matrix from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("suite", help="write the hand-crafted instances")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InstanceFormatError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
