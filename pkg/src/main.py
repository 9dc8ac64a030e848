"""
Main entry point for the fourcycle counting engines.

Subcommands:
- run: replay a stream and print the running 4-cycle total after every update
- gen: write a seeded synthetic stream
- verify: replay a stream through an engine and the oracle in lockstep
- bench: like run, plus a per-update metrics CSV
- params: print the constraint report for a parameter set

Exit codes: 0 ok, 1 usage, 2 parse, 3 engine error, 4 divergence.
"""

import argparse
import logging
import os
import sys
import time
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, Sequence

from dotenv import load_dotenv

from core.config import BACKENDS, ENGINES, MODES, OMEGA_MODELS, REBUILD_POLICIES, WORKLOADS
from core.config import apply_overrides, load_config, load_flat_config, parse_fraction
from core.container import build_counter, build_oracle
from core.errors import FourCycleError, Infeasible, InvalidParam, ParseError, WarmupViolation
from core.interfaces import CycleCounterInterface
from modules.oracle.brute import brute_2paths
from modules.params.constraints import ParamSet, check_constraints, constraint_report, solve_params
from modules.params.omega import build_model
from modules.reporting.reporting import (
    BenchReporter,
    ParamsReporter,
    VerifyResult,
    bench_row,
    summarize_bench,
)
from modules.workload.generators import generate, validate_stream
from modules.workload.stream import format_update, read_stream, read_totals, write_stream
from utils.common import ensure_dir, format_timestamp, save_json_file

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_ENGINE = 3
EXIT_DIVERGENCE = 4

logger = logging.getLogger("fourcycle")


def setup_logging(log_level: str = "INFO", log_dir: Optional[str] = "logs") -> None:
    """
    Set up logging configuration.

    Logs go to stderr and, when log_dir is set, to a timestamped file; stdout is kept
    for totals and CSV.

    Args:
        log_level (str): Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_dir (str): Directory for the log file, or None for stderr only
    """
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_dir:
        ensure_dir(log_dir)
        stamp = format_timestamp(datetime.now(), "%Y%m%d_%H%M%S")
        handlers.append(logging.FileHandler(os.path.join(log_dir, f"fourcycle_{stamp}.log")))
    logging.basicConfig(
        level=numeric_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )


# Configuration

FLAG_OVERRIDES = {
    "engine": ("engine", "engine"),
    "mode": ("engine", "mode"),
    "rebuild_policy": ("engine", "rebuild_policy"),
    "bootstrap_min": ("engine", "bootstrap_min"),
    "backend": ("matmul", "backend"),
    "reference_edges": ("params", "reference_edges"),
    "omega_model": ("params", "omega_model"),
    "resolution": ("params", "resolution"),
    "kind": ("workload", "kind"),
    "vertices": ("workload", "vertices"),
    "steps": ("workload", "steps"),
    "delete_fraction": ("workload", "delete_fraction"),
    "seed": ("workload", "seed"),
    "window": ("workload", "window"),
    "metrics": ("output", "metrics_path"),
}


def build_config(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Resolve configuration: defaults, JSON file, environment, flat file, then flags.

    Raises:
        ValueError: On unknown keys or values that fail validation
    """
    config = load_config(args.config)
    if getattr(args, "flat_config", None):
        config = apply_overrides(config, load_flat_config(args.flat_config))
    overrides: Dict[str, Dict[str, Any]] = {}
    for flag, (section, key) in FLAG_OVERRIDES.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides.setdefault(section, {})[key] = value
    if getattr(args, "lenient", False):
        overrides.setdefault("engine", {})["strict_deadlines"] = False
    if overrides:
        config = apply_overrides(config, overrides)
    return config


# Replay

def replay(
    counter: CycleCounterInterface,
    updates: Sequence[Any],
    on_update: Optional[Callable[[int, int], None]] = None,
) -> List[int]:
    """
    Apply every update and collect the running totals.

    Raises:
        FourCycleError: Re-raised after logging the failing update index
    """
    totals = []
    for index, update in enumerate(updates):
        try:
            total = counter.apply(update)
        except FourCycleError as e:
            logger.error(f"Engine failed at update {index} ({update}): {e}", exc_info=True)
            raise
        totals.append(total)
        if on_update is not None:
            on_update(index, total)
    return totals


def _print_total(index: int, total: int) -> None:
    sys.stdout.write(f"{total}\n")


def cmd_run(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    mode = config["engine"]["mode"]
    updates = read_stream(args.stream, mode)

    if args.wedges is not None:
        if mode != "layered":
            raise InvalidParam("--wedges needs a layered stream")
        graph = validate_stream(updates, mode)
        x, y = args.wedges
        sys.stdout.write(f"{brute_2paths(graph, x, y)}\n")
        return EXIT_OK

    counter = build_counter(config)
    totals = replay(counter, updates, _print_total)
    sys.stdout.flush()

    if args.expected:
        expected = read_totals(args.expected)
        result = compare_totals(totals, expected)
        if not result.ok:
            logger.error(f"Totals differ from {args.expected}: {result.message()}")
            return EXIT_DIVERGENCE
        logger.info(f"Totals match {args.expected}")
    return EXIT_OK


def compare_totals(totals: Sequence[int], expected: Sequence[int]) -> VerifyResult:
    """First index where two total sequences differ; a length mismatch diverges at the shorter end."""
    for index, (got, want) in enumerate(zip(totals, expected)):
        if got != want:
            return VerifyResult(len(totals), index, got, want)
    if len(totals) != len(expected):
        index = min(len(totals), len(expected))
        got = totals[index] if index < len(totals) else None
        want = expected[index] if index < len(expected) else None
        return VerifyResult(len(totals), index, got, want)
    return VerifyResult(len(totals))


def cmd_gen(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    workload = config["workload"]
    mode = config["engine"]["mode"]
    updates = generate(
        workload["kind"],
        workload["vertices"],
        workload["steps"],
        delete_fraction=workload["delete_fraction"],
        seed=workload["seed"],
        mode=mode,
        window=workload["window"],
        frozen_prefix=args.frozen_prefix,
    )
    validate_stream(updates, mode)
    header = (
        f"{workload['kind']} {mode} stream: vertices={workload['vertices']} steps={workload['steps']} "
        f"delete_fraction={workload['delete_fraction']} seed={workload['seed']}"
    )
    if args.output:
        directory = os.path.dirname(args.output)
        if directory:
            ensure_dir(directory)
        write_stream(args.output, updates, header)
        logger.info(f"Wrote {len(updates)} updates to {args.output}")
    else:
        sys.stdout.write(f"# {header}\n")
        for update in updates:
            sys.stdout.write(format_update(update) + "\n")
    return EXIT_OK


def verify_stream(config: Dict[str, Any], updates: Sequence[Any]) -> VerifyResult:
    """Replay through the configured engine and the oracle; stop at the first difference."""
    engine = build_counter(config)
    oracle = build_oracle(config)
    for index, update in enumerate(updates):
        got = engine.apply(update)
        want = oracle.apply(update)
        if got != want:
            return VerifyResult(index + 1, index, got, want)
    return VerifyResult(len(updates))


def cmd_verify(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    updates = read_stream(args.stream, config["engine"]["mode"])
    result = verify_stream(config, updates)
    sys.stdout.write(result.message() + "\n")
    if not result.ok:
        logger.error(f"{config['engine']['engine']} engine: {result.message()}")
        return EXIT_DIVERGENCE
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    updates = read_stream(args.stream, config["engine"]["mode"])
    counter = build_counter(config)
    rows = []
    for index, update in enumerate(updates):
        start = time.perf_counter_ns()
        try:
            total = counter.apply(update)
        except FourCycleError as e:
            logger.error(f"Engine failed at update {index} ({update}): {e}", exc_info=True)
            raise
        wall_ns = time.perf_counter_ns() - start
        rows.append(bench_row(index, wall_ns, counter.take_stats()))
        sys.stdout.write(f"{total}\n")
    sys.stdout.flush()

    output = config["output"]
    path = output["metrics_path"] or os.path.join(output["output_dir"], "bench.csv")
    BenchReporter(path).write_rows(rows)
    summary = summarize_bench(rows)
    logger.info(f"Bench summary: {summary}")
    if args.summary:
        save_json_file(args.summary, {"summary": summary, "metrics": counter.metrics()})
    return EXIT_OK


def cmd_params(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    params_config = config["params"]
    if args.solve:
        model = build_model(params_config["omega_model"], parse_fraction(params_config["omega"]))
        p = solve_params(model, parse_fraction(params_config["resolution"]), params_config["strict_positive"])
    else:
        p = ParamSet.from_config(params_config)
    logger.info(f"Constraint report for {p}")
    ParamsReporter(args.output).write_rows([check.as_row() for check in constraint_report(p)])
    violated = check_constraints(p)
    if violated:
        logger.warning(f"Violated constraints: {', '.join(check.name for check in violated)}")
    return EXIT_OK


# Command-line argument parsing

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default="configs/config.json", help="JSON configuration file")
    parser.add_argument("--flat-config", help="Flat section.key = value file; flags override it")
    parser.add_argument("--engine", choices=ENGINES, help="Counting engine")
    parser.add_argument("--mode", choices=MODES, help="Stream mode")
    parser.add_argument("--rebuild-policy", choices=REBUILD_POLICIES, help="Main engine policy on edge-count drift")
    parser.add_argument("--bootstrap-min", type=int, help="Edge count below which the main engine stays naive")
    parser.add_argument("--backend", choices=BACKENDS, help="Matrix product backend")
    parser.add_argument("--reference-edges", type=int, help="Fixed reference edge count for the thresholds")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--lenient", action="store_true", help="Force late jobs instead of raising DeadlineMissed")
    parser.add_argument(
        "--log-level", "-l",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Set the logging level",
    )
    parser.add_argument("--log-dir", default="logs", help="Directory for log files ('' for stderr only)")


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """
    Parse command-line arguments.

    Returns:
        Namespace: Parsed arguments
    """
    parser = argparse.ArgumentParser(prog="fourcycle", description="Exact dynamic 4-cycle counting")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Print the running total after every update")
    _add_common(run)
    run.add_argument("stream", help="Update stream file")
    run.add_argument("--wedges", nargs=2, type=int, metavar=("X", "Y"),
                     help="Print the number of A-B 2-paths from X to Y in the final graph instead")
    run.add_argument("--expected", help="Expected totals file; exit 4 on mismatch")

    gen = subparsers.add_parser("gen", help="Generate a seeded stream")
    _add_common(gen)
    gen.add_argument("--kind", choices=WORKLOADS, help="Workload shape")
    gen.add_argument("--vertices", "-n", type=int, help="Vertices (per layer in layered mode)")
    gen.add_argument("--steps", type=int, help="Number of steps")
    gen.add_argument("--delete-fraction", type=float, help="Probability of a deletion step")
    gen.add_argument("--window", type=int, help="Edge lifetime for sliding-window")
    gen.add_argument("--frozen-prefix", type=int, default=0, help="Layered: A/C inserts before any B/D update")
    gen.add_argument("--output", "-o", help="Output file (default stdout)")

    verify = subparsers.add_parser("verify", help="Compare an engine with the oracle")
    _add_common(verify)
    verify.add_argument("stream", help="Update stream file")

    bench = subparsers.add_parser("bench", help="Run with per-update metrics")
    _add_common(bench)
    bench.add_argument("stream", help="Update stream file")
    bench.add_argument("--metrics", help="Metrics CSV path (default <output_dir>/bench.csv)")
    bench.add_argument("--summary", help="Write a JSON summary with engine metrics")

    params = subparsers.add_parser("params", help="Print the constraint report")
    _add_common(params)
    params.add_argument("--solve", action="store_true", help="Solve for parameters on the grid first")
    params.add_argument("--omega-model", choices=OMEGA_MODELS, help="Omega model")
    params.add_argument("--resolution", help="Solver grid step, e.g. 1/24")
    params.add_argument("--output", "-o", help="CSV path (default stdout)")

    return parser.parse_args(argv)


COMMANDS = {
    "run": cmd_run,
    "gen": cmd_gen,
    "verify": cmd_verify,
    "bench": cmd_bench,
    "params": cmd_params,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main entry point for the application.

    Args:
        argv: Arguments without the program name (default sys.argv)

    Returns:
        int: Exit code
    """
    load_dotenv()
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        config = build_config(args)
    except (ValueError, OSError) as e:
        setup_logging("INFO", None)
        logger.error(f"Invalid configuration: {e}")
        return EXIT_USAGE

    setup_logging(args.log_level or config["log_level"], args.log_dir or None)
    logger.debug(f"Running {args.command} with engine={config['engine']['engine']} mode={config['engine']['mode']}")

    try:
        return COMMANDS[args.command](args, config)
    except ParseError as e:
        logger.error(f"Parse error: {e}")
        return EXIT_PARSE
    except (InvalidParam, Infeasible, WarmupViolation) as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except FourCycleError as e:
        logger.error(f"Engine error: {e}")
        return EXIT_ENGINE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
