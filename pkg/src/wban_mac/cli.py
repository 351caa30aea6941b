"""Command line front end: solve, simulate, sweep, compare."""

import argparse
import importlib.resources
import json
import os
import sys

from .errors import ConfigError, ConvergenceError
from .experiments import (RESULT_COLUMNS, ExperimentSpec, compare, format_cell,
                          load_config, parse_config, result_rows, run_sweep)
from .metrics import analytic_metrics
from .model import solve
from .simulator import Simulation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_CONVERGENCE = 3
EXIT_IO = 4

PRESET_NAMES = ("standard", "modified")


def _load_spec(ref: str) -> ExperimentSpec:
    if os.path.exists(ref):
        return load_config(ref)
    if ref in PRESET_NAMES:
        text = (importlib.resources.files("wban_mac.presets")
                .joinpath(f"{ref}.json").read_text(encoding="utf-8"))
        return parse_config(json.loads(text))
    raise OSError(f"config '{ref}' is neither a file nor a preset name "
                  f"{PRESET_NAMES}")


def _rows_to_csv(rows, stream):
    stream.write(",".join(RESULT_COLUMNS) + "\n")
    for row in rows:
        stream.write(",".join(format_cell(row[c]) for c in RESULT_COLUMNS) + "\n")


def _emit_rows(rows, fmt, stream):
    if fmt == "json":
        json.dump(rows, stream, indent=2, sort_keys=True, default=str)
        stream.write("\n")
    else:
        _rows_to_csv(rows, stream)


def _write_results(rows, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "results.csv"), "w", encoding="utf-8") as fh:
        _rows_to_csv(rows, fh)


def _base_value(spec: ExperimentSpec):
    return spec.total_nodes if spec.sweep_variable is None else spec.values[0]


def _cmd_solve(args) -> int:
    spec = _load_spec(args.config)
    value = _base_value(spec)
    scenario = spec.scenario_for(value)
    report = solve(scenario, spec.solver)
    rows = result_rows(spec, value, "analytic", analytic_metrics(report),
                       scenario.scheme, iterations=report.iterations,
                       residual=report.residual)
    if args.output:
        _write_results(rows, args.output)
    else:
        _emit_rows(rows, args.format, sys.stdout)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    spec = _load_spec(args.config)
    value = _base_value(spec)
    scenario = spec.scenario_for(value)
    sim = Simulation(scenario, spec.sim_config(args.seed, trace=args.trace))
    stats, metrics = sim.run()
    rows = result_rows(spec, value, "simulate", metrics, scenario.scheme,
                       seed=args.seed)
    if args.output:
        _write_results(rows, args.output)
        if args.trace:
            with open(os.path.join(args.output, "trace.txt"), "w",
                      encoding="utf-8") as fh:
                sim.write_trace(fh)
    else:
        _emit_rows(rows, args.format, sys.stdout)
        if args.trace:
            sim.write_trace(sys.stdout)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    run_sweep(_load_spec(args.config), args.output)
    return EXIT_OK


def _cmd_compare(args) -> int:
    compare(_load_spec(args.standard), _load_spec(args.modified), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wban-mac",
        description="Analytical model and simulator for prioritized "
                    "body area network MAC schemes.")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="stdout rendering for solve and simulate")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the analytical model once")
    p.add_argument("--config", required=True,
                   help="JSON config path or preset name (standard, modified)")
    p.add_argument("--output", help="directory for results.csv instead of stdout")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("simulate", help="run the slot-level simulator once")
    p.add_argument("--config", required=True,
                   help="JSON config path or preset name (standard, modified)")
    p.add_argument("--seed", type=int, default=1, help="simulation RNG seed")
    p.add_argument("--trace", action="store_true",
                   help="emit per-event trace records")
    p.add_argument("--output", help="directory for results.csv and trace.txt")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="evaluate every sweep point")
    p.add_argument("--config", required=True,
                   help="JSON config path or preset name (standard, modified)")
    p.add_argument("--output", default="results",
                   help="output directory (default: results)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("compare", help="analytic comparison of two configs")
    p.add_argument("--standard", required=True,
                   help="config path or preset for the reference scheme")
    p.add_argument("--modified", required=True,
                   help="config path or preset for the scheme under test")
    p.add_argument("--output", default="results",
                   help="output directory (default: results)")
    p.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
