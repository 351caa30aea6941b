"""Experiment configs, parameter sweeps, and scheme comparison outputs.

A JSON config names a scheme and optional overrides, plus an optional
sweep over network size, bit error rate, arrival rate, or contention
phase length.  Sweeps write results.csv (long format), one .dat file
per metric for plotting, and a deterministic summary.json.
"""

import csv
import dataclasses
import json
import os

from .errors import ConfigError, ConvergenceError
from .metrics import MetricsReport, analytic_metrics
from .model import Scenario, SolverOptions, solve
from .protocol import (ChannelParams, EnergyParams, PhyParams, TimingParams,
                       modified_scheme, standard_scheme)
from .simulator import SimConfig, Simulation

SWEEP_VARIABLES = ("total_nodes", "ber", "lambda", "rap_s")
MODES = ("analytic", "simulate")

RESULT_COLUMNS = (
    "scheme", "mode", "sweep_value", "up", "reliability", "throughput_bps",
    "delay_s", "energy_per_state_j", "avg_power_w", "utilization", "jain",
    "aggregate_throughput_bps", "solver_iterations", "solver_residual", "seed",
)
METRIC_FIELDS = ("reliability", "throughput_bps", "delay_s",
                 "energy_per_state_j", "avg_power_w", "utilization")

_TOP_LEVEL_KEYS = {
    "scheme", "access_mechanism", "phases", "total_nodes", "ber",
    "lambda_pkts_per_s", "retry_limit", "phy", "timing", "energy", "sweep",
    "modes", "seeds", "superframes", "warmup_superframes", "backoff_mode",
    "solver",
}
_STANDARD_PHASE_KEYS = ("eap1", "rap1", "map1", "eap2", "rap2", "map2", "cap")
_MODIFIED_PHASE_KEYS = ("rap", "map", "cap")


def _check_keys(given, allowed, where):
    unknown = sorted(set(given) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown field '{where}{unknown[0]}'")


def _sub_params(cls, data, where):
    names = [f.name for f in dataclasses.fields(cls)]
    _check_keys(data, names, where)
    return cls(**data)


@dataclasses.dataclass(frozen=True)
class ExperimentSpec:
    """Parsed experiment config; builds a Scenario for any sweep value."""

    scheme_kind: str
    phases: dict
    total_nodes: int
    ber: float
    arrival_rate: object
    retry_limit: int
    phy: PhyParams
    timing: TimingParams
    energy: EnergyParams
    sweep_variable: str | None
    sweep_values: tuple
    modes: tuple
    seeds: tuple
    superframes: int
    warmup_superframes: int
    backoff_mode: str
    solver: SolverOptions

    @property
    def values(self) -> tuple:
        if self.sweep_variable is None:
            return (self.total_nodes,)
        return self.sweep_values

    @property
    def variable(self) -> str:
        return self.sweep_variable or "total_nodes"

    def scheme_for(self, value):
        phases = dict(self.phases)
        if self.sweep_variable == "rap_s":
            phases["rap" if self.scheme_kind == "modified" else "rap1"] = float(value)
        if self.scheme_kind == "modified":
            phases.setdefault("rap", 0.9)
            return modified_scheme(rap=phases.get("rap"),
                                   map_=phases.get("map", 0.0),
                                   cap=phases.get("cap", 0.0),
                                   retry_limit=self.retry_limit)
        kw = {k: phases.get(k, 0.0) for k in _STANDARD_PHASE_KEYS}
        if "eap1" not in phases:
            kw["eap1"] = 0.1
        if "rap1" not in phases:
            kw["rap1"] = 0.8
        return standard_scheme(retry_limit=self.retry_limit, **kw)

    def scenario_for(self, value) -> Scenario:
        total = self.total_nodes
        ber = self.ber
        rate = self.arrival_rate
        if self.sweep_variable == "total_nodes":
            total = int(value)
        elif self.sweep_variable == "ber":
            ber = float(value)
        elif self.sweep_variable == "lambda":
            rate = float(value)
        return Scenario.equal_split(
            self.scheme_for(value), total,
            phy=self.phy, timing=self.timing, energy=self.energy,
            channel=ChannelParams(ber=ber, arrival_rate_pkts_per_s=rate))

    def sim_config(self, seed: int, trace: bool = False) -> SimConfig:
        return SimConfig(rng_seed=seed, superframe_count=self.superframes,
                         warmup_superframes=self.warmup_superframes,
                         trace_enabled=trace)

    def contention_time_for(self, value) -> float:
        scheme = self.scheme_for(value)
        return sum(d for _, d in scheme.contention_phases())


def load_config(path: str) -> ExperimentSpec:
    """Read a JSON experiment config from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return parse_config(data)


def parse_config(data: dict) -> ExperimentSpec:
    """Validate a config dict; unknown fields are rejected by name."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(data, _TOP_LEVEL_KEYS, "")
    kind = data.get("scheme")
    if kind not in ("standard", "modified"):
        raise ConfigError("scheme must be 'standard' or 'modified'")
    mech = data.get("access_mechanism")
    expected_mech = "basic" if kind == "standard" else "rts_cts"
    if mech is not None and mech != expected_mech:
        raise ConfigError(
            f"access_mechanism '{mech}' does not match scheme '{kind}'")

    phase_keys = _STANDARD_PHASE_KEYS if kind == "standard" else _MODIFIED_PHASE_KEYS
    phases = data.get("phases", {})
    _check_keys(phases, phase_keys, "phases.")
    phases = {k: float(v) for k, v in phases.items()}

    rate = data.get("lambda_pkts_per_s", 0.5)
    if isinstance(rate, dict):
        rate = {int(k): float(v) for k, v in rate.items()}
    else:
        rate = float(rate)

    sweep = data.get("sweep")
    variable = None
    values = ()
    if sweep is not None:
        _check_keys(sweep, ("variable", "values"), "sweep.")
        variable = sweep.get("variable")
        if variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep.variable must be one of {SWEEP_VARIABLES}")
        raw = sweep.get("values")
        if not raw:
            raise ConfigError("sweep.values must be a non-empty list")
        values = tuple(int(v) if variable == "total_nodes" else float(v)
                       for v in raw)

    modes = tuple(data.get("modes", ["analytic"]))
    for mode in modes:
        if mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got '{mode}'")
    if not modes:
        raise ConfigError("modes must name at least one of analytic, simulate")

    seeds = tuple(int(s) for s in data.get("seeds", [1]))
    if "simulate" in modes and not seeds:
        raise ConfigError("simulate mode needs at least one seed")

    backoff_mode = data.get("backoff_mode", "paper_closed_form")
    solver_data = dict(data.get("solver", {}))
    _check_keys(solver_data, ("damping", "tolerance", "max_iterations",
                              "initial_tau", "initial_rho"), "solver.")
    solver = SolverOptions(backoff_mode=backoff_mode, **solver_data)

    return ExperimentSpec(
        scheme_kind=kind,
        phases=phases,
        total_nodes=int(data.get("total_nodes", 8)),
        ber=float(data.get("ber", 2e-5)),
        arrival_rate=rate,
        retry_limit=int(data.get("retry_limit", 7)),
        phy=_sub_params(PhyParams, dict(data.get("phy", {})), "phy."),
        timing=_sub_params(TimingParams, dict(data.get("timing", {})), "timing."),
        energy=_sub_params(EnergyParams, dict(data.get("energy", {})), "energy."),
        sweep_variable=variable,
        sweep_values=values,
        modes=modes,
        seeds=seeds,
        superframes=int(data.get("superframes", 100)),
        warmup_superframes=int(data.get("warmup_superframes", 5)),
        backoff_mode=backoff_mode,
        solver=solver,
    )


def format_cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.8e}"
    return str(value)


def result_rows(spec, value, mode, metrics: MetricsReport, scheme,
                 iterations=None, residual=None, seed=None):
    rows = []
    for up in scheme.up_ids:
        m = metrics.per_up[up]
        rows.append({
            "scheme": spec.scheme_kind, "mode": mode, "sweep_value": value,
            "up": up, "reliability": m.reliability,
            "throughput_bps": m.throughput_bps, "delay_s": m.delay_s,
            "energy_per_state_j": m.energy_per_state_j,
            "avg_power_w": m.avg_power_w, "utilization": m.utilization,
            "jain": None, "aggregate_throughput_bps": None,
            "solver_iterations": iterations, "solver_residual": residual,
            "seed": seed,
        })
    rows.append({
        "scheme": spec.scheme_kind, "mode": mode, "sweep_value": value,
        "up": "agg", "reliability": None, "throughput_bps": None,
        "delay_s": None, "energy_per_state_j": None, "avg_power_w": None,
        "utilization": metrics.total_utilization, "jain": metrics.jain_fairness,
        "aggregate_throughput_bps": metrics.aggregate_throughput_bps,
        "solver_iterations": iterations, "solver_residual": residual,
        "seed": seed,
    })
    return rows


def _failed_rows(spec, value, scheme, exc: ConvergenceError):
    rows = []
    for up in list(scheme.up_ids) + ["agg"]:
        rows.append({
            "scheme": spec.scheme_kind, "mode": "analytic", "sweep_value": value,
            "up": up, "reliability": None, "throughput_bps": None,
            "delay_s": None, "energy_per_state_j": None, "avg_power_w": None,
            "utilization": None, "jain": None, "aggregate_throughput_bps": None,
            "solver_iterations": exc.iterations, "solver_residual": exc.residual,
            "seed": None,
        })
    return rows


def run_point(spec: ExperimentSpec, value, mode: str, seed=None):
    """One (sweep value, mode) evaluation; returns result rows."""
    scenario = spec.scenario_for(value)
    scheme = scenario.scheme
    if mode == "analytic":
        report = solve(scenario, spec.solver)
        metrics = analytic_metrics(report)
        return result_rows(spec, value, mode, metrics, scheme,
                            iterations=report.iterations,
                            residual=report.residual)
    stats, metrics = Simulation(scenario, spec.sim_config(seed)).run()
    return result_rows(spec, value, mode, metrics, scheme, seed=seed)


def run_sweep(spec: ExperimentSpec, out_dir: str):
    """Evaluate every sweep point and write results under out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    failed = []
    for value in spec.values:
        for mode in MODES:
            if mode not in spec.modes:
                continue
            if mode == "analytic":
                try:
                    rows.extend(run_point(spec, value, mode))
                except ConvergenceError as exc:
                    rows.extend(_failed_rows(spec, value,
                                             spec.scheme_for(value), exc))
                    failed.append({"sweep_value": value, "mode": mode,
                                   "residual": exc.residual,
                                   "iterations": exc.iterations})
            else:
                for seed in sorted(spec.seeds):
                    rows.extend(run_point(spec, value, mode, seed=seed))
    _write_results_csv(os.path.join(out_dir, "results.csv"), rows)
    dat_files = _write_dat_files(spec, rows, out_dir)
    summary = {
        "scheme": spec.scheme_kind,
        "sweep_variable": spec.variable,
        "sweep_values": list(spec.values),
        "modes": list(spec.modes),
        "seeds": sorted(spec.seeds) if "simulate" in spec.modes else [],
        "row_count": len(rows),
        "failed_points": failed,
        "files": sorted(["results.csv", "summary.json"] + dat_files),
    }
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return rows


def _write_results_csv(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow([format_cell(row[c]) for c in RESULT_COLUMNS])


def _dat_source_mode(spec) -> str:
    return "analytic" if "analytic" in spec.modes else "simulate"


def _write_dat_files(spec, rows, out_dir):
    mode = _dat_source_mode(spec)
    ups = sorted({r["up"] for r in rows if r["up"] != "agg"})
    written = []
    for metric in METRIC_FIELDS:
        lines = [f"# {metric} vs {spec.variable} ({mode}); columns: "
                 f"{spec.variable} " + " ".join(f"up{u}" for u in ups)]
        for value in spec.values:
            cells = [format_cell(value)]
            for up in ups:
                picks = [r[metric] for r in rows
                         if r["mode"] == mode and r["sweep_value"] == value
                         and r["up"] == up and r[metric] is not None]
                cells.append(format_cell(sum(picks) / len(picks) if picks else None))
            lines.append(" ".join(cells))
        name = f"{metric}.dat"
        with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        written.append(name)
    lines = [f"# aggregate vs {spec.variable} ({mode}); columns: "
             f"{spec.variable} aggregate_throughput_bps total_utilization jain"]
    for value in spec.values:
        cells = [format_cell(value)]
        for metric in ("aggregate_throughput_bps", "utilization", "jain"):
            picks = [r[metric] for r in rows
                     if r["mode"] == mode and r["sweep_value"] == value
                     and r["up"] == "agg" and r[metric] is not None]
            cells.append(format_cell(sum(picks) / len(picks) if picks else None))
        lines.append(" ".join(cells))
    with open(os.path.join(out_dir, "aggregate.dat"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    written.append("aggregate.dat")
    return written


def _require_comparable(spec_a: ExperimentSpec, spec_b: ExperimentSpec):
    if spec_a.variable != spec_b.variable:
        raise ConfigError("compared configs sweep different variables")
    if spec_a.values != spec_b.values:
        raise ConfigError("compared configs sweep different values")
    if spec_a.ber != spec_b.ber or spec_a.arrival_rate != spec_b.arrival_rate:
        raise ConfigError("compared configs use different channel settings")
    if spec_a.phy != spec_b.phy or spec_a.timing != spec_b.timing:
        raise ConfigError("compared configs use different PHY or timing")
    for value in spec_a.values:
        ta = spec_a.contention_time_for(value)
        tb = spec_b.contention_time_for(value)
        if abs(ta - tb) > 1e-12:
            raise ConfigError(
                f"contention time differs at {spec_a.variable}={value}: "
                f"{ta} vs {tb}")


def compare(spec_a: ExperimentSpec, spec_b: ExperimentSpec, out_dir: str):
    """Side-by-side analytic metrics for two comparable configs."""
    _require_comparable(spec_a, spec_b)
    os.makedirs(out_dir, exist_ok=True)
    columns = ("sweep_value", "metric", "up", "standard", "modified", "delta")
    out_rows = []
    for value in spec_a.values:
        sides = []
        for spec in (spec_a, spec_b):
            scenario = spec.scenario_for(value)
            try:
                metrics = analytic_metrics(solve(scenario, spec.solver))
            except ConvergenceError:
                metrics = None
            sides.append((scenario.scheme, metrics))
        (scheme_a, met_a), (scheme_b, met_b) = sides
        shared = [u for u in scheme_a.up_ids if u in scheme_b.up_ids]
        for metric in METRIC_FIELDS:
            for up in shared:
                va = getattr(met_a.per_up[up], metric) if met_a else None
                vb = getattr(met_b.per_up[up], metric) if met_b else None
                delta = vb - va if va is not None and vb is not None else None
                out_rows.append([value, metric, up, va, vb, delta])
        for metric in ("aggregate_throughput_bps", "total_utilization",
                       "jain_fairness"):
            va = getattr(met_a, metric) if met_a else None
            vb = getattr(met_b, metric) if met_b else None
            delta = vb - va if va is not None and vb is not None else None
            out_rows.append([value, metric, "all", va, vb, delta])
    path = os.path.join(out_dir, "comparison.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in out_rows:
            writer.writerow([format_cell(v) for v in row])
    return out_rows
