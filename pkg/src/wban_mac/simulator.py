"""Slot-level discrete-event simulator for the prioritized CSMA/CA schemes.

Independent of the analytic model: nodes draw real backoff counters,
decrement them on idle slots, collide when their counters expire
together, and advance through the same stage ladder the chain model
describes.  Poisson arrivals are gated by the single-frame buffer.
Long idle stretches are skipped in one step, so lightly loaded runs
cost time proportional to the traffic, not to the slot count.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .metrics import MetricsReport, UpMetrics, jain_fairness, transaction_energy
from .model import Scenario
from .protocol import SCHEDULED_PHASES, packet_error_rate, tx_durations, window_schedule


@dataclass(frozen=True)
class SimConfig:
    rng_seed: int = 0
    superframe_count: int = 100
    warmup_superframes: int = 5
    trace_enabled: bool = False

    def __post_init__(self):
        if self.rng_seed < 0:
            raise ConfigError("rng_seed must be non-negative")
        if self.superframe_count < 1:
            raise ConfigError("superframe_count must be at least 1")
        if not 0 <= self.warmup_superframes < self.superframe_count:
            raise ConfigError("warmup must leave at least one measured superframe")


@dataclass
class TraceEvent:
    time_s: float
    node_id: int
    up: int
    event: str
    detail: str = ""

    def line(self) -> str:
        return f"{self.time_s:.9f} {self.node_id} {self.up} {self.event} {self.detail}".rstrip()


@dataclass
class UpCounters:
    frames_generated: int = 0
    successes: int = 0
    collisions: int = 0
    error_transmissions: int = 0
    drops: int = 0
    sum_access_delay_s: float = 0.0
    sum_total_delay_s: float = 0.0
    busy_airtime_s: float = 0.0
    payload_airtime_s: float = 0.0
    energy_j: float = 0.0
    buffered_at_end: int = 0

    @property
    def frames_resolved(self) -> int:
        return self.successes + self.drops


@dataclass
class SimStats:
    per_up: dict[int, UpCounters]
    observation_time_s: float = 0.0
    contention_time_s: float = 0.0
    state_count: int = 0


class _Node:
    __slots__ = ("idx", "up", "rate", "windows", "retry_limit", "rng",
                 "has_frame", "stage", "counter", "locked",
                 "next_arrival", "arrival_time", "energy_j")

    def __init__(self, idx, up, rate, windows, retry_limit, rng):
        self.idx = idx
        self.up = up
        self.rate = rate
        self.windows = windows
        self.retry_limit = retry_limit
        self.rng = rng
        self.has_frame = False
        self.stage = 0
        self.counter = 0
        self.locked = False
        self.next_arrival = rng.exponential(1.0 / rate) if rate > 0 else math.inf
        self.arrival_time = 0.0
        self.energy_j = 0.0


class Simulation:
    """One reproducible run; same (scenario, seed) gives identical stats."""

    def __init__(self, scenario: Scenario, config: SimConfig):
        self.scenario = scenario
        self.config = config
        scheme = scenario.scheme
        self.slot = scenario.timing.csma_slot_s
        self.sifs = scenario.timing.sifs_s
        self.tx = tx_durations(scheme, scenario.phy, scenario.timing)
        self.per = packet_error_rate(scheme, scenario.phy, scenario.channel.ber)
        self.t_payload = scenario.phy.t_framebody_s
        self.p_idle_w = scenario.energy.p_idle_w
        self.own_energy, self.own_coll_energy = transaction_energy(
            scheme.access_mechanism, self.tx, scenario.timing, scenario.energy)
        self.phases = [
            (name, dur, frozenset(scheme.permitted_ids(name)),
             name not in SCHEDULED_PHASES)
            for name, dur in scheme.phases if dur > 0
        ]
        self.sf_len = scheme.superframe_s()
        self.nodes: list[_Node] = []
        for p in scheme.priorities:
            for _ in range(scenario.node_counts[p.id]):
                idx = len(self.nodes)
                rng = np.random.default_rng((config.rng_seed, idx))
                self.nodes.append(_Node(idx, p.id, scenario.channel.rate_for(p.id),
                                        window_schedule(p), p.retry_limit, rng))
        self.counters = {up: UpCounters() for up in scheme.up_ids}
        self.events: list[TraceEvent] = []
        self._measuring = False

    def _emit(self, t, node, event, detail=""):
        if self.config.trace_enabled:
            self.events.append(TraceEvent(t, node.idx, node.up, event, detail))

    def trace(self) -> tuple[TraceEvent, ...]:
        return tuple(self.events)

    def write_trace(self, stream) -> None:
        for ev in self.events:
            stream.write(ev.line() + "\n")

    # -- frame lifecycle -------------------------------------------------

    def _activate_arrivals(self, t):
        for nd in self.nodes:
            if not nd.has_frame and nd.next_arrival <= t:
                nd.arrival_time = nd.next_arrival
                nd.next_arrival = math.inf
                nd.has_frame = True
                nd.stage = 0
                nd.counter = int(nd.rng.integers(1, nd.windows[0], endpoint=True))
                if self._measuring:
                    self.counters[nd.up].frames_generated += 1
                self._emit(t, nd, "arrival",
                           f"counter={nd.counter} window={nd.windows[0]}")

    def _resolve(self, nd, t_end):
        nd.has_frame = False
        nd.stage = 0
        nd.counter = 0
        if nd.rate > 0:
            nd.next_arrival = t_end + nd.rng.exponential(1.0 / nd.rate)

    def _advance_stage(self, nd, t, duration):
        nd.stage += 1
        if nd.stage > nd.retry_limit:
            if self._measuring:
                c = self.counters[nd.up]
                c.drops += 1
                c.sum_access_delay_s += t - nd.arrival_time
                c.sum_total_delay_s += t + duration - nd.arrival_time
            self._emit(t, nd, "drop", f"stage={nd.stage - 1}")
            self._resolve(nd, t + duration)
        else:
            w = nd.windows[nd.stage]
            nd.counter = int(nd.rng.integers(1, w, endpoint=True))
            self._emit(t, nd, "backoff",
                       f"stage={nd.stage} counter={nd.counter} window={w}")

    def _set_locked(self, nd, locked, t):
        if nd.locked != locked:
            nd.locked = locked
            if nd.has_frame:
                self._emit(t, nd, "lock" if locked else "unlock")

    # -- transactions ----------------------------------------------------

    def _transact(self, ready, t):
        measuring = self._measuring
        if len(ready) == 1:
            duration = self.tx.t_succ_s
        else:
            duration = self.tx.t_coll_s
        for nd in ready:
            self._emit(t, nd, "tx_start", f"stage={nd.stage}")
            if measuring:
                self.counters[nd.up].busy_airtime_s += duration
        if len(ready) == 1:
            nd = ready[0]
            errored = nd.rng.random() < self.per
            nd.energy_j += self.own_energy
            if errored:
                if measuring:
                    self.counters[nd.up].error_transmissions += 1
                self._emit(t, nd, "error")
                self._advance_stage(nd, t, duration)
            else:
                if measuring:
                    c = self.counters[nd.up]
                    c.successes += 1
                    c.payload_airtime_s += self.t_payload
                    c.sum_access_delay_s += t - nd.arrival_time
                    c.sum_total_delay_s += t + duration - nd.arrival_time
                self._emit(t, nd, "success")
                self._resolve(nd, t + duration)
        else:
            for nd in ready:
                nd.energy_j += self.own_coll_energy
                if measuring:
                    self.counters[nd.up].collisions += 1
                self._emit(t, nd, "collision", f"peers={len(ready) - 1}")
            for nd in ready:
                self._advance_stage(nd, t, duration)
        transmitters = {nd.idx for nd in ready}
        padded_slots = math.ceil(duration / self.slot - 1e-9)
        pad = padded_slots * self.slot - duration
        for nd in self.nodes:
            if nd.idx in transmitters:
                nd.energy_j += pad * self.p_idle_w
            else:
                nd.energy_j += (duration + pad) * self.p_idle_w
        if measuring:
            self.state_count += 1
            self.contention_time_s += duration
        return padded_slots

    # -- phase loops -----------------------------------------------------

    def _run_contention(self, start, dur, permitted):
        slot = self.slot
        decrement_window = dur - (self.tx.t_succ_s + self.sifs)
        max_dec_slots = math.floor(decrement_window / slot + 1e-9)
        if max_dec_slots < 1:
            raise ConfigError(
                f"contention phase of {dur} s cannot hold a single exchange")
        for nd in self.nodes:
            self._set_locked(nd, nd.up not in permitted, start)
        s = 0
        while True:
            t = start + s * slot
            self._activate_arrivals(t)
            if s >= max_dec_slots:
                break
            contenders = [nd for nd in self.nodes
                          if nd.has_frame and nd.up in permitted]
            ready = [nd for nd in contenders if nd.counter == 0]
            if ready:
                s += self._transact(ready, t)
                continue
            jump = max_dec_slots - s
            if contenders:
                jump = min(jump, min(nd.counter for nd in contenders))
            for nd in self.nodes:
                if not nd.has_frame and nd.next_arrival < math.inf:
                    ahead = math.ceil((nd.next_arrival - t) / slot - 1e-9)
                    jump = min(jump, max(1, ahead))
            if self.config.trace_enabled:
                for step in range(jump):
                    for nd in contenders:
                        self._emit(t + step * slot, nd, "decrement",
                                   f"counter={nd.counter - 1 - step}")
            for nd in contenders:
                nd.counter -= jump
            idle = jump * slot * self.p_idle_w
            for nd in self.nodes:
                nd.energy_j += idle
            if self._measuring:
                self.state_count += jump
                self.contention_time_s += jump * slot
            s += jump
        # Guard tail: too close to the phase end for another exchange.
        t = start + s * slot
        for nd in self.nodes:
            if nd.up in permitted:
                self._set_locked(nd, True, t)
        tail = dur - s * slot
        if tail > 0:
            for nd in self.nodes:
                nd.energy_j += tail * self.p_idle_w

    def _run_scheduled(self, start, dur):
        self._activate_arrivals(start)
        for nd in self.nodes:
            nd.energy_j += dur * self.p_idle_w

    # -- top level -------------------------------------------------------

    def run(self) -> tuple[SimStats, MetricsReport]:
        cfg = self.config
        self.state_count = 0
        self.contention_time_s = 0.0
        energy_base = {}
        for sf in range(cfg.superframe_count):
            sf_base = sf * self.sf_len
            if sf == cfg.warmup_superframes:
                self._measuring = True
                energy_base = {nd.idx: nd.energy_j for nd in self.nodes}
                for nd in self.nodes:
                    if nd.has_frame:
                        self.counters[nd.up].frames_generated += 1
            offset = 0.0
            for name, dur, permitted, contention in self.phases:
                if contention:
                    self._run_contention(sf_base + offset, dur, permitted)
                else:
                    self._run_scheduled(sf_base + offset, dur)
                offset += dur
        for nd in self.nodes:
            if nd.has_frame:
                self.counters[nd.up].buffered_at_end += 1
            self.counters[nd.up].energy_j += nd.energy_j - energy_base[nd.idx]
        measured = cfg.superframe_count - cfg.warmup_superframes
        stats = SimStats(
            per_up=self.counters,
            observation_time_s=measured * self.sf_len,
            contention_time_s=self.contention_time_s,
            state_count=self.state_count,
        )
        return stats, empirical_metrics(stats, self.scenario)


def run(scenario: Scenario, config: SimConfig) -> tuple[SimStats, MetricsReport]:
    """Simulate the scenario and return counters plus derived metrics."""
    return Simulation(scenario, config).run()


def empirical_metrics(stats: SimStats, scenario: Scenario) -> MetricsReport:
    """Metrics from raw counters; ratios over zero frames stay undefined."""
    obs = stats.observation_time_s
    if obs <= 0:
        raise ConfigError("no measured superframes")
    state_time = (stats.contention_time_s / stats.state_count
                  if stats.state_count else None)
    per_up: dict[int, UpMetrics] = {}
    throughputs: dict[int, float] = {}
    for up in scenario.scheme.up_ids:
        c = stats.per_up[up]
        n_i = scenario.node_counts[up]
        if n_i == 0:
            per_up[up] = UpMetrics()
            throughputs[up] = 0.0
            continue
        resolved = c.frames_resolved
        s = c.successes * scenario.phy.framebody_bits / obs
        power = c.energy_j / (n_i * obs)
        per_up[up] = UpMetrics(
            reliability=c.successes / resolved if resolved else None,
            throughput_bps=s,
            delay_s=c.sum_access_delay_s / resolved if resolved else None,
            energy_per_state_j=power * state_time if state_time else None,
            avg_power_w=power,
            utilization=c.payload_airtime_s / obs,
        )
        throughputs[up] = s
    try:
        jain = jain_fairness(throughputs)
    except ConfigError:
        jain = None
    return MetricsReport(
        per_up=per_up,
        aggregate_throughput_bps=sum(throughputs.values()),
        total_utilization=sum(m.utilization or 0.0 for m in per_up.values()),
        jain_fairness=jain,
    )
