"""Markov-chain model of prioritized CSMA/CA and its fixed-point solver.

Each user priority is described by a two-dimensional backoff chain
(stage, counter) plus an empty-buffer state.  The chains are coupled
through the slot state of the shared channel, which yields a nonlinear
system in the per-priority transmission and queue-busy probabilities.
The system is solved per contention phase by damped fixed-point
iteration; a superframe with several contention phases is solved phase
by phase and composed by time share.
"""

import math
import warnings
from dataclasses import dataclass

from .errors import ConfigError, ConvergenceError, ModelStateError
from .protocol import (
    ChannelParams,
    EnergyParams,
    PhyParams,
    PriorityClass,
    SchemeConfig,
    TimingParams,
    TxDurations,
    MAX_NETWORK_SIZE,
    lock_probability,
    packet_error_rate,
    tx_durations,
    window_schedule,
    with_phase_length,
)

# Tolerance for the assertion that no probability is held at a clamp
# once the iteration has converged.
CLAMP_SLACK = 1e-9


@dataclass(frozen=True)
class Scenario:
    """A complete network under one scheme: who contends, how often
    frames arrive, and on what radio."""

    scheme: SchemeConfig
    node_counts: dict[int, int]
    phy: PhyParams = PhyParams()
    timing: TimingParams = TimingParams()
    channel: ChannelParams = ChannelParams()
    energy: EnergyParams = EnergyParams()

    def __post_init__(self):
        ids = set(self.scheme.up_ids)
        if set(self.node_counts) != ids:
            raise ConfigError(
                f"node_counts keys {sorted(self.node_counts)} must match "
                f"scheme priorities {sorted(ids)}"
            )
        if any(n < 0 for n in self.node_counts.values()):
            raise ConfigError("node counts must be non-negative")
        total = self.total_nodes
        if total < 1:
            raise ConfigError("scenario needs at least one node")
        if total > MAX_NETWORK_SIZE:
            raise ConfigError(
                f"{total} nodes exceeds the maximum network size {MAX_NETWORK_SIZE}"
            )
        for up_id in self.scheme.up_ids:
            self.channel.rate_for(up_id)

    @property
    def total_nodes(self) -> int:
        return sum(self.node_counts.values())

    @classmethod
    def equal_split(cls, scheme: SchemeConfig, total_nodes: int, **kwargs) -> "Scenario":
        n_up = len(scheme.priorities)
        if total_nodes % n_up:
            raise ConfigError(
                f"{total_nodes} nodes cannot be split evenly over {n_up} priorities"
            )
        counts = {up_id: total_nodes // n_up for up_id in scheme.up_ids}
        return cls(scheme, counts, **kwargs)


@dataclass(frozen=True)
class SolverOptions:
    damping: float = 0.5
    tolerance: float = 1e-10
    max_iterations: int = 20000
    initial_tau: float | None = None
    initial_rho: float = 0.5
    backoff_mode: str = "paper_closed_form"

    def __post_init__(self):
        if not 0.0 < self.damping <= 1.0:
            raise ConfigError("damping must be in (0, 1]")
        if self.tolerance <= 0 or self.max_iterations < 1:
            raise ConfigError("bad solver options")


def base_state_probability(p: PriorityClass, fail_prob: float,
                           idle_prob: float, queue_busy_prob: float) -> float:
    """Stationary probability of the stage-0 transmit state, from chain
    normalization."""
    if queue_busy_prob <= 0.0:
        raise ModelStateError(f"UP {p.id}: queue never fills, chain is degenerate")
    if idle_prob <= 0.0:
        raise ModelStateError(f"UP {p.id}: zero idle probability, chain is degenerate")
    windows = window_schedule(p)
    attempts = 0.0
    backoff = 0.0
    stage_weight = 1.0
    for w in windows:
        attempts += stage_weight
        backoff += (w + 1) / 2 * stage_weight
        stage_weight *= fail_prob
    total = attempts + backoff / idle_prob + (1.0 - queue_busy_prob) / queue_busy_prob
    return 1.0 / total


def transmission_probability(p: PriorityClass, fail_prob: float,
                             base_prob: float) -> float:
    """Per-state probability that the priority transmits: the sum of all
    transmit-state probabilities."""
    attempts = 0.0
    stage_weight = 1.0
    for _ in range(p.max_attempts):
        attempts += stage_weight
        stage_weight *= fail_prob
    return base_prob * attempts


def queue_busy_probability(arrival_rate: float, state_time_s: float) -> float:
    """Probability a Poisson arrival lands within one channel state."""
    if arrival_rate < 0 or state_time_s < 0:
        raise ConfigError("rates and durations must be non-negative")
    return -math.expm1(-arrival_rate * state_time_s)


def expected_state_time(timing: TimingParams, tx: TxDurations, busy_prob: float,
                        succ_total: float, coll_total: float,
                        error_total: float) -> float:
    """Mean wall-clock length of one channel state."""
    return (timing.csma_slot_s * (1.0 - busy_prob)
            + tx.t_succ_s * busy_prob * succ_total
            + tx.t_coll_s * busy_prob * coll_total
            + tx.t_error_s * busy_prob * error_total)


@dataclass
class Coupling:
    """Channel-level probabilities computed from the per-priority
    transmission probabilities."""

    slot_idle_prob: float
    slot_busy_prob: float
    idle_prob: dict[int, float]
    access_prob: dict[int, float]
    access_prob_raw: dict[int, float]
    succ_prob: dict[int, float]
    coll_prob: dict[int, float]
    error_prob: dict[int, float]
    fail_prob: dict[int, float]
    succ_total: float
    coll_total: float
    error_total: float


def slot_coupling(taus: dict[int, float], node_counts: dict[int, int],
                  lock_probs: dict[int, float], per: float) -> Coupling:
    """Evaluate every channel coupling from the transmission probabilities.

    Collision, error and failure probabilities are defined so that the
    identities coll = 1 - access, fail = coll + error hold exactly.
    """
    for up_id, tau in taus.items():
        if not 0.0 <= tau < 1.0:
            raise ModelStateError(f"UP {up_id}: tau {tau} outside [0, 1)")
    slot_idle = 1.0
    for up_id, tau in taus.items():
        slot_idle *= (1.0 - tau) ** node_counts[up_id]
    slot_busy = 1.0 - slot_idle

    idle_prob, access_raw, access = {}, {}, {}
    succ, coll, err, fail = {}, {}, {}, {}
    weights = {up_id: node_counts[up_id] * tau for up_id, tau in taus.items()}
    total_weight = sum(weights.values())
    for up_id, tau in taus.items():
        idle_prob[up_id] = slot_idle / (1.0 - tau) * (1.0 - lock_probs[up_id])
        if slot_busy > 0.0:
            raw = weights[up_id] * slot_idle / ((1.0 - tau) * slot_busy)
        elif total_weight > 0.0:
            raw = weights[up_id] / total_weight
        else:
            raw = 1.0 if node_counts[up_id] == sum(node_counts.values()) else 0.0
        access_raw[up_id] = raw
        a = min(1.0, max(0.0, raw))
        access[up_id] = a
        succ[up_id] = a * (1.0 - per)
        coll[up_id] = 1.0 - a
        err[up_id] = a * per
        fail[up_id] = coll[up_id] + err[up_id]
    return Coupling(slot_idle, slot_busy, idle_prob, access, access_raw,
                    succ, coll, err, fail,
                    sum(succ.values()), sum(coll.values()), sum(err.values()))


@dataclass(frozen=True)
class PhaseSolution:
    """Converged model state for one contention phase."""

    phase: str
    duration_s: float
    node_counts: dict[int, int]
    per: float
    tx: TxDurations
    slot_idle_prob: float
    slot_busy_prob: float
    state_time_s: float
    succ_total: float
    coll_total: float
    error_total: float
    tx_prob: dict[int, float]
    queue_busy_prob: dict[int, float]
    idle_prob: dict[int, float]
    access_prob: dict[int, float]
    succ_prob: dict[int, float]
    coll_prob: dict[int, float]
    error_prob: dict[int, float]
    fail_prob: dict[int, float]
    drop_prob: dict[int, float]
    lock_prob: dict[int, float]
    base_prob: dict[int, float]
    iterations: int
    residual: float

    @property
    def active_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.tx_prob))

    def unknown_vector(self) -> dict[str, float]:
        """Flat view of the solved unknowns, for comparisons."""
        out = {"slot_idle_prob": self.slot_idle_prob}
        for up_id in self.active_ids:
            out[f"idle_prob_{up_id}"] = self.idle_prob[up_id]
            out[f"access_prob_{up_id}"] = self.access_prob[up_id]
            out[f"fail_prob_{up_id}"] = self.fail_prob[up_id]
            out[f"tx_prob_{up_id}"] = self.tx_prob[up_id]
            out[f"queue_busy_prob_{up_id}"] = self.queue_busy_prob[up_id]
        return out


@dataclass(frozen=True)
class SolutionReport:
    """Per-phase solutions plus the time weights that compose them."""

    scenario: Scenario
    options: SolverOptions
    phases: tuple[PhaseSolution, ...]
    total_contention_s: float

    def weight(self, phase: PhaseSolution) -> float:
        return phase.duration_s / self.total_contention_s

    def phase(self, name: str) -> PhaseSolution:
        for ph in self.phases:
            if ph.phase == name:
                return ph
        raise KeyError(name)

    @property
    def iterations(self) -> int:
        return sum(ph.iterations for ph in self.phases)

    @property
    def residual(self) -> float:
        return max(ph.residual for ph in self.phases)


def _solve_phase(scenario: Scenario, phase: str, duration: float,
                 options: SolverOptions) -> PhaseSolution:
    scheme = scenario.scheme
    permitted = set(scheme.permitted_ids(phase))
    active: list[PriorityClass] = []
    counts: dict[int, int] = {}
    for p in scheme.priorities:
        n_i = scenario.node_counts[p.id]
        if p.id not in permitted or n_i == 0:
            continue
        if scenario.channel.rate_for(p.id) == 0.0:
            warnings.warn(
                f"UP {p.id} has zero arrival rate and is treated as absent",
                stacklevel=3,
            )
            continue
        active.append(p)
        counts[p.id] = n_i
    if not active:
        raise ConfigError(f"phase {phase}: no active priorities to solve")

    per = packet_error_rate(scheme, scenario.phy, scenario.channel.ber)
    tx = tx_durations(scheme, scenario.phy, scenario.timing)
    phase_timing = with_phase_length(scenario.timing, duration)
    lock = {p.id: lock_probability(p, phase_timing, tx.t_succ_s, options.backoff_mode)
            for p in active}
    rates = {p.id: scenario.channel.rate_for(p.id) for p in active}
    classes = {p.id: p for p in active}

    if options.initial_tau is None:
        tau = {p.id: min(2.0 / (p.cw_min + 1), 0.1) for p in active}
    else:
        tau = {p.id: options.initial_tau for p in active}
    rho = {p.id: options.initial_rho for p in active}

    theta = options.damping
    prev_residual = math.inf
    rising = 0
    for iteration in range(1, options.max_iterations + 1):
        coupling = slot_coupling(tau, counts, lock, per)
        t_e = expected_state_time(scenario.timing, tx, coupling.slot_busy_prob,
                                  coupling.succ_total, coupling.coll_total,
                                  coupling.error_total)
        rho_next, base, tau_next = {}, {}, {}
        for up_id, p in classes.items():
            rho_next[up_id] = queue_busy_probability(rates[up_id], t_e)
            base[up_id] = base_state_probability(
                p, coupling.fail_prob[up_id], coupling.idle_prob[up_id],
                rho_next[up_id])
            tau_next[up_id] = transmission_probability(
                p, coupling.fail_prob[up_id], base[up_id])
        residual = max(
            max(abs(tau_next[i] - tau[i]) for i in tau),
            max(abs(rho_next[i] - rho[i]) for i in rho),
        )
        if residual <= options.tolerance:
            for up_id in classes:
                raw = coupling.access_prob_raw[up_id]
                if raw > 1.0 + CLAMP_SLACK or raw < -CLAMP_SLACK:
                    raise ModelStateError(
                        f"phase {phase}: UP {up_id} access probability {raw} "
                        "still clamped at convergence"
                    )
            base_final = {
                up_id: base_state_probability(
                    p, coupling.fail_prob[up_id], coupling.idle_prob[up_id],
                    rho[up_id])
                for up_id, p in classes.items()
            }
            drop = {up_id: coupling.fail_prob[up_id] ** p.max_attempts
                    for up_id, p in classes.items()}
            return PhaseSolution(
                phase=phase, duration_s=duration, node_counts=dict(counts),
                per=per, tx=tx,
                slot_idle_prob=coupling.slot_idle_prob,
                slot_busy_prob=coupling.slot_busy_prob,
                state_time_s=t_e,
                succ_total=coupling.succ_total,
                coll_total=coupling.coll_total,
                error_total=coupling.error_total,
                tx_prob=dict(tau), queue_busy_prob=dict(rho),
                idle_prob=coupling.idle_prob,
                access_prob=coupling.access_prob,
                succ_prob=coupling.succ_prob,
                coll_prob=coupling.coll_prob,
                error_prob=coupling.error_prob,
                fail_prob=coupling.fail_prob,
                drop_prob=drop, lock_prob=lock, base_prob=base_final,
                iterations=iteration, residual=residual,
            )
        for up_id in tau:
            tau[up_id] += theta * (tau_next[up_id] - tau[up_id])
            rho[up_id] += theta * (rho_next[up_id] - rho[up_id])
        # Sustained residual growth means the undamped map oscillates;
        # halving the step restores the contraction.
        if residual > prev_residual:
            rising += 1
            if rising >= 50:
                theta /= 2.0
                rising = 0
        else:
            rising = 0
        prev_residual = residual
    raise ConvergenceError(
        f"phase {phase}: no fixed point within {options.max_iterations} iterations "
        f"(residual {residual:.3e})",
        residual=residual, iterations=options.max_iterations,
    )


def solve(scenario: Scenario, options: SolverOptions | None = None) -> SolutionReport:
    """Solve the coupled chains for every contention phase of the scheme.

    Returns one PhaseSolution per non-empty contention phase.  A phase
    only includes the priorities allowed to contend in it; the standard
    scheme therefore yields an exclusive-phase solution for the highest
    priority besides the shared-phase solution.
    """
    options = options or SolverOptions()
    phases = scenario.scheme.contention_phases()
    solutions = tuple(_solve_phase(scenario, name, dur, options)
                      for name, dur in phases)
    total = sum(dur for _, dur in phases)
    return SolutionReport(scenario, options, solutions, total)


@dataclass(frozen=True)
class ChainDistribution:
    """Stationary distribution of one priority's backoff chain."""

    up_id: int
    transmit: tuple[float, ...]
    backoff: tuple[tuple[float, ...], ...]
    empty: float

    def total(self) -> float:
        return (sum(self.transmit)
                + sum(sum(stage) for stage in self.backoff)
                + self.empty)


def stationary_distribution(p: PriorityClass,
                            solution: PhaseSolution) -> ChainDistribution:
    """Rebuild the full chain distribution from a converged solution."""
    if p.id not in solution.tx_prob:
        raise KeyError(f"UP {p.id} not part of this phase solution")
    fail = solution.fail_prob[p.id]
    idle = solution.idle_prob[p.id]
    rho = solution.queue_busy_prob[p.id]
    base = solution.base_prob[p.id]
    transmit = []
    backoff = []
    for j, w in enumerate(window_schedule(p)):
        head = fail ** j * base
        transmit.append(head)
        backoff.append(tuple((w - k + 1) / w * head / idle
                             for k in range(1, w + 1)))
    return ChainDistribution(p.id, tuple(transmit), tuple(backoff),
                             (1.0 - rho) / rho * base)
