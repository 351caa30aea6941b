"""Performance metrics derived from a model solution or simulator counters.

Per priority: frame delivery reliability, saturation throughput, mean
access delay, per-state energy and average power, and channel
utilization.  Network-wide: aggregate throughput, total utilization and
Jain's fairness index over the per-priority throughputs.
"""

from dataclasses import dataclass

from .errors import ConfigError
from .model import PhaseSolution, SolutionReport
from .protocol import (
    EnergyParams,
    PhyParams,
    PriorityClass,
    TimingParams,
    TxDurations,
    window_schedule,
)


def reliability(fail_prob: float, p: PriorityClass) -> float:
    """Probability a frame survives the retry budget."""
    return 1.0 - fail_prob ** p.max_attempts


def throughput(succ_prob: float, busy_prob: float, framebody_bits: int,
               state_time_s: float) -> float:
    """Delivered payload bits per second for one priority."""
    if state_time_s <= 0:
        raise ConfigError("state time must be positive")
    return succ_prob * busy_prob * framebody_bits / state_time_s


def aggregate_throughput(per_up_bps: dict[int, float]) -> float:
    return sum(per_up_bps.values())


def access_delay(p: PriorityClass, fail_prob: float, state_time_s: float) -> float:
    """Mean backoff time before a frame is resolved, dropped frames
    charged with the full stage ladder."""
    windows = window_schedule(p)
    cumulative = 0.0
    stage_weight = 1.0
    delay = 0.0
    for w in windows:
        cumulative += (w + 1) / 2
        delay += stage_weight * (1.0 - fail_prob) * cumulative
        stage_weight *= fail_prob
    delay += stage_weight * cumulative
    return delay * state_time_s


def transaction_energy(access: str, tx: TxDurations, timing: TimingParams,
                       power: EnergyParams) -> tuple[float, float]:
    """Energy a node spends in its own exchange: (success-or-error, collision).

    RTS/CTS stops a collision after the handshake; basic access pays for
    the full data exchange either way.
    """
    if access == "rts_cts":
        own = (tx.t_ctrl_s * power.p_tx_w + tx.t_ctrl_s * power.p_rx_w
               + tx.t_data_s * power.p_tx_w + tx.t_ctrl_s * power.p_rx_w
               + 3 * timing.sifs_s * power.p_idle_w)
        own_coll = (tx.t_ctrl_s * power.p_tx_w + tx.t_ctrl_s * power.p_rx_w
                    + timing.sifs_s * power.p_idle_w)
        return own, own_coll
    own = (tx.t_data_s * power.p_tx_w + tx.t_ctrl_s * power.p_rx_w
           + timing.sifs_s * power.p_idle_w)
    return own, own


def energy_per_state(access: str, tx: TxDurations, timing: TimingParams,
                     power: EnergyParams, *, busy_prob: float, idle_prob: float,
                     succ_prob: float, coll_prob: float, error_prob: float,
                     succ_total: float, coll_total: float,
                     error_total: float) -> float:
    """Expected energy one node spends per channel state.

    Idle listening during backoff, the node's own exchanges, and idle
    power for the full duration of other nodes' exchanges.
    """
    own, own_coll = transaction_energy(access, tx, timing, power)
    e = timing.csma_slot_s * power.p_idle_w * idle_prob
    e += own * busy_prob * succ_prob
    e += tx.t_succ_s * power.p_idle_w * busy_prob * (succ_total - succ_prob)
    e += own_coll * busy_prob * coll_prob
    e += tx.t_coll_s * power.p_idle_w * busy_prob * (coll_total - coll_prob)
    e += own * busy_prob * error_prob
    e += tx.t_error_s * power.p_idle_w * busy_prob * (error_total - error_prob)
    return e


def channel_utilization(succ_prob: float, busy_prob: float, phy: PhyParams,
                        state_time_s: float) -> float:
    """Fraction of time the channel carries this priority's payload."""
    if state_time_s <= 0:
        raise ConfigError("state time must be positive")
    return succ_prob * busy_prob * phy.t_framebody_s / state_time_s


def jain_fairness(per_up_bps: dict[int, float]) -> float:
    """Jain's index over the per-priority throughputs: 1 when equal,
    1/n when one priority takes everything."""
    values = list(per_up_bps.values())
    square_sum = sum(v * v for v in values)
    if square_sum == 0.0:
        raise ConfigError("fairness undefined: all throughputs are zero")
    total = sum(values)
    return total * total / (len(values) * square_sum)


@dataclass(frozen=True)
class UpMetrics:
    """Metrics for one priority; None marks an undefined quantity."""

    reliability: float | None = None
    throughput_bps: float | None = None
    delay_s: float | None = None
    energy_per_state_j: float | None = None
    avg_power_w: float | None = None
    utilization: float | None = None


@dataclass(frozen=True)
class MetricsReport:
    per_up: dict[int, UpMetrics]
    aggregate_throughput_bps: float | None
    total_utilization: float | None
    jain_fairness: float | None


def _phase_metrics(up_id: int, ph: PhaseSolution, p: PriorityClass,
                   scenario) -> UpMetrics:
    t_e = ph.state_time_s
    s = throughput(ph.succ_prob[up_id], ph.slot_busy_prob,
                   scenario.phy.framebody_bits, t_e)
    e = energy_per_state(
        scenario.scheme.access_mechanism, ph.tx, scenario.timing,
        scenario.energy,
        busy_prob=ph.slot_busy_prob, idle_prob=ph.idle_prob[up_id],
        succ_prob=ph.succ_prob[up_id], coll_prob=ph.coll_prob[up_id],
        error_prob=ph.error_prob[up_id], succ_total=ph.succ_total,
        coll_total=ph.coll_total, error_total=ph.error_total)
    return UpMetrics(
        reliability=reliability(ph.fail_prob[up_id], p),
        throughput_bps=s,
        delay_s=access_delay(p, ph.fail_prob[up_id], t_e),
        energy_per_state_j=e,
        avg_power_w=e / t_e,
        utilization=channel_utilization(ph.succ_prob[up_id], ph.slot_busy_prob,
                                        scenario.phy, t_e),
    )


def analytic_metrics(report: SolutionReport) -> MetricsReport:
    """Compose per-phase model metrics into per-priority results.

    Rate metrics (throughput, utilization) are weighted by each phase's
    share of the total contention time, so a priority barred from a
    phase delivers nothing during it.  Intensive metrics (reliability,
    delay, energy, power) are averaged over the phases the priority
    actually contends in.
    """
    scenario = report.scenario
    per_up: dict[int, UpMetrics] = {}
    throughputs: dict[int, float] = {}
    for p in scenario.scheme.priorities:
        pieces = [(report.weight(ph), _phase_metrics(p.id, ph, p, scenario))
                  for ph in report.phases if p.id in ph.tx_prob]
        if not pieces:
            per_up[p.id] = UpMetrics()
            throughputs[p.id] = 0.0
            continue
        present = sum(w for w, _ in pieces)
        s = sum(w * m.throughput_bps for w, m in pieces)
        u = sum(w * m.utilization for w, m in pieces)
        e = sum(w * m.energy_per_state_j for w, m in pieces) / present
        power = sum(w * m.avg_power_w for w, m in pieces) / present
        per_up[p.id] = UpMetrics(
            reliability=sum(w * m.reliability for w, m in pieces) / present,
            throughput_bps=s,
            delay_s=sum(w * m.delay_s for w, m in pieces) / present,
            energy_per_state_j=e,
            avg_power_w=power,
            utilization=u,
        )
        throughputs[p.id] = s
    try:
        jain = jain_fairness(throughputs)
    except ConfigError:
        jain = None
    return MetricsReport(
        per_up=per_up,
        aggregate_throughput_bps=aggregate_throughput(throughputs),
        total_utilization=sum(m.utilization or 0.0 for m in per_up.values()),
        jain_fairness=jain,
    )
