"""Static protocol quantities for prioritized CSMA/CA in a body area network.

Covers the two MAC variants compared by the toolkit: the standard
superframe with eight user priorities contending in EAP/RAP/CAP phases
using basic access, and the modified superframe with four user
priorities contending in a single RAP using RTS/CTS access.  Everything
here is closed-form: contention-window schedules, frame and exchange
durations on the narrowband PHY, packet error rate, mean backoff and
the end-of-phase lock probability.
"""

from dataclasses import dataclass, replace

from .errors import ConfigError, PhaseTooShortError

STANDARD_PHASES = ("EAP1", "RAP1", "MAP1", "EAP2", "RAP2", "MAP2", "CAP")
MODIFIED_PHASES = ("RAP", "MAP", "CAP")

# EAPs admit only the highest priority; MAPs carry no contention traffic.
EXCLUSIVE_PHASES = frozenset({"EAP1", "EAP2"})
SCHEDULED_PHASES = frozenset({"MAP", "MAP1", "MAP2"})

MAX_NETWORK_SIZE = 64

# (cw_min, cw_max) per user priority id.
STANDARD_CW_TABLE = {
    0: (16, 64),
    1: (16, 32),
    2: (8, 32),
    3: (8, 16),
    4: (4, 16),
    5: (4, 8),
    6: (2, 8),
    7: (1, 4),
}
MODIFIED_CW_TABLE = {
    0: (16, 64),
    2: (8, 32),
    4: (4, 16),
    6: (2, 8),
}

DEFAULT_RETRY_LIMIT = 7


def derive_stage_limits(cw_min: int, cw_max: int, retry_limit: int) -> tuple[int, int]:
    """Return (m, x): the stage where the window first reaches cw_max and
    the number of remaining attempts at that ceiling."""
    if cw_min < 1 or cw_max < cw_min:
        raise ConfigError(f"invalid window bounds ({cw_min}, {cw_max})")
    ratio = cw_max // cw_min
    if cw_min * ratio != cw_max or ratio & (ratio - 1):
        raise ConfigError(f"cw_max {cw_max} is not cw_min {cw_min} times a power of two")
    # The window doubles only after even-numbered stages, so the ceiling
    # is first reached at stage 2*log2(cw_max/cw_min).
    m = 2 * ratio.bit_length() - 2
    x = retry_limit - m
    if x < 0:
        raise ConfigError(
            f"retry limit {retry_limit} too small to reach cw_max {cw_max} from {cw_min}"
        )
    return m, x


@dataclass(frozen=True)
class PriorityClass:
    """One user priority: its window schedule and phase permissions."""

    id: int
    cw_min: int
    cw_max: int
    m: int
    x: int
    permitted_phases: frozenset[str] = frozenset()

    def __post_init__(self):
        expect_m, _ = derive_stage_limits(self.cw_min, self.cw_max, self.m + self.x)
        if self.m != expect_m:
            raise ConfigError(f"UP {self.id}: m={self.m} inconsistent with windows")
        if self.x < 0:
            raise ConfigError(f"UP {self.id}: negative x")

    @classmethod
    def from_limits(cls, up_id, cw_min, cw_max, retry_limit=DEFAULT_RETRY_LIMIT,
                    permitted_phases=frozenset()):
        m, x = derive_stage_limits(cw_min, cw_max, retry_limit)
        return cls(up_id, cw_min, cw_max, m, x, frozenset(permitted_phases))

    @property
    def retry_limit(self) -> int:
        return self.m + self.x

    @property
    def max_attempts(self) -> int:
        return self.m + self.x + 1


def contention_window(p: PriorityClass, stage: int) -> int:
    """Window size at the given backoff stage: doubles after every other
    failure until cw_max, then stays there."""
    if stage < 0 or stage > p.m + p.x:
        raise ConfigError(f"stage {stage} outside [0, {p.m + p.x}] for UP {p.id}")
    if stage == 0:
        return p.cw_min
    if stage > p.m:
        return p.cw_max
    if stage % 2 == 0:
        return 2 ** (stage // 2) * p.cw_min
    return 2 ** ((stage - 1) // 2) * p.cw_min


def window_schedule(p: PriorityClass) -> tuple[int, ...]:
    """All window sizes from stage 0 through the final attempt."""
    return tuple(contention_window(p, j) for j in range(p.max_attempts))


@dataclass(frozen=True)
class PhyParams:
    """Narrowband PHY frame layout (bits) and data rates (bit/s)."""

    preamble_bits: int = 90
    phy_header_bits: int = 31
    mac_header_bits: int = 56
    fcs_bits: int = 16
    framebody_bits: int = 800
    rate_symbol_bps: float = 600e3
    rate_plcp_bps: float = 91.9e3
    rate_psdu_bps: float = 971.4e3

    def __post_init__(self):
        for name in ("preamble_bits", "phy_header_bits", "mac_header_bits",
                     "fcs_bits", "framebody_bits"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        for name in ("rate_symbol_bps", "rate_plcp_bps", "rate_psdu_bps"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")

    @property
    def t_framebody_s(self) -> float:
        return self.framebody_bits / self.rate_psdu_bps


@dataclass(frozen=True)
class TimingParams:
    """MAC timing constants in seconds.  rap_s is the length of the
    contention phase the node is currently in; phase-aware callers
    override it per phase."""

    csma_slot_s: float = 125e-6
    sifs_s: float = 75e-6
    prop_delay_s: float = 1e-6
    rap_s: float = 1.0

    def __post_init__(self):
        if self.csma_slot_s <= 0 or self.sifs_s < 0 or self.prop_delay_s < 0:
            raise ConfigError("timing durations must be positive")
        if self.rap_s <= 0:
            raise ConfigError("rap_s must be positive")


@dataclass(frozen=True)
class ChannelParams:
    """Channel error rate and per-priority Poisson arrival rates."""

    ber: float = 2e-5
    arrival_rate_pkts_per_s: float | dict[int, float] = 0.5

    def __post_init__(self):
        if not 0.0 <= self.ber < 1.0:
            raise ConfigError(f"ber {self.ber} outside [0, 1)")
        rates = (self.arrival_rate_pkts_per_s.values()
                 if isinstance(self.arrival_rate_pkts_per_s, dict)
                 else [self.arrival_rate_pkts_per_s])
        if any(r < 0 for r in rates):
            raise ConfigError("arrival rates must be non-negative")

    def rate_for(self, up_id: int) -> float:
        if isinstance(self.arrival_rate_pkts_per_s, dict):
            return self.arrival_rate_pkts_per_s[up_id]
        return self.arrival_rate_pkts_per_s


@dataclass(frozen=True)
class EnergyParams:
    """Radio power draw per state in watts."""

    p_tx_w: float = 27e-3
    p_rx_w: float = 1.8e-3
    p_idle_w: float = 5e-6

    def __post_init__(self):
        if self.p_tx_w < 0 or self.p_rx_w < 0 or self.p_idle_w < 0:
            raise ConfigError("power draws must be non-negative")


@dataclass(frozen=True)
class SchemeConfig:
    """A MAC variant: its priority set, access mechanism and superframe."""

    kind: str
    access_mechanism: str
    priorities: tuple[PriorityClass, ...]
    phases: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if self.kind not in ("standard", "modified"):
            raise ConfigError(f"unknown scheme kind {self.kind!r}")
        if self.access_mechanism not in ("basic", "rts_cts"):
            raise ConfigError(f"unknown access mechanism {self.access_mechanism!r}")
        paired = {"standard": "basic", "modified": "rts_cts"}[self.kind]
        if self.access_mechanism != paired:
            raise ConfigError(
                f"{self.kind} scheme uses {paired} access, not {self.access_mechanism}"
            )
        expected = STANDARD_PHASES if self.kind == "standard" else MODIFIED_PHASES
        names = tuple(name for name, _ in self.phases)
        if names != expected:
            raise ConfigError(f"{self.kind} phases must be {expected}, got {names}")
        if any(dur < 0 for _, dur in self.phases):
            raise ConfigError("phase durations must be non-negative")
        if not any(dur > 0 for name, dur in self.phases
                   if name not in SCHEDULED_PHASES):
            raise ConfigError("at least one contention phase must be non-empty")
        ids = [p.id for p in self.priorities]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate priority ids")

    @property
    def up_ids(self) -> tuple[int, ...]:
        return tuple(p.id for p in self.priorities)

    def priority(self, up_id: int) -> PriorityClass:
        for p in self.priorities:
            if p.id == up_id:
                return p
        raise KeyError(up_id)

    def contention_phases(self) -> tuple[tuple[str, float], ...]:
        """Phases that carry CSMA traffic, with non-zero length."""
        return tuple((name, dur) for name, dur in self.phases
                     if name not in SCHEDULED_PHASES and dur > 0)

    def phase_duration(self, name: str) -> float:
        for phase, dur in self.phases:
            if phase == name:
                return dur
        raise KeyError(name)

    def permitted_ids(self, phase: str) -> tuple[int, ...]:
        return tuple(p.id for p in self.priorities if phase in p.permitted_phases)

    def superframe_s(self) -> float:
        return sum(dur for _, dur in self.phases)


def standard_scheme(eap1=0.1, rap1=0.8, map1=0.0, eap2=0.0, rap2=0.0,
                    map2=0.0, cap=0.0,
                    retry_limit=DEFAULT_RETRY_LIMIT) -> SchemeConfig:
    """Standard superframe: eight priorities, basic access, EAPs
    reserved for UP 7."""
    shared = frozenset({"RAP1", "RAP2", "CAP"})
    priorities = []
    for up_id, (lo, hi) in STANDARD_CW_TABLE.items():
        phases = shared | EXCLUSIVE_PHASES if up_id == 7 else shared
        priorities.append(PriorityClass.from_limits(up_id, lo, hi, retry_limit, phases))
    durations = (eap1, rap1, map1, eap2, rap2, map2, cap)
    return SchemeConfig("standard", "basic", tuple(priorities),
                        tuple(zip(STANDARD_PHASES, durations)))


def modified_scheme(rap=0.9, map_=0.0, cap=0.0,
                    retry_limit=DEFAULT_RETRY_LIMIT) -> SchemeConfig:
    """Modified superframe: four priorities, RTS/CTS access, single RAP."""
    shared = frozenset({"RAP", "CAP"})
    priorities = [PriorityClass.from_limits(up_id, lo, hi, retry_limit, shared)
                  for up_id, (lo, hi) in MODIFIED_CW_TABLE.items()]
    return SchemeConfig("modified", "rts_cts", tuple(priorities),
                        tuple(zip(MODIFIED_PHASES, (rap, map_, cap))))


@dataclass(frozen=True)
class TxDurations:
    """On-air durations of single frames and complete exchanges."""

    t_data_s: float
    t_ctrl_s: float
    t_succ_s: float
    t_coll_s: float
    t_error_s: float


def data_frame_duration(phy: PhyParams) -> float:
    """Time on air of a data frame: preamble, PLCP header and PSDU each
    at their own rate."""
    return (phy.preamble_bits / phy.rate_symbol_bps
            + phy.phy_header_bits / phy.rate_plcp_bps
            + (phy.mac_header_bits + phy.framebody_bits + phy.fcs_bits)
            / phy.rate_psdu_bps)


def control_frame_duration(phy: PhyParams) -> float:
    """Time on air of an RTS, CTS or ACK frame (empty frame body)."""
    return (phy.preamble_bits / phy.rate_symbol_bps
            + phy.phy_header_bits / phy.rate_plcp_bps
            + (phy.mac_header_bits + phy.fcs_bits) / phy.rate_psdu_bps)


def tx_durations(scheme: SchemeConfig, phy: PhyParams,
                 timing: TimingParams) -> TxDurations:
    """Durations of a successful, collided and errored exchange for the
    scheme's access mechanism."""
    t_data = data_frame_duration(phy)
    t_ctrl = control_frame_duration(phy)
    sifs = timing.sifs_s
    alpha = timing.prop_delay_s
    if scheme.access_mechanism == "rts_cts":
        t_succ = 3 * t_ctrl + t_data + 3 * sifs + 4 * alpha
        t_coll = 2 * t_ctrl + sifs + 2 * alpha
    else:
        # Basic access: a collision or bit error still spends the whole
        # DATA + SIFS + ACK exchange on the air.
        t_succ = t_data + sifs + t_ctrl + 2 * alpha
        t_coll = t_succ
    return TxDurations(t_data, t_ctrl, t_succ, t_coll, t_succ)


def on_air_bits(phy: PhyParams, control: bool) -> int:
    """Total bits of one frame as transmitted, headers included."""
    bits = phy.preamble_bits + phy.phy_header_bits + phy.mac_header_bits + phy.fcs_bits
    if not control:
        bits += phy.framebody_bits
    return bits


def packet_error_rate(scheme: SchemeConfig, phy: PhyParams, ber: float) -> float:
    """Probability that any bit of the whole exchange is corrupted."""
    if not 0.0 <= ber < 1.0:
        raise ConfigError(f"ber {ber} outside [0, 1)")
    data = on_air_bits(phy, control=False)
    ctrl = on_air_bits(phy, control=True)
    total = data + 3 * ctrl if scheme.access_mechanism == "rts_cts" else data + ctrl
    return 1.0 - (1.0 - ber) ** total


BACKOFF_MODES = ("paper_closed_form", "stage_average")


def mean_backoff(p: PriorityClass, mode: str = "paper_closed_form") -> float:
    """Mean backoff slots per attempt, averaged over stages.

    paper_closed_form evaluates the closed-form stage sum with the
    stage-0 window; stage_average averages (W_j + 1)/2 over all stages.
    The two disagree whenever the window grows, so both are exposed.
    """
    if mode == "paper_closed_form":
        w0 = p.cw_min
        half = 2 ** (p.m // 2)
        total = p.m / 2 + w0 * (half - 1) + (p.x + 1) * w0 * half
        return total / p.max_attempts
    if mode == "stage_average":
        return sum((w + 1) / 2 for w in window_schedule(p)) / p.max_attempts
    raise ConfigError(f"unknown backoff mode {mode!r}")


def lock_probability(p: PriorityClass, timing: TimingParams, t_succ_s: float,
                     mode: str = "paper_closed_form") -> float:
    """Chance that a backoff pause falls in the end-of-phase guard window.

    Modelled as one slot out of the phase slots that remain after a full
    exchange and the mean backoff are set aside.
    """
    slot = timing.csma_slot_s
    slots_in_phase = timing.rap_s / slot
    slots_for_exchange = t_succ_s / slot
    usable = slots_in_phase - slots_for_exchange - mean_backoff(p, mode)
    if usable < 1.0:
        raise PhaseTooShortError(
            f"phase of {timing.rap_s} s cannot hold an exchange plus backoff for UP {p.id}"
        )
    return 1.0 / usable


def with_phase_length(timing: TimingParams, rap_s: float) -> TimingParams:
    """Timing view with rap_s replaced by a specific phase length."""
    return replace(timing, rap_s=rap_s)
