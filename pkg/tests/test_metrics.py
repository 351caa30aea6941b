"""Derived metrics: reliability, throughput, delay, energy, fairness."""

import math
from fractions import Fraction

import pytest

from wban_mac.errors import ConfigError
from wban_mac.metrics import (
    access_delay,
    aggregate_throughput,
    analytic_metrics,
    channel_utilization,
    energy_per_state,
    jain_fairness,
    reliability,
    throughput,
    transaction_energy,
)
from wban_mac.model import Scenario, solve
from wban_mac.protocol import (
    EnergyParams,
    PhyParams,
    TimingParams,
    modified_scheme,
    standard_scheme,
    tx_durations,
    window_schedule,
)

# Frozen per-exchange energy brackets for the default radio parameters.
OWN_RTS = 5.457619017073839e-05
OWN_COLL_RTS = 1.6169933527308665e-05
OWN_BASIC = 3.8405881643429726e-05


def test_reliability_limits():
    up0 = modified_scheme().priority(0)
    assert reliability(0.0, up0) == 1.0
    assert reliability(1.0, up0) == 0.0
    assert reliability(0.5, up0) == pytest.approx(255 / 256, rel=1e-15)


def test_access_delay_against_rational_oracle():
    up0 = modified_scheme().priority(0)
    wins = window_schedule(up0)
    q = Fraction(1, 4)
    cumulative = Fraction(0)
    delay_slots = Fraction(0)
    weight = Fraction(1)
    for w in wins:
        cumulative += Fraction(w + 1, 2)
        delay_slots += weight * (1 - q) * cumulative
        weight *= q
    delay_slots += weight * cumulative
    assert delay_slots == Fraction(395925, 32768)
    got = access_delay(up0, 0.25, 2e-3)
    assert math.isclose(got, float(delay_slots) * 2e-3, rel_tol=1e-12)


def test_access_delay_never_fails_case():
    # Immediate success: just the mean stage-0 backoff.
    up6 = modified_scheme().priority(6)
    assert access_delay(up6, 0.0, 1e-3) == pytest.approx(1.5e-3, rel=1e-15)


def test_throughput_and_utilization_agree():
    phy = PhyParams()
    s = throughput(0.5, 0.4, phy.framebody_bits, 1e-3)
    assert s == pytest.approx(0.5 * 0.4 * 800 / 1e-3, rel=1e-15)
    u = channel_utilization(0.5, 0.4, phy, 1e-3)
    # Utilization is throughput divided by the payload data rate.
    assert math.isclose(u, s / phy.rate_psdu_bps, rel_tol=1e-15)
    with pytest.raises(ConfigError):
        throughput(0.5, 0.4, 800, 0.0)


def test_transaction_energy_brackets():
    timing = TimingParams()
    power = EnergyParams()
    tx_rts = tx_durations(modified_scheme(), PhyParams(), timing)
    own, own_coll = transaction_energy("rts_cts", tx_rts, timing, power)
    assert math.isclose(own, OWN_RTS, rel_tol=1e-12)
    assert math.isclose(own_coll, OWN_COLL_RTS, rel_tol=1e-12)
    assert own_coll < own
    tx_basic = tx_durations(standard_scheme(), PhyParams(), timing)
    own, own_coll = transaction_energy("basic", tx_basic, timing, power)
    assert math.isclose(own, OWN_BASIC, rel_tol=1e-12)
    assert own_coll == own


def test_energy_per_state_composition():
    timing = TimingParams()
    power = EnergyParams()
    tx = tx_durations(modified_scheme(), PhyParams(), timing)
    idle_only = energy_per_state(
        "rts_cts", tx, timing, power, busy_prob=0.0, idle_prob=0.8,
        succ_prob=0.0, coll_prob=0.0, error_prob=0.0,
        succ_total=0.0, coll_total=0.0, error_total=0.0)
    assert idle_only == pytest.approx(125e-6 * 5e-6 * 0.8, rel=1e-15)
    # One term at a time against the frozen brackets.
    own_share = energy_per_state(
        "rts_cts", tx, timing, power, busy_prob=0.5, idle_prob=0.0,
        succ_prob=0.6, coll_prob=0.0, error_prob=0.0,
        succ_total=0.6, coll_total=0.0, error_total=0.0)
    assert own_share == pytest.approx(0.5 * 0.6 * OWN_RTS, rel=1e-12)
    others = energy_per_state(
        "rts_cts", tx, timing, power, busy_prob=0.5, idle_prob=0.0,
        succ_prob=0.0, coll_prob=0.0, error_prob=0.0,
        succ_total=0.6, coll_total=0.0, error_total=0.0)
    assert others == pytest.approx(0.5 * 0.6 * tx.t_succ_s * 5e-6, rel=1e-12)


def test_jain_fairness():
    assert jain_fairness({0: 5.0, 2: 5.0, 4: 5.0, 6: 5.0}) == pytest.approx(1.0)
    assert jain_fairness({0: 1.0, 2: 2.0, 4: 3.0, 6: 4.0}) == pytest.approx(5 / 6)
    assert jain_fairness({6: 42.0}) == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        jain_fairness({0: 0.0, 2: 0.0})
    assert aggregate_throughput({0: 1.0, 2: 2.0}) == 3.0


def test_analytic_metrics_single_phase_weights():
    sc = Scenario.equal_split(modified_scheme(), 8)
    report = solve(sc)
    metrics = analytic_metrics(report)
    ph = report.phase("RAP")
    p0 = sc.scheme.priority(0)
    assert metrics.per_up[0].reliability == pytest.approx(
        reliability(ph.fail_prob[0], p0), rel=1e-12)
    assert metrics.per_up[0].throughput_bps == pytest.approx(
        throughput(ph.succ_prob[0], ph.slot_busy_prob, 800, ph.state_time_s),
        rel=1e-12)
    assert metrics.aggregate_throughput_bps == pytest.approx(
        sum(m.throughput_bps for m in metrics.per_up.values()), rel=1e-12)
    assert 0.0 < metrics.jain_fairness <= 1.0


def test_analytic_metrics_composes_phases_by_time_share():
    sc = Scenario.equal_split(standard_scheme(), 16)
    report = solve(sc)
    metrics = analytic_metrics(report)
    eap = report.phase("EAP1")
    rap = report.phase("RAP1")
    p7 = sc.scheme.priority(7)
    p0 = sc.scheme.priority(0)
    # A priority barred from the exclusive phase earns only its shared-phase
    # throughput, scaled by that phase's share of the contention time.
    s0_rap = throughput(rap.succ_prob[0], rap.slot_busy_prob, 800, rap.state_time_s)
    assert metrics.per_up[0].throughput_bps == pytest.approx(s0_rap * 8 / 9, rel=1e-12)
    assert metrics.per_up[0].reliability == pytest.approx(
        reliability(rap.fail_prob[0], p0), rel=1e-12)
    s7 = (throughput(eap.succ_prob[7], eap.slot_busy_prob, 800, eap.state_time_s) / 9
          + throughput(rap.succ_prob[7], rap.slot_busy_prob, 800, rap.state_time_s) * 8 / 9)
    assert metrics.per_up[7].throughput_bps == pytest.approx(s7, rel=1e-12)
    r7 = (reliability(eap.fail_prob[7], p7) / 9
          + reliability(rap.fail_prob[7], p7) * 8 / 9)
    assert metrics.per_up[7].reliability == pytest.approx(r7, rel=1e-12)


def test_analytic_metrics_total_utilization_bounded():
    for scheme in (modified_scheme(), standard_scheme()):
        sc = Scenario.equal_split(scheme, 32)
        metrics = analytic_metrics(solve(sc))
        assert 0.0 < metrics.total_utilization < 1.0
