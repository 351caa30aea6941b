#!/usr/bin/env python3
"""Solve the fixed point once and inspect everything it produced."""

from wban_mac import (
    Scenario,
    analytic_metrics,
    modified_scheme,
    solve,
    stationary_distribution,
)

N_NODES = 16

scenario = Scenario.equal_split(modified_scheme(), N_NODES)
report = solve(scenario)

for ph in report.phases:
    print(f"=== phase {ph.phase} ({ph.duration_s} s, weight {report.weight(ph):.3f}) ===")
    print(f"converged in {ph.iterations} iterations, residual {ph.residual:.2e}")
    print(f"channel idle prob {ph.slot_idle_prob:.6f}, mean state {ph.state_time_s * 1e6:.1f} us")
    print()
    print("UP   tau        rho        P_access   P_fail     P_drop     b000")
    for up in ph.active_ids:
        print(f"{up:2d}   {ph.tx_prob[up]:.6f}   {ph.queue_busy_prob[up]:.6f}   "
              f"{ph.access_prob[up]:.6f}   {ph.fail_prob[up]:.6f}   "
              f"{ph.drop_prob[up]:.2e}   {ph.base_prob[up]:.2e}")
    print()
    print("stationary distribution mass (should be 1 for every priority):")
    for up in ph.active_ids:
        dist = stationary_distribution(scenario.scheme.priority(up), ph)
        print(f"  UP{up}: total {dist.total():.12f}  "
              f"empty-state share {dist.empty:.4f}")
    print()

metrics = analytic_metrics(report)
print("per-priority metrics:")
print("UP   reliability  throughput    delay      avg power")
for up, m in metrics.per_up.items():
    print(f"{up:2d}   {m.reliability:.6f}     {m.throughput_bps:8.1f} bps  "
          f"{m.delay_s * 1e3:7.3f} ms  {m.avg_power_w * 1e6:8.2f} uW")
print()
print(f"aggregate throughput {metrics.aggregate_throughput_bps:.1f} bps, "
      f"utilization {metrics.total_utilization:.4f}, "
      f"fairness {metrics.jain_fairness:.6f}")
