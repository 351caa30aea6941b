#!/usr/bin/env python3
"""Tour of the closed-form protocol quantities for both schemes."""

from wban_mac import (
    PhyParams,
    TimingParams,
    lock_probability,
    mean_backoff,
    modified_scheme,
    packet_error_rate,
    standard_scheme,
    tx_durations,
    window_schedule,
)
from wban_mac.protocol import with_phase_length

phy = PhyParams()
timing = TimingParams()

for scheme in (standard_scheme(), modified_scheme()):
    print(f"=== {scheme.kind} scheme ({scheme.access_mechanism} access) ===")
    print("phases:", ", ".join(f"{name}={dur}s" for name, dur in scheme.phases if dur))
    tx = tx_durations(scheme, phy, timing)
    print(f"data frame  {tx.t_data_s * 1e3:8.4f} ms   control frame {tx.t_ctrl_s * 1e3:8.4f} ms")
    print(f"success     {tx.t_succ_s * 1e3:8.4f} ms   collision     {tx.t_coll_s * 1e3:8.4f} ms")
    per = packet_error_rate(scheme, phy, 2e-5)
    print(f"packet error rate at BER 2e-5: {per:.6f}")
    print()
    print("UP  CWmin  CWmax  window schedule (stages 0..7)      mean backoff  lock prob")
    rap = scheme.contention_phases()[0]
    phase_timing = with_phase_length(timing, rap[1])
    for p in scheme.priorities:
        wins = ",".join(str(w) for w in window_schedule(p))
        mb = mean_backoff(p)
        lock = lock_probability(p, phase_timing, tx.t_succ_s)
        print(f"{p.id:2d}  {p.cw_min:5d}  {p.cw_max:5d}  {wins:32s}  {mb:10.2f}  {lock:.3e}")
    print()

# The two backoff conventions disagree once the window grows.
up0 = modified_scheme().priority(0)
print("mean backoff for the widest-window priority, both conventions:")
print(f"  closed form   {mean_backoff(up0, 'paper_closed_form'):.2f} slots")
print(f"  stage average {mean_backoff(up0, 'stage_average'):.2f} slots")
