#!/usr/bin/env python3
"""Walk through the event trace of a tiny two-node run."""

from wban_mac import Scenario, SimConfig, Simulation, modified_scheme
from wban_mac.protocol import ChannelParams

# Two nodes in the lowest-window priority collide often enough to show
# every event kind within a few superframes.
scenario = Scenario(
    scheme=modified_scheme(),
    node_counts={0: 0, 2: 0, 4: 0, 6: 2},
    channel=ChannelParams(arrival_rate_pkts_per_s=40.0),
)
sim = Simulation(scenario, SimConfig(rng_seed=6, superframe_count=3,
                                     warmup_superframes=0, trace_enabled=True))
stats, metrics = sim.run()

events = sim.trace()
print(f"{len(events)} events; first 45:")
print()
print(f"{'time (s)':>12}  node  event      detail")
for ev in events[:45]:
    print(f"{ev.time_s:12.6f}  {ev.node_id:4d}  {ev.event:9s}  {ev.detail}")

print()
counts = {}
for ev in events:
    counts[ev.event] = counts.get(ev.event, 0) + 1
print("event totals:", ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
c = stats.per_up[6]
print(f"delivered {c.successes}, collided {c.collisions}, "
      f"errored {c.error_transmissions}, dropped {c.drops}")
