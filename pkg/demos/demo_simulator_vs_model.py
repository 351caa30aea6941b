#!/usr/bin/env python3
"""Run the slot-level simulator next to the analytical model.

The chain model defines per-attempt failure through the channel-share
term, which stays near 1/4 with four priorities however light the load
is; the physical simulator at half a frame per second per node sees
almost no contention.  The gap printed here is therefore structural,
not a seed artifact.
"""

from wban_mac import Scenario, SimConfig, analytic_metrics, modified_scheme, simulate, solve

N_NODES = 16
SEEDS = range(5)
SUPERFRAMES = 300

scenario = Scenario.equal_split(modified_scheme(), N_NODES)
analytic = analytic_metrics(solve(scenario))

successes = {up: 0 for up in scenario.scheme.up_ids}
resolved = {up: 0 for up in scenario.scheme.up_ids}
drops = {up: 0 for up in scenario.scheme.up_ids}
collisions = {up: 0 for up in scenario.scheme.up_ids}
obs = 0.0
for seed in SEEDS:
    stats, _ = simulate(scenario, SimConfig(rng_seed=seed,
                                            superframe_count=SUPERFRAMES,
                                            warmup_superframes=5))
    obs += stats.observation_time_s
    for up, c in stats.per_up.items():
        successes[up] += c.successes
        resolved[up] += c.frames_resolved
        drops[up] += c.drops
        collisions[up] += c.collisions

print(f"{N_NODES} nodes, {len(list(SEEDS))} seeds x {SUPERFRAMES} superframes")
print()
print("UP   analytic R   empirical R   analytic bps   empirical bps")
for up in scenario.scheme.up_ids:
    emp_r = successes[up] / resolved[up] if resolved[up] else float("nan")
    emp_s = successes[up] * scenario.phy.framebody_bits / obs
    a = analytic.per_up[up]
    print(f"{up:2d}   {a.reliability:.6f}     {emp_r:.6f}      "
          f"{a.throughput_bps:8.1f}       {emp_s:8.1f}")

print()
print("simulator event counts (pooled):")
for up in scenario.scheme.up_ids:
    print(f"  UP{up}: {successes[up]} delivered, {collisions[up]} collisions, "
          f"{drops[up]} drops")
print()
print("the model predicts retry pressure from its channel-share failure")
print("term even when the physical channel is almost always free, so its")
print("reliability sits near 0.89 while the simulator delivers everything")
