#!/usr/bin/env python3
"""Sweep network size for both schemes and compare the headline metrics.

Writes comparison_sweep.png next to this script when matplotlib is
available; prints the table either way.
"""

import numpy as np

from wban_mac import Scenario, analytic_metrics, modified_scheme, solve, standard_scheme

NODE_SWEEP = (8, 16, 24, 32, 40, 48, 56, 64)

results = {}
for scheme in (standard_scheme(), modified_scheme()):
    rows = []
    for n in NODE_SWEEP:
        m = analytic_metrics(solve(Scenario.equal_split(scheme, n)))
        worst_r = min(v.reliability for v in m.per_up.values() if v.reliability is not None)
        rows.append((n, worst_r, m.aggregate_throughput_bps,
                     m.total_utilization, m.jain_fairness))
    results[scheme.kind] = np.array(rows)

print("n     worst reliability      aggregate bps          utilization        fairness")
print("      std      mod           std        mod         std     mod       std     mod")
std, mod = results["standard"], results["modified"]
for i, n in enumerate(NODE_SWEEP):
    print(f"{n:3d}   {std[i, 1]:.4f}   {mod[i, 1]:.4f}      "
          f"{std[i, 2]:9.1f}  {mod[i, 2]:9.1f}    "
          f"{std[i, 3]:.4f}  {mod[i, 3]:.4f}    "
          f"{std[i, 4]:.4f}  {mod[i, 4]:.4f}")

print()
gain = mod[:, 2] / std[:, 2]
print(f"aggregate throughput ratio (modified / standard): "
      f"min {gain.min():.2f}, max {gain.max():.2f}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed, skipping the figure")
else:
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.5))
    for kind, arr in results.items():
        axes[0].plot(arr[:, 0], arr[:, 1], marker="o", label=kind)
        axes[1].plot(arr[:, 0], arr[:, 2] / 1e3, marker="o", label=kind)
        axes[2].plot(arr[:, 0], arr[:, 4], marker="o", label=kind)
    for ax, title in zip(axes, ("worst reliability", "aggregate kbps", "fairness")):
        ax.set_xlabel("nodes")
        ax.set_title(title)
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.tight_layout()
    fig.savefig("comparison_sweep.png", dpi=120)
    print("wrote comparison_sweep.png")
