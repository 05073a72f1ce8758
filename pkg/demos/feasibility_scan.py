"""
Shot-noise feasibility
======================

Two reference settings: a low-finesse cavity probing theta*omega = 1e12,
and a 1e5 finesse cavity whose threshold reaches theta*omega ~ 1. A small
finesse scan is written to CSV.
"""

import math
import sys

from ncoptomech import PRESETS, SweepGrid, snr, sweep, write_csv

for name, scenario in PRESETS.items():
    rep = snr(scenario)
    print(f"{name}: gamma={rep.gamma:.3e}  |Theta|={rep.theta_signal:.3e}  "
          f"delta_phi={rep.delta_phi:.0e}  SNR={rep.snr:.3f}")
    print(f"    detectable theta*omega={rep.detectable_theta_omega:.4e}"
          f"  minimal length={rep.minimal_length_planck:.4e} l_P")

finesse = [10 ** k for k in range(-1, 6)]
grid = SweepGrid(PRESETS["paper-a"], [("cav.finesse", finesse), ("pulse.runs", [100, 10000])])
rows = sweep(grid)
for row in rows[::2]:
    print(f"F={row.scenario.cav.finesse:<8g} threshold={row.report.detectable_theta_omega:.3e}"
          f"  sqrt={math.sqrt(row.report.detectable_theta_omega):.3e}")
write_csv(rows, sys.stdout if len(sys.argv) < 2 else open(sys.argv[1], "w", newline=""))
