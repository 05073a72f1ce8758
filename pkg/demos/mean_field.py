"""
Mean optical field after N loops
================================

A coherent pulse is a Poisson mixture of photon numbers, each picking up
its own loop phase. Summing the blocks reproduces the closed form, and the
deformation shows up as the extra factor exp(-i Theta).
"""

import cmath

from ncoptomech import (
    DeformationParams,
    PulseSequence,
    mean_field_deformed,
    mean_field_photon_sum,
    mean_field_qm,
    theta_phase,
)

lam = 0.05
d = DeformationParams(1.0, 0.4)

for alpha in (0.5, 1.0, 3.0):
    for cycles in (1, 4):
        summed = mean_field_photon_sum(PulseSequence(lam, lam, cycles=cycles, alpha=alpha), d)
        closed = mean_field_deformed(alpha, lam, d, cycles)
        rel = abs(summed.value - closed) / abs(closed)
        print(f"alpha={alpha} N={cycles}  <a>={closed:.10f}  rel.err={rel:.1e}  cutoff={summed.cutoff_used}")

# <a>_N = <a>_QM exp(-i Theta(N))
alpha, cycles = 2.0, 3
qm = mean_field_qm(alpha, lam, lam, cycles=cycles)
theta = theta_phase(cycles, lam, d, alpha**2)
print("Theta =", theta)
print("gap   =", abs(mean_field_deformed(alpha, lam, d, cycles) - qm * cmath.exp(-1j * theta)))
