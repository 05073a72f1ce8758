"""
Deformed commutators on a truncated Fock space
==============================================

Linear shifts of canonical quadratures give [X, Y] = i theta and
[PX, PY] = i omega. Truncation spoils [a, a^dag] only on the top levels,
so residuals are measured on the interior block.
"""

from ncoptomech import DeformationParams, FockSpec, commutator_residuals

for theta, omega in [(0.0, 0.0), (0.3, 0.2), (1.0, 0.5)]:
    for D in (8, 16, 32):
        res = commutator_residuals(FockSpec(D, 2, 2), DeformationParams(theta, omega))
        print(f"theta={theta:<4} omega={omega:<4} D={D:<3} worst={max(res.values()):.1e}")

# without a margin the truncated corner shows up in [X, PX]
res = commutator_residuals(FockSpec(16, 2, 0), DeformationParams())
print("no margin:", {k: f"{v:.1e}" for k, v in res.items()})
