"""
Geometric phase of a four-pulse loop
====================================

Four displacements at photon number n close a loop in mechanical phase
space. The loop operator is read off as a matrix and compared with
-(1 + theta omega / 4) (l1^2 + l2^2) n^2.
"""

from ncoptomech import (
    DeformationParams,
    FockSpec,
    LoopBuilder,
    PulseSequence,
    extract_loop_phase,
    predicted_loop_phase,
)

spec = FockSpec(32, 2, 2)
pulse = PulseSequence(0.1, 0.1, cycles=1, n_p=1.0)

for d in (DeformationParams(0.0, 0.0), DeformationParams(1.0, 0.4), DeformationParams(10.0, 0.04)):
    builder = LoopBuilder(pulse, d, spec)
    for n in range(4):
        res = extract_loop_phase(builder.unitary(n), n)
        pred = predicted_loop_phase(n, pulse, d)
        print(f"theta*omega={d.product:<5} n={n}  phase={res.extracted_phase:+.12f}"
              f"  predicted={pred:+.12f}  residual={res.identity_residual:.1e}"
              f"  trusted={res.trusted_states}")

# the dense route exponentiates the full D^2 x D^2 generators
dense = LoopBuilder(pulse, DeformationParams(1.0, 0.4), FockSpec(16, 2, 2), method="dense")
print("dense n=2:", extract_loop_phase(dense.unitary(2), 2).extracted_phase)
