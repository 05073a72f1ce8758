import math

import numpy as np
import pytest

from ncoptomech.exceptions import LoopClosureError, OracleInfeasibleError, TruncationError
from ncoptomech.fock import FockSpec, OperatorMatrix, identity
from ncoptomech.loop import (
    LoopBuilder,
    estimated_leakage,
    extract_loop_phase,
    loop_unitary,
    mean_field_photon_sum,
    photon_scaling,
    poisson_cutoff,
    predicted_loop_phase,
    required_dimension,
)
from ncoptomech.phase import mean_field_deformed, mean_field_qm
from ncoptomech.units import DeformationParams, PulseSequence

SPEC = FockSpec(20, 2, 2)


def pulse(lam=0.1, lam2=None, cycles=1, **kw):
    kw.setdefault("n_p", 1.0)
    return PulseSequence(lam, lam if lam2 is None else lam2, cycles=cycles, **kw)


def test_zero_photons_is_identity():
    U = loop_unitary(0, pulse(), DeformationParams(1.0, 0.4), SPEC)
    np.testing.assert_allclose(U.data, np.eye(SPEC.dim), atol=1e-13)


@pytest.mark.parametrize(
    "theta, omega, n, expected",
    [(0.0, 0.0, 1, -0.02), (1.0, 0.4, 1, -0.022), (1.0, 0.4, 2, -0.088)],
)
def test_loop_is_the_predicted_phase(theta, omega, n, expected):
    U = loop_unitary(n, pulse(0.1), DeformationParams(theta, omega), SPEC)
    res = extract_loop_phase(U, n)
    assert res.extracted_phase == pytest.approx(expected, abs=1e-12)
    assert res.identity_residual <= 1e-9
    assert res.uniform
    assert res.leakage <= 1e-10
    assert res.trusted_states > 0


def test_extract_trivial_phases():
    res = extract_loop_phase(identity(SPEC))
    assert res.extracted_phase == 0 and res.identity_residual == 0
    U = OperatorMatrix(np.exp(1j * math.pi / 4) * np.eye(SPEC.dim), SPEC)
    assert extract_loop_phase(U).extracted_phase == pytest.approx(math.pi / 4, abs=1e-15)


def test_open_loop_is_rejected():
    diag = np.ones(SPEC.dim, dtype=complex)
    diag[5] = -1
    with pytest.raises(LoopClosureError):
        extract_loop_phase(OperatorMatrix(np.diag(diag), SPEC))


def test_predicted_phase():
    d0 = DeformationParams()
    assert predicted_loop_phase(1, pulse(0.1), d0) == pytest.approx(-0.02, rel=1e-15)
    assert predicted_loop_phase(1, pulse(0.1, cycles=3), d0) == pytest.approx(3 * -0.02, rel=1e-15)
    assert predicted_loop_phase(1, pulse(0.1), DeformationParams(1.0, 0.4)) == pytest.approx(-0.022, rel=1e-15)


def test_cycles_power_the_loop():
    d = DeformationParams(0.3, 0.5)
    res = extract_loop_phase(loop_unitary(2, pulse(0.1, cycles=3), d, SPEC), 2)
    assert res.extracted_phase == pytest.approx(predicted_loop_phase(2, pulse(0.1, cycles=3), d), abs=1e-10)


def test_anisotropic_pulse_closes():
    d = DeformationParams(0.3, 0.5)
    p = pulse(0.1, 0.04)
    res = extract_loop_phase(loop_unitary(2, p, d, SPEC), 2)
    assert res.extracted_phase == pytest.approx(predicted_loop_phase(2, p, d), abs=1e-10)


def test_truncation_error_names_dimension():
    small = FockSpec(6, 2, 2)
    with pytest.raises(TruncationError) as exc:
        loop_unitary(3, pulse(0.5), DeformationParams(1.0, 1.0), small)
    need = exc.value.required_dim
    assert need > 6
    assert estimated_leakage(0.5, 0.5, DeformationParams(1.0, 1.0), 3, FockSpec(need, 2, 2)) <= 1e-8


def test_required_dimension_grows_with_displacement():
    d = DeformationParams()
    assert required_dimension(0.05, 0.05, d, 1) < required_dimension(0.5, 0.5, d, 3)


def test_photon_scaling_is_quadratic():
    ratios = photon_scaling([1, 2, 3], pulse(0.05), DeformationParams(1.0, 0.4), SPEC)
    assert np.ptp(ratios) <= 1e-9
    assert ratios[0] == pytest.approx(-2 * 0.05**2 * 1.1, rel=1e-9)


def test_photon_scaling_refuses_wrapping_inputs():
    with pytest.raises(ValueError):
        photon_scaling([1, 10], pulse(0.3), DeformationParams(), SPEC)


@pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
def test_loop_phase_depends_on_product(c):
    p = pulse(0.05)
    base = LoopBuilder(p, DeformationParams(0.3, 0.2), SPEC)
    scaled = LoopBuilder(p, DeformationParams(0.3 * c, 0.2 / c), SPEC)
    for n in (1, 2):
        a = extract_loop_phase(base.unitary(n), n).extracted_phase
        b = extract_loop_phase(scaled.unitary(n), n).extracted_phase
        assert a == pytest.approx(b, abs=1e-10)


def test_undeformed_single_axis_reduction():
    p = pulse(0.1, 0.0)
    res = extract_loop_phase(loop_unitary(2, p, DeformationParams(), SPEC), 2)
    assert res.extracted_phase == pytest.approx(-(0.1**2) * 4, abs=1e-12)


def test_poisson_cutoff():
    assert poisson_cutoff(0.0) == (0, 0.0)
    C, tail = poisson_cutoff(4.0)
    assert tail <= 1e-12
    assert poisson_cutoff(4.0, 1e-12)[0] == C


def test_mean_field_without_interaction():
    res = mean_field_photon_sum(pulse(0.0, alpha=1.5, n_p=None), DeformationParams())
    assert res.value == pytest.approx(1.5, rel=1e-12)
    assert res.method == "photon_sum"
    assert res.tail_mass <= 1e-12


def test_mean_field_matches_undeformed_closed_form():
    res = mean_field_photon_sum(pulse(0.05, alpha=1.0, n_p=None), DeformationParams())
    closed = mean_field_qm(1.0, 0.05, 0.05)
    assert abs(res.value - closed) / abs(closed) <= 1e-10


def test_mean_field_matches_deformed_closed_form():
    d = DeformationParams(1.0, 0.4)
    res = mean_field_photon_sum(pulse(0.05, alpha=1.0, n_p=None), d)
    closed = mean_field_deformed(1.0, 0.05, d, 1)
    assert abs(res.value - closed) / abs(closed) <= 1e-10
    assert abs(res.value) <= 1.0


def test_mean_field_brute_force_blocks():
    d = DeformationParams(1.0, 0.4)
    res = mean_field_photon_sum(pulse(0.05, alpha=0.5, n_p=None), d, mode="brute_force")
    closed = mean_field_deformed(0.5, 0.05, d, 1)
    assert abs(res.value - closed) / abs(closed) <= 1e-10


def test_mean_field_limits():
    with pytest.raises(OracleInfeasibleError):
        mean_field_photon_sum(pulse(0.05, alpha=100.0, n_p=None), DeformationParams())
    with pytest.raises(OracleInfeasibleError):
        mean_field_photon_sum(pulse(0.05, alpha=3.0, n_p=None), DeformationParams(), mode="brute_force")
    with pytest.raises(ValueError):
        mean_field_photon_sum(pulse(0.05), DeformationParams(), mode="other")


def test_explicit_cutoff_only_raises():
    p = pulse(0.05, alpha=1.0, n_p=None)
    auto = mean_field_photon_sum(p, DeformationParams())
    low = mean_field_photon_sum(p, DeformationParams(), photon_cutoff=2)
    high = mean_field_photon_sum(p, DeformationParams(), photon_cutoff=auto.cutoff_used + 10)
    assert low.cutoff_used == auto.cutoff_used
    assert high.cutoff_used == auto.cutoff_used + 10
    assert high.tail_mass < auto.tail_mass


@pytest.mark.parametrize("lam2, cycles", [(0.1, 1), (0.04, 2), (0.0, 1)])
def test_factorized_and_dense_routes_agree(lam2, cycles):
    spec = FockSpec(12, 2, 2)
    p = pulse(0.1, lam2, cycles=cycles)
    d = DeformationParams(0.7, 0.5)
    fast, dense = LoopBuilder(p, d, spec), LoopBuilder(p, d, spec, method="dense")
    for n in range(3):
        U, V = fast.unitary(n), dense.unitary(n)
        np.testing.assert_allclose(U.data, V.data, atol=1e-13)
        np.testing.assert_array_equal(U.trusted, V.trusted)
        assert U.leakage == pytest.approx(V.leakage, abs=1e-14)


def test_unknown_loop_method():
    with pytest.raises(ValueError):
        LoopBuilder(pulse(), DeformationParams(), SPEC, method="sparse")


def test_untrusted_vacuum_is_a_truncation_error():
    spec = FockSpec(12, 2, 2)
    U = loop_unitary(2, pulse(0.1), DeformationParams(1.0, 0.4), spec)
    assert 1e-10 < U.leakage <= 1e-8
    with pytest.raises(TruncationError) as exc:
        extract_loop_phase(U, 2)
    assert exc.value.required_dim == 13
