import io

import numpy as np
import pytest

from ncoptomech.exceptions import DomainError
from ncoptomech.fock import (
    FockSpec,
    OperatorMatrix,
    canonical_quadratures,
    commutator,
    commutator_residuals,
    deformed_quadratures,
    dump_matrix,
    identity,
    ladder,
    load_matrix,
    number,
    single_mode_quadratures,
    unitarity_error,
    unitary_from_generator,
)
from ncoptomech.units import DeformationParams

SPEC = FockSpec(12, 2, 2)


def interior_eye(spec):
    return np.eye(int(spec.interior().sum()))


def test_spec_invariants():
    assert FockSpec(8).dim == 64
    assert FockSpec(8, modes=1).dim == 8
    with pytest.raises(DomainError):
        FockSpec(8, interior_margin=7)
    with pytest.raises(DomainError):
        FockSpec(8, modes=3)


def test_ladder_two_level():
    a = ladder(FockSpec(2, 1, 0))
    np.testing.assert_array_equal(a.data, [[0, 1], [0, 0]])


def test_number_operator_is_diagonal():
    spec = FockSpec(7, 1, 0)
    n = number(spec).data
    np.testing.assert_allclose(n, np.diag(np.arange(7)), atol=1e-14)


def test_truncated_canonical_commutator():
    spec = FockSpec(9, 1, 0)
    a = ladder(spec)
    c = commutator(a, a.dagger()).data
    expected = np.eye(9)
    expected[-1, -1] = 1 - 9
    np.testing.assert_allclose(c, expected, atol=1e-14)


def test_ladder_mode_range():
    with pytest.raises(DomainError):
        ladder(SPEC, 2)


def test_commutator_identities():
    q = canonical_quadratures(SPEC)
    assert np.abs(commutator(q.X1, q.X1).data).max() == 0
    ab = commutator(q.X1, q.P2 + q.P1).data
    ba = commutator(q.P2 + q.P1, q.X1).data
    np.testing.assert_allclose(ab, -ba, atol=0)
    a = ladder(SPEC, 0)
    block = commutator(a, a.dagger()).interior_block()
    np.testing.assert_allclose(block, interior_eye(SPEC), atol=1e-14)
    with pytest.raises(DomainError):
        commutator(a, ladder(FockSpec(5), 0))


def test_canonical_quadratures():
    q = canonical_quadratures(SPEC)
    vac = np.zeros(SPEC.dim)
    vac[0] = 1
    assert vac @ (q.X1 @ q.X1).data @ vac == pytest.approx(0.5, abs=1e-15)
    assert np.abs(commutator(q.X1, q.X2).data).max() == 0
    block = commutator(q.X1, q.P1).interior_block()
    np.testing.assert_allclose(block, 1j * interior_eye(SPEC), atol=1e-14)


def test_quadratures_are_hermitian():
    q = canonical_quadratures(SPEC)
    d = deformed_quadratures(SPEC, DeformationParams(0.7, 1.3))
    for ops in (tuple(q), (d.X, d.Y, d.PX, d.PY)):
        for op in ops:
            assert np.abs(op.data - op.data.conj().T).max() <= 1e-14
            assert op.hermitian_hint


def test_undeformed_limit_is_canonical():
    q = canonical_quadratures(SPEC)
    d = deformed_quadratures(SPEC, DeformationParams(0.0, 0.0))
    for a, b in ((d.X, q.X1), (d.Y, q.X2), (d.PX, q.P1), (d.PY, q.P2)):
        np.testing.assert_array_equal(a.data, b.data)


@pytest.mark.parametrize(
    "theta, omega, xy, pxpy, xpx",
    [(1.0, 0.0, 1.0, 0.0, 1.0), (1.0, 0.4, 1.0, 0.4, 1.1)],
)
def test_deformed_commutators(theta, omega, xy, pxpy, xpx):
    d = deformed_quadratures(SPEC, DeformationParams(theta, omega))
    eye = interior_eye(SPEC)
    np.testing.assert_allclose(commutator(d.X, d.Y).interior_block(), 1j * xy * eye, atol=1e-12)
    np.testing.assert_allclose(commutator(d.PX, d.PY).interior_block(), 1j * pxpy * eye, atol=1e-12)
    np.testing.assert_allclose(commutator(d.X, d.PX).interior_block(), 1j * xpx * eye, atol=1e-12)
    np.testing.assert_allclose(commutator(d.Y, d.PY).interior_block(), 1j * xpx * eye, atol=1e-12)
    np.testing.assert_allclose(commutator(d.X, d.PY).interior_block(), 0 * eye, atol=1e-12)


def test_unitary_trivial_cases():
    q = canonical_quadratures(SPEC)
    U = unitary_from_generator(q.X1, 0.0)
    np.testing.assert_allclose(U.data, np.eye(SPEC.dim), atol=1e-14)

    spec1 = FockSpec(10, 1, 0)
    U = unitary_from_generator(number(spec1), 2 * np.pi)
    np.testing.assert_allclose(U.data, np.eye(10), atol=1e-12)


def test_unitary_inverse_pair():
    q = canonical_quadratures(SPEC)
    prod = unitary_from_generator(q.X1, 0.3) @ unitary_from_generator(q.X1, -0.3)
    np.testing.assert_allclose(prod.data, np.eye(SPEC.dim), atol=1e-11)


def test_unitarity_of_deformed_generators():
    d = deformed_quadratures(SPEC, DeformationParams(0.5, 2.0))
    for H in (d.X, d.Y, d.PX, d.PY, 0.3 * d.X + 0.7 * d.PY):
        assert unitarity_error(unitary_from_generator(H, 1.7)) <= 1e-11


def test_non_hermitian_generator_rejected():
    a = ladder(SPEC, 0)
    with pytest.raises(DomainError):
        unitary_from_generator(a, 1.0)
    with pytest.raises(DomainError):
        OperatorMatrix(a.data, SPEC, hermitian_hint=True)


def test_residuals_undeformed():
    res = commutator_residuals(FockSpec(16, 2, 2), DeformationParams(0.0, 0.0))
    assert set(res) == {"XY", "PXPY", "XPX", "YPY", "XPY", "YPX"}
    assert max(res.values()) <= 1e-13


def test_residuals_deformed():
    res = commutator_residuals(FockSpec(16, 2, 2), DeformationParams(0.3, 0.2))
    assert max(res.values()) <= 1e-12


def test_residuals_without_margin_see_the_corner():
    res = commutator_residuals(FockSpec(16, 2, 0), DeformationParams(0.0, 0.0))
    assert res["XPX"] == pytest.approx(16.0, rel=1e-12)
    assert res["XY"] <= 1e-13


@pytest.mark.parametrize("D", [8, 16, 32])
def test_bopp_residuals_do_not_grow_with_dimension(D):
    res = commutator_residuals(FockSpec(D, 2, 2), DeformationParams(0.3, 0.5))
    assert max(res.values()) <= 1e-12


@pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
def test_diagonal_commutators_depend_on_product(c):
    spec = FockSpec(10, 2, 2)
    base = deformed_quadratures(spec, DeformationParams(0.6, 0.5))
    scaled = deformed_quadratures(spec, DeformationParams(0.6 * c, 0.5 / c))
    for pair in (("X", "PX"), ("Y", "PY")):
        a = commutator(getattr(base, pair[0]), getattr(base, pair[1])).interior_block()
        b = commutator(getattr(scaled, pair[0]), getattr(scaled, pair[1])).interior_block()
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_operator_arithmetic_keeps_hermitian_hint():
    q = canonical_quadratures(SPEC)
    assert (q.X1 + q.P2).hermitian_hint
    assert (2.0 * q.X1).hermitian_hint
    assert not (1j * q.X1).hermitian_hint
    assert not (q.X1 @ q.P1).hermitian_hint
    assert identity(SPEC).hermitian_hint


def test_operator_is_immutable():
    op = identity(SPEC)
    with pytest.raises(ValueError):
        op.data[0, 0] = 2.0


def test_dump_round_trip():
    spec = FockSpec(4, 2, 1)
    U = unitary_from_generator(deformed_quadratures(spec, DeformationParams(0.2, 0.1)).X, 0.4)
    buf = io.StringIO()
    dump_matrix(U, buf)
    assert buf.getvalue().startswith("# dim=16 modes=2 dim_per_mode=4 margin=1")
    buf.seek(0)
    back = load_matrix(buf)
    assert back.spec == spec
    np.testing.assert_array_equal(back.data, U.data)


def test_single_mode_quadratures():
    x, p = single_mode_quadratures(FockSpec(10, 1, 2))
    block = commutator(x, p).interior_block()
    np.testing.assert_allclose(block, 1j * np.eye(8), atol=1e-14)
    q = canonical_quadratures(FockSpec(10, 2, 2))
    np.testing.assert_array_equal(np.kron(x.data, np.eye(10)), q.X1.data)
    np.testing.assert_array_equal(np.kron(np.eye(10), p.data), q.P2.data)
    with pytest.raises(DomainError):
        single_mode_quadratures(SPEC)
