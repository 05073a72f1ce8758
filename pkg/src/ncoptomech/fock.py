"""Dense operators on truncated Fock spaces.

Two-mode operators act on ``C^D (x) C^D`` with mode 0 as the leading Kronecker
factor, so the basis state ``|i, j>`` sits at flat index ``i * D + j``.

Truncation breaks the canonical algebra only on the top Fock levels.  Every
exactness claim made here is therefore restricted to the *interior*: basis
states whose mode indices all lie below ``D - interior_margin``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DomainError, ToleranceError
from .units import DeformationParams

ALGEBRA_ATOL = 1e-12
UNITARITY_ATOL = 1e-11


@dataclass(frozen=True)
class FockSpec:
    dim_per_mode: int
    modes: int = 2
    interior_margin: int = 2

    def __post_init__(self):
        if self.modes not in (1, 2):
            raise DomainError(f"modes must be 1 or 2, got {self.modes}")
        if self.dim_per_mode < 2:
            raise DomainError(f"dim_per_mode must be >= 2, got {self.dim_per_mode}")
        if not 0 <= self.interior_margin <= self.dim_per_mode - 2:
            raise DomainError(
                f"interior_margin must lie in [0, D-2] = [0, {self.dim_per_mode - 2}]"
            )

    @property
    def dim(self):
        return self.dim_per_mode**self.modes

    def mode_indices(self):
        """Array of shape (modes, dim) with the Fock index of every mode per basis state."""
        shape = (self.dim_per_mode,) * self.modes
        return np.indices(shape).reshape(self.modes, -1)

    def interior(self):
        """Boolean mask of basis states clear of the truncation margin."""
        cut = self.dim_per_mode - self.interior_margin
        return (self.mode_indices() < cut).all(axis=0)

    def boundary(self):
        """Boolean mask of basis states with some mode index inside the margin.

        With zero margin the top level alone is used, so leakage stays defined.
        """
        cut = self.dim_per_mode - max(self.interior_margin, 1)
        return (self.mode_indices() >= cut).any(axis=0)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A dense square matrix tied to the Fock space it acts on.

    ``trusted`` optionally narrows the basis states on which the matrix is
    known to agree with its untruncated counterpart; ``leakage`` records the
    weight that reached the truncation boundary while building it.
    """

    data: np.ndarray
    spec: FockSpec
    hermitian_hint: bool = False
    trusted: np.ndarray | None = None
    leakage: float = 0.0

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.shape != (self.spec.dim, self.spec.dim):
            raise DomainError(f"matrix shape {data.shape} does not match dimension {self.spec.dim}")
        if self.hermitian_hint:
            scale = max(np.abs(data).max(), np.finfo(float).tiny)
            if np.abs(data - data.conj().T).max() > 1e-12 * scale:
                raise DomainError("matrix flagged Hermitian is not")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    def _check(self, other):
        if other.spec != self.spec:
            raise DomainError(f"Fock spaces differ: {self.spec} vs {other.spec}")

    def __add__(self, other):
        self._check(other)
        return OperatorMatrix(self.data + other.data, self.spec, self.hermitian_hint and other.hermitian_hint)

    def __sub__(self, other):
        self._check(other)
        return OperatorMatrix(self.data - other.data, self.spec, self.hermitian_hint and other.hermitian_hint)

    def __neg__(self):
        return OperatorMatrix(-self.data, self.spec, self.hermitian_hint)

    def __mul__(self, scalar):
        herm = self.hermitian_hint and np.isreal(scalar)
        return OperatorMatrix(scalar * self.data, self.spec, bool(herm))

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return OperatorMatrix(self.data @ other.data, self.spec)

    def dagger(self):
        return OperatorMatrix(self.data.conj().T, self.spec, self.hermitian_hint)

    def interior_block(self, mask=None):
        m = self.spec.interior() if mask is None else mask
        return self.data[np.ix_(m, m)]


def identity(spec):
    return OperatorMatrix(np.eye(spec.dim), spec, hermitian_hint=True)


def ladder(spec, mode=0):
    """Annihilation operator of one mode."""
    if not 0 <= mode < spec.modes:
        raise DomainError(f"mode {mode} out of range for {spec.modes} mode(s)")
    D = spec.dim_per_mode
    a = np.diag(np.sqrt(np.arange(1, D, dtype=float)), 1)
    if spec.modes == 2:
        eye = np.eye(D)
        a = np.kron(a, eye) if mode == 0 else np.kron(eye, a)
    return OperatorMatrix(a, spec)


def number(spec, mode=0):
    a = ladder(spec, mode)
    return OperatorMatrix((a.dagger() @ a).data.real, spec, hermitian_hint=True)


def commutator(A, B):
    A._check(B)
    return OperatorMatrix(A.data @ B.data - B.data @ A.data, A.spec)


class CanonicalQuadratures(NamedTuple):
    X1: OperatorMatrix
    X2: OperatorMatrix
    P1: OperatorMatrix
    P2: OperatorMatrix


def _quadratures(spec, mode):
    a = ladder(spec, mode).data
    ad = a.conj().T
    x = OperatorMatrix((a + ad) / np.sqrt(2), spec, hermitian_hint=True)
    p = OperatorMatrix(1j * (ad - a) / np.sqrt(2), spec, hermitian_hint=True)
    return x, p


def single_mode_quadratures(spec):
    """(x, p) on a one-mode space."""
    if spec.modes != 1:
        raise DomainError("single_mode_quadratures needs a one-mode space")
    return _quadratures(spec, 0)


def canonical_quadratures(spec):
    """X = (a + a^dag)/sqrt 2 and P = i(a^dag - a)/sqrt 2 for both modes."""
    if spec.modes != 2:
        raise DomainError("canonical_quadratures needs a two-mode space")
    x1, p1 = _quadratures(spec, 0)
    x2, p2 = _quadratures(spec, 1)
    return CanonicalQuadratures(x1, x2, p1, p2)


@dataclass(frozen=True, eq=False)
class DeformedQuadratures:
    X: OperatorMatrix
    Y: OperatorMatrix
    PX: OperatorMatrix
    PY: OperatorMatrix
    deformation: DeformationParams


def deformed_quadratures(spec, deformation):
    """Noncommutative quadratures as linear (Bopp) shifts of canonical ones.

    X = X1 - (theta/2) P2,  Y = X2 + (theta/2) P1,
    PX = P1 + (omega/2) X2, PY = P2 - (omega/2) X1.

    On the interior these give [X, Y] = i theta, [PX, PY] = i omega and
    [X, PX] = [Y, PY] = i (1 + theta omega / 4); mixed pairs commute.
    """
    q = canonical_quadratures(spec)
    th, om = deformation.theta, deformation.omega
    return DeformedQuadratures(
        X=q.X1 - (th / 2) * q.P2,
        Y=q.X2 + (th / 2) * q.P1,
        PX=q.P1 + (om / 2) * q.X2,
        PY=q.P2 - (om / 2) * q.X1,
        deformation=deformation,
    )


class HermitianExponential:
    """exp(i * scale * H) for a fixed Hermitian H, reusing one eigendecomposition.

    Unitarity of every exponential follows from that of the eigenvector
    matrix, which is checked once here.
    """

    def __init__(self, H):
        if not H.hermitian_hint:
            raise DomainError("generator must be flagged Hermitian")
        dev = np.abs(H.data - H.data.conj().T).max()
        if dev > ALGEBRA_ATOL * max(np.abs(H.data).max(), np.finfo(float).tiny):
            raise DomainError(f"generator is not Hermitian (max |H - H^dag| = {dev:.2e})")
        self.spec = H.spec
        self.eigvals, self.eigvecs = np.linalg.eigh(H.data)
        V = self.eigvecs
        err = np.abs(V.conj().T @ V - np.eye(V.shape[0])).max()
        if err > UNITARITY_ATOL:
            raise ToleranceError(f"eigenvectors not orthonormal ({err:.2e})")

    def matrix(self, scale):
        V = self.eigvecs
        return (V * np.exp(1j * scale * self.eigvals)) @ V.conj().T

    def __call__(self, scale):
        return OperatorMatrix(self.matrix(scale), self.spec)


def unitary_from_generator(H, scale):
    """Return exp(i * scale * H) for Hermitian ``H``."""
    return HermitianExponential(H)(scale)


def unitarity_error(U):
    d = U.data
    return float(np.abs(d.conj().T @ d - np.eye(d.shape[0])).max())


COMMUTATOR_PAIRS = ("XY", "PXPY", "XPX", "YPY", "XPY", "YPX")


def commutator_residuals(spec, deformation):
    """Largest interior deviation of each deformed commutator from its target.

    Returns a dict keyed by ``COMMUTATOR_PAIRS``.
    """
    q = deformed_quadratures(spec, deformation)
    th, om = deformation.theta, deformation.omega
    one = 1 + deformation.eps
    pairs = {
        "XY": (q.X, q.Y, th),
        "PXPY": (q.PX, q.PY, om),
        "XPX": (q.X, q.PX, one),
        "YPY": (q.Y, q.PY, one),
        "XPY": (q.X, q.PY, 0.0),
        "YPX": (q.Y, q.PX, 0.0),
    }
    mask = spec.interior()
    eye = np.eye(int(mask.sum()))
    out = {}
    for name, (A, B, c) in pairs.items():
        block = commutator(A, B).interior_block(mask)
        out[name] = float(np.abs(block - 1j * c * eye).max())
    return out


def dump_matrix(op, fh):
    """Write a matrix as text: a header line, then one row per line of re/im pairs.

    Debugging aid only; the layout is not guaranteed stable.
    """
    s = op.spec
    fh.write(f"# dim={s.dim} modes={s.modes} dim_per_mode={s.dim_per_mode} margin={s.interior_margin}\n")
    for row in op.data:
        fh.write(" ".join(f"{z.real:.17e} {z.imag:.17e}" for z in row) + "\n")


def load_matrix(fh):
    header = fh.readline().lstrip("# ").split()
    meta = dict(item.split("=") for item in header)
    spec = FockSpec(int(meta["dim_per_mode"]), int(meta["modes"]), int(meta["margin"]))
    vals = np.loadtxt(fh, ndmin=2)
    return OperatorMatrix(vals[:, 0::2] + 1j * vals[:, 1::2], spec)
