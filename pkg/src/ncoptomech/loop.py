"""Brute-force loop operator and photon-number-sum oracle.

The loop operator is built at a fixed optical photon number ``n`` (the light
enters only through its number operator, which is diagonal in Fock states),
so each photon-number block is a two-mode mechanical unitary

    xi(n) = exp(i n B) exp(-i n A) exp(-i n B) exp(i n A),
    A = l1 X + l2 Y,   B = l1 PX + l2 PY,

with the deformed quadratures of ``fock.deformed_quadratures``.  Because
[A, B] is a c-number, xi(n) must be a pure phase.  Nothing in this module
assumes that: the phase is read off the matrix and the closure is measured.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .exceptions import ConfigError, LoopClosureError, OracleInfeasibleError, TruncationError
from .fock import (
    FockSpec,
    HermitianExponential,
    OperatorMatrix,
    deformed_quadratures,
    single_mode_quadratures,
)
from .units import DeformationParams

LEAKAGE_TOL = 1e-8  # vacuum weight allowed on the truncation boundary
TRUST_TOL = 1e-10  # per-state boundary weight for a state to count as trusted
CLOSURE_TOL = 1e-6  # residual above which the loop is declared open
UNIFORMITY_TOL = 1e-9
TAIL_TOL = 1e-12


@dataclass(frozen=True)
class LoopResult:
    photon_n: int
    extracted_phase: float
    identity_residual: float
    leakage: float
    trusted_states: int = 0
    diagonal_spread: float = 0.0

    @property
    def uniform(self):
        return self.diagonal_spread <= UNIFORMITY_TOL


@dataclass(frozen=True)
class MeanFieldResult:
    value: complex
    method: str  # "closed_form" or "photon_sum"
    cutoff_used: int
    tail_mass: float


def _lambdas(pulse):
    if pulse.lambda1 is None or pulse.lambda2 is None:
        raise ConfigError("pulse.lambda1 and pulse.lambda2 are required for the loop operator")
    return float(pulse.lambda1), float(pulse.lambda2)


def _mode_coefficients(l1, l2, deformation):
    """Split A and B into single-mode parts u x + v p.

    Returns ((a1, a2), (b1, b2)) with each entry a (u, v) pair; the two-mode
    generator is the Kronecker sum of its two parts.
    """
    th, om = deformation.theta, deformation.omega
    a = ((l1, l2 * th / 2), (l2, -l1 * th / 2))
    b = ((-l2 * om / 2, l1), (l1 * om / 2, l2))
    return a, b


def _vacuum_excursions(l1, l2, deformation, n):
    """Mean phonon numbers of the two modes after each of the four pulses.

    exp(i s (u X + v P)) maps the vacuum to the coherent state with amplitude
    i s (u + i v) / sqrt 2, and successive displacements add.
    """
    a, b = _mode_coefficients(l1, l2, deformation)

    def beta(c):
        return 1j * np.array([u + 1j * v for u, v in c]) / math.sqrt(2)

    ba, bb = beta(a), beta(b)
    path = [n * ba, n * (ba - bb), -n * bb]
    return [np.abs(p) ** 2 for p in path]


def estimated_leakage(l1, l2, deformation, n, spec):
    """Boundary weight the untruncated vacuum trajectory would put on ``spec``."""
    cut = spec.dim_per_mode - max(spec.interior_margin, 1)
    worst = 0.0
    for mu in _vacuum_excursions(l1, l2, deformation, n):
        worst = max(worst, float(stats.poisson.sf(cut - 1, mu).sum()))
    return math.sqrt(worst)


def required_dimension(l1, l2, deformation, n, margin=2, tol=LEAKAGE_TOL, limit=4096):
    """Smallest per-mode cutoff whose estimated vacuum leakage is within ``tol``."""
    for D in range(max(4, margin + 2), limit + 1):
        spec = FockSpec(D, 2, margin)
        if estimated_leakage(l1, l2, deformation, n, spec) <= tol:
            return D
    return limit


@functools.lru_cache(maxsize=8)
def _spectrum(spec, kind, param, r1, r2):
    """Eigendecomposition of r1 X + r2 Y (kind "x") or r1 PX + r2 PY (kind "p")."""
    if kind == "x":
        q = deformed_quadratures(spec, DeformationParams(theta=param))
        return HermitianExponential(r1 * q.X + r2 * q.Y)
    q = deformed_quadratures(spec, DeformationParams(omega=param))
    return HermitianExponential(r1 * q.PX + r2 * q.PY)


@functools.lru_cache(maxsize=64)
def _mode_spectrum(dim_per_mode, u, v):
    x, p = single_mode_quadratures(FockSpec(dim_per_mode, 1, 0))
    return HermitianExponential(u * x + v * p)


def _generator(spec, kind, param, l1, l2):
    # Normalise so that runs differing only in the overall interaction
    # strength share one eigendecomposition.
    s = max(abs(l1), abs(l2))
    if s == 0:
        return None, 0.0
    return _spectrum(spec, kind, param, l1 / s, l2 / s), s


def _mode_generator(D, uv):
    s = math.hypot(*uv)
    if s == 0:
        return None, 0.0
    return _mode_spectrum(D, uv[0] / s, uv[1] / s), s


class LoopBuilder:
    """Loop operators for one pulse/deformation pair at any photon number.

    ``method="factorized"`` (default) uses that A and B are Kronecker sums of
    single-mode operators, exactly so on the truncated space, and builds the
    loop as a Kronecker product of two D x D loops.  ``method="dense"``
    exponentiates the full D^2 x D^2 generators; the two agree to rounding.
    """

    def __init__(self, pulse, deformation, spec, leak_tol=LEAKAGE_TOL, trust_tol=TRUST_TOL,
                 method="factorized"):
        if spec.modes != 2:
            raise ConfigError("loop operator needs a two-mode Fock space")
        if method not in ("factorized", "dense"):
            raise ValueError(f"unknown method {method!r}")
        self.pulse = pulse
        self.deformation = deformation
        self.spec = spec
        self.method = method
        self.leak_tol = leak_tol
        self.trust_tol = trust_tol
        self.l1, self.l2 = _lambdas(pulse)
        D = spec.dim_per_mode
        if method == "dense":
            self._expA, self._sA = _generator(spec, "x", deformation.theta, self.l1, self.l2)
            self._expB, self._sB = _generator(spec, "p", deformation.omega, self.l1, self.l2)
        else:
            a, b = _mode_coefficients(self.l1, self.l2, deformation)
            self._modeA = [_mode_generator(D, c) for c in a]
            self._modeB = [_mode_generator(D, c) for c in b]

    @staticmethod
    def _exp(gen, scale, size):
        exp, s = gen
        if exp is None:
            return np.eye(size, dtype=complex)
        return exp.matrix(scale * s)

    def _required(self, n):
        return required_dimension(
            self.l1, self.l2, self.deformation, n, self.spec.interior_margin, self.leak_tol
        )

    def _dense_loop(self, n):
        size = self.spec.dim
        eA = self._exp((self._expA, self._sA), n, size)
        eB = self._exp((self._expB, self._sB), n, size)
        # exp(-i s H) = exp(i s H)^dagger
        factors = [eA, eB.conj().T, eA.conj().T, eB]
        edge = self.spec.boundary()
        M = factors[0]
        col_leak = np.linalg.norm(M[edge, :], axis=0)
        for f in factors[1:]:
            M = f @ M
            col_leak = np.maximum(col_leak, np.linalg.norm(M[edge, :], axis=0))
        if self.pulse.cycles > 1:
            M = np.linalg.matrix_power(M, self.pulse.cycles)
        return M, col_leak

    def _factorized_loop(self, n):
        D = self.spec.dim_per_mode
        edge = np.arange(D) >= D - max(self.spec.interior_margin, 1)
        partials = []
        for gA, gB in zip(self._modeA, self._modeB):
            eA, eB = self._exp(gA, n, D), self._exp(gB, n, D)
            M, steps = None, []
            for f in (eA, eB.conj().T, eA.conj().T, eB):
                M = f if M is None else f @ M
                steps.append(M)
            partials.append(steps)
        # Column (i, j) of kron(M1, M2) is kron(M1[:, i], M2[:, j]); its weight
        # on the two-mode boundary splits into "mode 1 on the edge" plus
        # "mode 1 inside, mode 2 on the edge".
        leak2 = np.zeros((D, D))
        for M1, M2 in zip(*partials):
            e1, i1 = (np.linalg.norm(M1[m], axis=0) ** 2 for m in (edge, ~edge))
            e2, i2 = (np.linalg.norm(M2[m], axis=0) ** 2 for m in (edge, ~edge))
            leak2 = np.maximum(leak2, np.outer(e1, e2 + i2) + np.outer(i1, e2))
        M1, M2 = partials[0][-1], partials[1][-1]
        if self.pulse.cycles > 1:
            M1 = np.linalg.matrix_power(M1, self.pulse.cycles)
            M2 = np.linalg.matrix_power(M2, self.pulse.cycles)
        return np.kron(M1, M2), np.sqrt(leak2).ravel()

    def unitary(self, n):
        """xi(n) raised to the number of cycles in the pulse sequence."""
        if n < 0:
            raise ValueError("photon number must be >= 0")
        est = estimated_leakage(self.l1, self.l2, self.deformation, n, self.spec)
        if est > self.leak_tol:
            need = self._required(n)
            raise TruncationError(
                f"n={n}: displacement leaks {est:.1e} onto the boundary at D={self.spec.dim_per_mode}; "
                f"need D >= {need}",
                required_dim=need,
            )
        M, col_leak = self._dense_loop(n) if self.method == "dense" else self._factorized_loop(n)
        vac_leak = float(col_leak[0])
        if vac_leak > self.leak_tol:
            raise TruncationError(
                f"n={n}: vacuum leakage {vac_leak:.1e} exceeds {self.leak_tol:.0e}; "
                f"need D >= {self._required(n)}",
                required_dim=max(self._required(n), self.spec.dim_per_mode + 1),
            )
        return OperatorMatrix(M, self.spec, trusted=col_leak <= self.trust_tol, leakage=vac_leak)


def loop_unitary(n, pulse, deformation, spec, method="factorized"):
    return LoopBuilder(pulse, deformation, spec, method=method).unitary(n)


def extract_loop_phase(U, photon_n=0):
    """Read the scalar phase of a loop operator and measure how well it closes.

    The residual is taken over the trusted columns of ``U`` (the interior when
    none are recorded): every such basis state must come back multiplied by
    the same phase factor.
    """
    mask = U.trusted if U.trusted is not None else U.spec.interior()
    if not mask[0]:
        raise TruncationError(
            f"n={photon_n}: vacuum boundary weight {U.leakage:.1e} is above the trust level "
            f"{TRUST_TOL:.0e}; increase D beyond {U.spec.dim_per_mode}",
            required_dim=U.spec.dim_per_mode + 1,
        )
    d = U.data
    phi = float(np.angle(d[0, 0]))
    ref = np.exp(1j * phi)
    cols = d[:, mask]
    target = np.eye(U.spec.dim)[:, mask] * ref
    residual = float(np.abs(cols - target).max())
    spread = float(np.abs(np.angle(np.diag(d)[mask] / ref)).max())
    if residual > CLOSURE_TOL:
        raise LoopClosureError(
            f"loop does not close: residual {residual:.2e} over {int(mask.sum())} states"
        )
    return LoopResult(photon_n, phi, residual, U.leakage, int(mask.sum()), spread)


def predicted_loop_phase(n, pulse, deformation):
    """-N (1 + theta omega / 4) (l1^2 + l2^2) n^2."""
    l1, l2 = _lambdas(pulse)
    return -pulse.cycles * (1 + deformation.eps) * (l1**2 + l2**2) * n**2


def photon_scaling(ns, pulse, deformation, spec):
    """Extracted phase over n^2 for each photon number in ``ns`` (n > 0).

    Only meaningful without phase wrapping, so inputs whose predicted phase
    exceeds pi/2 in magnitude are refused.
    """
    for n in ns:
        if n <= 0:
            raise ValueError("photon numbers must be positive")
        if abs(predicted_loop_phase(n, pulse, deformation)) > math.pi / 2:
            raise ValueError(f"predicted phase at n={n} exceeds pi/2; pick smaller lambda")
    builder = LoopBuilder(pulse, deformation, spec)
    return np.array([extract_loop_phase(builder.unitary(n), n).extracted_phase / n**2 for n in ns])


def poisson_cutoff(n_p, tail_tol=TAIL_TOL, max_cutoff=5000):
    """Smallest C with P(n > C) <= tail_tol for a Poisson law of mean ``n_p``."""
    if n_p == 0:
        return 0, 0.0
    lo = int(n_p)
    C = lo
    step = max(1, int(math.sqrt(n_p)))
    while stats.poisson.sf(C, n_p) > tail_tol:
        C += step
        if C > max_cutoff:
            raise OracleInfeasibleError(
                f"N_p={n_p:g} needs a photon cutoff above {max_cutoff}; use the closed form instead"
            )
    # walk back to the tightest cutoff
    while C > lo and stats.poisson.sf(C - 1, n_p) <= tail_tol:
        C -= 1
    return C, float(stats.poisson.sf(C, n_p))


def mean_field_photon_sum(
    pulse,
    deformation,
    photon_cutoff=None,
    mode="closed_form_blocks",
    spec=None,
    max_brute_n=12,
    max_cutoff=5000,
):
    """<a> after the loop sequence, summed block by block over photon number.

    <a> = alpha * sum_n P_n(N_p) exp(i (phi(n+1) - phi(n))),

    where P_n is the Poisson weight of the coherent input and phi(n) the loop
    phase of block n.  With ``mode="closed_form_blocks"`` phi comes from
    ``predicted_loop_phase``; with ``mode="brute_force"`` every block is built
    and exponentiated on ``spec`` (default D = 32), which is only practical for
    small photon numbers.

    The cutoff is raised automatically until the neglected Poisson tail is
    below 1e-12.
    """
    alpha = pulse.amplitude
    n_p = abs(alpha) ** 2
    C, tail = poisson_cutoff(n_p, TAIL_TOL, max_cutoff)
    if photon_cutoff is not None and photon_cutoff > C:
        C, tail = photon_cutoff, float(stats.poisson.sf(photon_cutoff, n_p))

    ns = np.arange(C + 2)
    if mode == "closed_form_blocks":
        phases = np.array([predicted_loop_phase(n, pulse, deformation) for n in ns])
    elif mode == "brute_force":
        if C + 1 > max_brute_n:
            raise OracleInfeasibleError(
                f"brute-force blocks up to n={C + 1} exceed the limit n <= {max_brute_n}"
            )
        spec = spec or FockSpec(32, 2, 2)
        builder = LoopBuilder(pulse, deformation, spec)
        phases = np.array([extract_loop_phase(builder.unitary(n), n).extracted_phase for n in ns])
    else:
        raise ValueError(f"unknown mode {mode!r}")

    weights = stats.poisson.pmf(ns[:-1], n_p) if n_p > 0 else (ns[:-1] == 0).astype(float)
    value = alpha * np.sum(weights * np.exp(1j * np.diff(phases)))
    return MeanFieldResult(complex(value), "photon_sum", int(C), tail)
