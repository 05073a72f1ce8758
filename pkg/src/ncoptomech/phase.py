"""Closed-form optical phase signal of the loop protocol.

Throughout, theta*omega is the dimensionless product; the dimensionful
combination theta_tilde*omega_tilde/hbar^2 reduces to it identically.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

from .exceptions import ConfigError, RangeWarning
from .units import CODATA2018, effective_interaction_length


def _mean_photons(alpha, n_p):
    a2 = abs(alpha) ** 2
    if n_p is None:
        return a2
    if abs(n_p - a2) > 1e-12 * max(1.0, a2):
        raise ConfigError(f"pulse.n_p: N_p must equal |alpha|^2 = {a2!r}, got {n_p!r}")
    return float(n_p)


def mean_field_qm(alpha, lambda1, lambda2, n_p=None, cycles=1):
    """<a> of the undeformed protocol after ``cycles`` loops.

    alpha * exp(-i N s - N_p (1 - exp(-2 i N s))) with s = l1^2 + l2^2.
    """
    n_p = _mean_photons(alpha, n_p)
    s = cycles * (lambda1**2 + lambda2**2)
    return alpha * cmath.exp(-1j * s - n_p * (1 - cmath.exp(-2j * s)))


def _loop_angle(lam, deformation, cycles):
    return 2 * cycles * lam**2 * (1 + deformation.eps)


def mean_field_deformed(alpha, lam, deformation, cycles=1, n_p=None):
    """<a> after ``cycles`` loops of the isotropic (l1 = l2 = lam) protocol."""
    n_p = _mean_photons(alpha, n_p)
    k = _loop_angle(lam, deformation, cycles)
    return alpha * cmath.exp(-1j * k - n_p * (1 - cmath.exp(-2j * k)))


def deformation_angle(cycles, lam, deformation):
    """g = N lam^2 theta omega / 2."""
    return cycles * lam**2 * deformation.product / 2


def theta_phase(cycles, lam, deformation, n_p):
    """Complex extra phase Theta(N) with <a>_N = <a>_QM,N * exp(-i Theta(N)).

    Theta = g + i N_p exp(-4 i N lam^2) (exp(-2 i g) - 1).  The sign inside
    the last exponential is the one fixed by the decomposition identity; its
    modulus 2 N_p |sin g| does not depend on it.
    """
    g = deformation_angle(cycles, lam, deformation)
    return g + 1j * n_p * cmath.exp(-4j * cycles * lam**2) * (cmath.exp(-2j * g) - 1)


def theta_magnitude(cycles, lam, deformation, n_p):
    """Measured phase signal g + 2 N_p sin g.

    This is the sum of the moduli of the two terms of ``theta_phase``, not the
    modulus of their sum; the two agree to first order in g.
    """
    g = deformation_angle(cycles, lam, deformation)
    return signal_from_angle(g, n_p)


def signal_from_angle(g, n_p):
    if not 0 <= g <= math.pi:
        warnings.warn(f"deformation angle {g:.3g} outside [0, pi]", RangeWarning, stacklevel=3)
    return g + 2 * n_p * math.sin(g)


def gamma_from_experiment(deformation, mech, cav, cycles=1, constants=CODATA2018):
    """Deformation angle expressed through cavity and oscillator parameters.

    8 theta omega N hbar F^2 / (m omega_m lambda_L^2) when the finesse is
    known, else N lam^2 theta omega / 2 with the coupling-rate interaction
    length.
    """
    if cav.finesse is not None and cav.wavelength_L is not None:
        return (
            8 * deformation.product * cycles * constants.hbar * cav.finesse**2
            / (mech.mass * mech.omega_m * cav.wavelength_L**2)
        )
    lam = effective_interaction_length(cav, mech, constants).value
    return deformation_angle(cycles, lam, deformation)


@dataclass(frozen=True)
class PhaseSignal:
    theta_complex: complex
    theta_magnitude: float
    gamma: float
    mean_field_qm: complex
    mean_field_deformed: complex

    @property
    def theta_modulus(self):
        return abs(self.theta_complex)

    @property
    def magnitude_gap(self):
        """Difference between the summed-modulus signal and |Theta|."""
        return self.theta_magnitude - abs(self.theta_complex)


def phase_signal(alpha, lam, deformation, cycles=1, n_p=None):
    """Every closed-form observable for one isotropic pulse sequence."""
    n_p = _mean_photons(alpha, n_p)
    return PhaseSignal(
        theta_complex=theta_phase(cycles, lam, deformation, n_p),
        theta_magnitude=theta_magnitude(cycles, lam, deformation, n_p),
        gamma=deformation_angle(cycles, lam, deformation),
        mean_field_qm=mean_field_qm(alpha, lam, lam, n_p, cycles),
        mean_field_deformed=mean_field_deformed(alpha, lam, deformation, cycles, n_p),
    )
