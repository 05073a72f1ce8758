"""Physical constants, parameter records and unit conversions.

All records are frozen dataclasses.  They do not raise on construction;
``validate`` collects every violated invariant at once so that a bad
configuration file is reported in a single pass.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from .exceptions import ConfigError, DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float  # J s
    c: float  # m / s
    planck_length: float  # m
    gev_inverse_squared_in_m2: float  # (hbar c / 1 GeV)^2
    electronvolt: float  # J

    @property
    def gev(self):
        return 1e9 * self.electronvolt

    def problems(self):
        out = []
        for name in ("hbar", "c", "planck_length", "gev_inverse_squared_in_m2", "electronvolt"):
            if not getattr(self, name) > 0:
                out.append(f"constants.{name}: must be > 0")
        if not out:
            expected = (self.hbar * self.c / self.gev) ** 2
            rel = abs(self.gev_inverse_squared_in_m2 - expected) / expected
            if rel > 1e-9:
                out.append(
                    "constants.gev_inverse_squared_in_m2: must equal (hbar*c/GeV)^2 "
                    f"to 1e-9 relative (off by {rel:.2e})"
                )
        return out


# CODATA 2018.  hbar*c = 197.3269804 MeV fm.
CODATA2018 = PhysicalConstants(
    hbar=1.054571817e-34,
    c=299792458.0,
    planck_length=1.616255e-35,
    gev_inverse_squared_in_m2=(197.3269804e-18) ** 2,
    electronvolt=1.602176634e-19,
)


@dataclass(frozen=True)
class MechanicalParams:
    """Isotropic two-dimensional mechanical oscillator."""

    mass: float  # kg
    omega_m: float  # rad / s

    @classmethod
    def from_frequency(cls, mass, frequency_hz):
        return cls(mass=mass, omega_m=2 * math.pi * frequency_hz)

    def problems(self):
        out = []
        if not (math.isfinite(self.mass) and self.mass > 0):
            out.append("mechanical.mass: must be finite and > 0")
        if not (math.isfinite(self.omega_m) and self.omega_m > 0):
            out.append("mechanical.omega_m: must be finite and > 0")
        return out


@dataclass(frozen=True)
class CavityParams:
    """Optical cavity.

    Either ``finesse`` or the triple ``(kappa, omega_c, cavity_length)`` fixes
    the interaction length.  ``wavelength_L`` is needed by the finesse route.
    """

    finesse: float | None = None
    wavelength_L: float | None = None  # m
    kappa: float | None = None  # amplitude decay rate, 1/s
    omega_c: float | None = None  # rad / s
    cavity_length: float | None = None  # m

    @property
    def has_coupling_route(self):
        return None not in (self.kappa, self.omega_c, self.cavity_length)

    def coupling_rate(self, mech, constants=CODATA2018):
        """Single-photon coupling g0 = h0 = omega_c sqrt(hbar) / (L sqrt(m omega_m))."""
        if not self.has_coupling_route:
            raise ConfigError("cavity: kappa, omega_c and cavity_length are all required for g0")
        return self.omega_c * math.sqrt(constants.hbar) / (
            self.cavity_length * math.sqrt(mech.mass * mech.omega_m)
        )

    def problems(self):
        out = []
        if self.finesse is None and not self.has_coupling_route:
            out.append("cavity: supply finesse, or all of kappa, omega_c, cavity_length")
        if self.finesse is not None:
            if not (math.isfinite(self.finesse) and self.finesse > 0):
                out.append("cavity.finesse: must be finite and > 0")
            if self.wavelength_L is None:
                out.append("cavity.wavelength_L: required alongside finesse")
        if self.wavelength_L is not None and not (
            math.isfinite(self.wavelength_L) and self.wavelength_L > 0
        ):
            out.append("cavity.wavelength_L: must be finite and > 0")
        for name in ("kappa", "omega_c", "cavity_length"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0):
                out.append(f"cavity.{name}: must be finite and > 0")
        return out


@dataclass(frozen=True)
class DeformationParams:
    """Dimensionless noncommutativity of the 2D oscillator.

    ``theta`` deforms [x, y], ``omega`` deforms [p_x, p_y].  The physical
    (dimensionful) values follow from a mechanical scale, see
    ``theta_tilde`` and ``omega_tilde``.
    """

    theta: float = 0.0
    omega: float = 0.0

    @property
    def product(self):
        return self.theta * self.omega

    @property
    def eps(self):
        """Correction to the [x, p] commutator, theta*omega/4."""
        return self.theta * self.omega / 4

    def theta_tilde(self, mech, constants=CODATA2018):
        """Position noncommutativity in m^2."""
        return self.theta * constants.hbar / (mech.mass * mech.omega_m)

    def omega_tilde(self, mech, constants=CODATA2018):
        """Momentum noncommutativity in (kg m/s)^2."""
        return self.omega * constants.hbar * mech.mass * mech.omega_m

    def problems(self):
        out = []
        if not (math.isfinite(self.theta) and self.theta >= 0):
            out.append("deformation.theta: must be finite and >= 0")
        if not (math.isfinite(self.omega) and self.omega >= 0):
            out.append("deformation.omega: must be finite and >= 0")
        return out


@dataclass(frozen=True)
class PulseSequence:
    """Optical pulse and protocol settings.

    ``lambda1``/``lambda2`` may be left as ``None`` when a cavity is available
    to supply the interaction length.  The photon statistics are given by
    ``alpha`` or ``n_p`` (or both, when they must agree).
    """

    lambda1: float | None = None
    lambda2: float | None = None
    cycles: int = 1
    alpha: complex | None = None
    n_p: float | None = None
    runs: int = 1

    @property
    def mean_photons(self):
        if self.n_p is not None:
            return float(self.n_p)
        return abs(self.alpha) ** 2

    @property
    def amplitude(self):
        if self.alpha is not None:
            return complex(self.alpha)
        return complex(math.sqrt(self.n_p))

    def problems(self):
        out = []
        for name in ("lambda1", "lambda2"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                out.append(f"pulse.{name}: must be finite")
        if not isinstance(self.cycles, int) or self.cycles < 1:
            out.append("pulse.cycles: cycles >= 1 (integer)")
        if not isinstance(self.runs, int) or self.runs < 1:
            out.append("pulse.runs: runs >= 1 (integer)")
        if self.alpha is None and self.n_p is None:
            out.append("pulse: supply n_p or alpha")
        if self.n_p is not None and not (math.isfinite(self.n_p) and self.n_p >= 0):
            out.append("pulse.n_p: must be finite and >= 0")
        if self.alpha is not None and self.n_p is not None:
            a2 = abs(self.alpha) ** 2
            if abs(a2 - self.n_p) > 1e-12 * max(1.0, a2):
                out.append(f"pulse.n_p: N_p must equal |alpha|^2 = {a2!r}, got {self.n_p!r}")
        return out


class InteractionLength(NamedTuple):
    value: float
    path: str  # "finesse" or "coupling"


def theta_tilde_area_from_natural(theta_tilde_gev2, constants=CODATA2018):
    """Convert a position noncommutativity from GeV^-2 to m^2."""
    if theta_tilde_gev2 < 0:
        raise DomainError("theta_tilde must be >= 0")
    return theta_tilde_gev2 * constants.gev_inverse_squared_in_m2


def omega_tilde_momentum2_from_natural(omega_tilde_mev2, constants=CODATA2018):
    """Convert a momentum noncommutativity from MeV^2 to (kg m/s)^2 via (MeV/c)^2."""
    if omega_tilde_mev2 < 0:
        raise DomainError("omega_tilde must be >= 0")
    mev_over_c = 1e6 * constants.electronvolt / constants.c
    return omega_tilde_mev2 * mev_over_c**2


def dimensionless_theta(theta_tilde, mech, constants=CODATA2018):
    if theta_tilde < 0:
        raise DomainError("theta_tilde must be >= 0")
    theta = theta_tilde * mech.mass * mech.omega_m / constants.hbar
    if not math.isfinite(theta):
        raise OverflowError("dimensionless theta is not finite")
    return theta


def dimensionless_omega(omega_tilde, mech, constants=CODATA2018):
    if omega_tilde < 0:
        raise DomainError("omega_tilde must be >= 0")
    omega = omega_tilde / (constants.hbar * mech.mass * mech.omega_m)
    if not math.isfinite(omega):
        raise OverflowError("dimensionless omega is not finite")
    return omega


def minimal_length_in_planck_units(deformation):
    """Minimal position uncertainty of the deformed algebra, in Planck lengths.

    Accepts a ``DeformationParams`` or the bare product theta*omega.
    """
    prod = deformation.product if isinstance(deformation, DeformationParams) else deformation
    if prod < 0:
        raise DomainError("theta*omega must be >= 0")
    return math.sqrt(prod / 4)


def effective_interaction_length(cav, mech, constants=CODATA2018):
    """Dimensionless opto-mechanical interaction length per pulse.

    Uses 4 F sqrt(hbar) / (lambda_L sqrt(m omega_m)) when the finesse is known,
    otherwise (g0 + h0) / (2 kappa) with g0 = h0.
    """
    if cav.finesse is not None and cav.wavelength_L is not None:
        value = 4 * cav.finesse * math.sqrt(constants.hbar) / (
            cav.wavelength_L * math.sqrt(mech.mass * mech.omega_m)
        )
        return InteractionLength(value, "finesse")
    if cav.has_coupling_route:
        g0 = cav.coupling_rate(mech, constants)
        return InteractionLength((g0 + g0) / (2 * cav.kappa), "coupling")
    raise ConfigError("cavity: supply finesse and wavelength_L, or kappa, omega_c, cavity_length")


@dataclass(frozen=True)
class Config:
    """A validated parameter set with derived quantities filled in."""

    mech: MechanicalParams | None = None
    cav: CavityParams | None = None
    deformation: DeformationParams | None = None
    pulse: PulseSequence | None = None
    constants: PhysicalConstants = CODATA2018
    derived: dict = field(default_factory=dict, compare=False)

    @property
    def lambdas(self):
        """(lambda1, lambda2), falling back to the cavity interaction length."""
        l1 = self.pulse.lambda1 if self.pulse else None
        l2 = self.pulse.lambda2 if self.pulse else None
        if l1 is None or l2 is None:
            lam = self.derived.get("interaction_length")
            if lam is None:
                raise ConfigError("pulse.lambda1/lambda2 missing and no cavity to derive them")
            l1 = lam if l1 is None else l1
            l2 = lam if l2 is None else l2
        return l1, l2


def validate(mech=None, cav=None, deformation=None, pulse=None, constants=CODATA2018):
    """Check every supplied record and return a ``Config``.

    Raises ``ConfigError`` listing all violations found.
    """
    errors = list(constants.problems())
    for rec in (mech, cav, deformation, pulse):
        if rec is not None:
            errors.extend(rec.problems())
    if cav is not None and mech is None:
        errors.append("mechanical: required to evaluate the cavity interaction length")
    if errors:
        raise ConfigError(errors)

    derived = {}
    if cav is not None:
        lam = effective_interaction_length(cav, mech, constants)
        derived["interaction_length"] = lam.value
        derived["interaction_path"] = lam.path
        if cav.has_coupling_route:
            derived["g0"] = derived["h0"] = cav.coupling_rate(mech, constants)
    if deformation is not None:
        derived["eps"] = deformation.eps
        derived["minimal_length_planck"] = minimal_length_in_planck_units(deformation)
        if mech is not None:
            derived["theta_tilde"] = deformation.theta_tilde(mech, constants)
            derived["omega_tilde"] = deformation.omega_tilde(mech, constants)
    return Config(mech, cav, deformation, pulse, constants, derived)


_SCHEMA = {
    "mechanical": {"mass_kg", "omega_m_rad_s"},
    "cavity": {"finesse", "wavelength_m", "kappa_per_s", "omega_c_rad_s", "length_m"},
    "deformation": {"theta", "omega", "theta_tilde_gev2", "omega_dimensionless"},
    "pulse": {"lambda1", "lambda2", "cycles", "n_photon", "alpha", "runs"},
}


def _pick(section, data, required=()):
    unknown = set(data) - _SCHEMA[section]
    errors = [f"{section}.{k}: unknown key" for k in sorted(unknown)]
    errors += [f"{section}.{k}: required key missing" for k in required if k not in data]
    return errors


def _as_complex(v):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    return complex(v)


def config_from_dict(data, constants=CODATA2018):
    """Build a validated ``Config`` from the JSON configuration layout.

    Unknown keys at any level are an error, so that a typo never silently
    falls back to a default.
    """
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be an object")
    errors = [f"{k}: unknown section" for k in sorted(set(data) - set(_SCHEMA))]
    for section, body in data.items():
        if section in _SCHEMA and not isinstance(body, dict):
            errors.append(f"{section}: must be an object")
    if errors:
        raise ConfigError(errors)

    mech = cav = deformation = pulse = None
    if "mechanical" in data:
        d = data["mechanical"]
        errors += _pick("mechanical", d, ("mass_kg", "omega_m_rad_s"))
        if not errors:
            mech = MechanicalParams(float(d["mass_kg"]), float(d["omega_m_rad_s"]))
    if "cavity" in data:
        d = data["cavity"]
        errors += _pick("cavity", d)
        opt = lambda k: None if d.get(k) is None else float(d[k])  # noqa: E731
        cav = CavityParams(
            finesse=opt("finesse"),
            wavelength_L=opt("wavelength_m"),
            kappa=opt("kappa_per_s"),
            omega_c=opt("omega_c_rad_s"),
            cavity_length=opt("length_m"),
        )
    if "deformation" in data:
        d = data["deformation"]
        errors += _pick("deformation", d)
        natural = "theta_tilde_gev2" in d or "omega_dimensionless" in d
        if natural and ({"theta", "omega"} & set(d)):
            errors.append("deformation: use either {theta, omega} or {theta_tilde_gev2, omega_dimensionless}")
        elif natural:
            missing = {"theta_tilde_gev2", "omega_dimensionless"} - set(d)
            errors += [f"deformation.{k}: required key missing" for k in sorted(missing)]
            if not missing and mech is None:
                errors.append("deformation.theta_tilde_gev2: needs the mechanical section")
            if not missing and mech is not None:
                try:
                    area = theta_tilde_area_from_natural(float(d["theta_tilde_gev2"]), constants)
                    theta = dimensionless_theta(area, mech, constants)
                    deformation = DeformationParams(theta, float(d["omega_dimensionless"]))
                except (DomainError, OverflowError) as exc:
                    errors.append(f"deformation.theta_tilde_gev2: {exc}")
        else:
            deformation = DeformationParams(float(d.get("theta", 0.0)), float(d.get("omega", 0.0)))
    if "pulse" in data:
        d = data["pulse"]
        errors += _pick("pulse", d)
        cycles, runs = d.get("cycles", 1), d.get("runs", 1)
        # Integral floats such as 1e2 are accepted for counts.
        if isinstance(runs, float) and runs.is_integer():
            runs = int(runs)
        if isinstance(cycles, float) and cycles.is_integer():
            cycles = int(cycles)
        pulse = PulseSequence(
            lambda1=None if d.get("lambda1") is None else float(d["lambda1"]),
            lambda2=None if d.get("lambda2") is None else float(d["lambda2"]),
            cycles=cycles,
            alpha=None if d.get("alpha") is None else _as_complex(d["alpha"]),
            n_p=None if d.get("n_photon") is None else float(d["n_photon"]),
            runs=runs,
        )
    if errors:
        raise ConfigError(errors)
    return validate(mech, cav, deformation, pulse, constants)


def load_config(path, constants=CODATA2018):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from exc
    return config_from_dict(data, constants)
