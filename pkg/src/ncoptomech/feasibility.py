"""Shot-noise sensitivity of the loop protocol and parameter sweeps."""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, replace

from scipy import optimize

from .exceptions import ConfigError, NCOptomechError, SensitivityUnreachable
from .phase import gamma_from_experiment, signal_from_angle
from .units import (
    CODATA2018,
    CavityParams,
    DeformationParams,
    MechanicalParams,
    PulseSequence,
    minimal_length_in_planck_units,
)


@dataclass(frozen=True)
class Scenario:
    name: str
    mech: MechanicalParams
    cav: CavityParams
    pulse: PulseSequence
    deformation: DeformationParams = DeformationParams()

    def problems(self):
        out = [] if self.name else ["scenario.name: must be non-empty"]
        for rec in (self.mech, self.cav, self.pulse, self.deformation):
            out.extend(rec.problems())
        if not out and not self.pulse.mean_photons > 0:
            out.append("pulse.n_p: must be > 0 for a shot-noise estimate")
        return out

    def check(self):
        errs = self.problems()
        if errs:
            raise ConfigError(errs)
        return self


@dataclass(frozen=True)
class FeasibilityReport:
    gamma: float
    theta_signal: float
    delta_phi: float
    snr: float
    snr_ideal: float
    detectable_theta_omega: float  # nan when unreachable
    minimal_length_planck: float  # at detectable_theta_omega


def _reference(name, finesse, theta_omega):
    return Scenario(
        name=name,
        mech=MechanicalParams.from_frequency(1e-7, 1e5),
        cav=CavityParams(finesse=finesse, wavelength_L=1064e-9),
        pulse=PulseSequence(cycles=1, n_p=1e6, runs=100),
        deformation=DeformationParams(theta=theta_omega, omega=1.0),
    )


# Published reference settings: a 100 kHz, 0.1 mg oscillator read out with
# 10^6-photon pulses at 1064 nm over 100 runs, at low and at high finesse.
PRESETS = {
    "paper-a": _reference("paper-a", 0.1, 1e12),
    "paper-b": _reference("paper-b", 1e5, 1.0),
}


def phase_uncertainty(n_p, runs):
    """Shot-noise phase resolution 1/sqrt(N_p N_r)."""
    if not n_p > 0 or not runs >= 1:
        raise ValueError("need n_p > 0 and runs >= 1")
    return 1 / math.sqrt(n_p * runs)


def _gamma_per_unit(scenario, constants):
    return gamma_from_experiment(
        DeformationParams(1.0, 1.0), scenario.mech, scenario.cav, scenario.pulse.cycles, constants
    )


def detectable_theta_omega(scenario, target_snr=1.0, constants=CODATA2018):
    """Smallest theta*omega whose signal reaches ``target_snr`` times the shot noise.

    The deformation of ``scenario`` is ignored.  The signal
    g + 2 N_p sin g is inverted by bisection on g in (0, pi/2], where it is
    strictly increasing, then mapped back to theta*omega.
    """
    scenario.check()
    n_p = scenario.pulse.mean_photons
    target = target_snr * phase_uncertainty(n_p, scenario.pulse.runs)

    def excess(g):
        return g + 2 * n_p * math.sin(g) - target

    top = excess(math.pi / 2) + target
    if excess(math.pi / 2) < 0:
        raise SensitivityUnreachable(
            f"signal saturates at {top:.3e} < required {target:.3e} on g in (0, pi/2]",
            boundary_signal=top,
        )
    g = optimize.bisect(excess, 0.0, math.pi / 2, xtol=1e-300, rtol=1e-13, maxiter=400)
    return g / _gamma_per_unit(scenario, constants)


def snr(scenario, target_snr=1.0, constants=CODATA2018):
    """Full sensitivity report for one scenario."""
    scenario.check()
    p = scenario.pulse
    n_p = p.mean_photons
    gamma = gamma_from_experiment(scenario.deformation, scenario.mech, scenario.cav, p.cycles, constants)
    signal = signal_from_angle(gamma, n_p)
    dphi = phase_uncertainty(n_p, p.runs)
    try:
        star = detectable_theta_omega(scenario, target_snr, constants)
        lmin = minimal_length_in_planck_units(star)
    except SensitivityUnreachable:
        star = lmin = math.nan
    return FeasibilityReport(
        gamma=gamma,
        theta_signal=signal,
        delta_phi=dphi,
        snr=signal / dphi,
        snr_ideal=p.cycles * math.sqrt(n_p * p.runs),
        detectable_theta_omega=star,
        minimal_length_planck=lmin,
    )


_SECTIONS = {"mech", "cav", "pulse", "deformation"}


def _with_value(scenario, path, value):
    section, _, attr = path.partition(".")
    if section not in _SECTIONS:
        raise ConfigError(f"sweep axis {path!r}: section must be one of {sorted(_SECTIONS)}")
    rec = getattr(scenario, section)
    if not hasattr(rec, attr):
        raise ConfigError(f"sweep axis {path!r}: no field {attr!r}")
    changes = {attr: value}
    if path == "pulse.n_p":
        changes["alpha"] = None
    elif path == "pulse.alpha":
        changes["n_p"] = None
    return replace(scenario, **{section: replace(rec, **changes)})


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian grid over scenario fields, addressed as ``"section.field"``.

    Sections are ``mech``, ``cav``, ``pulse`` and ``deformation``.
    """

    base: Scenario
    axes: tuple
    max_points: int = 10**7

    def __post_init__(self):
        axes = tuple((str(p), tuple(v)) for p, v in self.axes)
        object.__setattr__(self, "axes", axes)
        errors = []
        if not axes:
            errors.append("sweep: at least one axis is required")
        for path, values in axes:
            if not values:
                errors.append(f"sweep axis {path!r}: empty value list")
            for v in values:
                try:
                    rec = getattr(_with_value(self.base, path, v), path.partition(".")[0])
                    errors += [f"sweep axis {path}={v!r}: {e}" for e in rec.problems()]
                except ConfigError as exc:
                    errors += exc.errors
                    break
        if self.size > self.max_points:
            errors.append(f"sweep: {self.size} points exceeds the limit of {self.max_points}")
        if errors:
            raise ConfigError(errors)

    @property
    def size(self):
        return math.prod(len(v) for _, v in self.axes)

    def points(self):
        """Yield (index tuple, scenario) in lexicographic index order."""
        ranges = [range(len(v)) for _, v in self.axes]
        for idx in itertools.product(*ranges):
            sc = self.base
            for (path, values), i in zip(self.axes, idx):
                sc = _with_value(sc, path, values[i])
            name = f"{self.base.name}[{','.join(map(str, idx))}]"
            yield idx, replace(sc, name=name)


@dataclass(frozen=True)
class SweepRow:
    index: tuple
    scenario: Scenario
    report: FeasibilityReport | None
    error: str | None = None


def sweep(grid, target_snr=1.0, constants=CODATA2018):
    """Evaluate every grid point; failures are kept in their row."""
    rows = []
    for idx, sc in grid.points():
        try:
            rows.append(SweepRow(idx, sc, snr(sc, target_snr, constants)))
        except (NCOptomechError, ValueError, ArithmeticError) as exc:
            rows.append(SweepRow(idx, sc, None, f"{type(exc).__name__}: {exc}"))
    return rows


CSV_COLUMNS = (
    "scenario_name", "finesse", "mass_kg", "omega_m_rad_s", "wavelength_m", "n_photon",
    "runs", "cycles", "theta", "omega", "theta_omega", "gamma", "theta_signal", "delta_phi",
    "snr", "snr_ideal", "detectable_theta_omega", "minimal_length_planck",
)


def _num(x):
    return "nan" if x is None else format(float(x), ".16e")


def csv_record(row):
    sc, rep = row.scenario, row.report
    nan = math.nan
    values = [
        sc.cav.finesse, sc.mech.mass, sc.mech.omega_m, sc.cav.wavelength_L,
        sc.pulse.mean_photons, sc.pulse.runs, sc.pulse.cycles,
        sc.deformation.theta, sc.deformation.omega, sc.deformation.product,
    ]
    if rep is None:
        values += [nan] * 7
    else:
        values += [rep.gamma, rep.theta_signal, rep.delta_phi, rep.snr, rep.snr_ideal,
                   rep.detectable_theta_omega, rep.minimal_length_planck]
    return [sc.name] + [_num(v) for v in values]


def write_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow(csv_record(row))
