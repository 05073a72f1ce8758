"""Command-line entry point.

Exit codes: 0 success, 2 usage, 3 configuration, 4 tolerance, 5 truncation,
1 anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import feasibility, fock, loop, phase
from .exceptions import ConfigError, NCOptomechError
from .units import DeformationParams, load_config

LOOP_TOL = 1e-8
COMMUTATOR_TOL = 1e-12
ORACLE_TOL = 1e-9


def _c(z):
    return [z.real, z.imag]


def _emit(payloads, out):
    text = "".join(json.dumps(p) + "\n" for p in payloads)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _deformation(cfg):
    return cfg.deformation or DeformationParams()


def _isotropic(cfg):
    l1, l2 = cfg.lambdas
    if l1 != l2:
        raise ConfigError("pulse: lambda1 and lambda2 must be equal for the isotropic closed form")
    return l1


def cmd_verify_loop(args):
    cfg = load_config(args.config)
    if cfg.pulse is None:
        raise ConfigError("pulse: section required")
    spec = fock.FockSpec(args.dim, 2, args.margin)
    builder = loop.LoopBuilder(cfg.pulse, _deformation(cfg), spec, method=args.method)
    out, worst = [], 0.0
    for n in range(args.n_max + 1):
        res = loop.extract_loop_phase(builder.unitary(n), n)
        pred = loop.predicted_loop_phase(n, cfg.pulse, _deformation(cfg))
        diff = abs(math.remainder(res.extracted_phase - pred, 2 * math.pi))
        worst = max(worst, diff)
        out.append({
            "n": n,
            "extracted_phase": res.extracted_phase,
            "predicted_phase": pred,
            "identity_residual": res.identity_residual,
            "leakage": res.leakage,
        })
    _emit(out, args.out)
    return 4 if worst > LOOP_TOL else 0


def cmd_commutators(args):
    spec = fock.FockSpec(args.dim, 2, args.margin)
    res = fock.commutator_residuals(spec, DeformationParams(args.theta, args.omega))
    ok = max(res.values()) <= COMMUTATOR_TOL
    _emit([{
        "theta": args.theta, "omega": args.omega, "dim": args.dim, "margin": args.margin,
        "residuals": res, "tolerance": COMMUTATOR_TOL, "pass": ok,
    }], args.out)
    return 0 if ok else 4


def cmd_phase(args):
    cfg = load_config(args.config)
    if cfg.pulse is None:
        raise ConfigError("pulse: section required")
    lam = _isotropic(cfg)
    sig = phase.phase_signal(cfg.pulse.amplitude, lam, _deformation(cfg), cfg.pulse.cycles)
    _emit([{
        "gamma": sig.gamma,
        "theta_complex": _c(sig.theta_complex),
        "theta_magnitude": sig.theta_magnitude,
        "theta_modulus": sig.theta_modulus,
        "mean_field_qm": _c(sig.mean_field_qm),
        "mean_field_deformed": _c(sig.mean_field_deformed),
    }], args.out)
    return 0


def cmd_oracle(args):
    cfg = load_config(args.config)
    if cfg.pulse is None:
        raise ConfigError("pulse: section required")
    lam = _isotropic(cfg)
    d = _deformation(cfg)
    pulse = cfg.pulse
    if pulse.lambda1 is None or pulse.lambda2 is None:
        pulse = replace(pulse, lambda1=lam, lambda2=lam)
    summed = loop.mean_field_photon_sum(pulse, d, args.photon_cutoff, mode=args.mode)
    closed = phase.mean_field_deformed(pulse.amplitude, lam, d, pulse.cycles)
    rel = abs(summed.value - closed) / abs(closed) if closed != 0 else abs(summed.value)
    _emit([{
        "photon_sum": _c(summed.value),
        "closed_form": _c(closed),
        "relative_error": rel,
        "cutoff_used": summed.cutoff_used,
        "tail_mass": summed.tail_mass,
        "mode": args.mode,
    }], args.out)
    return 0 if rel <= ORACLE_TOL else 4


def _scenario(args):
    if args.scenario:
        return feasibility.PRESETS[args.scenario]
    if not args.config:
        raise ConfigError("give --scenario or --config")
    cfg = load_config(args.config)
    missing = [s for s in ("mech", "cav", "pulse") if getattr(cfg, s) is None]
    if missing:
        raise ConfigError([f"{m}: section required for a feasibility scenario" for m in missing])
    return feasibility.Scenario(Path(args.config).stem, cfg.mech, cfg.cav, cfg.pulse, _deformation(cfg))


def _report_json(sc, rep):
    return {
        "scenario_name": sc.name,
        "theta_omega": sc.deformation.product,
        "gamma": rep.gamma,
        "theta_signal": rep.theta_signal,
        "delta_phi": rep.delta_phi,
        "snr": rep.snr,
        "snr_ideal": rep.snr_ideal,
        "detectable_theta_omega": None if math.isnan(rep.detectable_theta_omega) else rep.detectable_theta_omega,
        "minimal_length_planck": None if math.isnan(rep.minimal_length_planck) else rep.minimal_length_planck,
    }


def cmd_feasibility(args):
    sc = _scenario(args)
    _emit([_report_json(sc, feasibility.snr(sc))], args.out)
    return 0


def _load_grid(path, base):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"grid: cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("grid: top level must be an object")
    unknown = set(data) - {"axes", "max_points"}
    if unknown:
        raise ConfigError([f"grid.{k}: unknown key" for k in sorted(unknown)])
    axes = []
    for i, ax in enumerate(data.get("axes", [])):
        if not isinstance(ax, dict) or set(ax) != {"path", "values"}:
            raise ConfigError(f"grid.axes[{i}]: needs exactly the keys path and values")
        values = ax["values"]
        if ax["path"] in ("pulse.runs", "pulse.cycles"):
            values = [int(v) if float(v).is_integer() else v for v in values]
        axes.append((ax["path"], values))
    return feasibility.SweepGrid(base, tuple(axes), int(data.get("max_points", 10**7)))


def cmd_sweep(args):
    grid = _load_grid(args.grid, _scenario(args))
    rows = feasibility.sweep(grid)
    with open(args.out, "w", newline="") as fh:
        feasibility.write_csv(rows, fh)
    for row in rows:
        if row.error:
            print(f"{row.scenario.name}: {row.error}", file=sys.stderr)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="ncoptomech", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON output to this file instead of stdout")

    s = sub.add_parser("verify-loop", parents=[common], help="brute-force loop phase per photon number")
    s.add_argument("--config", required=True)
    s.add_argument("--n-max", type=int, default=3)
    s.add_argument("--dim", type=int, default=32)
    s.add_argument("--margin", type=int, default=2)
    s.add_argument("--method", choices=["factorized", "dense"], default="factorized",
                   help="Kronecker-factorized or full two-mode exponentials")
    s.set_defaults(func=cmd_verify_loop)

    s = sub.add_parser("commutators", parents=[common], help="interior commutator residuals")
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--omega", type=float, required=True)
    s.add_argument("--dim", type=int, default=16)
    s.add_argument("--margin", type=int, default=2)
    s.set_defaults(func=cmd_commutators)

    s = sub.add_parser("phase", parents=[common], help="closed-form phase observables")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_phase)

    s = sub.add_parser("oracle", parents=[common], help="photon-number sum against the closed form")
    s.add_argument("--config", required=True)
    s.add_argument("--photon-cutoff", type=int)
    s.add_argument("--mode", choices=["closed_form_blocks", "brute_force"], default="closed_form_blocks")
    s.set_defaults(func=cmd_oracle)

    for name, fn, helptext in (
        ("feasibility", cmd_feasibility, "sensitivity report for one scenario"),
        ("sweep", cmd_sweep, "sensitivity over a parameter grid, as CSV"),
    ):
        s = sub.add_parser(name, parents=[] if name == "sweep" else [common], help=helptext)
        g = s.add_mutually_exclusive_group(required=True)
        g.add_argument("--scenario", choices=sorted(feasibility.PRESETS))
        g.add_argument("--config")
        if name == "sweep":
            s.add_argument("--grid", required=True)
            s.add_argument("--out", required=True, help="CSV destination")
        s.set_defaults(func=fn)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NCOptomechError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
