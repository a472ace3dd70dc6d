"""Command-line interface: seeded runs, file I/O, structured reports.

Subcommands: background, deviation, bell, schrodinger, calibrate.
Every option can also be supplied through --config <json>; explicit
flags win over config values, which win over built-in defaults.  Reports
embed the resolved-config hash and seed so a run can be replayed from
its report alone, and report files are byte-identical across reruns of
the same config (wall time is printed, not written).

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from . import __version__
from . import background as bg
from . import bell as bl
from . import deviation as dv
from . import probability as pr
from .errors import (
    CalibrationError,
    NormalizationError,
    NumericalError,
    ParameterError,
)

_DEFAULTS: dict[str, dict] = {
    "background": {
        "n_modes": 16,
        "sigma": 1e-4,
        "omega_min": 0.5,
        "omega_max": 2.0,
        "h_max": 1e-3,
        "seed": 0,
        "calibrate": None,
        "out": "modes.json",
    },
    "deviation": {
        "modes": None,
        "r1010": None,
        "position": "0,0,0",
        "ell0": "1,0,0",
        "elldot0": "0,0,0",
        "tau_end": 2.0 * math.pi,
        "dt": 0.01,
        "c": 1.0,
        "seed": 0,
        "out": "trajectory.csv",
    },
    "bell": {
        "angles": "0,-1.5707963267948966,-0.7853981633974483,0.7853981633974483",
        "trials": 100000,
        "analytic": False,
        "scan": False,
        "modes": None,
        "t_extent": None,
        "l_extent": None,
        "seed": 0,
        "out": "bell.json",
    },
    "schrodinger": {
        "grid_n": 512,
        "x_min": 0.0,
        "x_max": 10.0,
        "momentum": 0.1,
        "mass": 1.0,
        "sigma": 1.0,
        "dt": 1e-3,
        "variant": "2S0",
        "field_out": None,
        "seed": 0,
        "out": "schrodinger.json",
    },
    "calibrate": {
        "modes": None,
        "target": 1.0,
        "seed": 0,
        "out": "calibrated_modes.json",
    },
}


def _parse_floats(text: str, count: int, what: str) -> tuple[float, ...]:
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != count:
        raise ParameterError(f"{what} needs {count} comma-separated values: {text!r}")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ParameterError(f"{what} has a non-numeric entry: {text!r}") from exc
    if not all(np.isfinite(v) for v in values):
        raise ParameterError(f"{what} must be finite: {text!r}")
    return values


def _resolve(command: str, args: argparse.Namespace) -> dict:
    """Layer defaults, then --config values, then explicit flags."""
    config = dict(_DEFAULTS[command])
    if getattr(args, "config", None) is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                loaded = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParameterError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ParameterError("config must be a JSON object")
        unknown = sorted(set(loaded) - set(config))
        if unknown:
            raise ParameterError(
                f"unknown config keys for {command}: {', '.join(unknown)}"
            )
        config.update(loaded)
    for key in _DEFAULTS[command]:
        value = getattr(args, key, None)
        if isinstance(_DEFAULTS[command][key], bool):
            if value:
                config[key] = True
        elif value is not None:
            config[key] = value
    return config


def _input_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _write_json(path: str, obj: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _load_or_flat_ensemble(config: dict) -> bg.BackgroundEnsemble:
    if config["modes"] is not None:
        return bg.load_ensemble(config["modes"])
    return bg.BackgroundEnsemble(
        modes=(), sigma=0.0, seed=int(config["seed"]), h_max=1e-3
    )


def cmd_background(config: dict) -> int:
    ensemble = bg.sample_ensemble(
        n_modes=int(config["n_modes"]),
        sigma=float(config["sigma"]),
        omega_min=float(config["omega_min"]),
        omega_max=float(config["omega_max"]),
        h_max=float(config["h_max"]),
        seed=int(config["seed"]),
    )
    if config["calibrate"] is not None:
        try:
            ensemble = bg.calibrate_action(ensemble, float(config["calibrate"]))
        except CalibrationError as exc:
            print(f"warning: calibration skipped: {exc}", file=sys.stderr)
    harmonic, field_eq = bg.ensemble_residuals(ensemble)
    bg.save_ensemble(ensemble, config["out"])
    print(f"modes: {len(ensemble.modes)}")
    print(f"max_harmonic_residual: {harmonic:.17g}")
    print(f"max_field_eq_residual: {field_eq:.17g}")
    print(f"total_action: {bg.total_action(ensemble):.17g}")
    print(f"wrote: {config['out']}")
    return 0


def cmd_calibrate(config: dict) -> int:
    if config["modes"] is None:
        raise ParameterError("calibrate needs --modes <file>")
    ensemble = bg.load_ensemble(config["modes"])
    calibrated = bg.calibrate_action(ensemble, float(config["target"]))
    bg.save_ensemble(calibrated, config["out"])
    print(f"total_action: {bg.total_action(calibrated):.17g}")
    print(f"wrote: {config['out']}")
    return 0


def cmd_deviation(config: dict) -> int:
    ell0 = _parse_floats(config["ell0"], 3, "--ell0")
    elldot0 = _parse_floats(config["elldot0"], 3, "--elldot0")
    state0 = dv.DeviationState(tau=0.0, ell=ell0, ell_dot=elldot0)
    if config["modes"] is not None:
        ensemble = bg.load_ensemble(config["modes"])
        position = _parse_floats(config["position"], 3, "--position")

        def r_fn(tau: float) -> float:
            return bg.riemann_r1010(ensemble, (tau, *position))

    else:
        r_const = 1.0 if config["r1010"] is None else float(config["r1010"])

        def r_fn(tau: float) -> float:
            return r_const

    trajectory = dv.integrate_deviation(
        state0,
        r_fn,
        tau_end=float(config["tau_end"]),
        dt=float(config["dt"]),
        c=float(config["c"]),
    )
    dv.write_trajectory_csv(trajectory, config["out"])
    print(f"steps: {len(trajectory) - 1}")
    print(f"unstable: {trajectory.unstable}")
    print(f"wrote: {config['out']}")
    return 0


def cmd_bell(config: dict) -> int:
    angles = _parse_floats(config["angles"], 4, "--angles")
    settings = bl.BellSettings.from_angles(*angles)
    seed = int(config["seed"])
    n_trials = int(config["trials"])

    if config["scan"]:
        best, value = bl.maximize_observable(bl.cosine_correlator)
        angles = best.angles
        settings = best

    pair_angles = [
        ("AB", settings.a, settings.b),
        ("A'B", settings.a_prime, settings.b),
        ("AB'", settings.a, settings.b_prime),
        ("A'B'", settings.a_prime, settings.b_prime),
    ]
    if config["analytic"] or config["scan"]:
        correlations = {
            name: bl.cosine_correlator(first.angle, second.angle)
            for name, first, second in pair_angles
        }
        metric_factor_mean = 1.0
        reported_trials = 0
    else:
        ensemble = _load_or_flat_ensemble(config)
        t_extent = config["t_extent"]
        l_extent = config["l_extent"]
        estimates = {}
        for stream, (name, first, second) in enumerate(pair_angles):
            estimates[name] = bl.correlation_mc(
                ensemble,
                first,
                second,
                n_trials=n_trials,
                seed=seed,
                stream=stream,
                t_extent=None if t_extent is None else float(t_extent),
                l_extent=None if l_extent is None else float(l_extent),
            )
        correlations = {name: est.mean for name, est in estimates.items()}
        metric_factor_mean = float(
            np.mean([est.metric_factor_mean for est in estimates.values()])
        )
        reported_trials = n_trials

    lookup = {
        (first.angle, second.angle): correlations[name]
        for name, first, second in pair_angles
    }
    value = bl.bell_observable(settings, lambda x, y: lookup[(x, y)])
    bound = bl.check_bound(value)

    report = {
        "angles": list(angles),
        "M": {name: correlations[name] for name, _, _ in pair_angles},
        "S": value,
        "bound": bl.SQRT2,
        "within_bound": bound.within_bound,
        "n_trials": reported_trials,
        "seed": seed,
        "metric_factor_mean": metric_factor_mean,
        "command": "bell",
        "tool_version": __version__,
        "input_hash": _input_hash(config),
    }
    _write_json(config["out"], report)
    print(f"S: {value:.17g}")
    print(f"within_bound: {bound.within_bound}")
    print(f"wrote: {config['out']}")
    return 0


def cmd_schrodinger(config: dict) -> int:
    variant = str(config["variant"])
    if variant not in ("2S0", "S0"):
        raise ParameterError(f"variant must be '2S0' or 'S0', got {variant!r}")
    grid = pr.Grid1D(float(config["x_min"]), float(config["x_max"]), int(config["grid_n"]))
    model = pr.IntervalModel(sigma=float(config["sigma"]), mass=float(config["mass"]))
    momentum = float(config["momentum"])
    dt = float(config["dt"])
    divisor = model.hbar_eff if variant == "2S0" else model.s0

    field = pr.plane_wave_field(
        grid, momentum, model.mass, model.s0, dt, phase_divisor=divisor
    )
    potential = np.zeros(grid.n)
    residual = pr.schrodinger_residual(field, potential, model.mass, model.s0)
    if not np.isfinite(residual):
        raise NumericalError(f"wave-operator residual is not finite: {residual}")
    classical = pr.free_particle_classical(grid, momentum, model.mass, dt)
    hj = pr.hamilton_jacobi_residual(classical)
    continuity = pr.continuity_residual(classical)
    if not all(np.isfinite(v) for v in (hj, continuity)):
        raise NumericalError("residual evaluation produced a non-finite value")

    if config["field_out"] is not None:
        pr.write_wavefield_csv(field, config["field_out"])

    report = {
        "residual_max": residual,
        "grid_n": grid.n,
        "dt": dt,
        "variant": variant,
        "hj_residual_max": hj,
        "continuity_residual_max": continuity,
        "command": "schrodinger",
        "tool_version": __version__,
        "input_hash": _input_hash(config),
        "seed": int(config["seed"]),
    }
    _write_json(config["out"], report)
    print(f"residual_max: {residual:.17g}")
    print(f"wrote: {config['out']}")
    return 0


_HANDLERS = {
    "background": cmd_background,
    "deviation": cmd_deviation,
    "bell": cmd_bell,
    "schrodinger": cmd_schrodinger,
    "calibrate": cmd_calibrate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravbell",
        description="Stochastic weak-field background, deviation dynamics, "
        "interval probabilities, and Bell correlations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="64-bit RNG seed")
        p.add_argument("--out", type=str, default=None, help="output file path")
        p.add_argument("--config", type=str, default=None, help="JSON config file")

    p = sub.add_parser("background", help="sample a plane-wave mode ensemble")
    p.add_argument("--n-modes", dest="n_modes", type=int, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--omega-min", dest="omega_min", type=float, default=None)
    p.add_argument("--omega-max", dest="omega_max", type=float, default=None)
    p.add_argument("--h-max", dest="h_max", type=float, default=None)
    p.add_argument(
        "--calibrate", type=float, default=None, help="rescale to this total action"
    )
    common(p)

    p = sub.add_parser("deviation", help="integrate the deviation oscillator")
    p.add_argument("--modes", type=str, default=None, help="mode-ensemble JSON file")
    p.add_argument(
        "--r1010", type=float, default=None, help="constant curvature (no mode file)"
    )
    p.add_argument("--position", type=str, default=None, help="x,y,z of the pair")
    p.add_argument("--ell0", type=str, default=None, help="initial separation x,y,z")
    p.add_argument("--elldot0", type=str, default=None, help="initial velocity x,y,z")
    p.add_argument("--tau-end", dest="tau_end", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    common(p)

    p = sub.add_parser("bell", help="Bell observable from four polarizer angles")
    p.add_argument("--angles", type=str, default=None, help="a,a',b,b' in radians")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--analytic", action="store_true", help="use the cosine correlator")
    p.add_argument(
        "--scan", action="store_true", help="maximize the observable over angles"
    )
    p.add_argument("--modes", type=str, default=None, help="mode-ensemble JSON file")
    p.add_argument("--t-extent", dest="t_extent", type=float, default=None)
    p.add_argument("--l-extent", dest="l_extent", type=float, default=None)
    common(p)

    p = sub.add_parser("schrodinger", help="wave-equation residual diagnostics")
    p.add_argument("--grid-n", dest="grid_n", type=int, default=None)
    p.add_argument("--x-min", dest="x_min", type=float, default=None)
    p.add_argument("--x-max", dest="x_max", type=float, default=None)
    p.add_argument("--momentum", type=float, default=None)
    p.add_argument("--mass", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--variant", type=str, default=None, help="phase divisor: 2S0 or S0")
    p.add_argument("--field-out", dest="field_out", type=str, default=None)
    common(p)

    p = sub.add_parser("calibrate", help="rescale a saved ensemble to a target action")
    p.add_argument("--modes", type=str, default=None, help="mode-ensemble JSON file")
    p.add_argument("--target", type=float, default=None)
    common(p)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        config = _resolve(args.command, args)
        rc = _HANDLERS[args.command](config)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, NormalizationError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    print(f"elapsed_s: {time.perf_counter() - started:.6f}")
    return rc


def run() -> None:
    sys.exit(main())
