"""Random weak-field gravitational backgrounds built from plane waves.

A background is a finite sum of transverse-traceless plane-wave modes on
flat spacetime with signature (+, -, -, -).  Each mode carries a unit
propagation direction, an angular frequency, two polarization amplitudes
and a phase offset; the metric perturbation of a single mode is

    h_mn(x) = 2 e_mn cos(omega t - omega n.x + phase0)

with e_mn the transverse-traceless polarization tensor.  The module
provides ensemble sampling, metric evaluation, gauge and field-equation
diagnostics, the curvature component that drives geodesic deviation, and
an action-based amplitude calibration.

Units are geometric: c = G = 1, frequencies and lengths are O(1).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CalibrationError, ParameterError

__all__ = [
    "MINKOWSKI",
    "GwMode",
    "BackgroundEnsemble",
    "transverse_basis",
    "polarization_tensor",
    "wave_vector",
    "sample_ensemble",
    "validate_mode",
    "validate_ensemble",
    "evaluate_h",
    "spatial_strain",
    "metric_at",
    "plane_wave_residuals",
    "gauge_residuals",
    "ensemble_residuals",
    "riemann_r1010",
    "mode_action",
    "total_action",
    "calibrate_action",
    "save_ensemble",
    "load_ensemble",
    "ensemble_to_dict",
    "ensemble_from_dict",
]

#: Flat metric, signature (+, -, -, -).
MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])

# Unit-norm and constraint tolerances used by the validators.
_TOL = 1e-12


@dataclass(frozen=True)
class GwMode:
    """One transverse-traceless plane-wave mode.

    Attributes
    ----------
    direction : tuple of 3 floats
        Unit propagation direction n.
    omega : float
        Angular frequency, strictly positive.
    amp_plus, amp_cross : float
        Polarization amplitudes in the transverse basis attached to
        ``direction`` by :func:`transverse_basis`.
    phase0 : float
        Phase offset in radians, in [0, 2*pi).
    """

    direction: tuple[float, float, float]
    omega: float
    amp_plus: float
    amp_cross: float
    phase0: float


@dataclass(frozen=True)
class BackgroundEnsemble:
    """A sampled collection of modes plus the parameters that produced it."""

    modes: tuple[GwMode, ...]
    sigma: float
    seed: int
    h_max: float


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ParameterError("cannot normalize a zero vector")
    return v / n


def transverse_basis(direction: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal pair (u, v) transverse to ``direction``.

    The reference axis is z unless the direction is nearly parallel to z
    (|n_z| > 0.9), in which case x is used; u is the reference projected
    into the transverse plane and v = n x u.  For propagation along +z
    this yields u = x-hat, v = y-hat.
    """
    n = _unit(np.asarray(direction, dtype=float))
    ref = np.array([0.0, 0.0, 1.0])
    if abs(n[2]) > 0.9:
        ref = np.array([1.0, 0.0, 0.0])
    u = _unit(ref - np.dot(ref, n) * n)
    v = np.cross(n, u)
    return u, v


def polarization_tensor(mode: GwMode) -> np.ndarray:
    """Spacetime polarization tensor e_mn of a mode, shape (4, 4).

    Only the spatial block is populated; the tensor is symmetric,
    traceless and transverse to the propagation direction.
    """
    u, v = transverse_basis(mode.direction)
    e = np.zeros((4, 4))
    spatial = mode.amp_plus * (np.outer(u, u) - np.outer(v, v)) + mode.amp_cross * (
        np.outer(u, v) + np.outer(v, u)
    )
    e[1:, 1:] = spatial
    return e


def wave_vector(mode: GwMode) -> np.ndarray:
    """Contravariant wave vector k^m = (omega, omega n), shape (4,)."""
    n = np.asarray(mode.direction, dtype=float)
    return np.concatenate(([mode.omega], mode.omega * n))


def _wave_covector(mode: GwMode) -> np.ndarray:
    # k_m = eta_mn k^n = (omega, -omega n)
    return MINKOWSKI @ wave_vector(mode)


def _four_position(x: Sequence[float]) -> np.ndarray:
    x4 = np.asarray(x, dtype=float)
    if x4.shape != (4,):
        raise ParameterError(f"event must have shape (4,), got {x4.shape}")
    if not np.all(np.isfinite(x4)):
        raise ParameterError("event coordinates must be finite")
    return x4


def sample_ensemble(
    n_modes: int,
    sigma: float,
    omega_min: float,
    omega_max: float,
    h_max: float,
    seed: int,
) -> BackgroundEnsemble:
    """Draw a random mode ensemble with counter-based per-mode streams.

    Mode ``j`` is generated from ``Philox(key=[seed, j])`` so any mode can
    be reproduced without generating its predecessors.  Directions are
    isotropic, frequencies log-uniform on [omega_min, omega_max],
    amplitudes Gaussian with width ``sigma`` and phases uniform on
    [0, 2*pi).  If any mode exceeds the amplitude budget
    |amp_plus| + |amp_cross| <= h_max, all amplitudes are rescaled by a
    common factor so the largest mode sits exactly on the budget.
    """
    if not isinstance(n_modes, (int, np.integer)) or isinstance(n_modes, bool):
        raise ParameterError("n_modes must be an integer")
    if n_modes < 1:
        raise ParameterError(f"n_modes must be >= 1, got {n_modes}")
    if not np.isfinite(sigma) or sigma < 0:
        raise ParameterError(f"sigma must be a finite non-negative real, got {sigma}")
    if not (np.isfinite(omega_min) and omega_min > 0):
        raise ParameterError(f"omega_min must be positive, got {omega_min}")
    if not (np.isfinite(omega_max) and omega_max >= omega_min):
        raise ParameterError(
            f"omega_max must be >= omega_min, got [{omega_min}, {omega_max}]"
        )
    if not (np.isfinite(h_max) and h_max > 0):
        raise ParameterError(f"h_max must be positive, got {h_max}")
    seed = _check_seed(seed)

    log_lo = math.log(omega_min)
    log_hi = math.log(omega_max)
    modes = []
    for j in range(n_modes):
        rng = np.random.Generator(
            np.random.Philox(key=np.array([seed, j], dtype=np.uint64))
        )
        while True:
            raw = rng.standard_normal(3)
            norm = float(np.linalg.norm(raw))
            if norm > 1e-8:
                break
        direction = raw / norm
        omega = math.exp(log_lo + rng.random() * (log_hi - log_lo))
        amp_plus = sigma * rng.standard_normal()
        amp_cross = sigma * rng.standard_normal()
        phase0 = 2.0 * math.pi * rng.random()
        modes.append(
            GwMode(
                direction=tuple(float(c) for c in direction),
                omega=float(omega),
                amp_plus=float(amp_plus),
                amp_cross=float(amp_cross),
                phase0=float(phase0),
            )
        )

    peak = max(abs(m.amp_plus) + abs(m.amp_cross) for m in modes)
    if peak > h_max:
        scale = h_max / peak
        modes = [
            dataclasses.replace(
                m, amp_plus=m.amp_plus * scale, amp_cross=m.amp_cross * scale
            )
            for m in modes
        ]

    return BackgroundEnsemble(
        modes=tuple(modes), sigma=float(sigma), seed=int(seed), h_max=float(h_max)
    )


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ParameterError("seed must be an integer")
    if not (0 <= int(seed) < 2**64):
        raise ParameterError(f"seed must fit in uint64, got {seed}")
    return int(seed)


def validate_mode(mode: GwMode, h_max: float | None = None) -> None:
    """Check the structural invariants of a single mode.

    Raises :class:`ParameterError` if the direction is not unit length,
    the frequency is not positive, the phase is outside [0, 2*pi), the
    wave vector is not null, the polarization is not transverse-traceless,
    or (when ``h_max`` is given) the amplitude budget is exceeded.
    """
    d = np.asarray(mode.direction, dtype=float)
    if d.shape != (3,) or not np.all(np.isfinite(d)):
        raise ParameterError(f"direction must be 3 finite floats, got {mode.direction}")
    if abs(float(np.linalg.norm(d)) - 1.0) > _TOL:
        raise ParameterError(f"direction must be unit length, |n| = {np.linalg.norm(d)}")
    for name in ("omega", "amp_plus", "amp_cross", "phase0"):
        if not np.isfinite(getattr(mode, name)):
            raise ParameterError(f"{name} must be finite")
    if mode.omega <= 0:
        raise ParameterError(f"omega must be positive, got {mode.omega}")
    if not (0.0 <= mode.phase0 < 2.0 * math.pi):
        raise ParameterError(f"phase0 must lie in [0, 2*pi), got {mode.phase0}")

    k_up = wave_vector(mode)
    k_low = MINKOWSKI @ k_up
    null_defect = abs(float(k_low @ k_up))
    if null_defect > _TOL:
        raise ParameterError(f"wave vector is not null: |k.k| = {null_defect:.3e}")

    e = polarization_tensor(mode)
    trace = abs(float(np.trace(MINKOWSKI @ e)))
    transverse = float(np.max(np.abs(e @ k_up)))
    if trace > _TOL or transverse > _TOL:
        raise ParameterError(
            f"polarization is not transverse-traceless: trace={trace:.3e}, "
            f"e.k={transverse:.3e}"
        )

    if h_max is not None:
        budget = abs(mode.amp_plus) + abs(mode.amp_cross)
        # small slack absorbs rounding from the common rescale
        if budget > h_max * (1.0 + 1e-12):
            raise ParameterError(
                f"amplitude budget exceeded: |a+|+|ax| = {budget:.3e} > {h_max:.3e}"
            )


def validate_ensemble(ensemble: BackgroundEnsemble) -> None:
    """Validate every mode plus the ensemble-level parameters."""
    if not np.isfinite(ensemble.sigma) or ensemble.sigma < 0:
        raise ParameterError(f"sigma must be non-negative, got {ensemble.sigma}")
    if not (np.isfinite(ensemble.h_max) and ensemble.h_max > 0):
        raise ParameterError(f"h_max must be positive, got {ensemble.h_max}")
    _check_seed(ensemble.seed)
    for mode in ensemble.modes:
        validate_mode(mode, h_max=ensemble.h_max)


def evaluate_h(ensemble: BackgroundEnsemble, x: Sequence[float]) -> np.ndarray:
    """Total metric perturbation h_mn at event x = (t, x, y, z), shape (4, 4)."""
    x4 = _four_position(x)
    h = np.zeros((4, 4))
    for mode in ensemble.modes:
        k_low = _wave_covector(mode)
        phase = float(k_low @ x4) + mode.phase0
        h += polarization_tensor(mode) * (2.0 * math.cos(phase))
    return h


def spatial_strain(ensemble: BackgroundEnsemble, events: np.ndarray) -> np.ndarray:
    """Spatial block h_ij at a batch of events, shape (n, 3, 3).

    ``events`` has shape (n, 4) with rows (t, x, y, z).  Used by the
    Monte Carlo correlator, where per-event python loops would dominate.
    """
    events = np.asarray(events, dtype=float)
    if events.ndim != 2 or events.shape[1] != 4:
        raise ParameterError(f"events must have shape (n, 4), got {events.shape}")
    out = np.zeros((events.shape[0], 3, 3))
    for mode in ensemble.modes:
        k_low = _wave_covector(mode)
        phase = events @ k_low + mode.phase0
        e_spatial = polarization_tensor(mode)[1:, 1:]
        out += 2.0 * np.cos(phase)[:, None, None] * e_spatial[None, :, :]
    return out


def metric_at(ensemble: BackgroundEnsemble, x: Sequence[float]) -> np.ndarray:
    """Full metric g_mn = eta_mn + h_mn at event x, shape (4, 4)."""
    return MINKOWSKI + evaluate_h(ensemble, x)


def plane_wave_residuals(k_up: np.ndarray, e: np.ndarray) -> tuple[float, float]:
    """Gauge and field-equation residuals for one plane wave.

    Parameters
    ----------
    k_up : array, shape (4,)
        Contravariant wave vector.
    e : array, shape (4, 4)
        Polarization tensor with both indices down.

    Returns
    -------
    (gauge, field_eq)
        ``gauge`` is max_n |k^m e_mn - (1/2) k_n e^m_m|, the harmonic
        gauge defect; ``field_eq`` is |k.k| * max|e|, the wave-equation
        defect.  Both vanish for a null, transverse-traceless mode.
    """
    k_up = np.asarray(k_up, dtype=float)
    e = np.asarray(e, dtype=float)
    if k_up.shape != (4,) or e.shape != (4, 4):
        raise ParameterError("expected k of shape (4,) and e of shape (4, 4)")
    k_low = MINKOWSKI @ k_up
    trace = float(np.trace(MINKOWSKI @ e))
    gauge_vec = e.T @ k_up - 0.5 * k_low * trace
    gauge = float(np.max(np.abs(gauge_vec)))
    field_eq = abs(float(k_low @ k_up)) * float(np.max(np.abs(e)))
    return gauge, field_eq


def gauge_residuals(mode: GwMode) -> tuple[float, float]:
    """Gauge and field-equation residuals of one mode's derived (k, e)."""
    return plane_wave_residuals(wave_vector(mode), polarization_tensor(mode))


def ensemble_residuals(ensemble: BackgroundEnsemble) -> tuple[float, float]:
    """Worst-case plane-wave residuals over all modes of an ensemble."""
    gauge = 0.0
    field_eq = 0.0
    for mode in ensemble.modes:
        g, f = gauge_residuals(mode)
        gauge = max(gauge, g)
        field_eq = max(field_eq, f)
    return gauge, field_eq


def riemann_r1010(ensemble: BackgroundEnsemble, x: Sequence[float]) -> float:
    """Curvature component R^1_010 driving geodesic deviation along x.

    Computed analytically from the linearized Riemann tensor of the mode
    sum.  The sign convention is fixed so that for a wave propagating
    along z the value equals -(1/2) d^2 h_11 / dt^2, i.e. positive values
    act as a restoring spring in the deviation equation.
    """
    x4 = _four_position(x)
    total = 0.0
    for mode in ensemble.modes:
        k_low = _wave_covector(mode)
        e = polarization_tensor(mode)
        # d_a d_b h_mn = -2 e_mn k_a k_b cos(k.x + phase0)
        curv = -2.0 * math.cos(float(k_low @ x4) + mode.phase0)
        k0, k1 = k_low[0], k_low[1]
        total += 0.5 * curv * (
            2.0 * k0 * k1 * e[0, 1] - k0 * k0 * e[1, 1] - k1 * k1 * e[0, 0]
        )
    return float(total)


def mode_action(mode: GwMode) -> float:
    """Effective action carried by one mode over a single period.

    With the averaged quadratic energy density of a weak wave integrated
    over a unit volume and one period (G = c = 1), the action reduces to
    omega * (amp_plus^2 + amp_cross^2) / 16.
    """
    if mode.omega <= 0:
        raise ParameterError(f"omega must be positive, got {mode.omega}")
    return mode.omega * (mode.amp_plus**2 + mode.amp_cross**2) / 16.0


def total_action(ensemble: BackgroundEnsemble) -> float:
    """Sum of per-mode actions."""
    return float(sum(mode_action(m) for m in ensemble.modes))


def calibrate_action(
    ensemble: BackgroundEnsemble, target: float = 1.0
) -> BackgroundEnsemble:
    """Rescale all amplitudes by one factor so the total action hits ``target``.

    The action is quadratic in the amplitudes, so the factor is
    sqrt(target / total).  Raises :class:`CalibrationError` when the
    current total action is zero (nothing to scale) or the target is not
    positive.  If the rescale pushes some mode past the original
    amplitude budget, ``h_max`` is raised to the new peak so the returned
    ensemble still satisfies its own invariants.
    """
    if not (np.isfinite(target) and target > 0):
        raise CalibrationError(f"target action must be positive, got {target}")
    current = total_action(ensemble)
    if current <= 0.0:
        raise CalibrationError(
            "total action is zero: all amplitudes vanish, cannot calibrate"
        )
    scale = math.sqrt(target / current)
    modes = tuple(
        dataclasses.replace(
            m, amp_plus=m.amp_plus * scale, amp_cross=m.amp_cross * scale
        )
        for m in ensemble.modes
    )
    peak = max(abs(m.amp_plus) + abs(m.amp_cross) for m in modes)
    return BackgroundEnsemble(
        modes=modes,
        sigma=ensemble.sigma,
        seed=ensemble.seed,
        h_max=max(ensemble.h_max, peak),
    )


def ensemble_to_dict(ensemble: BackgroundEnsemble) -> dict:
    """JSON-ready dict with the documented mode-file layout."""
    return {
        "sigma": ensemble.sigma,
        "seed": ensemble.seed,
        "h_max": ensemble.h_max,
        "modes": [
            {
                "direction": list(m.direction),
                "omega": m.omega,
                "amp_plus": m.amp_plus,
                "amp_cross": m.amp_cross,
                "phase0": m.phase0,
            }
            for m in ensemble.modes
        ],
    }


def ensemble_from_dict(data: dict) -> BackgroundEnsemble:
    """Inverse of :func:`ensemble_to_dict`; validates the result."""
    try:
        modes = tuple(
            GwMode(
                direction=tuple(float(c) for c in m["direction"]),
                omega=float(m["omega"]),
                amp_plus=float(m["amp_plus"]),
                amp_cross=float(m["amp_cross"]),
                phase0=float(m["phase0"]),
            )
            for m in data["modes"]
        )
        ensemble = BackgroundEnsemble(
            modes=modes,
            sigma=float(data["sigma"]),
            seed=int(data["seed"]),
            h_max=float(data["h_max"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed mode file: {exc}") from exc
    validate_ensemble(ensemble)
    return ensemble


def save_ensemble(ensemble: BackgroundEnsemble, path: str) -> None:
    """Write a mode file.  Identical ensembles produce identical bytes."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ensemble_to_dict(ensemble), fh, indent=2)
        fh.write("\n")


def load_ensemble(path: str) -> BackgroundEnsemble:
    """Read and validate a mode file written by :func:`save_ensemble`."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"mode file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParameterError("mode file must contain a JSON object")
    return ensemble_from_dict(data)
