"""Geodesic-deviation dynamics in a weak plane-wave background.

The separation vector of two nearby free test masses obeys a linear
oscillator equation driven by the curvature component returned by
:func:`gravbell.background.riemann_r1010`:

    d^2 ell / d tau^2 = -c^2 r(tau) ell

Positive r gives oscillation at omega = c sqrt(r); negative r gives
exponential growth and the trajectory is flagged unstable.  Integration
is fixed-step classical Runge-Kutta (4th order) with a hard guard on the
step size relative to the fastest oscillation encountered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    NumericalError,
    ParameterError,
    StepSizeError,
    UndefinedCorrelationError,
)

__all__ = [
    "DeviationState",
    "Trajectory",
    "PhaseRecord",
    "mode_frequency",
    "integrate_deviation",
    "closed_form_deviation",
    "accumulated_phase",
    "phase_records",
    "phase_correlation",
    "write_trajectory_csv",
]

# Minimum resolution of the fastest oscillation: 20 steps per period.
_STEPS_PER_PERIOD = 20

_CSV_HEADER = "tau,ell_x,ell_y,ell_z,elldot_x,elldot_y,elldot_z"


@dataclass(frozen=True)
class DeviationState:
    """Separation vector and its proper-time derivative at one instant."""

    tau: float
    ell: tuple[float, float, float]
    ell_dot: tuple[float, float, float]


@dataclass(frozen=True)
class Trajectory:
    """Dense fixed-step deviation history.

    ``taus`` has shape (n+1,), ``ell`` and ``ell_dot`` have shape
    (n+1, 3) with row i the state after i steps.  ``unstable`` is set
    when the curvature went negative anywhere along the run.
    """

    taus: np.ndarray
    ell: np.ndarray
    ell_dot: np.ndarray
    dt: float
    unstable: bool
    mode_ref: int | None = None

    def __len__(self) -> int:
        return self.taus.shape[0]

    def state(self, i: int) -> DeviationState:
        return DeviationState(
            tau=float(self.taus[i]),
            ell=tuple(float(v) for v in self.ell[i]),
            ell_dot=tuple(float(v) for v in self.ell_dot[i]),
        )

    @property
    def final(self) -> DeviationState:
        return self.state(len(self) - 1)


@dataclass(frozen=True)
class PhaseRecord:
    """Accumulated oscillation phase of one mode at a common time."""

    mode_index: int
    omega: float
    phase: float


def mode_frequency(r1010: float, c: float = 1.0) -> tuple[str, float]:
    """Classify a curvature value and return (kind, rate).

    kind is "oscillatory" (r > 0, rate = c sqrt(r)), "flat" (r == 0,
    rate = 0) or "unstable" (r < 0, rate = c sqrt(-r), the e-folding
    rate).
    """
    if not np.isfinite(r1010):
        raise ParameterError(f"r1010 must be finite, got {r1010}")
    if not (np.isfinite(c) and c > 0):
        raise ParameterError(f"c must be positive, got {c}")
    if r1010 > 0.0:
        return "oscillatory", c * math.sqrt(r1010)
    if r1010 < 0.0:
        return "unstable", c * math.sqrt(-r1010)
    return "flat", 0.0


def _state_arrays(state0: DeviationState) -> tuple[np.ndarray, np.ndarray]:
    ell = np.asarray(state0.ell, dtype=float)
    ell_dot = np.asarray(state0.ell_dot, dtype=float)
    if ell.shape != (3,) or ell_dot.shape != (3,):
        raise ParameterError("initial state must carry two 3-vectors")
    if not (
        np.all(np.isfinite(ell))
        and np.all(np.isfinite(ell_dot))
        and np.isfinite(state0.tau)
    ):
        raise ParameterError("initial state must be finite")
    return ell, ell_dot


def integrate_deviation(
    state0: DeviationState,
    r1010_fn: Callable[[float], float],
    tau_end: float,
    dt: float,
    c: float = 1.0,
    mode_ref: int | None = None,
) -> Trajectory:
    """Integrate the deviation oscillator with fixed-step RK4.

    ``r1010_fn`` maps proper time to the curvature coefficient; it is
    sampled once at every node and half node before stepping.  The run
    starts at ``state0.tau`` and covers round((tau_end - tau) / dt)
    steps.  A :class:`StepSizeError` is raised when dt exceeds one
    twentieth of the shortest oscillation period, 2*pi / (c sqrt(max r));
    a :class:`NumericalError` is raised if the curvature samples or the
    integrated state go non-finite.
    """
    ell, ell_dot = _state_arrays(state0)
    if not (np.isfinite(tau_end) and tau_end > state0.tau):
        raise ParameterError(
            f"tau_end must exceed the initial tau, got {tau_end} <= {state0.tau}"
        )
    if not (np.isfinite(dt) and dt > 0):
        raise ParameterError(f"dt must be positive, got {dt}")
    if not (np.isfinite(c) and c > 0):
        raise ParameterError(f"c must be positive, got {c}")

    n_steps = int(round((tau_end - state0.tau) / dt))
    if n_steps < 1:
        raise ParameterError(
            f"tau_end = {tau_end} is less than half a step past tau = {state0.tau}"
        )

    taus = state0.tau + dt * np.arange(n_steps + 1)
    half_taus = taus[:-1] + 0.5 * dt
    r_node = np.array([float(r1010_fn(t)) for t in taus])
    r_half = np.array([float(r1010_fn(t)) for t in half_taus])
    if not (np.all(np.isfinite(r_node)) and np.all(np.isfinite(r_half))):
        raise NumericalError("curvature samples are not finite")

    r_peak = max(float(np.max(np.abs(r_node))), float(np.max(np.abs(r_half))), 0.0)
    omega_peak = c * math.sqrt(r_peak)
    if omega_peak > 0.0:
        dt_limit = (2.0 * math.pi / omega_peak) / _STEPS_PER_PERIOD
        if dt > dt_limit:
            raise StepSizeError(
                f"dt = {dt:.6g} too coarse for peak rate omega = {omega_peak:.6g}; "
                f"need dt <= {dt_limit:.6g}"
            )

    out_ell = np.empty((n_steps + 1, 3))
    out_dot = np.empty((n_steps + 1, 3))
    out_ell[0] = ell
    out_dot[0] = ell_dot
    c2 = c * c
    for i in range(n_steps):
        y, v = out_ell[i], out_dot[i]
        a0 = -c2 * r_node[i]
        ah = -c2 * r_half[i]
        a1 = -c2 * r_node[i + 1]
        k1y, k1v = v, a0 * y
        k2y, k2v = v + 0.5 * dt * k1v, ah * (y + 0.5 * dt * k1y)
        k3y, k3v = v + 0.5 * dt * k2v, ah * (y + 0.5 * dt * k2y)
        k4y, k4v = v + dt * k3v, a1 * (y + dt * k3y)
        out_ell[i + 1] = y + (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        out_dot[i + 1] = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

    if not (np.all(np.isfinite(out_ell)) and np.all(np.isfinite(out_dot))):
        raise NumericalError("deviation state went non-finite during integration")

    unstable = bool(np.min(r_node) < 0.0 or np.min(r_half) < 0.0)
    return Trajectory(
        taus=taus,
        ell=out_ell,
        ell_dot=out_dot,
        dt=float(dt),
        unstable=unstable,
        mode_ref=mode_ref,
    )


def closed_form_deviation(ell0: float, omega: float, t, phase0: float = 0.0):
    """Constant-curvature solution ell0 * cos(omega t + phase0).

    The oscillatory branch for positive curvature, with phase0 = 0
    matching release from rest.  ``t`` may be a scalar or an array.
    """
    if not np.isfinite(ell0):
        raise ParameterError(f"ell0 must be finite, got {ell0}")
    if not (np.isfinite(omega) and omega >= 0):
        raise ParameterError(f"omega must be non-negative, got {omega}")
    t = np.asarray(t, dtype=float)
    out = ell0 * np.cos(omega * t + phase0)
    return float(out) if out.ndim == 0 else out


def accumulated_phase(omega: float, tau: float) -> float:
    """Oscillation phase omega * tau accrued from rest at tau = 0."""
    if not (np.isfinite(omega) and omega >= 0):
        raise ParameterError(f"omega must be non-negative, got {omega}")
    if not np.isfinite(tau):
        raise ParameterError(f"tau must be finite, got {tau}")
    return omega * tau


def phase_records(omegas: Sequence[float], tau: float) -> tuple[PhaseRecord, ...]:
    """Accumulated phase of each mode frequency at a common time."""
    return tuple(
        PhaseRecord(mode_index=j, omega=float(w), phase=accumulated_phase(float(w), tau))
        for j, w in enumerate(omegas)
    )


def phase_correlation(
    records_a: Sequence[PhaseRecord], records_b: Sequence[PhaseRecord]
) -> float:
    """Pearson correlation of cos(phase) across two matched record sets.

    Both sequences must cover the same mode indices in the same order.
    Raises :class:`UndefinedCorrelationError` when either cosine series
    is constant, since the correlation is then 0/0.
    """
    if len(records_a) != len(records_b):
        raise ParameterError(
            f"record sets differ in length: {len(records_a)} vs {len(records_b)}"
        )
    if len(records_a) < 2:
        raise ParameterError("need at least two records per set")
    for ra, rb in zip(records_a, records_b):
        if ra.mode_index != rb.mode_index:
            raise ParameterError(
                f"mode index mismatch: {ra.mode_index} vs {rb.mode_index}"
            )
    x = np.cos([r.phase for r in records_a])
    y = np.cos([r.phase for r in records_b])
    if float(np.std(x)) == 0.0 or float(np.std(y)) == 0.0:
        raise UndefinedCorrelationError(
            "cosine series has zero variance; correlation undefined"
        )
    return float(np.corrcoef(x, y)[0, 1])


def write_trajectory_csv(trajectory: Trajectory, path: str) -> None:
    """Write a trajectory as CSV with 17 significant digits per value.

    Column layout: tau,ell_x,ell_y,ell_z,elldot_x,elldot_y,elldot_z.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(_CSV_HEADER + "\n")
        for i in range(len(trajectory)):
            row = [trajectory.taus[i], *trajectory.ell[i], *trajectory.ell_dot[i]]
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
