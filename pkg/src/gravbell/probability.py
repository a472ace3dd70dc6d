"""Gaussian interval probabilities, complex amplitudes, and PDE residuals.

The model assigns a particle displaced by delta_ell a Gaussian weight

    P(delta_ell) = exp(-delta_ell^2 / (2 sigma^2)) / (sigma sqrt(2 pi))

and, through the action scale s0 = m sigma^2 / 2, an equivalent weight
exp(-S / s0) / (sigma sqrt(2 pi)) in terms of the oscillation action S.
The complex amplitude sqrt(a_sq) exp(i S / s0) carries the same action as
a phase.  Consistency of that construction with classical mechanics is
checked through discrete residuals of the Hamilton-Jacobi, continuity and
effective Schroedinger equations; the effective Planck constant of the
last is 2 s0, and a diagnostic variant with divisor s0 quantifies how far
the unmodified phase convention misses the same equation.

All residuals use second-order central differences on uniform 1-D grids,
with the time derivative taken between two adjacent slices and spatial
derivatives on the slice average, so the discretization error is
O(dt^2 + dx^2) about the midpoint time.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import NormalizationError, ParameterError

__all__ = [
    "Grid1D",
    "IntervalModel",
    "WaveField",
    "ClassicalField",
    "AxiomTriple",
    "AxiomReport",
    "interval_probability",
    "action_probability",
    "amplitude",
    "plane_wave_field",
    "free_particle_classical",
    "normalize_wavefield",
    "weighted_norm",
    "hamilton_jacobi_residual",
    "continuity_residual",
    "schrodinger_residual",
    "check_probability_axioms",
    "write_wavefield_csv",
]

_MIN_GRID = 16


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1-D spatial grid with at least 16 points."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ParameterError("grid size n must be an integer")
        if self.n < _MIN_GRID:
            raise ParameterError(f"grid too coarse: n = {self.n} < {_MIN_GRID}")
        if not (
            np.isfinite(self.x_min)
            and np.isfinite(self.x_max)
            and self.x_max > self.x_min
        ):
            raise ParameterError(
                f"need finite x_max > x_min, got [{self.x_min}, {self.x_max}]"
            )

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)


@dataclass(frozen=True)
class IntervalModel:
    """Dispersion and mass defining the Gaussian interval weight.

    Derived quantities: ``a_sq`` = 1 / (sigma sqrt(2 pi)), the peak
    probability density, and ``s0`` = mass * sigma^2 / 2, the action
    scale that converts actions to phases.
    """

    sigma: float
    mass: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ParameterError(f"sigma must be positive, got {self.sigma}")
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ParameterError(f"mass must be positive, got {self.mass}")

    @property
    def a_sq(self) -> float:
        return 1.0 / (self.sigma * math.sqrt(2.0 * math.pi))

    @property
    def s0(self) -> float:
        return self.mass * self.sigma**2 / 2.0

    @property
    def hbar_eff(self) -> float:
        """Effective Planck constant of the matched wave equation, 2 s0."""
        return 2.0 * self.s0


@dataclass(frozen=True)
class WaveField:
    """Complex amplitude on a grid, optionally on two adjacent time slices.

    ``psi_next`` and ``dt`` are required by the wave-equation residual;
    ``components`` optionally decomposes the field over a spatial basis
    (shape (n_components, n)) for metric-weighted normalization.
    """

    grid: Grid1D
    psi: np.ndarray
    psi_next: np.ndarray | None = None
    dt: float | None = None
    components: np.ndarray | None = None
    hbar_eff: float = 1.0

    def __post_init__(self) -> None:
        psi = np.asarray(self.psi, dtype=complex)
        if psi.shape != (self.grid.n,):
            raise ParameterError(
                f"psi must have shape ({self.grid.n},), got {psi.shape}"
            )
        object.__setattr__(self, "psi", psi)
        if self.psi_next is not None:
            nxt = np.asarray(self.psi_next, dtype=complex)
            if nxt.shape != psi.shape:
                raise ParameterError("psi_next must match the grid shape")
            object.__setattr__(self, "psi_next", nxt)
            if self.dt is None or not (np.isfinite(self.dt) and self.dt > 0):
                raise ParameterError("two-slice field needs a positive dt")
        if self.components is not None:
            comp = np.asarray(self.components, dtype=complex)
            if comp.ndim != 2 or comp.shape[1] != self.grid.n:
                raise ParameterError(
                    "components must have shape (n_components, grid.n)"
                )
            object.__setattr__(self, "components", comp)
        if not (np.isfinite(self.hbar_eff) and self.hbar_eff > 0):
            raise ParameterError(f"hbar_eff must be positive, got {self.hbar_eff}")


@dataclass(frozen=True)
class ClassicalField:
    """Action, amplitude, and potential on two adjacent time slices."""

    grid: Grid1D
    s_before: np.ndarray
    s_after: np.ndarray
    amp_before: np.ndarray
    amp_after: np.ndarray
    potential: np.ndarray
    mass: float
    dt: float

    def __post_init__(self) -> None:
        n = self.grid.n
        for name in ("s_before", "s_after", "amp_before", "amp_after", "potential"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ParameterError(f"{name} must have shape ({n},), got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ParameterError(f"{name} must be finite")
            object.__setattr__(self, name, arr)
        if np.any(self.amp_before < 0) or np.any(self.amp_after < 0):
            raise ParameterError("amplitudes must be non-negative")
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ParameterError(f"mass must be positive, got {self.mass}")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ParameterError(f"dt must be positive, got {self.dt}")


def interval_probability(delta_ell, sigma: float):
    """Gaussian weight of a displacement interval.

    Vectorized in ``delta_ell``; even, maximal at zero, and monotone
    decreasing in |delta_ell|.
    """
    if not (np.isfinite(sigma) and sigma > 0):
        raise ParameterError(f"sigma must be positive, got {sigma}")
    d = np.asarray(delta_ell, dtype=float)
    out = np.exp(-(d * d) / (2.0 * sigma * sigma)) / (sigma * math.sqrt(2.0 * math.pi))
    return float(out) if out.ndim == 0 else out


def action_probability(action, model: IntervalModel):
    """Interval weight expressed through the oscillation action.

    Returns a_sq * exp(-action / s0).  The equivalent energy form
    exp(-W / (m sigma^2)) is this operation applied at action = W / 2,
    since s0 / (m sigma^2) = 1/2; callers supply that mapping.
    """
    a = np.asarray(action, dtype=float)
    out = model.a_sq * np.exp(-a / model.s0)
    return float(out) if out.ndim == 0 else out


def amplitude(action, model: IntervalModel):
    """Complex amplitude sqrt(a_sq) * exp(i action / s0).

    The squared modulus equals the zero-action probability a_sq for every
    action, so probability information lives entirely in the modulus and
    action information entirely in the phase.
    """
    a = np.asarray(action, dtype=float)
    out = math.sqrt(model.a_sq) * np.exp(1j * a / model.s0)
    return complex(out) if out.ndim == 0 else out


def plane_wave_field(
    grid: Grid1D,
    momentum: float,
    mass: float,
    s0: float,
    dt: float,
    phase_divisor: float | None = None,
) -> WaveField:
    """Free-particle wave on two slices: exp(i (p x - E t) / divisor).

    E = p^2 / (2 mass); the divisor defaults to 2 s0, which makes the
    field an exact solution of the effective wave equation.  Passing
    ``phase_divisor=s0`` builds the diagnostic variant whose residual is
    2E at leading order.
    """
    if not (np.isfinite(momentum)):
        raise ParameterError(f"momentum must be finite, got {momentum}")
    if not (np.isfinite(mass) and mass > 0):
        raise ParameterError(f"mass must be positive, got {mass}")
    if not (np.isfinite(s0) and s0 > 0):
        raise ParameterError(f"s0 must be positive, got {s0}")
    if not (np.isfinite(dt) and dt > 0):
        raise ParameterError(f"dt must be positive, got {dt}")
    divisor = 2.0 * s0 if phase_divisor is None else float(phase_divisor)
    if not (np.isfinite(divisor) and divisor != 0.0):
        raise ParameterError(f"phase divisor must be nonzero, got {phase_divisor}")
    x = grid.x
    energy = momentum**2 / (2.0 * mass)
    psi = np.exp(1j * (momentum * x) / divisor)
    psi_next = np.exp(1j * (momentum * x - energy * dt) / divisor)
    return WaveField(grid=grid, psi=psi, psi_next=psi_next, dt=dt, hbar_eff=2.0 * s0)


def free_particle_classical(
    grid: Grid1D, momentum: float, mass: float, dt: float
) -> ClassicalField:
    """Classical free-particle data S = p x - E t, a = 1, U = 0."""
    if not (np.isfinite(mass) and mass > 0):
        raise ParameterError(f"mass must be positive, got {mass}")
    x = grid.x
    energy = momentum**2 / (2.0 * mass)
    ones = np.ones_like(x)
    return ClassicalField(
        grid=grid,
        s_before=momentum * x,
        s_after=momentum * x - energy * dt,
        amp_before=ones,
        amp_after=ones,
        potential=np.zeros_like(x),
        mass=mass,
        dt=dt,
    )


def _gradient(f: np.ndarray, dx: float) -> np.ndarray:
    # second-order: central interior, one-sided at the two boundary points
    g = np.empty_like(f)
    g[1:-1] = (f[2:] - f[:-2]) / (2.0 * dx)
    g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx)
    g[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * dx)
    return g


def weighted_norm(field: WaveField, metric_weight: np.ndarray | None = None) -> float:
    """Trapezoidal quadrature of the (optionally weighted) density.

    With ``components`` of shape (M, n) and a per-point weight matrix of
    shape (n, M, M), the density is sum_mn w_mn conj(psi_m) psi_n; a
    1-D weight multiplies the plain density pointwise; None means flat.
    """
    x = field.grid.x
    if field.components is not None:
        comp = field.components
        if metric_weight is None:
            density = np.sum(np.abs(comp) ** 2, axis=0)
        else:
            w = np.asarray(metric_weight, dtype=float)
            if w.ndim == 1:
                if w.shape != (field.grid.n,):
                    raise ParameterError("1-D metric_weight must match the grid")
                density = w * np.sum(np.abs(comp) ** 2, axis=0)
            elif w.shape == (field.grid.n, comp.shape[0], comp.shape[0]):
                density = np.real(
                    np.einsum("xmn,mx,nx->x", w, np.conj(comp), comp)
                )
            else:
                raise ParameterError(
                    f"metric_weight shape {w.shape} fits neither (n,) nor (n, M, M)"
                )
    else:
        density = np.abs(field.psi) ** 2
        if metric_weight is not None:
            w = np.asarray(metric_weight, dtype=float)
            if w.shape != (field.grid.n,):
                raise ParameterError("1-D metric_weight must match the grid")
            density = w * density
    return float(np.trapezoid(density, x))


def normalize_wavefield(
    field: WaveField, metric_weight: np.ndarray | None = None
) -> WaveField:
    """Rescale the field so its weighted quadrature equals one.

    The same positive scale is applied to ``psi``, ``psi_next`` and
    ``components``, preserving relative phases.  Raises
    :class:`NormalizationError` when the norm is zero, negative, or not
    finite.
    """
    norm = weighted_norm(field, metric_weight)
    if not np.isfinite(norm):
        raise NormalizationError(f"weighted norm is not finite: {norm}")
    if norm <= 0.0:
        raise NormalizationError(f"weighted norm must be positive, got {norm}")
    scale = 1.0 / math.sqrt(norm)
    return dataclasses.replace(
        field,
        psi=field.psi * scale,
        psi_next=None if field.psi_next is None else field.psi_next * scale,
        components=None if field.components is None else field.components * scale,
    )


def hamilton_jacobi_residual(cf: ClassicalField) -> float:
    """Max-norm defect of dS/dt + (grad S)^2 / (2m) + U over interior points."""
    dx = cf.grid.dx
    ds_dt = (cf.s_after - cf.s_before) / cf.dt
    s_mid = 0.5 * (cf.s_before + cf.s_after)
    grad = _gradient(s_mid, dx)
    res = ds_dt + grad * grad / (2.0 * cf.mass) + cf.potential
    return float(np.max(np.abs(res[1:-1])))


def continuity_residual(cf: ClassicalField) -> float:
    """Max-norm defect of d(a^2)/dt + div(a^2 grad S / m) over interior points."""
    dx = cf.grid.dx
    rho_before = cf.amp_before**2
    rho_after = cf.amp_after**2
    drho_dt = (rho_after - rho_before) / cf.dt
    rho_mid = 0.5 * (rho_before + rho_after)
    s_mid = 0.5 * (cf.s_before + cf.s_after)
    flux = rho_mid * _gradient(s_mid, dx) / cf.mass
    res = drho_dt + _gradient(flux, dx)
    return float(np.max(np.abs(res[1:-1])))


def schrodinger_residual(
    field: WaveField, potential: np.ndarray, mass: float, s0: float
) -> float:
    """Max-norm defect of the effective wave equation on a two-slice field.

    The operator is i (2 s0) d(psi)/dt + (4 s0^2 / 2m) lap(psi) - U psi,
    i.e. the standard form with Planck constant 2 s0.  The field must
    carry two slices and record hbar_eff = 2 s0.  Boundary points are
    excluded (central Laplacian only).
    """
    if field.psi_next is None or field.dt is None:
        raise ParameterError("schrodinger residual needs a two-slice field")
    if not (np.isfinite(mass) and mass > 0):
        raise ParameterError(f"mass must be positive, got {mass}")
    if not (np.isfinite(s0) and s0 > 0):
        raise ParameterError(f"s0 must be positive, got {s0}")
    if abs(field.hbar_eff - 2.0 * s0) > 1e-12 * max(1.0, 2.0 * s0):
        raise ParameterError(
            f"field records hbar_eff = {field.hbar_eff}, expected 2 s0 = {2.0 * s0}"
        )
    u = np.asarray(potential, dtype=float)
    if u.shape != (field.grid.n,):
        raise ParameterError("potential must match the grid shape")
    dx = field.grid.dx
    dpsi_dt = (field.psi_next - field.psi) / field.dt
    psi_mid = 0.5 * (field.psi + field.psi_next)
    lap = (psi_mid[2:] - 2.0 * psi_mid[1:-1] + psi_mid[:-2]) / (dx * dx)
    res = (
        1j * (2.0 * s0) * dpsi_dt[1:-1]
        + (4.0 * s0 * s0 / (2.0 * mass)) * lap
        - u[1:-1] * psi_mid[1:-1]
    )
    return float(np.max(np.abs(res)))


@dataclass(frozen=True)
class AxiomTriple:
    """Evaluated probabilities for one interval triple (d21, d32, d31)."""

    d21: float
    d32: float
    d31: float
    p21: float
    p32: float
    p31: float
    literal_holds: bool
    slack_holds: bool


@dataclass(frozen=True)
class AxiomReport:
    """Scan and triple diagnostics for the Gaussian interval weight.

    ``monotone`` and ``peak_at_zero`` cover the decay axioms on a dense
    scan of displacements; ``unit_peak_sigma`` is the unique dispersion
    (1 / sqrt(2 pi)) at which the peak value reaches exactly one.  Each
    triple reports the additivity inequality in its strict reading
    (p21 + p32 <= p31, expected to fail for a Gaussian) and in the
    tautological slack reading (p21 + p32 <= p31 + 1).
    """

    sigma: float
    scan_points: int
    scan_span: float
    monotone: bool
    peak_at_zero: bool
    peak_value: float
    tail_value: float
    unit_peak_sigma: float
    triples: tuple[AxiomTriple, ...]

    @property
    def literal_all_hold(self) -> bool:
        return all(t.literal_holds for t in self.triples)

    @property
    def slack_all_hold(self) -> bool:
        return all(t.slack_holds for t in self.triples)


def check_probability_axioms(
    sigma: float,
    triples,
    scan_points: int = 1000,
    scan_span: float = 6.0,
) -> AxiomReport:
    """Evaluate the probability axioms for the Gaussian interval weight.

    ``triples`` is an iterable of (d21, d32, d31) displacement triples
    satisfying d21 + d32 >= d31 (three-point interval splitting).  The
    strict additivity reading is evaluated and reported per triple, never
    asserted; for a Gaussian weight it fails whenever the split is fine
    enough, and the report exists to surface exactly that.
    """
    if not (np.isfinite(sigma) and sigma > 0):
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if scan_points < 2:
        raise ParameterError(f"scan needs at least 2 points, got {scan_points}")
    if not (np.isfinite(scan_span) and scan_span > 0):
        raise ParameterError(f"scan_span must be positive, got {scan_span}")

    ds = np.linspace(0.0, scan_span * sigma, scan_points)
    p = interval_probability(ds, sigma)
    monotone = bool(np.all(np.diff(p) <= 0.0))
    peak_at_zero = bool(np.argmax(p) == 0)

    checked = []
    for triple in triples:
        t = tuple(float(v) for v in triple)
        if len(t) != 3:
            raise ParameterError(f"triple must have 3 entries, got {triple}")
        d21, d32, d31 = t
        if not all(np.isfinite(v) and v >= 0 for v in t):
            raise ParameterError(f"triple entries must be finite and >= 0: {triple}")
        if d21 + d32 < d31 - 1e-12:
            raise ParameterError(
                f"triple violates interval splitting d21 + d32 >= d31: {triple}"
            )
        p21 = interval_probability(d21, sigma)
        p32 = interval_probability(d32, sigma)
        p31 = interval_probability(d31, sigma)
        checked.append(
            AxiomTriple(
                d21=d21,
                d32=d32,
                d31=d31,
                p21=p21,
                p32=p32,
                p31=p31,
                literal_holds=bool(p21 + p32 <= p31),
                slack_holds=bool(p21 + p32 <= p31 + 1.0),
            )
        )

    return AxiomReport(
        sigma=float(sigma),
        scan_points=int(scan_points),
        scan_span=float(scan_span),
        monotone=monotone,
        peak_at_zero=peak_at_zero,
        peak_value=float(p[0]),
        tail_value=float(p[-1]),
        unit_peak_sigma=1.0 / math.sqrt(2.0 * math.pi),
        triples=tuple(checked),
    )


def write_wavefield_csv(field: WaveField, path: str) -> None:
    """Write the primary slice as CSV with columns x,re_psi,im_psi."""
    x = field.grid.x
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("x,re_psi,im_psi\n")
        for xi, pi in zip(x, field.psi):
            fh.write(f"{xi:.17g},{pi.real:.17g},{pi.imag:.17g}\n")
