"""Potentials and closed-form states: oscillator eigenstates, Gaussian
packets, and bright solitons of the attractive cubic equation.

These are the oracles: every solver and residual check in the package is
ultimately compared against something constructed here.  Units are fixed
(hbar = m = 1) throughout.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grids import SpatialGrid, WaveField

__all__ = [
    "PotentialSpec",
    "StationaryState",
    "evaluate_potential",
    "hermite_eigenstate",
    "gaussian_packet",
    "free_gaussian_at",
    "bright_soliton",
    "soliton_at",
    "resolution_report",
]

BOUNDARY_AMPLITUDE_LIMIT = 1e-12
SPECTRAL_TAIL_LIMIT = 1e-12


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """One of: zero, harmonic(omega) = omega^2 x^2 / 2, or tabulated values."""

    kind: str
    omega: float = 0.0
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("zero", "harmonic", "tabulated"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "harmonic" and not self.omega > 0:
            raise ValueError(f"harmonic potential needs omega > 0, got {self.omega}")
        if self.kind == "tabulated":
            if self.values is None:
                raise ValueError("tabulated potential needs values")
            vals = np.asarray(self.values, dtype=float)
            if not np.all(np.isfinite(vals)):
                raise ValueError("tabulated potential contains non-finite values")
            object.__setattr__(self, "values", vals)

    @classmethod
    def zero(cls) -> "PotentialSpec":
        return cls("zero")

    @classmethod
    def harmonic(cls, omega: float = 1.0) -> "PotentialSpec":
        return cls("harmonic", omega=float(omega))

    @classmethod
    def tabulated(cls, values) -> "PotentialSpec":
        return cls("tabulated", values=values)


def evaluate_potential(spec: PotentialSpec, grid: SpatialGrid) -> np.ndarray:
    """Real potential values on the grid points."""
    if spec.kind == "zero":
        return np.zeros(grid.n)
    if spec.kind == "harmonic":
        return 0.5 * spec.omega ** 2 * grid.points ** 2
    vals = spec.values
    if len(vals) != grid.n:
        raise ValueError(
            f"tabulated potential has {len(vals)} values for grid n={grid.n}")
    return vals.copy()


@dataclass(frozen=True, eq=False)
class StationaryState:
    """Time-independent profile with its frequency.

    ``energy`` is the eigenvalue for linear eigenstates and the chemical
    potential for nonlinear stationary states; either way the full solution
    is profile * exp(-i * energy * t).
    """

    field: WaveField
    energy: float
    kind: str               # linear_eigenstate | gpe_ground | gpe_soliton
    level: int | None = None

    def __post_init__(self):
        nsq = self.field.grid.dx * np.sum(np.abs(self.field.values) ** 2)
        if not (np.isfinite(nsq) and nsq > 0):
            raise ValueError("stationary state must have positive finite norm")

    @property
    def label(self) -> str:
        if self.kind == "linear_eigenstate":
            return f"linear_eigenstate({self.level})"
        return self.kind


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def _check_boundary(values: np.ndarray, what: str):
    edge = max(abs(values[0]), abs(values[-1]))
    if edge >= BOUNDARY_AMPLITUDE_LIMIT:
        warnings.warn(
            f"{what}: boundary amplitude {edge:.2e} exceeds "
            f"{BOUNDARY_AMPLITUDE_LIMIT:.0e}; widen the domain", stacklevel=3)


def hermite_eigenstate(n: int, grid: SpatialGrid) -> StationaryState:
    """n-th eigenstate of the dimensionless oscillator (omega = 1), E = n + 1/2.

    Uses the normalized three-term recurrence
    h_0 = pi^(-1/4) exp(-x^2/2),  h_{k+1} = sqrt(2/(k+1)) x h_k - sqrt(k/(k+1)) h_{k-1}
    which is stable far beyond any level used here.
    """
    if n < 0:
        raise ValueError(f"eigenstate index must be >= 0, got {n}")
    x = grid.points
    h_prev = np.zeros_like(x)
    h = np.pi ** -0.25 * np.exp(-0.5 * x ** 2)
    for k in range(n):
        h, h_prev = np.sqrt(2.0 / (k + 1)) * x * h - np.sqrt(k / (k + 1.0)) * h_prev, h
    _check_boundary(h, f"hermite_eigenstate({n})")
    return StationaryState(WaveField(grid, h.astype(complex), 0.0),
                           energy=n + 0.5, kind="linear_eigenstate", level=n)


def gaussian_packet(x0: float, p0: float, width: float,
                    grid: SpatialGrid, time_tag: float = 0.0) -> WaveField:
    """Normalized Gaussian centered at x0 with mean momentum p0."""
    if width <= 0:
        raise ValueError(f"packet width must be positive, got {width}")
    x = grid.points
    vals = ((np.pi * width ** 2) ** -0.25
            * np.exp(-((x - x0) ** 2) / (2 * width ** 2) + 1j * p0 * (x - x0)))
    _check_boundary(vals, "gaussian_packet")
    return WaveField(grid, vals, time_tag)


def free_gaussian_at(x0: float, p0: float, width: float,
                     grid: SpatialGrid, t: float) -> WaveField:
    """Exact free evolution (U = 0, g = 0) of gaussian_packet at time t.

    psi(x,t) = (pi w^2)^(-1/4) (1 + i t/w^2)^(-1/2)
               * exp(-(x - x0 - p0 t)^2 / (2 w^2 (1 + i t/w^2)))
               * exp(i (p0 (x - x0) - p0^2 t / 2))
    reducing to the packet itself at t = 0.
    """
    if width <= 0:
        raise ValueError(f"packet width must be positive, got {width}")
    x = grid.points
    tau = 1.0 + 1j * t / width ** 2
    vals = ((np.pi * width ** 2) ** -0.25 / np.sqrt(tau)
            * np.exp(-((x - x0 - p0 * t) ** 2) / (2 * width ** 2 * tau)
                     + 1j * (p0 * (x - x0) - 0.5 * p0 ** 2 * t)))
    return WaveField(grid, vals, t)


def _soliton_params(amplitude: float, g: float) -> tuple[float, float]:
    if g >= 0:
        raise ValueError(
            f"bright soliton requires attractive coupling g < 0, got g={g}")
    if amplitude <= 0:
        raise ValueError(f"soliton amplitude must be positive, got {amplitude}")
    decay = amplitude * np.sqrt(-g)
    mu = -0.5 * decay ** 2
    return decay, mu


def bright_soliton(amplitude: float, x0: float, v: float, g: float,
                   grid: SpatialGrid) -> StationaryState:
    """Bright soliton profile C sech(K (x - x0)) e^{i v x} with K = C sqrt(|g|).

    Its chemical potential is mu = -K^2/2; the full moving solution is
    returned by soliton_at.  For v = 0 the profile is a genuine stationary
    state of the cubic equation.
    """
    decay, mu = _soliton_params(amplitude, g)
    x = grid.points
    vals = amplitude / np.cosh(decay * (x - x0)) * np.exp(1j * v * x)
    _check_boundary(vals, "bright_soliton")
    return StationaryState(WaveField(grid, vals, 0.0), energy=mu,
                           kind="gpe_soliton")


def soliton_at(amplitude: float, x0: float, v: float, g: float,
               grid: SpatialGrid, t: float) -> WaveField:
    """Exact moving bright soliton at time t:

    psi(x,t) = C sech(K (x - x0 - v t)) exp(i (v x - (v^2/2 + mu) t)).
    """
    decay, mu = _soliton_params(amplitude, g)
    x = grid.points
    vals = (amplitude / np.cosh(decay * (x - x0 - v * t))
            * np.exp(1j * (v * x - (0.5 * v ** 2 + mu) * t)))
    return WaveField(grid, vals, t)


def resolution_report(f: WaveField) -> dict:
    """Adequacy diagnostics: boundary amplitude and high-wavenumber tail.

    A grid is adequate for f when the boundary amplitude is below 1e-12 and
    the top 10% of wavenumbers carry less than 1e-12 of the norm.
    """
    vals = f.values
    boundary = float(max(abs(vals[0]), abs(vals[-1])))
    spec = np.abs(np.fft.fft(vals)) ** 2
    k = np.abs(f.grid.wavenumbers)
    tail = k >= 0.9 * k.max()
    total = spec.sum()
    tail_fraction = float(spec[tail].sum() / total) if total > 0 else 0.0
    return {
        "boundary_amplitude": boundary,
        "tail_fraction": tail_fraction,
        "adequate": boundary < BOUNDARY_AMPLITUDE_LIMIT
        and tail_fraction < SPECTRAL_TAIL_LIMIT,
    }
