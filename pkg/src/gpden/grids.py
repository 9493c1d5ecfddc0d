"""Uniform periodic grids, complex fields, and spectral primitives.

Everything downstream (states, propagation, density matrices, residuals)
works on the objects defined here.  Grids are periodic on [x_min, x_max)
with a power-of-two point count so the FFT-based operators are exact for
resolved harmonics.  All containers are frozen and their arrays are marked
read-only; operations are pure functions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .states import PotentialSpec

__all__ = [
    "SpatialGrid",
    "TimeGrid",
    "WaveField",
    "Trajectory",
    "make_spatial_grid",
    "make_time_grid",
    "spectral_second_derivative",
    "second_derivative_along_axis",
    "inner_product",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpatialGrid:
    """Periodic uniform grid on [x_min, x_max) with FFT wavenumbers.

    ``wavenumbers`` follows the standard unshifted FFT layout:
    k_0 = 0, k_j = -k_{n-j} for 0 < j < n/2, spacing 2*pi/(x_max - x_min).
    """

    n: int
    x_min: float
    x_max: float
    dx: float
    points: np.ndarray
    wavenumbers: np.ndarray

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpatialGrid):
            return NotImplemented
        return (self.n, self.x_min, self.x_max) == (other.n, other.x_min, other.x_max)

    def __hash__(self) -> int:
        return hash((self.n, self.x_min, self.x_max))

    @property
    def length(self) -> float:
        return self.x_max - self.x_min


def make_spatial_grid(n: int, x_min: float, x_max: float) -> SpatialGrid:
    """Build a periodic grid with n points (power of two, n >= 8)."""
    if n < 8 or (n & (n - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 8, got n={n}")
    if not x_max > x_min:
        raise ValueError(f"degenerate interval: x_min={x_min}, x_max={x_max}")
    dx = (x_max - x_min) / n
    points = x_min + dx * np.arange(n)
    wavenumbers = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
    return SpatialGrid(n, float(x_min), float(x_max), dx,
                       _readonly(points), _readonly(wavenumbers))


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time points t_k = t0 + k*dt for k in [0, steps)."""

    t0: float
    dt: float
    steps: int

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"time step must be positive, got dt={self.dt}")
        if self.steps < 2:
            raise ValueError(f"need at least 2 time points, got steps={self.steps}")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.steps)


def make_time_grid(t0: float, dt: float, steps: int) -> TimeGrid:
    return TimeGrid(float(t0), float(dt), int(steps))


@dataclass(frozen=True, eq=False)
class WaveField:
    """Complex amplitudes on a spatial grid at one instant."""

    grid: SpatialGrid
    values: np.ndarray
    time_tag: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n,):
            raise ValueError(
                f"field length {vals.shape} does not match grid n={self.grid.n}")
        if not np.all(np.isfinite(vals.view(float))):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", _readonly(vals))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Ordered snapshots of a field at the uniformly spaced stored times.

    ``g`` is the cubic coupling used to generate it (0 for linear runs) and
    ``potential`` the generating potential; the residual checks need both.
    """

    grid: SpatialGrid
    time_grid: TimeGrid
    snapshots: tuple[WaveField, ...]
    g: float
    potential: "PotentialSpec"

    def __post_init__(self):
        object.__setattr__(self, "snapshots", tuple(self.snapshots))
        if len(self.snapshots) != self.time_grid.steps:
            raise ValueError(
                f"{len(self.snapshots)} snapshots for {self.time_grid.steps} stored times")
        times = self.time_grid.times
        for k, snap in enumerate(self.snapshots):
            if snap.grid != self.grid:
                raise ValueError(f"snapshot {k} lives on a different grid")
            if abs(snap.time_tag - times[k]) > 1e-9 * max(1.0, abs(times[k])):
                raise ValueError(
                    f"snapshot {k} tagged t={snap.time_tag}, expected {times[k]}")

    def __len__(self) -> int:
        return len(self.snapshots)

    @property
    def times(self) -> np.ndarray:
        return self.time_grid.times

    def map_values(self, fn) -> "Trajectory":
        """New trajectory with fn applied to every snapshot's values."""
        snaps = tuple(WaveField(self.grid, fn(s.values), s.time_tag)
                      for s in self.snapshots)
        return Trajectory(self.grid, self.time_grid, snaps, self.g, self.potential)


# ---------------------------------------------------------------------------
# spectral operators and inner products
# ---------------------------------------------------------------------------

def second_derivative_along_axis(values: np.ndarray, grid: SpatialGrid,
                                 axis: int = -1) -> np.ndarray:
    """d^2/dx^2 along one axis of a complex array via FFT (multiply by -k^2)."""
    k2 = grid.wavenumbers ** 2
    shape = [1] * values.ndim
    shape[axis] = grid.n
    spec = np.fft.fft(values, axis=axis)
    spec *= -k2.reshape(shape)
    return np.fft.ifft(spec, axis=axis)


def spectral_second_derivative(f: WaveField) -> WaveField:
    """Second spatial derivative of a field, spectrally accurate for smooth
    periodic data."""
    return WaveField(f.grid, second_derivative_along_axis(f.values, f.grid),
                     f.time_tag)


def inner_product(f: WaveField, h: WaveField) -> complex:
    """Discrete L2 pairing dx * sum(conj(f) * h); conjugate-linear in f."""
    if f.grid != h.grid:
        raise ValueError("inner_product requires fields on the same grid")
    return complex(f.grid.dx * np.vdot(f.values, h.values))
