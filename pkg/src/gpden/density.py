"""Density matrices: equal-time, convex mixtures, and the two-time
generalization R(x, x', t, t') = psi(x, t) conj(psi(x', t')).

Matrices are stored dense (n x n complex).  Mixtures are kept as weighted
trajectories rather than summed matrices because the residual checks need
per-component time derivatives.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import SpatialGrid, Trajectory, WaveField
from .states import StationaryState

__all__ = [
    "DensityMatrix",
    "GeneralizedDensityMatrix",
    "MixtureSpec",
    "pure_density",
    "mixture_density",
    "generalized_density",
    "mixture_generalized_density",
    "stationary_generalized_density",
    "purity",
]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Equal-time kernel rho(x_i, x'_j); Hermitian with real trace."""

    grid: SpatialGrid
    values: np.ndarray
    time_tag: float
    purity_hint: str = "unknown"   # pure | mixed | unknown

    @property
    def trace(self) -> complex:
        return complex(self.grid.dx * np.trace(self.values))


@dataclass(frozen=True, eq=False)
class GeneralizedDensityMatrix:
    """Two-time kernel tagged with its ordered time pair (t, t_prime)."""

    grid: SpatialGrid
    values: np.ndarray
    t: float
    t_prime: float


@dataclass(frozen=True, eq=False)
class MixtureSpec:
    """Convex weights over component trajectories sharing one grid and one
    stored time grid.

    Components are expected to hold unit-norm snapshots so that mixture
    traces equal one; pass allow_unnormalized=True for diagnostic mixtures
    of states with other normalizations (e.g. solitons).
    """

    weights: tuple[float, ...]
    components: tuple[Trajectory, ...]
    allow_unnormalized: bool = False

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", tuple(float(v) for v in w))
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.weights) != len(self.components):
            raise ValueError(
                f"{len(self.weights)} weights for {len(self.components)} components")
        if len(self.components) == 0:
            raise ValueError("mixture needs at least one component")
        if np.any(w < 0):
            raise ValueError(f"mixture weights must be nonnegative: {self.weights}")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"mixture weights must sum to 1, got {w.sum()!r}")
        first = self.components[0]
        for c in self.components[1:]:
            if c.grid != first.grid:
                raise ValueError("mixture components live on different grids")
            if (c.time_grid.t0, c.time_grid.dt, c.time_grid.steps) != \
               (first.time_grid.t0, first.time_grid.dt, first.time_grid.steps):
                raise ValueError("mixture components use different time grids")
        if not self.allow_unnormalized:
            for i, c in enumerate(self.components):
                for snap in (c.snapshots[0], c.snapshots[-1]):
                    nsq = c.grid.dx * np.sum(np.abs(snap.values) ** 2)
                    if abs(nsq - 1.0) > 1e-8:
                        raise ValueError(
                            f"component {i} is not unit-norm (|psi|^2 integrates "
                            f"to {nsq!r}); pass allow_unnormalized=True if intended")

    @property
    def grid(self) -> SpatialGrid:
        return self.components[0].grid

    @property
    def time_grid(self):
        return self.components[0].time_grid

    def __len__(self) -> int:
        return self.components[0].time_grid.steps


def _outer(bra_side: np.ndarray, ket_side: np.ndarray) -> np.ndarray:
    # psi(x_i) conj(psi'(x_j)); the single construction path keeps equal-time
    # two-time matrices bit-identical to the plain density matrix
    return np.outer(bra_side, ket_side.conj())


def pure_density(f: WaveField) -> DensityMatrix:
    """rho[i, j] = psi(x_i) conj(psi(x_j)) at the field's instant."""
    return DensityMatrix(f.grid, _outer(f.values, f.values), f.time_tag,
                         purity_hint="pure")


def mixture_density(mix: MixtureSpec, k: int) -> DensityMatrix:
    """Convex sum of the component densities at stored time index k."""
    snaps = [c.snapshots[k] for c in mix.components]
    acc = np.zeros((mix.grid.n, mix.grid.n), dtype=complex)
    for w, s in zip(mix.weights, snaps):
        acc += w * _outer(s.values, s.values)
    hint = "pure" if len(mix.components) == 1 else "mixed"
    return DensityMatrix(mix.grid, acc, snaps[0].time_tag, purity_hint=hint)


def generalized_density(traj: Trajectory, k: int, l: int) -> GeneralizedDensityMatrix:
    """Two-time matrix from stored snapshots k (unprimed) and l (primed)."""
    n = len(traj)
    if not (0 <= k < n and 0 <= l < n):
        raise IndexError(f"time indices ({k}, {l}) out of range for {n} snapshots")
    vals = _outer(traj.snapshots[k].values, traj.snapshots[l].values)
    times = traj.times
    return GeneralizedDensityMatrix(traj.grid, vals, float(times[k]), float(times[l]))


def mixture_generalized_density(mix: MixtureSpec, k: int, l: int) -> GeneralizedDensityMatrix:
    """Convex sum of the components' two-time matrices."""
    n = len(mix)
    if not (0 <= k < n and 0 <= l < n):
        raise IndexError(f"time indices ({k}, {l}) out of range for {n} snapshots")
    acc = np.zeros((mix.grid.n, mix.grid.n), dtype=complex)
    for w, c in zip(mix.weights, mix.components):
        acc += w * _outer(c.snapshots[k].values, c.snapshots[l].values)
    times = mix.time_grid.times
    return GeneralizedDensityMatrix(mix.grid, acc, float(times[k]), float(times[l]))


def stationary_generalized_density(state: StationaryState, t: float,
                                   t_prime: float) -> GeneralizedDensityMatrix:
    """Closed-form two-time matrix of a stationary state:

    exp(-i E (t - t')) phi(x) conj(phi(x'))

    with E the eigenvalue (or chemical potential).  At t = t' the phase is 1
    and the matrix reduces to the time-independent pure density.
    """
    phase = np.exp(-1j * state.energy * (t - t_prime))
    vals = phase * _outer(state.field.values, state.field.values)
    return GeneralizedDensityMatrix(state.field.grid, vals, float(t), float(t_prime))


def purity(rho: DensityMatrix) -> float:
    """Tr rho^2 with the dx^2 quadrature weight, so a unit-trace pure state
    gives exactly 1."""
    return float(rho.grid.dx ** 2 * np.sum(np.abs(rho.values) ** 2))
