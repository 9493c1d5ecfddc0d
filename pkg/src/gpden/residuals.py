"""Residual verification of the density-matrix evolution equations.

Discrete trajectories are checked against three continuous equations by
forming each equation's defect on stored snapshots, with time derivatives
taken by second-order central differences on the stored time grid and
spatial derivatives taken spectrally.  The time stencils never re-invoke
the solver's right-hand side, so a small residual is an independent
verification, not a tautology.

Equation ids (also the tokens used in config files and residuals.csv):

  eq4   single-time von Neumann equation for rho(x, x', t):
        i d_t rho + (rho_xx - rho_x'x')/2 - (U(x) - U(x')) rho = 0
  eq9   two-time linear equation for R(x, x', t, t'):
        i d_t R + i d_t' R + (R_xx - R_x'x')/2 - (U(x) - U(x')) R = 0
  eq16  two-time cubic equation (the nonlinear, nonlocal closure for pure
        states of the cubic Schrodinger flow):
        eq9 defect term  -  g R [R(x, x, t, t) - R(x', x', t', t')] = 0
        where the bracket holds the equal-time diagonals |psi(x, t)|^2 and
        |psi(x', t')|^2.

The cubic equation closes only for pure states: the defect of a genuine
mixture does not vanish as the stencil is refined.  mixture_cubic_defect
computes that non-closure witness; the strict entry point rejects mixtures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .density import MixtureSpec
from .grids import SpatialGrid, Trajectory, second_derivative_along_axis
from .states import PotentialSpec, evaluate_potential

__all__ = [
    "EQUATION_IDS",
    "StencilSpec",
    "ResidualReport",
    "ConvergenceReport",
    "von_neumann_residual",
    "two_time_linear_residual",
    "two_time_cubic_residual",
    "mixture_cubic_defect",
    "convergence_study",
    "convergence_order",
]

EQUATION_IDS = ("eq4", "eq9", "eq16")


@dataclass(frozen=True)
class StencilSpec:
    """Discretization used by the verifier (central second-order time
    stencil on the stored sub-grid, spectral space derivatives)."""

    time_scheme: str = "central_2nd"
    spatial_scheme: str = "spectral"

    def __post_init__(self):
        if self.time_scheme != "central_2nd":
            raise ValueError(f"unsupported time scheme {self.time_scheme!r}")
        if self.spatial_scheme != "spectral":
            raise ValueError(f"unsupported spatial scheme {self.spatial_scheme!r}")


@dataclass(frozen=True)
class ResidualReport:
    """Pointwise and integrated size of one equation's defect."""

    equation_id: str
    max_abs: float
    l2: float
    time_pair: tuple[float, ...]
    grid_meta: tuple[int, float]     # (n, dt_sample)

    def __post_init__(self):
        if self.equation_id not in EQUATION_IDS:
            raise ValueError(f"unknown equation id {self.equation_id!r}")
        if self.max_abs < 0 or self.l2 < 0:
            raise ValueError("residual norms must be nonnegative")


@dataclass(frozen=True)
class ConvergenceReport:
    """max_abs residual across stencil refinements of one scenario.

    ``levels`` pairs (dt_sample, max_abs) sorted by decreasing dt_sample;
    ``pair_orders`` holds log2(r_coarse / r_fine) per adjacent pair and
    ``pair_at_floor`` flags pairs where halving changed the residual by
    less than 10% (the estimate is then meaningless, not a failure).
    """

    scenario: str
    equation_id: str
    levels: tuple[tuple[float, float], ...]
    pair_orders: tuple[float, ...]
    pair_at_floor: tuple[bool, ...]
    estimated_order: float

    def __post_init__(self):
        if len(self.levels) < 3:
            raise ValueError(f"need at least 3 levels, got {len(self.levels)}")
        dts = [dt for dt, _ in self.levels]
        if any(later >= earlier for earlier, later in zip(dts, dts[1:])):
            raise ValueError(f"levels must be sorted by decreasing dt_sample: {dts}")

    @property
    def at_floor(self) -> bool:
        return all(self.pair_at_floor)


# ---------------------------------------------------------------------------
# defect assembly
# ---------------------------------------------------------------------------

def _component_views(source: Trajectory | MixtureSpec):
    """Uniform access to (weights, snapshot arrays, grid, time grid, g)."""
    if isinstance(source, Trajectory):
        return ((1.0,), (source.snapshots,), source.grid,
                source.time_grid, (source.g,))
    if isinstance(source, MixtureSpec):
        return (source.weights, tuple(c.snapshots for c in source.components),
                source.grid, source.time_grid,
                tuple(c.g for c in source.components))
    raise TypeError(f"expected Trajectory or MixtureSpec, got {type(source).__name__}")


def _weighted_outer(weights, snaps_per_component, k: int, l: int) -> np.ndarray:
    acc = None
    for w, snaps in zip(weights, snaps_per_component):
        m = np.outer(snaps[k].values, snaps[l].values.conj())
        acc = w * m if acc is None else acc + w * m
    return acc


def _spatial_defect(matrix: np.ndarray, grid: SpatialGrid,
                    pot: np.ndarray) -> np.ndarray:
    """(d_xx - d_x'x') M / 2 - (U(x) - U(x')) M, rows indexed by x."""
    d_x = second_derivative_along_axis(matrix, grid, axis=0)
    d_xp = second_derivative_along_axis(matrix, grid, axis=1)
    return 0.5 * (d_x - d_xp) - (pot[:, None] - pot[None, :]) * matrix


def _report(equation_id: str, defect: np.ndarray, grid: SpatialGrid,
            time_pair: tuple, dt_sample: float) -> ResidualReport:
    max_abs = float(np.abs(defect).max())
    l2 = float(np.sqrt(grid.dx * grid.dx * np.sum(np.abs(defect) ** 2)))
    return ResidualReport(equation_id, max_abs, l2, time_pair, (grid.n, dt_sample))


def _require_interior(idx: int, count: int, name: str):
    if not 0 < idx < count - 1:
        raise IndexError(
            f"{name}={idx} must be an interior stored index (0 < {name} < {count - 1})")


def _require_linear(gs, what: str):
    for g in gs:
        if g != 0.0:
            raise ValueError(
                f"{what} governs linear dynamics only; source was generated "
                f"with g={g}")


def von_neumann_residual(source: Trajectory | MixtureSpec,
                         potential: PotentialSpec, k: int,
                         stencil: StencilSpec = StencilSpec()) -> ResidualReport:
    """Defect of the single-time equation at stored index k:

    i (rho_{k+1} - rho_{k-1}) / (2 dt) + (rho_xx - rho_x'x')/2 - (U - U') rho
    """
    weights, comps, grid, tg, gs = _component_views(source)
    _require_linear(gs, "the single-time density-matrix equation (eq4)")
    _require_interior(k, tg.steps, "k")
    pot = evaluate_potential(potential, grid)
    rho_m = _weighted_outer(weights, comps, k - 1, k - 1)
    rho_0 = _weighted_outer(weights, comps, k, k)
    rho_p = _weighted_outer(weights, comps, k + 1, k + 1)
    defect = 1j * (rho_p - rho_m) / (2 * tg.dt) + _spatial_defect(rho_0, grid, pot)
    t_k = float(tg.times[k])
    return _report("eq4", defect, grid, (t_k,), tg.dt)


def _linear_two_time_defect(weights, comps, grid, tg, pot,
                            k: int, l: int) -> np.ndarray:
    # d_t varies the unprimed factor (snapshots k+-1), d_t' the primed one
    r_0 = _weighted_outer(weights, comps, k, l)
    d_t = (_weighted_outer(weights, comps, k + 1, l)
           - _weighted_outer(weights, comps, k - 1, l)) / (2 * tg.dt)
    d_tp = (_weighted_outer(weights, comps, k, l + 1)
            - _weighted_outer(weights, comps, k, l - 1)) / (2 * tg.dt)
    return 1j * d_t + 1j * d_tp + _spatial_defect(r_0, grid, pot)


def two_time_linear_residual(source: Trajectory | MixtureSpec,
                             potential: PotentialSpec, k: int, l: int,
                             stencil: StencilSpec = StencilSpec()) -> ResidualReport:
    """Defect of the two-time linear equation at stored indices (k, l)."""
    weights, comps, grid, tg, gs = _component_views(source)
    _require_linear(gs, "the two-time linear equation (eq9)")
    _require_interior(k, tg.steps, "k")
    _require_interior(l, tg.steps, "l")
    pot = evaluate_potential(potential, grid)
    defect = _linear_two_time_defect(weights, comps, grid, tg, pot, k, l)
    times = tg.times
    return _report("eq9", defect, grid, (float(times[k]), float(times[l])), tg.dt)


def _cubic_defect(weights, comps, grid, tg, pot, g: float,
                  k: int, l: int) -> np.ndarray:
    defect = _linear_two_time_defect(weights, comps, grid, tg, pot, k, l)
    if g != 0.0:
        # equal-time diagonals of the (possibly mixed) two-time matrix
        diag_k = np.zeros(grid.n)
        diag_l = np.zeros(grid.n)
        for w, snaps in zip(weights, comps):
            diag_k += w * np.abs(snaps[k].values) ** 2
            diag_l += w * np.abs(snaps[l].values) ** 2
        r_0 = _weighted_outer(weights, comps, k, l)
        defect = defect - g * r_0 * (diag_k[:, None] - diag_l[None, :])
    return defect


def two_time_cubic_residual(traj: Trajectory, potential: PotentialSpec,
                            g: float, k: int, l: int,
                            stencil: StencilSpec = StencilSpec()) -> ResidualReport:
    """Defect of the two-time cubic equation on a pure-state trajectory.

    With g = 0 the cubic bracket vanishes and the report coincides exactly
    with two_time_linear_residual.  Mixtures are rejected: the cubic
    equation is derived for a single wave function, and a mixture's defect
    does not converge to zero (see mixture_cubic_defect).
    """
    if isinstance(traj, MixtureSpec):
        raise TypeError(
            "the two-time cubic equation closes only for pure states; a "
            "mixture's defect stays bounded away from zero under stencil "
            "refinement -- use mixture_cubic_defect to compute it anyway")
    weights, comps, grid, tg, _ = _component_views(traj)
    _require_interior(k, tg.steps, "k")
    _require_interior(l, tg.steps, "l")
    pot = evaluate_potential(potential, grid)
    defect = _cubic_defect(weights, comps, grid, tg, pot, g, k, l)
    times = tg.times
    return _report("eq16", defect, grid, (float(times[k]), float(times[l])), tg.dt)


def mixture_cubic_defect(mix: MixtureSpec, potential: PotentialSpec,
                         g: float, k: int, l: int) -> ResidualReport:
    """Diagnostic: the cubic-equation defect evaluated on a mixture.

    The bracket uses the mixture's own equal-time diagonals.  For mixtures
    of distinct nonlinear states the result plateaus above a positive floor
    as dt_sample -> 0; that floor witnesses the pure-state-only character
    of the cubic closure.
    """
    weights, comps, grid, tg, _ = _component_views(mix)
    _require_interior(k, tg.steps, "k")
    _require_interior(l, tg.steps, "l")
    pot = evaluate_potential(potential, grid)
    defect = _cubic_defect(weights, comps, grid, tg, pot, g, k, l)
    times = tg.times
    return _report("eq16", defect, grid, (float(times[k]), float(times[l])), tg.dt)


# ---------------------------------------------------------------------------
# convergence in the sampling step
# ---------------------------------------------------------------------------

def _subsample(source: Trajectory | MixtureSpec, stride: int):
    """Every stride-th snapshot as a new source on the coarsened time grid."""
    if isinstance(source, Trajectory):
        tg = source.time_grid
        if (tg.steps - 1) % stride != 0:
            raise ValueError(f"stride {stride} does not divide {tg.steps - 1} intervals")
        from .grids import TimeGrid
        sub_tg = TimeGrid(tg.t0, tg.dt * stride, (tg.steps - 1) // stride + 1)
        snaps = source.snapshots[::stride]
        return Trajectory(source.grid, sub_tg, snaps, source.g, source.potential)
    return MixtureSpec(source.weights,
                       tuple(_subsample(c, stride) for c in source.components),
                       allow_unnormalized=True)


def _residual_at(source, potential, g: float, equation_id: str,
                 k: int, l: int, diagnostic_mixture: bool) -> float:
    if equation_id == "eq4":
        return von_neumann_residual(source, potential, k).max_abs
    if equation_id == "eq9":
        return two_time_linear_residual(source, potential, k, l).max_abs
    if equation_id == "eq16":
        if isinstance(source, MixtureSpec):
            if not diagnostic_mixture:
                raise ValueError("eq16 on a mixture requires diagnostic mode")
            return mixture_cubic_defect(source, potential, g, k, l).max_abs
        return two_time_cubic_residual(source, potential, g, k, l).max_abs
    raise ValueError(f"unknown equation id {equation_id!r}")


def convergence_study(source: Trajectory | MixtureSpec, potential: PotentialSpec,
                      g: float, equation_id: str, refinement_levels: int = 3,
                      scenario: str = "custom",
                      diagnostic_mixture: bool = False) -> ConvergenceReport:
    """Residual vs sampling step, by coarsening the stored time grid.

    Level j uses every 2^j-th snapshot, finest last; the anchor time pair is
    chosen once, at stored indices that stay interior at every stride, so
    all levels evaluate the defect at the same physical times.
    """
    if refinement_levels < 3:
        raise ValueError(f"need at least 3 refinement levels, got {refinement_levels}")
    _, _, _, tg, _ = _component_views(source)
    s_max = 2 ** (refinement_levels - 1)
    count = tg.steps
    if count < 4 * s_max + 1:
        raise ValueError(
            f"{count} stored snapshots cannot support {refinement_levels} "
            f"refinement levels (need at least {4 * s_max + 1})")
    # center the anchors, offset by 2*s_max, snapped to the coarsest stride
    c = ((count - 1) // 2 // s_max) * s_max
    k0, l0 = c - 2 * s_max, c + 2 * s_max
    if equation_id == "eq4":
        k0 = l0 = c

    levels = []
    for j in range(refinement_levels - 1, -1, -1):
        stride = 2 ** j
        sub = _subsample(source, stride)
        r = _residual_at(sub, potential, g, equation_id,
                         k0 // stride, l0 // stride, diagnostic_mixture)
        levels.append((tg.dt * stride, r))

    pair_orders, pair_floor = [], []
    for (dt_c, r_c), (dt_f, r_f) in zip(levels, levels[1:]):
        if r_c == 0.0 or r_f == 0.0:
            pair_orders.append(float("nan"))
            pair_floor.append(True)
            continue
        pair_orders.append(math.log2(r_c / r_f))
        pair_floor.append(abs(r_c - r_f) / r_c < 0.10)
    finite = [o for o in pair_orders if not math.isnan(o)]
    est = float(np.mean(finite)) if finite else float("nan")
    return ConvergenceReport(scenario, equation_id, tuple(levels),
                             tuple(pair_orders), tuple(pair_floor), est)


def convergence_order(scenario_id: str, equation_id: str,
                      refinement_levels: int = 3) -> ConvergenceReport:
    """Convergence study for a cataloged scenario under its default
    configuration."""
    from . import scenarios as _scenarios
    data = _scenarios.build_scenario(_scenarios.default_config(scenario_id))
    return convergence_study(data.source, data.potential, data.g, equation_id,
                             refinement_levels, scenario=scenario_id,
                             diagnostic_mixture=data.diagnostic_mixture)
