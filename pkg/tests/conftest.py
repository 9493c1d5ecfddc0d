"""Shared fixtures: grids and the expensive evolved/solved trajectories are
built once per session and reused across test modules."""
import numpy as np
import pytest

from gpden import (EvolveParams, GroundStateParams, MixtureSpec, TimeGrid,
                   Trajectory, WaveField, evolve, hermite_eigenstate,
                   imaginary_time_ground_state, make_spatial_grid)
from gpden.states import PotentialSpec, free_gaussian_at, soliton_at

SOLITON_HALF = 12 * np.pi


@pytest.fixture(scope="session")
def grid256():
    return make_spatial_grid(256, -16.0, 16.0)


@pytest.fixture(scope="session")
def soliton_grid():
    return make_spatial_grid(512, -SOLITON_HALF, SOLITON_HALF)


@pytest.fixture(scope="session")
def harmonic():
    return PotentialSpec.harmonic(1.0)


def _evolve_eigenstate(level, grid, harmonic):
    state = hermite_eigenstate(level, grid)
    params = EvolveParams(g=0.0, potential=harmonic,
                          time_grid=TimeGrid(0.0, 1e-3, 2001), store_stride=10)
    return evolve(WaveField(grid, state.field.values, 0.0), params)


@pytest.fixture(scope="session")
def evolved_phi0(grid256, harmonic):
    """Oscillator ground state evolved to t=2, stored every 1e-2."""
    return _evolve_eigenstate(0, grid256, harmonic)


@pytest.fixture(scope="session")
def evolved_phi1(grid256, harmonic):
    return _evolve_eigenstate(1, grid256, harmonic)


@pytest.fixture(scope="session")
def evolved_mixture(evolved_phi0, evolved_phi1):
    return MixtureSpec((0.6, 0.4), (evolved_phi0, evolved_phi1))


@pytest.fixture(scope="session")
def analytic_phi0(grid256, harmonic):
    """Same stored grid as evolved_phi0 but sampled from the closed form."""
    state = hermite_eigenstate(0, grid256)
    tg = TimeGrid(0.0, 1e-2, 201)
    snaps = tuple(
        WaveField(grid256, state.field.values * np.exp(-0.5j * t), float(t))
        for t in tg.times)
    return Trajectory(grid256, tg, snaps, 0.0, harmonic)


@pytest.fixture(scope="session")
def free_gaussian_traj(grid256):
    """Closed-form spreading packet sampled on t in [1, 2]."""
    tg = TimeGrid(1.0, 1e-2, 101)
    snaps = tuple(free_gaussian_at(-2.0, 0.0, 1.0, grid256, float(t))
                  for t in tg.times)
    return Trajectory(grid256, tg, snaps, 0.0, PotentialSpec.zero())


@pytest.fixture(scope="session")
def resting_soliton_traj(soliton_grid):
    tg = TimeGrid(0.0, 1e-2, 129)
    snaps = tuple(soliton_at(1.0, 0.0, 0.0, -1.0, soliton_grid, float(t))
                  for t in tg.times)
    return Trajectory(soliton_grid, tg, snaps, -1.0, PotentialSpec.zero())


@pytest.fixture(scope="session")
def moving_soliton_traj(soliton_grid):
    """v=0.5 soliton evolved at dt=1e-3, stored every 10 steps."""
    initial = soliton_at(1.0, 0.0, 0.5, -1.0, soliton_grid, 0.0)
    params = EvolveParams(g=-1.0, potential=PotentialSpec.zero(),
                          time_grid=TimeGrid(0.0, 1e-3, 1281), store_stride=10)
    return evolve(initial, params)


@pytest.fixture(scope="session")
def nonclosure_mixture(soliton_grid):
    tg = TimeGrid(0.0, 1e-2, 129)
    zero = PotentialSpec.zero()
    comps = []
    for amp in (1.0, 1.5):
        snaps = tuple(soliton_at(amp, 0.0, 0.0, -1.0, soliton_grid, float(t))
                      for t in tg.times)
        comps.append(Trajectory(soliton_grid, tg, snaps, -1.0, zero))
    return MixtureSpec((0.5, 0.5), tuple(comps), allow_unnormalized=True)


@pytest.fixture(scope="session")
def ho_ground(grid256, harmonic):
    params = GroundStateParams(g=0.0, potential=harmonic, target_norm=1.0,
                               dtau=2e-3, tol=1e-6)
    return imaginary_time_ground_state(params, grid256)


@pytest.fixture(scope="session")
def soliton_ground(soliton_grid):
    params = GroundStateParams(g=-1.0, potential=PotentialSpec.zero(),
                               target_norm=2.0, dtau=1e-3, tol=1e-5)
    return imaginary_time_ground_state(params, soliton_grid)
