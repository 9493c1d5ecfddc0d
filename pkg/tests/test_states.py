import numpy as np
import pytest

from gpden import inner_product, make_spatial_grid
from gpden.grids import WaveField, second_derivative_along_axis
from gpden.states import (PotentialSpec, bright_soliton, evaluate_potential,
                          free_gaussian_at, gaussian_packet,
                          hermite_eigenstate, resolution_report, soliton_at)


# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------

def test_zero_potential(grid256):
    assert np.array_equal(evaluate_potential(PotentialSpec.zero(), grid256),
                          np.zeros(256))


def test_harmonic_potential_values(grid256):
    u1 = evaluate_potential(PotentialSpec.harmonic(1.0), grid256)
    i2 = np.argmin(np.abs(grid256.points - 2.0))
    assert u1[i2] == pytest.approx(2.0)
    u2 = evaluate_potential(PotentialSpec.harmonic(2.0), grid256)
    i1 = np.argmin(np.abs(grid256.points - 1.0))
    assert u2[i1] == pytest.approx(2.0)


def test_tabulated_potential(grid256):
    vals = grid256.points ** 4
    spec = PotentialSpec.tabulated(vals)
    assert np.array_equal(evaluate_potential(spec, grid256), vals)
    short = PotentialSpec.tabulated(np.zeros(128))
    with pytest.raises(ValueError, match="128"):
        evaluate_potential(short, grid256)


def test_potential_spec_validation():
    with pytest.raises(ValueError, match="omega"):
        PotentialSpec.harmonic(0.0)
    with pytest.raises(ValueError, match="kind"):
        PotentialSpec("anharmonic")
    with pytest.raises(ValueError, match="non-finite"):
        PotentialSpec.tabulated([0.0, np.inf])


# ---------------------------------------------------------------------------
# oscillator eigenstates
# ---------------------------------------------------------------------------

def test_ground_state_peak_value(grid256):
    state = hermite_eigenstate(0, grid256)
    i0 = np.argmin(np.abs(grid256.points))
    assert state.field.values[i0].real == pytest.approx(np.pi ** -0.25, abs=1e-12)
    assert state.energy == 0.5


def test_first_excited_vanishes_at_origin(grid256):
    state = hermite_eigenstate(1, grid256)
    i0 = np.argmin(np.abs(grid256.points))
    assert abs(state.field.values[i0]) < 1e-15
    assert state.energy == 1.5


def test_eigenstates_orthonormal():
    grid = make_spatial_grid(512, -16.0, 16.0)
    states = [hermite_eigenstate(n, grid) for n in range(6)]
    for m in range(6):
        for n in range(6):
            ip = inner_product(states[m].field, states[n].field)
            assert abs(ip - (1.0 if m == n else 0.0)) < 1e-9


def test_eigenstates_satisfy_discrete_eigenproblem():
    grid = make_spatial_grid(512, -16.0, 16.0)
    u = evaluate_potential(PotentialSpec.harmonic(1.0), grid)
    for n in range(6):
        state = hermite_eigenstate(n, grid)
        vals = state.field.values
        h_vals = -0.5 * second_derivative_along_axis(vals, grid) + u * vals
        assert np.abs(h_vals - (n + 0.5) * vals).max() < 1e-8


def test_eigenstate_rejects_negative_level(grid256):
    with pytest.raises(ValueError, match=">= 0"):
        hermite_eigenstate(-1, grid256)


def test_eigenstate_boundary_warning():
    narrow = make_spatial_grid(64, -4.0, 4.0)
    with pytest.warns(UserWarning, match="boundary"):
        hermite_eigenstate(0, narrow)


# ---------------------------------------------------------------------------
# Gaussian packets
# ---------------------------------------------------------------------------

def test_packet_normalization_and_peak(grid256):
    f = gaussian_packet(0.0, 0.0, 1.0, grid256)
    i0 = np.argmin(np.abs(grid256.points))
    assert f.values[i0] == pytest.approx(np.pi ** -0.25)
    assert inner_product(f, f).real == pytest.approx(1.0, abs=1e-10)


def test_packet_translation(grid256):
    f = gaussian_packet(3.0, 0.0, 1.0, grid256)
    peak = np.argmax(np.abs(f.values))
    nearest = np.argmin(np.abs(grid256.points - 3.0))
    assert peak == nearest


def test_packet_width_validation(grid256):
    with pytest.raises(ValueError, match="width"):
        gaussian_packet(0.0, 0.0, 0.0, grid256)


def test_free_gaussian_matches_packet_at_t0(grid256):
    f0 = gaussian_packet(-2.0, 0.5, 1.0, grid256)
    ft = free_gaussian_at(-2.0, 0.5, 1.0, grid256, 0.0)
    assert np.abs(f0.values - ft.values).max() < 1e-14


def test_free_gaussian_norm_and_drift(grid256):
    ft = free_gaussian_at(0.0, 1.0, 1.0, grid256, 2.0)
    assert inner_product(ft, ft).real == pytest.approx(1.0, abs=1e-10)
    # packet center follows classical motion x = x0 + p0 t
    center = np.argmax(np.abs(ft.values))
    assert abs(grid256.points[center] - 2.0) < 3 * grid256.dx


# ---------------------------------------------------------------------------
# bright solitons
# ---------------------------------------------------------------------------

def test_soliton_profile_and_mu(soliton_grid):
    state = bright_soliton(1.0, 0.0, 0.0, -1.0, soliton_grid)
    assert state.energy == pytest.approx(-0.5)
    expected = 1.0 / np.cosh(soliton_grid.points)
    assert np.abs(state.field.values - expected).max() < 1e-14
    nsq = inner_product(state.field, state.field).real
    assert nsq == pytest.approx(2.0, abs=1e-8)


def test_soliton_requires_attractive_coupling(soliton_grid):
    with pytest.raises(ValueError, match="g < 0"):
        bright_soliton(1.0, 0.0, 0.0, 1.0, soliton_grid)
    with pytest.raises(ValueError, match="amplitude"):
        bright_soliton(-1.0, 0.0, 0.0, -1.0, soliton_grid)


def test_soliton_stationary_defect(soliton_grid):
    # -phi''/2 + g |phi|^2 phi = mu phi on the grid
    state = bright_soliton(1.0, 0.0, 0.0, -1.0, soliton_grid)
    vals = state.field.values
    lhs = (-0.5 * second_derivative_along_axis(vals, soliton_grid)
           - np.abs(vals) ** 2 * vals)
    assert np.abs(lhs - state.energy * vals).max() < 1e-8


def test_soliton_scaling_relations(soliton_grid):
    # K = C sqrt(|g|), mu = -K^2/2, norm^2 = 2 C / sqrt(|g|)
    state = bright_soliton(1.5, 0.0, 0.0, -2.0, soliton_grid)
    assert state.energy == pytest.approx(-0.5 * (1.5 * np.sqrt(2.0)) ** 2)
    nsq = inner_product(state.field, state.field).real
    assert nsq == pytest.approx(2 * 1.5 / np.sqrt(2.0), abs=1e-8)


def test_moving_soliton_phase(soliton_grid):
    # resting soliton acquires exp(+i K^2 t / 2) = exp({+i t/2}) for C=1, g=-1
    t = 1.0
    f = soliton_at(1.0, 0.0, 0.0, -1.0, soliton_grid, t)
    expected = (1.0 / np.cosh(soliton_grid.points)) * np.exp(0.5j * t)
    assert np.abs(f.values - expected).max() < 1e-14


def test_resolution_report(grid256, soliton_grid):
    good = hermite_eigenstate(0, grid256)
    rep = resolution_report(good.field)
    assert rep["adequate"]
    sol = bright_soliton(1.0, 0.0, 0.0, -1.0, soliton_grid)
    assert resolution_report(sol.field)["adequate"]
    with pytest.warns(UserWarning):
        coarse = bright_soliton(1.0, 0.0, 0.0, -1.0,
                                make_spatial_grid(16, -16.0, 16.0))
    rep = resolution_report(coarse.field)
    assert not rep["adequate"]
