import numpy as np
import pytest

from gpden import (EvolveParams, MixtureSpec, TimeGrid, Trajectory, WaveField,
                   evolve, hermite_eigenstate, make_spatial_grid)
from gpden.density import (generalized_density, mixture_density,
                           mixture_generalized_density, pure_density, purity,
                           stationary_generalized_density)
from gpden.states import PotentialSpec, bright_soliton, soliton_at


# ---------------------------------------------------------------------------
# pure densities
# ---------------------------------------------------------------------------

def test_pure_density_basics(grid256):
    phi0 = hermite_eigenstate(0, grid256).field
    rho = pure_density(phi0)
    assert np.allclose(np.diag(rho.values), np.abs(phi0.values) ** 2)
    assert rho.trace.real == pytest.approx(1.0, abs=1e-10)
    assert abs(rho.trace.imag) < 1e-12
    assert rho.purity_hint == "pure"


def test_pure_density_hermitian_exactly(grid256):
    rng = np.random.default_rng(11)
    vals = rng.normal(size=256) + 1j * rng.normal(size=256)
    f = WaveField(grid256, vals, 0.0)
    rho = pure_density(f).values
    assert np.array_equal(rho, rho.conj().T)


def test_pure_density_purity(grid256):
    phi0 = hermite_eigenstate(0, grid256).field
    assert purity(pure_density(phi0)) == pytest.approx(1.0, abs=1e-8)


def test_density_positive_semidefinite_spot_check(grid256):
    phi0 = hermite_eigenstate(0, grid256).field
    rho = pure_density(phi0)
    rng = np.random.default_rng(5)
    for _ in range(5):
        v = rng.normal(size=256) + 1j * rng.normal(size=256)
        quad = grid256.dx * np.real(np.vdot(v, rho.values @ v))
        assert quad >= -1e-10


# ---------------------------------------------------------------------------
# two-time matrices
# ---------------------------------------------------------------------------

def test_equal_time_reduction_bitwise(evolved_phi0):
    for k in range(len(evolved_phi0)):
        two_time = generalized_density(evolved_phi0, k, k)
        rho = pure_density(evolved_phi0.snapshots[k])
        assert np.array_equal(two_time.values, rho.values)
        assert two_time.t == two_time.t_prime


def test_exchange_symmetry_exact(evolved_phi0):
    a = generalized_density(evolved_phi0, 30, 170)
    b = generalized_density(evolved_phi0, 170, 30)
    assert np.array_equal(a.values, b.values.conj().T)
    assert (a.t, a.t_prime) == (b.t_prime, b.t)


def test_two_time_index_range(evolved_phi0):
    with pytest.raises(IndexError):
        generalized_density(evolved_phi0, 0, len(evolved_phi0))


def test_two_time_rank_one(evolved_phi0):
    mat = generalized_density(evolved_phi0, 20, 150)
    s = np.linalg.svd(mat.values, compute_uv=False)
    assert s[0] ** 2 / np.sum(s ** 2) > 1 - 1e-10


def test_evolved_two_time_matches_stationary_form(evolved_phi0, grid256):
    phi0 = hermite_eigenstate(0, grid256)
    k, l = 30, 160
    times = evolved_phi0.times
    computed = generalized_density(evolved_phi0, k, l)
    exact = stationary_generalized_density(phi0, times[k], times[l])
    assert np.abs(computed.values - exact.values).max() < 1e-5


# ---------------------------------------------------------------------------
# mixtures
# ---------------------------------------------------------------------------

def test_mixture_weight_validation(evolved_phi0, evolved_phi1):
    comps = (evolved_phi0, evolved_phi1)
    with pytest.raises(ValueError, match="sum to 1"):
        MixtureSpec((0.7, 0.4), comps)
    with pytest.raises(ValueError, match="nonnegative"):
        MixtureSpec((1.2, -0.2), comps)
    with pytest.raises(ValueError, match="weights for"):
        MixtureSpec((1.0,), comps)


def test_mixture_requires_unit_norm_components(soliton_grid):
    tg = TimeGrid(0.0, 1e-2, 5)
    zero = PotentialSpec.zero()
    snaps = tuple(soliton_at(1.0, 0.0, 0.0, -1.0, soliton_grid, float(t))
                  for t in tg.times)
    sol = Trajectory(soliton_grid, tg, snaps, -1.0, zero)
    with pytest.raises(ValueError, match="unit-norm"):
        MixtureSpec((0.5, 0.5), (sol, sol))
    mix = MixtureSpec((0.5, 0.5), (sol, sol), allow_unnormalized=True)
    assert len(mix) == 5


def test_single_component_mixture_equals_pure(evolved_phi0):
    mix = MixtureSpec((1.0,), (evolved_phi0,))
    rho_mix = mixture_density(mix, 7)
    rho = pure_density(evolved_phi0.snapshots[7])
    assert np.array_equal(rho_mix.values, rho.values)
    two = mixture_generalized_density(mix, 3, 9)
    direct = generalized_density(evolved_phi0, 3, 9)
    assert np.array_equal(two.values, direct.values)


def test_mixture_equal_time_reduction(evolved_mixture):
    for k in (0, 50, 200):
        two = mixture_generalized_density(evolved_mixture, k, k)
        rho = mixture_density(evolved_mixture, k)
        assert np.array_equal(two.values, rho.values)


def test_mixture_trace_and_purity(evolved_mixture):
    rho = mixture_density(evolved_mixture, 10)
    assert rho.trace.real == pytest.approx(1.0, abs=1e-10)
    # orthogonal 0.6/0.4 mixture: Tr rho^2 = 0.36 + 0.16
    assert purity(rho) == pytest.approx(0.52, abs=1e-8)
    assert rho.purity_hint == "mixed"


def test_mixture_density_time_independent_analytic(grid256, harmonic):
    # eigenstate phases cancel inside each |psi_n(x,t)|^2 outer product
    tg = TimeGrid(0.0, 0.25, 9)
    comps = []
    for level in (0, 1):
        state = hermite_eigenstate(level, grid256)
        snaps = tuple(WaveField(grid256,
                                state.field.values * np.exp(-1j * state.energy * t),
                                float(t)) for t in tg.times)
        comps.append(Trajectory(grid256, tg, snaps, 0.0, harmonic))
    mix = MixtureSpec((0.6, 0.4), tuple(comps))
    first = mixture_density(mix, 0)
    last = mixture_density(mix, 8)
    assert np.abs(last.values - first.values).max() < 1e-8


def test_mixture_density_time_independent_by_evolution(grid256, harmonic):
    # direct split-step evolution at dt=4e-4 keeps the drift below 1e-8
    comps = []
    for level in (0, 1):
        state = hermite_eigenstate(level, grid256)
        params = EvolveParams(g=0.0, potential=harmonic,
                              time_grid=TimeGrid(0.0, 4e-4, 5001),
                              store_stride=5000)
        comps.append(evolve(WaveField(grid256, state.field.values, 0.0), params))
    mix = MixtureSpec((0.6, 0.4), tuple(comps))
    first = mixture_density(mix, 0)
    last = mixture_density(mix, 1)
    assert np.abs(last.values - first.values).max() < 1e-8


def test_mixture_two_time_closed_form(evolved_mixture, grid256):
    phi0 = hermite_eigenstate(0, grid256)
    phi1 = hermite_eigenstate(1, grid256)
    mix5050 = MixtureSpec((0.5, 0.5), evolved_mixture.components)
    k, l = 40, 140
    times = mix5050.time_grid.times
    computed = mixture_generalized_density(mix5050, k, l)
    dt_pair = times[k] - times[l]
    expected = (0.5 * np.exp(-0.5j * dt_pair)
                * np.outer(phi0.field.values, phi0.field.values.conj())
                + 0.5 * np.exp(-1.5j * dt_pair)
                * np.outer(phi1.field.values, phi1.field.values.conj()))
    assert np.abs(computed.values - expected).max() < 1e-5


# ---------------------------------------------------------------------------
# stationary closed form
# ---------------------------------------------------------------------------

def test_stationary_form_equal_times(grid256):
    phi0 = hermite_eigenstate(0, grid256)
    two = stationary_generalized_density(phi0, 2.5, 2.5)
    rho = pure_density(phi0.field)
    assert np.array_equal(two.values, rho.values)


def test_stationary_form_periodicity(grid256):
    phi0 = hermite_eigenstate(0, grid256)   # E = 1/2, period 4*pi
    ref = stationary_generalized_density(phi0, 0.0, 0.0)
    wrapped = stationary_generalized_density(phi0, 4 * np.pi, 0.0)
    assert np.abs(wrapped.values - ref.values).max() < 1e-12


def test_stationary_form_soliton_phase_sign(soliton_grid):
    sol = bright_soliton(1.0, 0.0, 0.0, -1.0, soliton_grid)   # mu = -1/2
    two = stationary_generalized_density(sol, 1.0, 0.0)
    base = np.outer(sol.field.values, sol.field.values.conj())
    assert np.abs(two.values - np.exp(0.5j) * base).max() < 1e-12
