"""Built-in scenario catalog.

Each scenario bundles a grid, a time grid, a physical configuration, and a
way to produce the trajectory (closed-form sampling or split-step
evolution), together with the equations it is meant to verify.  The CLI
and the convergence utilities both build from here, so a scenario id plus
overrides fully determines a run.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np

from .density import MixtureSpec
from .grids import SpatialGrid, TimeGrid, Trajectory, WaveField, make_spatial_grid
from .propagate import EvolveParams, GroundStateParams, evolve, imaginary_time_ground_state
from .states import (PotentialSpec, bright_soliton, free_gaussian_at,
                     gaussian_packet, hermite_eigenstate, soliton_at)

__all__ = ["ScenarioInfo", "ScenarioData", "SCENARIOS", "scenario_ids",
           "default_config", "build_scenario"]

SOLITON_HALF_WIDTH = 12 * np.pi   # sech decay makes both the boundary and
                                  # the spectral tail negligible at n=512


@dataclass(frozen=True)
class ScenarioInfo:
    name: str
    description: str
    equations: tuple[str, ...]
    diagnostic: bool = False      # eq16 runs in mixture-defect mode


@dataclass(frozen=True, eq=False)
class ScenarioData:
    """A built scenario: the source (trajectory or mixture) plus what the
    residual engine needs to verify it."""

    name: str
    source: Trajectory | MixtureSpec
    potential: PotentialSpec
    g: float
    diagnostic_mixture: bool = False


SCENARIOS = {
    "free_gaussian": ScenarioInfo(
        "free_gaussian",
        "spreading Gaussian packet, U=0, g=0, sampled from the closed form",
        ("eq4", "eq9")),
    "harmonic_eigenstate": ScenarioInfo(
        "harmonic_eigenstate",
        "oscillator eigenstate evolved in its trap (level configurable)",
        ("eq4", "eq9")),
    "harmonic_mixture": ScenarioInfo(
        "harmonic_mixture",
        "0.6/0.4 mixture of the two lowest oscillator eigenstates",
        ("eq4", "eq9")),
    "gpe_soliton": ScenarioInfo(
        "gpe_soliton",
        "bright soliton of the attractive cubic equation (amplitude and "
        "velocity configurable)",
        ("eq16",)),
    "gpe_trap_ground": ScenarioInfo(
        "gpe_trap_ground",
        "repulsive condensate ground state in a harmonic trap, found by "
        "imaginary time then evolved",
        ("eq16",)),
    "mixture_nonclosure": ScenarioInfo(
        "mixture_nonclosure",
        "equal mixture of two solitons: the cubic-equation defect stays "
        "above a positive floor (non-closure witness)",
        ("eq16",), diagnostic=True),
}


def scenario_ids() -> tuple[str, ...]:
    return tuple(SCENARIOS)


_DEFAULTS = {
    "free_gaussian": {
        "grid": {"n": 256, "x_min": -16.0, "x_max": 16.0},
        "time": {"t0": 1.0, "dt": 1e-2, "steps": 101, "store_stride": 1},
        "physics": {
            "g": 0.0,
            "potential": {"kind": "zero"},
            "initial": {"kind": "gaussian", "x0": -2.0, "p0": 0.0, "width": 1.0},
            "source": "closed_form",
        },
        "verify": {"equations": ["eq4", "eq9"], "time_pairs": 5,
                   "refinement_levels": 3},
    },
    "harmonic_eigenstate": {
        "grid": {"n": 256, "x_min": -16.0, "x_max": 16.0},
        "time": {"t0": 0.0, "dt": 1e-3, "steps": 2001, "store_stride": 10},
        "physics": {
            "g": 0.0,
            "potential": {"kind": "harmonic", "omega": 1.0},
            "initial": {"kind": "hermite", "level": 0},
            "source": "evolve",
        },
        "verify": {"equations": ["eq4", "eq9"], "time_pairs": 5,
                   "refinement_levels": 0},
    },
    "harmonic_mixture": {
        "grid": {"n": 256, "x_min": -16.0, "x_max": 16.0},
        "time": {"t0": 0.0, "dt": 1e-3, "steps": 2001, "store_stride": 10},
        "physics": {
            "g": 0.0,
            "potential": {"kind": "harmonic", "omega": 1.0},
            "initial": {"kind": "mixture", "weights": [0.6, 0.4],
                        "components": [{"kind": "hermite", "level": 0},
                                       {"kind": "hermite", "level": 1}]},
            "source": "evolve",
        },
        "verify": {"equations": ["eq4", "eq9"], "time_pairs": 5,
                   "refinement_levels": 0},
    },
    "gpe_soliton": {
        "grid": {"n": 512, "x_min": -SOLITON_HALF_WIDTH, "x_max": SOLITON_HALF_WIDTH},
        "time": {"t0": 0.0, "dt": 1e-3, "steps": 1281, "store_stride": 10},
        "physics": {
            "g": -1.0,
            "potential": {"kind": "zero"},
            "initial": {"kind": "soliton", "amplitude": 1.0, "x0": 0.0,
                        "velocity": 0.5},
            "source": "evolve",
        },
        "verify": {"equations": ["eq16"], "time_pairs": 5,
                   "refinement_levels": 3},
    },
    "gpe_trap_ground": {
        "grid": {"n": 256, "x_min": -16.0, "x_max": 16.0},
        "time": {"t0": 0.0, "dt": 1e-3, "steps": 2001, "store_stride": 10},
        "physics": {
            "g": 1.0,
            "potential": {"kind": "harmonic", "omega": 1.0},
            "initial": {"kind": "ground_state", "target_norm": 1.0,
                        "dtau": 1e-3, "tol": 1e-5, "max_iter": 200000},
            "source": "evolve",
        },
        "verify": {"equations": ["eq16"], "time_pairs": 5,
                   "refinement_levels": 0},
    },
    "mixture_nonclosure": {
        "grid": {"n": 512, "x_min": -SOLITON_HALF_WIDTH, "x_max": SOLITON_HALF_WIDTH},
        "time": {"t0": 0.0, "dt": 1e-2, "steps": 129, "store_stride": 1},
        "physics": {
            "g": -1.0,
            "potential": {"kind": "zero"},
            "initial": {"kind": "mixture", "weights": [0.5, 0.5],
                        "components": [
                            {"kind": "soliton", "amplitude": 1.0, "x0": 0.0,
                             "velocity": 0.0},
                            {"kind": "soliton", "amplitude": 1.5, "x0": 0.0,
                             "velocity": 0.0}]},
            "source": "closed_form",
        },
        "verify": {"equations": ["eq16"], "time_pairs": 5,
                   "refinement_levels": 4},
    },
}


def default_config(scenario_id: str) -> dict:
    """Deep copy of the scenario's default configuration dict."""
    if scenario_id not in _DEFAULTS:
        raise ValueError(f"unknown scenario {scenario_id!r}; "
                         f"known: {', '.join(scenario_ids())}")
    cfg = copy.deepcopy(_DEFAULTS[scenario_id])
    cfg["scenario"] = scenario_id
    return cfg


# ---------------------------------------------------------------------------
# building
# ---------------------------------------------------------------------------

def _potential_from(cfg: dict) -> PotentialSpec:
    kind = cfg.get("kind", "zero")
    if kind == "zero":
        return PotentialSpec.zero()
    if kind == "harmonic":
        return PotentialSpec.harmonic(cfg.get("omega", 1.0))
    if kind == "tabulated":
        return PotentialSpec.tabulated(np.asarray(cfg["values"], dtype=float))
    raise ValueError(f"unknown potential kind {kind!r}")


def _initial_field(init: dict, grid: SpatialGrid, potential: PotentialSpec,
                   g: float, t0: float) -> WaveField:
    kind = init["kind"]
    if kind == "gaussian":
        return gaussian_packet(init.get("x0", 0.0), init.get("p0", 0.0),
                               init.get("width", 1.0), grid, time_tag=t0)
    if kind == "hermite":
        state = hermite_eigenstate(int(init.get("level", 0)), grid)
        return WaveField(grid, state.field.values, t0)
    if kind == "soliton":
        state = bright_soliton(init.get("amplitude", 1.0), init.get("x0", 0.0),
                               init.get("velocity", 0.0), g, grid)
        return WaveField(grid, state.field.values, t0)
    if kind == "ground_state":
        params = GroundStateParams(
            g=g, potential=potential,
            target_norm=init.get("target_norm", 1.0),
            dtau=init.get("dtau", 1e-3), tol=init.get("tol", 1e-5),
            max_iter=int(init.get("max_iter", 200000)))
        state = imaginary_time_ground_state(params, grid)
        return WaveField(grid, state.field.values, t0)
    raise ValueError(f"unknown initial state kind {kind!r}")


def _closed_form_sampler(init: dict, potential: PotentialSpec, g: float):
    kind = init["kind"]
    if kind == "gaussian":
        if potential.kind != "zero" or g != 0.0:
            raise ValueError(
                "closed-form Gaussian sampling requires U=0 and g=0")
        return lambda grid, t: free_gaussian_at(
            init.get("x0", 0.0), init.get("p0", 0.0), init.get("width", 1.0),
            grid, t)
    if kind == "hermite":
        if potential.kind != "harmonic" or potential.omega != 1.0 or g != 0.0:
            raise ValueError(
                "closed-form eigenstate sampling requires harmonic(omega=1), g=0")
        level = int(init.get("level", 0))

        def sample(grid, t, _level=level):
            state = hermite_eigenstate(_level, grid)
            vals = state.field.values * np.exp(-1j * state.energy * t)
            return WaveField(grid, vals, t)
        return sample
    if kind == "soliton":
        if potential.kind != "zero":
            raise ValueError("closed-form soliton sampling requires U=0")
        return lambda grid, t: soliton_at(
            init.get("amplitude", 1.0), init.get("x0", 0.0),
            init.get("velocity", 0.0), g, grid, t)
    raise ValueError(f"no closed form available for initial kind {kind!r}")


def _build_component(init: dict, grid: SpatialGrid, time: dict,
                     potential: PotentialSpec, g: float, source: str) -> Trajectory:
    t0, dt = float(time["t0"]), float(time["dt"])
    steps, stride = int(time["steps"]), int(time.get("store_stride", 1))
    if source == "closed_form":
        sampler = _closed_form_sampler(init, potential, g)
        stored = TimeGrid(t0, dt * stride, (steps - 1) // stride + 1)
        snaps = tuple(sampler(grid, float(t)) for t in stored.times)
        return Trajectory(grid, stored, snaps, g, potential)
    if source == "evolve":
        params = EvolveParams(g=g, potential=potential,
                              time_grid=TimeGrid(t0, dt, steps),
                              store_stride=stride)
        return evolve(_initial_field(init, grid, potential, g, t0), params)
    raise ValueError(f"unknown source {source!r} (use closed_form or evolve)")


def build_scenario(config: dict) -> ScenarioData:
    """Construct the trajectory or mixture a configuration describes."""
    name = config.get("scenario", "custom")
    grid_cfg = config["grid"]
    grid = make_spatial_grid(int(grid_cfg["n"]), float(grid_cfg["x_min"]),
                             float(grid_cfg["x_max"]))
    phys = config["physics"]
    potential = _potential_from(phys.get("potential", {"kind": "zero"}))
    g = float(phys.get("g", 0.0))
    source = phys.get("source", "evolve")
    init = phys["initial"]

    diagnostic = bool(SCENARIOS[name].diagnostic) if name in SCENARIOS else \
        bool(config.get("verify", {}).get("mixture_diagnostic", False))

    if init["kind"] == "mixture":
        comps = tuple(
            _build_component(c, grid, config["time"], potential, g, source)
            for c in init["components"])
        mix = MixtureSpec(tuple(float(w) for w in init["weights"]), comps,
                          allow_unnormalized=diagnostic)
        return ScenarioData(name, mix, potential, g,
                            diagnostic_mixture=diagnostic)
    traj = _build_component(init, grid, config["time"], potential, g, source)
    return ScenarioData(name, traj, potential, g)
