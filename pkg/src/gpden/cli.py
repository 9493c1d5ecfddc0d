"""Command-line runner: scenario configs, deterministic file outputs.

    gpden list                              show the scenario catalog
    gpden run    --config cfg.json [--set key=value ...]
    gpden verify --config cfg.json          residuals on a trajectory dump

A config is a JSON object; unset fields fall back to the chosen scenario's
defaults.  Data files are byte-stable across reruns of the same config;
the manifest (written last) carries timestamps and per-file checksums.
The optional environment variable GPDEN_OUTPUT_ROOT prefixes relative
output directories.
"""
from __future__ import annotations

import argparse
import copy
import csv
import datetime as _dt
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .density import MixtureSpec, generalized_density, mixture_generalized_density
from .grids import TimeGrid, Trajectory, WaveField, make_spatial_grid
from .propagate import chemical_potential, energy, norm
from .residuals import (EQUATION_IDS, convergence_study, mixture_cubic_defect,
                        two_time_cubic_residual, two_time_linear_residual,
                        von_neumann_residual)
from .scenarios import SCENARIOS, build_scenario, default_config, scenario_ids
from .states import PotentialSpec

__all__ = ["ConfigError", "load_config", "run_config", "verify_config", "main"]


class ConfigError(ValueError):
    """Invalid configuration, carrying the offending field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _apply_set(config: dict, assignment: str):
    if "=" not in assignment:
        raise ConfigError("--set", f"expected key=value, got {assignment!r}")
    path, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = config
    keys = path.split(".")
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(path, "path crosses a non-object value")
    node[keys[-1]] = value


def load_config(path: str | Path, overrides: list[str] = ()) -> dict:
    """Read a config file, merge scenario defaults under it, apply --set."""
    with open(path) as fh:
        user = json.load(fh)
    if not isinstance(user, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    scenario = user.get("scenario", "custom")
    if scenario != "custom":
        if scenario not in SCENARIOS:
            raise ConfigError("scenario",
                              f"unknown scenario {scenario!r}; known: "
                              f"{', '.join(scenario_ids())} or custom")
        config = _deep_merge(default_config(scenario), user)
    else:
        config = copy.deepcopy(user)
        config.setdefault("verify", {})
        config["verify"].setdefault("time_pairs", 5)
        config["verify"].setdefault("refinement_levels", 0)
    for assignment in overrides:
        _apply_set(config, assignment)
    config.setdefault("output", {})
    config["output"].setdefault("directory", "gpden_out")
    config["output"].setdefault("formats", ["csv", "json"])
    config["output"].setdefault("dump_trajectory", False)
    return config


def _require(config: dict, path: str):
    node = config
    for key in path.split("."):
        if not isinstance(node, dict) or key not in node:
            raise ConfigError(path, "missing required field")
        node = node[key]
    return node


def validate_config(config: dict, for_verify: bool = False):
    """Fail fast on anything the modules would reject later."""
    out = config.get("output", {})
    formats = out.get("formats", [])
    if not formats or not set(formats) <= {"csv", "json"}:
        raise ConfigError("output.formats",
                          f"must be a non-empty subset of [csv, json], got {formats}")
    ver = config.get("verify", {})
    equations = ver.get("equations", [])
    for eq in equations:
        if eq not in EQUATION_IDS:
            raise ConfigError("verify.equations", f"unknown equation id {eq!r}")
    if int(ver.get("time_pairs", 5)) < 1:
        raise ConfigError("verify.time_pairs", "must be >= 1")

    if for_verify:
        _require(config, "trajectory_dump")
        return

    grid = _require(config, "grid")
    try:
        make_spatial_grid(int(grid["n"]), float(grid["x_min"]), float(grid["x_max"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError("grid", str(exc)) from exc
    time = _require(config, "time")
    steps = int(time.get("steps", 0))
    if steps < 2:
        raise ConfigError("time.steps", f"need at least 2 time points, got {steps}")
    if float(time.get("dt", 0.0)) <= 0:
        raise ConfigError("time.dt", "must be positive")
    stride = int(time.get("store_stride", 1))
    if stride < 1 or (steps - 1) % stride != 0:
        raise ConfigError("time.store_stride",
                          f"{stride} does not divide {steps - 1} solver steps")
    phys = _require(config, "physics")
    g = float(phys.get("g", 0.0))
    if g != 0.0 and ({"eq4", "eq9"} & set(equations)):
        raise ConfigError("verify.equations",
                          "eq4/eq9 govern linear dynamics; requested with "
                          f"g={g}")
    try:
        pot = phys.get("potential", {"kind": "zero"})
        kind = pot.get("kind", "zero")
        if kind == "harmonic":
            PotentialSpec.harmonic(pot.get("omega", 1.0))
        elif kind == "tabulated":
            PotentialSpec.tabulated(np.asarray(pot["values"], dtype=float))
        elif kind != "zero":
            raise ValueError(f"unknown potential kind {kind!r}")
    except (KeyError, ValueError) as exc:
        raise ConfigError("physics.potential", str(exc)) from exc
    init = _require(config, "physics.initial")
    if init.get("kind") not in ("gaussian", "hermite", "soliton",
                                "ground_state", "mixture"):
        raise ConfigError("physics.initial.kind",
                          f"unknown initial state kind {init.get('kind')!r}")
    if init.get("kind") == "mixture":
        if "eq16" in equations:
            name = config.get("scenario", "custom")
            diagnostic = (name in SCENARIOS and SCENARIOS[name].diagnostic) or \
                bool(ver.get("mixture_diagnostic", False))
            if not diagnostic:
                raise ConfigError(
                    "verify.equations",
                    "eq16 closes only for pure states; set "
                    "verify.mixture_diagnostic=true to compute the defect anyway")


# ---------------------------------------------------------------------------
# deterministic writers
# ---------------------------------------------------------------------------

def _f(x: float) -> str:
    return repr(float(x))


def _write_text(path: Path, text: str):
    path.write_text(text)


def _residual_rows_csv(rows: list[dict]) -> str:
    lines = ["equation_id,t,t_prime,n,dt_sample,max_abs,l2"]
    for r in rows:
        lines.append(",".join([r["equation_id"], _f(r["t"]), _f(r["t_prime"]),
                               str(r["n"]), _f(r["dt_sample"]),
                               _f(r["max_abs"]), _f(r["l2"])]))
    return "\n".join(lines) + "\n"


def _observable_rows_csv(rows: list[dict]) -> str:
    lines = ["component,t,norm,energy,chemical_potential"]
    for r in rows:
        lines.append(",".join([str(r["component"]), _f(r["t"]), _f(r["norm"]),
                               _f(r["energy"]), _f(r["chemical_potential"])]))
    return "\n".join(lines) + "\n"


def _heatmap_csv(matrix, grid) -> str:
    header = (f"n={grid.n},x_min={_f(grid.x_min)},x_max={_f(grid.x_max)},"
              f"t={_f(matrix.t)},t_prime={_f(matrix.t_prime)}")
    lines = [header]
    for row in matrix.values:
        parts = []
        for z in row:
            parts.append(_f(z.real))
            parts.append(_f(z.imag))
        lines.append(",".join(parts))
    return "\n".join(lines) + "\n"


def _trajectory_dump_csv(traj: Trajectory) -> str:
    tg = traj.time_grid
    header = (f"n={traj.grid.n},x_min={_f(traj.grid.x_min)},"
              f"x_max={_f(traj.grid.x_max)},t0={_f(tg.t0)},dt={_f(tg.dt)},"
              f"steps={tg.steps},g={_f(traj.g)}")
    lines = [header]
    for snap in traj.snapshots:
        parts = []
        for z in snap.values:
            parts.append(_f(z.real))
            parts.append(_f(z.imag))
        lines.append(",".join(parts))
    return "\n".join(lines) + "\n"


def read_trajectory_dump(path: str | Path,
                         potential: PotentialSpec) -> Trajectory:
    """Inverse of the run writer: header line, then one (re, im) row per
    stored snapshot."""
    with open(path) as fh:
        header = fh.readline().strip()
        meta = {}
        for part in header.split(","):
            key, _, val = part.partition("=")
            meta[key] = val
        n = int(meta["n"])
        grid = make_spatial_grid(n, float(meta["x_min"]), float(meta["x_max"]))
        tg = TimeGrid(float(meta["t0"]), float(meta["dt"]), int(meta["steps"]))
        g = float(meta["g"])
        snaps = []
        for idx, line in enumerate(fh):
            nums = np.array([float(v) for v in line.strip().split(",")])
            if nums.size != 2 * n:
                raise ValueError(
                    f"snapshot row {idx} has {nums.size} numbers, expected {2 * n}")
            vals = nums[0::2] + 1j * nums[1::2]
            snaps.append(WaveField(grid, vals, float(tg.times[idx])))
    if len(snaps) != tg.steps:
        raise ValueError(f"dump holds {len(snaps)} rows, header says {tg.steps}")
    return Trajectory(grid, tg, tuple(snaps), g, potential)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# run pipeline
# ---------------------------------------------------------------------------

def _interior_sample(count: int, m: int) -> list[int]:
    """m uniformly spaced interior stored indices (deduplicated)."""
    if count < 3:
        raise ValueError("need at least 3 stored snapshots for residuals")
    lo, hi = 1, count - 2
    picks = np.unique(np.round(np.linspace(lo, hi, min(m, hi - lo + 1))).astype(int))
    return [int(v) for v in picks]


def _residual_rows(data, equations, time_pairs: int) -> list[dict]:
    source, potential, g = data.source, data.potential, data.g
    count = source.time_grid.steps if isinstance(source, MixtureSpec) \
        else len(source)
    ks = _interior_sample(count, time_pairs)
    rows = []
    for eq in equations:
        if eq == "eq4":
            reports = [von_neumann_residual(source, potential, k) for k in ks]
        elif eq == "eq9":
            reports = [two_time_linear_residual(source, potential, k, l)
                       for k in ks for l in ks]
        elif eq == "eq16":
            if isinstance(source, MixtureSpec):
                reports = [mixture_cubic_defect(source, potential, g, k, l)
                           for k in ks for l in ks]
            else:
                reports = [two_time_cubic_residual(source, potential, g, k, l)
                           for k in ks for l in ks]
        else:
            raise ConfigError("verify.equations", f"unknown equation id {eq!r}")
        for rep in reports:
            t = rep.time_pair[0]
            t_prime = rep.time_pair[-1]
            rows.append({"equation_id": rep.equation_id, "t": t,
                         "t_prime": t_prime, "n": rep.grid_meta[0],
                         "dt_sample": rep.grid_meta[1],
                         "max_abs": rep.max_abs, "l2": rep.l2})
    return rows


def _observable_rows(data) -> list[dict]:
    rows = []
    if isinstance(data.source, MixtureSpec):
        comps = list(enumerate(data.source.components))
    else:
        comps = [(0, data.source)]
    for idx, traj in comps:
        for snap in traj.snapshots:
            rows.append({
                "component": idx,
                "t": snap.time_tag,
                "norm": norm(snap),
                "energy": energy(snap, data.potential, data.g),
                "chemical_potential": chemical_potential(snap, data.potential,
                                                         data.g),
            })
    return rows


def _heatmap_matrix(data, time_pairs: int):
    count = data.source.time_grid.steps if isinstance(data.source, MixtureSpec) \
        else len(data.source)
    ks = _interior_sample(count, time_pairs)
    k, l = ks[0], ks[-1]
    if isinstance(data.source, MixtureSpec):
        return mixture_generalized_density(data.source, k, l)
    return generalized_density(data.source, k, l)


def _output_dir(config: dict) -> Path:
    directory = Path(config["output"]["directory"])
    root = os.environ.get("GPDEN_OUTPUT_ROOT")
    if root and not directory.is_absolute():
        directory = Path(root) / directory
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def _emit(config: dict, out_dir: Path, rows, observables, heatmap,
          convergence_reports, trajectory) -> dict:
    formats = config["output"]["formats"]
    written: dict[str, str] = {}

    def save(name: str, text: str):
        path = out_dir / name
        _write_text(path, text)
        written[name] = _sha256(path)

    if "csv" in formats:
        save("residuals.csv", _residual_rows_csv(rows))
        save("observables.csv", _observable_rows_csv(observables))
        if heatmap is not None:
            save("heatmap_two_time.csv", _heatmap_csv(*heatmap))
    if "json" in formats:
        save("residuals.json", json.dumps(rows, sort_keys=True, indent=1) + "\n")
        save("observables.json",
             json.dumps(observables, sort_keys=True, indent=1) + "\n")
        if heatmap is not None:
            matrix, grid = heatmap
            entries = [[v.real, v.imag] for row in matrix.values for v in row]
            save("heatmap_two_time.json", json.dumps({
                "n": grid.n, "x_min": grid.x_min, "x_max": grid.x_max,
                "t": matrix.t, "t_prime": matrix.t_prime,
                "layout": "row-major (re, im) pairs",
                "entries": entries}, sort_keys=True) + "\n")
    if convergence_reports:
        ordered = sorted(convergence_reports,
                         key=lambda r: (r.scenario, r.equation_id))
        payload = [{
            "scenario": rep.scenario,
            "equation_id": rep.equation_id,
            "levels": [[dt, r] for dt, r in rep.levels],
            "pair_orders": list(rep.pair_orders),
            "pair_at_floor": list(rep.pair_at_floor),
            "estimated_order": rep.estimated_order,
            "at_floor": rep.at_floor,
        } for rep in ordered]
        save("convergence.json",
             json.dumps(payload, sort_keys=True, indent=1) + "\n")
    if trajectory is not None:
        save("trajectory.csv", _trajectory_dump_csv(trajectory))
    return written


def _manifest(config: dict, written: dict, started: str, out_dir: Path) -> Path:
    manifest = {
        "config": config,
        "started_utc": started,
        "finished_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "versions": {
            "gpden": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
        "outputs": {name: f"sha256:{digest}" for name, digest in sorted(written.items())},
        "status": "ok",
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    return path


def run_config(config: dict) -> Path:
    """Execute a full run; returns the manifest path."""
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    validate_config(config)
    out_dir = _output_dir(config)
    data = build_scenario(config)
    ver = config.get("verify", {})
    equations = list(ver.get("equations", []))
    time_pairs = int(ver.get("time_pairs", 5))

    rows = _residual_rows(data, equations, time_pairs)
    observables = _observable_rows(data)
    heatmap = None
    if equations:
        grid = data.source.grid
        heatmap = (_heatmap_matrix(data, time_pairs), grid)

    convergence_reports = []
    levels = int(ver.get("refinement_levels", 0))
    if levels >= 3:
        for eq in equations:
            convergence_reports.append(convergence_study(
                data.source, data.potential, data.g, eq, levels,
                scenario=data.name,
                diagnostic_mixture=data.diagnostic_mixture))

    trajectory = None
    if config["output"].get("dump_trajectory") and not isinstance(
            data.source, MixtureSpec):
        trajectory = data.source

    written = _emit(config, out_dir, rows, observables, heatmap,
                    convergence_reports, trajectory)
    return _manifest(config, written, started, out_dir)


def verify_config(config: dict) -> Path:
    """Residual checks on a precomputed trajectory dump."""
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    validate_config(config, for_verify=True)
    out_dir = _output_dir(config)
    pot_cfg = config.get("physics", {}).get("potential", {"kind": "zero"})
    kind = pot_cfg.get("kind", "zero")
    if kind == "harmonic":
        potential = PotentialSpec.harmonic(pot_cfg.get("omega", 1.0))
    elif kind == "tabulated":
        potential = PotentialSpec.tabulated(np.asarray(pot_cfg["values"],
                                                       dtype=float))
    else:
        potential = PotentialSpec.zero()
    traj = read_trajectory_dump(config["trajectory_dump"], potential)

    ver = config.get("verify", {})
    equations = list(ver.get("equations", []))
    for eq in equations:
        if eq in ("eq4", "eq9") and traj.g != 0.0:
            raise ConfigError("verify.equations",
                              f"{eq} requested on a dump generated with g={traj.g}")

    from .scenarios import ScenarioData
    data = ScenarioData("verify", traj, potential, traj.g)
    rows = _residual_rows(data, equations, int(ver.get("time_pairs", 5)))
    written = _emit(config, out_dir, rows, _observable_rows(data), None, [], None)
    return _manifest(config, written, started, out_dir)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def list_scenarios(file=None) -> None:
    file = file or sys.stdout
    print(f"{'scenario':<22} {'verifies':<16} description", file=file)
    for info in SCENARIOS.values():
        eqs = ",".join(info.equations)
        if info.diagnostic:
            eqs += " (diagnostic)"
        print(f"{info.name:<22} {eqs:<16} {info.description}", file=file)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gpden",
        description="simulate 1D Schrodinger / cubic-Schrodinger dynamics and "
                    "verify the density-matrix evolution equations on the result")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="print the scenario catalog")
    for name, help_text in (("run", "build a scenario and verify it"),
                            ("verify", "verify a precomputed trajectory dump")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       dest="overrides", help="override a config field "
                       "(dotted path, JSON value)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list":
            list_scenarios()
            return 0
        config = load_config(args.config, args.overrides)
        if args.command == "run":
            manifest = run_config(config)
        else:
            manifest = verify_config(config)
        print(f"wrote {manifest}")
        return 0
    except Exception as exc:  # report machine-readably, fail nonzero
        record = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        if isinstance(exc, ConfigError):
            record["error"]["field"] = exc.field
        print(json.dumps(record), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
