"""Scenario runner and command-line entry point.

``eqradar run <config> [--preset NAME] [--jobs N] [--out DIR] [--plot]``
builds the pipeline (coupler -> decoherence -> radiation -> radar), runs
the sweep, and writes deterministic CSV (17 significant digits, LF line
endings), an optional self-contained SVG, and a manifest echoing every
resolved parameter.  Exit codes: 2 schema, 3 solver, 4 I/O.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np
from scipy import constants

from . import __version__
from .config import (
    Scenario,
    build_coupler,
    build_radiation,
    load_scenario,
    solver_omega_max,
    validate_scenario,
)
from .coupler import CouplerModel
from .decoherence import solve_elastic_amplitude
from .errors import EqRadarError, SchemaError
from .presets import PRESETS, preset_scenario
from .radar import contrast_sweep
from .radiation import (
    FockLorentzian,
    FockMixture,
    SqueezedNarrowband,
    fc_squeezed_exact,
    franck_condon_factor,
    heat_current,
)
from .svgplot import render_svg

__all__ = ["run", "plot_csv", "main"]

log = logging.getLogger("eqradar")

_CSV_HEADER = "scan_value,x_re,x_im,abs_x,baseline_abs,relative_abs"


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _sweep_values(sweep: dict) -> list:
    if "values" in sweep:
        return [float(v) for v in sweep["values"]]
    return [float(v) for v in
            np.linspace(sweep["start"], sweep["stop"], sweep["num"])]


def _flatten(prefix: str, obj, out: dict):
    if isinstance(obj, dict):
        for key in sorted(obj):
            _flatten(f"{prefix}.{key}" if prefix else str(key), obj[key], out)
    elif isinstance(obj, (list, tuple)):
        out[prefix] = json.dumps(obj)
    else:
        out[prefix] = obj


def _write_csv(path: Path, rows: list, fixed: dict):
    flat: dict = {}
    _flatten("", fixed, flat)
    comment = "; ".join(f"{k}={flat[k]}" for k in sorted(flat))
    with path.open("w", newline="\n") as fh:
        fh.write(f"# {comment}\n")
        fh.write(_CSV_HEADER + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# Recoil-factor builders (picklable, for worker pools)
# ---------------------------------------------------------------------------

class ConstantFcBuilder:
    def __init__(self, fc):
        self.fc = fc

    def __call__(self, value):
        return self.fc


class SqueezedScanBuilder:
    """Rebuilds the squeezed recoil factor when z or omega0 is scanned."""

    def __init__(self, state: SqueezedNarrowband, model: CouplerModel,
                 variable: str):
        self.state = state
        self.model = model
        self.variable = variable

    def __call__(self, value):
        state = self.state
        if self.variable == "z":
            state = dataclasses.replace(state, z=value)
        elif self.variable == "omega0":
            state = dataclasses.replace(
                state, omega0=value,
                s_ba_at_omega0=complex(self.model.s_ba(value)),
            )
        return franck_condon_factor(state, self.model)


class FockScanBuilder:
    def __init__(self, state, model: CouplerModel):
        self.state = state
        self.model = model

    def __call__(self, value):
        state = dataclasses.replace(self.state, omega0=value)
        return franck_condon_factor(state, self.model)


# ---------------------------------------------------------------------------
# Series execution
# ---------------------------------------------------------------------------

def _run_radar_series(series: dict, sweep: dict, values: list, jobs: int,
                      base_dir, solve_cache: dict):
    model = build_coupler(series["coupler"], base_dir)
    state = build_radiation(series["radiation"], model, base_dir)
    variable = sweep["variable"]
    tau_e = float(series["probe"]["tau_e"])
    tau_e_min = min(values) if variable == "tau_e" else tau_e

    omega_max = series["solver"].get("omega_max", "auto")
    if omega_max == "auto":
        omega_max = solver_omega_max(tau_e_min, state)
    step = series["solver"].get("step", "auto")
    step = None if step == "auto" else float(step)

    cache_key = (tuple(sorted(series["coupler"].items())),
                 float(omega_max), step)
    elastic = solve_cache.get(cache_key)
    if elastic is None:
        log.info("solving elastic amplitude to omega_max=%.3e", omega_max)
        elastic = solve_elastic_amplitude(model, float(omega_max), step=step)
        solve_cache[cache_key] = elastic

    if variable == "z" and isinstance(state, SqueezedNarrowband):
        fc_builder = SqueezedScanBuilder(state, model, "z")
    elif variable == "omega0" and isinstance(state, SqueezedNarrowband):
        fc_builder = SqueezedScanBuilder(state, model, "omega0")
    elif variable == "omega0" and isinstance(state, (FockLorentzian, FockMixture)):
        fc_builder = FockScanBuilder(state, model)
    else:
        fc_builder = ConstantFcBuilder(franck_condon_factor(state, model))

    t_e = series["probe"].get("t_e", 0.0)
    tau_2 = series["interferometer"].get("tau_2", "maximize")
    method = series["solver"].get("method", "exact")
    sweep_span = None
    if isinstance(state, (FockLorentzian, FockMixture)):
        sweep_span = 18.0 / state.gamma0

    result = contrast_sweep(
        variable, values, elastic, tau_e, tau_2, fc_builder,
        t_e=t_e, method=method, jobs=jobs, sweep_time_span=sweep_span,
    )
    rows = [
        (p.value, p.result.x_dc.real, p.result.x_dc.imag,
         abs(p.result.x_dc), abs(p.result.baseline), abs(p.result.relative))
        for p in result.points
    ]
    diag = {
        "omega_max": elastic.omega_max,
        "solver_step": elastic.solver_step,
        "converged_delta": elastic.converged_delta,
        "tau_1": elastic.tau1,
        "summaries": result.summaries,
    }
    return rows, diag


def _run_coupler_series(series: dict, sweep: dict, values: list, base_dir):
    model = build_coupler(series["coupler"], base_dir)
    quantity = sweep.get("quantity", "s_ba")
    omegas = np.asarray(values, dtype=float)
    if quantity == "topgate_t":
        x = np.asarray(model.s_bb(omegas), dtype=complex)
    elif quantity == "xi":
        x = 1.0 - 2.0 * np.asarray(model.s_ba(omegas), dtype=complex)
    elif quantity == "s_ba":
        x = np.asarray(model.s_ba(omegas), dtype=complex)
    else:
        raise SchemaError(f"sweep.quantity: unknown quantity {quantity!r}")
    rows = [
        (w, v.real, v.imag, abs(v), 1.0, abs(v)) for w, v in zip(omegas, x)
    ]
    return rows, {"quantity": quantity}


def _run_squeeze_min_series(series: dict, values: list, base_dir):
    model = build_coupler(series["coupler"], base_dir)
    state = build_radiation(series["radiation"], model, base_dir)
    rows = []
    t = np.linspace(0.0, math.pi / state.omega0, 4001)
    for z in values:
        st = dataclasses.replace(state, z=z)
        numeric = float(np.min(np.real(fc_squeezed_exact(st, t))))
        lam = st.coupling_weight
        closed = math.exp(-lam * (math.exp(4 * abs(z)) - 1.0) / 2.0)
        rows.append((z, numeric, 0.0, numeric, closed,
                     numeric / closed if closed else 1.0))
    return rows, {"coupling_weight": state.coupling_weight}


def _run_emp_heat_series(series: dict, values: list, base_dir):
    state = build_radiation(series["radiation"], None, base_dir)
    t = np.asarray(values, dtype=float)
    numeric = np.asarray(heat_current(state, t), dtype=float)
    analytic = np.asarray(heat_current(state, t, method="lorentzian"),
                          dtype=float)
    mean_n = state.mean_n if isinstance(state, FockMixture) else float(state.n)
    scale = mean_n * constants.hbar * state.omega0 * state.gamma0
    rows = [
        (tv, nv, 0.0, nv, av, nv / scale)
        for tv, nv, av in zip(t, numeric, analytic)
    ]
    return rows, {"peak_heat_current": scale}


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if key in out and isinstance(out[key], dict) and isinstance(value, dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def run(config=None, preset: str | None = None, out_dir=".", jobs: int = 1,
        plot: bool = False) -> dict:
    """Execute a scenario and write its artifacts.

    ``config`` is a path or a raw dict; with ``preset`` the named scenario
    is loaded first and the config (if any) deep-merged on top.  Returns
    the manifest dict.
    """
    base_dir = None
    if preset is not None:
        raw = preset_scenario(preset)
        if config is not None:
            if not isinstance(config, dict):
                base_dir = Path(config).parent
                config = json.loads(Path(config).read_text())
            raw = _deep_merge(raw, config)
        scenario = validate_scenario(raw)
    elif isinstance(config, dict):
        scenario = validate_scenario(config)
    elif config is not None:
        base_dir = Path(config).parent
        scenario = load_scenario(config)
    else:
        raise SchemaError("either a config or a preset is required")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    values = _sweep_values(scenario.sweep)
    solve_cache: dict = {}
    outputs = []
    series_records = []
    plot_series = []

    for series in scenario.series:
        label = series["label"]
        log.info("running series %s", label)
        if scenario.kind == "radar":
            rows, diag = _run_radar_series(series, scenario.sweep, values,
                                           jobs, base_dir, solve_cache)
        elif scenario.kind == "coupler":
            rows, diag = _run_coupler_series(series, scenario.sweep, values,
                                             base_dir)
        elif scenario.kind == "squeeze-min":
            rows, diag = _run_squeeze_min_series(series, values, base_dir)
        else:
            rows, diag = _run_emp_heat_series(series, values, base_dir)

        if len(scenario.series) == 1:
            csv_path = out / f"{scenario.name}.csv"
        else:
            csv_path = out / f"{scenario.name}__{label}.csv"
        fixed = {k: v for k, v in series.items() if k != "label"}
        fixed["label"] = label
        fixed["sweep"] = scenario.sweep
        _write_csv(csv_path, rows, fixed)
        outputs.append(str(csv_path))
        series_records.append({
            "label": label,
            "csv": csv_path.name,
            "diagnostics": diag,
            "resolved": fixed,
        })
        plot_series.append({
            "label": label,
            "x": [r[0] for r in rows],
            "y": [r[5] if scenario.kind == "radar" else r[3] for r in rows],
        })

    if plot:
        svg_path = out / f"{scenario.name}.svg"
        ylabel = ("relative contrast" if scenario.kind == "radar"
                  else "magnitude")
        svg_path.write_text(
            render_svg(plot_series, title=scenario.name,
                       xlabel=scenario.sweep["variable"], ylabel=ylabel),
            newline="\n",
        )
        outputs.append(str(svg_path))

    manifest = {
        "name": scenario.name,
        "kind": scenario.kind,
        "preset": scenario.preset,
        "version": __version__,
        "jobs": jobs,
        "sweep": scenario.sweep,
        "series": series_records,
        "outputs": sorted(Path(p).name for p in outputs),
    }
    manifest_path = out / f"{scenario.name}.manifest.json"
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2)
                             + "\n", newline="\n")
    return manifest


# ---------------------------------------------------------------------------
# Standalone plotting of existing sweep CSVs
# ---------------------------------------------------------------------------

_Y_MODES = ("abs", "arg", "re", "im", "relative", "baseline")


def plot_csv(csv_paths, svg_path, y: str = "abs", title: str = "") -> Path:
    """Render one or more sweep CSVs into a self-contained SVG."""
    if y not in _Y_MODES:
        raise SchemaError(f"y mode must be one of {_Y_MODES}")
    series = []
    for path in csv_paths:
        path = Path(path)
        rows = []
        with path.open() as fh:
            header_seen = False
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if not header_seen:
                    if line != _CSV_HEADER:
                        raise SchemaError(f"{path}: unexpected CSV header")
                    header_seen = True
                    continue
                parts = line.split(",")
                if len(parts) != 6:
                    raise SchemaError(f"{path}: malformed row {line!r}")
                rows.append([float(v) for v in parts])
        if not rows:
            raise SchemaError(f"{path}: no data rows")
        data = np.asarray(rows)
        x = data[:, 0]
        if y == "abs":
            yv = data[:, 3]
        elif y == "arg":
            yv = np.angle(data[:, 1] + 1j * data[:, 2])
        elif y == "re":
            yv = data[:, 1]
        elif y == "im":
            yv = data[:, 2]
        elif y == "relative":
            yv = data[:, 5]
        else:
            yv = data[:, 4]
        series.append({"label": path.stem, "x": x, "y": yv})
    svg_path = Path(svg_path)
    svg_path.write_text(render_svg(series, title=title, xlabel="scan_value",
                                   ylabel=y), newline="\n")
    return svg_path


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="eqradar",
        description="Single-electron quantum radar scenario runner",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run a scenario or preset")
    runp.add_argument("config", nargs="?", default=None,
                      help="path to a JSON scenario")
    runp.add_argument("--preset", choices=sorted(PRESETS), default=None)
    runp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    runp.add_argument("--out", default=".")
    runp.add_argument("--plot", action="store_true")

    plotp = sub.add_parser("plot", help="plot existing sweep CSVs")
    plotp.add_argument("csv", nargs="+")
    plotp.add_argument("--svg", required=True)
    plotp.add_argument("--y", choices=_Y_MODES, default="abs")
    return parser


def main(argv=None) -> int:
    level = os.environ.get("EQRADAR_LOG", "warn").upper()
    logging.basicConfig(
        level={"ERROR": logging.ERROR, "WARN": logging.WARNING,
               "INFO": logging.INFO, "DEBUG": logging.DEBUG}.get(
                   level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            if args.config is None and args.preset is None:
                print("error: a config path or --preset is required",
                      file=sys.stderr)
                return 2
            run(args.config, preset=args.preset, out_dir=args.out,
                jobs=args.jobs, plot=args.plot)
            return 0
        plot_csv(args.csv, args.svg, y=args.y)
        return 0
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EqRadarError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
