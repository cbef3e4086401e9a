"""Scenario schema and pipeline assembly.

A scenario is a JSON-compatible dict with an explicit SI ``units`` block;
unknown keys are rejected everywhere since silent typos in physics
parameters are the dominant failure mode.  ``build_*`` helpers turn the
validated dict into model objects and solver settings.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coupler import (
    CouplerModel,
    CouplerParams,
    CounterPropagatingCoupler,
    DirectDriveCoupler,
    TopGateCoupler,
    load_tabulated_coupler,
)
from .errors import SchemaError
from .numerics import ComplexTable
from .radiation import (
    ClassicalDrive,
    FockLorentzian,
    FockMixture,
    SqueezedNarrowband,
    Vacuum,
    squeezing_db_to_z,
)

__all__ = ["Scenario", "validate_scenario", "load_scenario",
           "build_coupler", "build_radiation", "solver_omega_max"]

_REQUIRED_UNITS = {
    "length": "m",
    "time": "s",
    "angular_frequency": "rad/s",
    "frequency": "Hz",
    "voltage": "V",
}

_SCAN_VARIABLES = ("t_e", "tau_e", "tau_2", "z", "omega0", "omega", "t")

_KINDS = ("radar", "coupler", "squeeze-min", "emp-heat")


@dataclass
class Scenario:
    """Validated scenario ready for execution."""

    name: str
    kind: str
    coupler: dict
    probe: dict
    interferometer: dict
    radiation: dict
    sweep: dict
    solver: dict
    series: list
    preset: str | None = None
    raw: dict = field(default_factory=dict)


def _reject_unknown(section: dict, allowed: set, where: str):
    unknown = set(section) - allowed
    if unknown:
        raise SchemaError(f"{where}: unknown keys {sorted(unknown)}")


def _require(section: dict, keys: tuple, where: str):
    missing = [k for k in keys if k not in section]
    if missing:
        raise SchemaError(f"{where}: missing keys {missing}")


def _positive(section: dict, key: str, where: str) -> float:
    val = section[key]
    if not isinstance(val, (int, float)) or not val > 0:
        raise SchemaError(f"{where}.{key}: must be a positive number")
    return float(val)


def _validate_units(units, where="units"):
    if not isinstance(units, dict):
        raise SchemaError("units block is required and must be a mapping")
    _reject_unknown(units, set(_REQUIRED_UNITS), where)
    for key, expected in _REQUIRED_UNITS.items():
        if units.get(key) != expected:
            raise SchemaError(
                f"{where}.{key}: must declare '{expected}' (SI only)"
            )


def _validate_coupler(spec):
    if not isinstance(spec, dict):
        raise SchemaError("coupler: must be a mapping")
    variant = spec.get("variant")
    if variant in ("counter_propagating", "top_gate"):
        _reject_unknown(spec, {"variant", "length", "v_fermi", "alpha"}, "coupler")
        _require(spec, ("length", "v_fermi", "alpha"), "coupler")
        _positive(spec, "length", "coupler")
        _positive(spec, "v_fermi", "coupler")
        if not isinstance(spec["alpha"], (int, float)) or spec["alpha"] < 0:
            raise SchemaError("coupler.alpha: must be a non-negative number")
    elif variant == "direct_drive":
        _reject_unknown(spec, {"variant", "length", "v_fermi"}, "coupler")
        _require(spec, ("length", "v_fermi"), "coupler")
        _positive(spec, "length", "coupler")
        _positive(spec, "v_fermi", "coupler")
    elif variant == "tabulated":
        _reject_unknown(spec, {"variant", "path"}, "coupler")
        _require(spec, ("path",), "coupler")
    else:
        raise SchemaError(f"coupler.variant: unknown variant {variant!r}")


def _validate_probe(spec):
    _reject_unknown(spec, {"tau_e", "t_e"}, "probe")
    _require(spec, ("tau_e",), "probe")
    _positive(spec, "tau_e", "probe")
    t_e = spec.get("t_e", 0.0)
    if not (t_e == "maximize" or isinstance(t_e, (int, float))):
        raise SchemaError("probe.t_e: number or 'maximize'")


def _validate_interferometer(spec):
    _reject_unknown(spec, {"tau_2"}, "interferometer")
    tau_2 = spec.get("tau_2", "maximize")
    if not (tau_2 == "maximize" or isinstance(tau_2, (int, float))):
        raise SchemaError("interferometer.tau_2: number or 'maximize'")


def _validate_radiation(spec):
    if not isinstance(spec, dict):
        raise SchemaError("radiation: must be a mapping")
    variant = spec.get("variant")
    if variant == "vacuum":
        _reject_unknown(spec, {"variant"}, "radiation")
    elif variant == "squeezed":
        _reject_unknown(
            spec, {"variant", "omega0", "q0", "z", "squeezing_db", "phi0"},
            "radiation",
        )
        _require(spec, ("omega0", "q0"), "radiation")
        _positive(spec, "omega0", "radiation")
        if not spec["q0"] > 1:
            raise SchemaError("radiation.q0: must exceed 1")
        if ("z" in spec) == ("squeezing_db" in spec):
            raise SchemaError(
                "radiation: give exactly one of 'z' or 'squeezing_db'"
            )
    elif variant in ("fock", "mixture"):
        keys = {"variant", "omega0", "gamma0"}
        keys |= {"n"} if variant == "fock" else {"probabilities"}
        _reject_unknown(spec, keys, "radiation")
        _require(spec, tuple(sorted(keys - {"variant"})), "radiation")
        _positive(spec, "omega0", "radiation")
        _positive(spec, "gamma0", "radiation")
        if spec["gamma0"] >= spec["omega0"]:
            raise SchemaError("radiation: needs gamma0 < omega0")
        if variant == "fock":
            n = spec["n"]
            if not isinstance(n, int) or n < 0:
                raise SchemaError("radiation.n: non-negative integer")
        else:
            p = spec["probabilities"]
            if (not isinstance(p, list) or not p
                    or any(not isinstance(v, (int, float)) or v < 0 for v in p)
                    or abs(sum(p) - 1.0) > 1e-12):
                raise SchemaError(
                    "radiation.probabilities: non-negative list summing to 1"
                )
    elif variant == "classical":
        _reject_unknown(spec, {"variant", "tones", "csv"}, "radiation")
        if ("tones" in spec) == ("csv" in spec):
            raise SchemaError("radiation: give exactly one of 'tones' or 'csv'")
        if "tones" in spec:
            tones = spec["tones"]
            if not isinstance(tones, list) or not tones:
                raise SchemaError("radiation.tones: non-empty list")
            for tone in tones:
                _reject_unknown(tone, {"frequency", "amplitude", "phase"},
                                "radiation.tones[]")
                _require(tone, ("frequency", "amplitude", "phase"),
                         "radiation.tones[]")
    else:
        raise SchemaError(f"radiation.variant: unknown variant {variant!r}")


def _validate_sweep(spec, kind):
    _reject_unknown(spec, {"variable", "start", "stop", "num", "values",
                           "quantity"}, "sweep")
    variable = spec.get("variable")
    if variable not in _SCAN_VARIABLES:
        raise SchemaError(f"sweep.variable: must be one of {_SCAN_VARIABLES}")
    if kind == "radar" and variable in ("omega", "t"):
        raise SchemaError(f"sweep.variable: {variable!r} not valid for radar runs")
    has_grid = all(k in spec for k in ("start", "stop", "num"))
    if ("values" in spec) == has_grid:
        raise SchemaError("sweep: give either 'values' or start/stop/num")
    if has_grid:
        if not isinstance(spec["num"], int) or spec["num"] < 2:
            raise SchemaError("sweep.num: integer >= 2")
        if not spec["stop"] > spec["start"]:
            raise SchemaError("sweep: needs stop > start")


def _validate_solver(spec):
    _reject_unknown(spec, {"omega_max", "step", "quad_rel_tol", "method"},
                    "solver")
    for key in ("omega_max", "step"):
        val = spec.get(key, "auto")
        if not (val == "auto" or (isinstance(val, (int, float)) and val > 0)):
            raise SchemaError(f"solver.{key}: positive number or 'auto'")
    method = spec.get("method", "exact")
    if method not in ("exact", "adiabatic"):
        raise SchemaError("solver.method: 'exact' or 'adiabatic'")


_TOP_KEYS = {"name", "kind", "units", "coupler", "probe", "interferometer",
             "radiation", "sweep", "solver", "series", "preset"}


def validate_scenario(config: dict) -> Scenario:
    """Validate a raw config mapping and normalize it into a Scenario."""
    if not isinstance(config, dict):
        raise SchemaError("config root must be a mapping")
    _reject_unknown(config, _TOP_KEYS, "config")
    name = config.get("name")
    if not isinstance(name, str) or not name or "/" in name:
        raise SchemaError("name: non-empty string without '/' is required")
    kind = config.get("kind", "radar")
    if kind not in _KINDS:
        raise SchemaError(f"kind: must be one of {_KINDS}")
    _validate_units(config.get("units"))

    base = {
        "coupler": config.get("coupler", {}),
        "probe": config.get("probe", {"tau_e": 1e-11}),
        "interferometer": config.get("interferometer", {}),
        "radiation": config.get("radiation", {"variant": "vacuum"}),
        "solver": config.get("solver", {}),
    }
    series_specs = config.get("series", [{"label": "main"}])
    if not isinstance(series_specs, list) or not series_specs:
        raise SchemaError("series: must be a non-empty list")

    series = []
    labels = set()
    for k, override in enumerate(series_specs):
        if not isinstance(override, dict):
            raise SchemaError(f"series[{k}]: must be a mapping")
        _reject_unknown(override, {"label"} | set(base), f"series[{k}]")
        label = override.get("label", f"s{k}")
        if not isinstance(label, str) or not label or "/" in label:
            raise SchemaError(f"series[{k}].label: bad label")
        if label in labels:
            raise SchemaError(f"series[{k}].label: duplicate {label!r}")
        labels.add(label)
        merged = {}
        for section, spec in base.items():
            upd = dict(spec)
            upd.update(override.get(section, {}))
            merged[section] = upd
        merged["label"] = label
        series.append(merged)

    sweep = config.get("sweep")
    if sweep is None:
        raise SchemaError("sweep: section is required")
    _validate_sweep(sweep, kind)

    for k, merged in enumerate(series):
        where = f"series[{k}]"
        if kind in ("radar", "coupler", "squeeze-min"):
            _validate_coupler(merged["coupler"])
        if kind == "radar":
            _validate_probe(merged["probe"])
            _validate_interferometer(merged["interferometer"])
            _validate_radiation(merged["radiation"])
        if kind in ("squeeze-min",):
            _validate_radiation(merged["radiation"])
            if merged["radiation"].get("variant") != "squeezed":
                raise SchemaError(f"{where}: squeeze-min needs squeezed radiation")
        if kind == "emp-heat":
            _validate_radiation(merged["radiation"])
            if merged["radiation"].get("variant") not in ("fock", "mixture"):
                raise SchemaError(f"{where}: emp-heat needs a Fock-type state")
        _validate_solver(merged["solver"])

    return Scenario(
        name=name,
        kind=kind,
        coupler=base["coupler"],
        probe=base["probe"],
        interferometer=base["interferometer"],
        radiation=base["radiation"],
        sweep=sweep,
        solver=base["solver"],
        series=series,
        preset=config.get("preset"),
        raw=config,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    return validate_scenario(raw)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def build_coupler(spec: dict, base_dir: Path | None = None) -> CouplerModel:
    variant = spec["variant"]
    if variant == "counter_propagating":
        return CounterPropagatingCoupler(
            CouplerParams(spec["length"], spec["v_fermi"], spec["alpha"])
        )
    if variant == "top_gate":
        return TopGateCoupler(
            CouplerParams(spec["length"], spec["v_fermi"], spec["alpha"])
        )
    if variant == "direct_drive":
        return DirectDriveCoupler(spec["length"], spec["v_fermi"])
    path = Path(spec["path"])
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    return load_tabulated_coupler(path)


def build_radiation(spec: dict, model: CouplerModel,
                    base_dir: Path | None = None):
    variant = spec["variant"]
    if variant == "vacuum":
        return Vacuum()
    if variant == "squeezed":
        z = spec.get("z")
        if z is None:
            z = squeezing_db_to_z(float(spec["squeezing_db"]))
        omega0 = float(spec["omega0"])
        return SqueezedNarrowband(
            omega0=omega0,
            q0=float(spec["q0"]),
            z=z,
            s_ba_at_omega0=complex(model.s_ba(omega0)),
            phi0=spec.get("phi0"),
        )
    if variant == "fock":
        return FockLorentzian(spec["n"], float(spec["omega0"]),
                              float(spec["gamma0"]))
    if variant == "mixture":
        return FockMixture(tuple(spec["probabilities"]), float(spec["omega0"]),
                           float(spec["gamma0"]))
    # classical
    if "tones" in spec:
        tones = tuple(
            (float(t["frequency"]), float(t["amplitude"]), float(t["phase"]))
            for t in spec["tones"]
        )
        return ClassicalDrive(harmonics=tones)
    path = Path(spec["csv"])
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    rows = np.loadtxt(path, delimiter=",", skiprows=1)
    if rows.ndim != 2 or rows.shape[1] != 2:
        raise SchemaError(f"{path}: drive CSV needs two columns t,vg")
    return ClassicalDrive(time_series=ComplexTable(rows[:, 0], rows[:, 1]))


def solver_omega_max(tau_e_min: float, state, n_harmonics_hint: int = 10) -> float:
    """Solved range covering the Leviton weight plus the radiation band.

    The damped integrals need 40/(2 tau_e); negative-frequency filter
    evaluations shift that by the recoil factor's bandwidth.
    """
    need = 40.0 / (2.0 * tau_e_min)
    if isinstance(state, SqueezedNarrowband):
        need += 2.0 * n_harmonics_hint * state.omega0
    elif isinstance(state, (FockLorentzian, FockMixture)):
        need += 2.6 * state.omega0
    elif isinstance(state, ClassicalDrive) and state.harmonics:
        top = max(f for f, _, _ in state.harmonics)
        need += 2 * math.pi * top * n_harmonics_hint
    return 1.02 * need
