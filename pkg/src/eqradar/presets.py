"""Figure-reproduction scenario presets.

Each preset is a complete, schema-valid scenario for the reference device:
a 10 um coupler at v_F = 1e5 m/s.  Sweep grids are sized so every preset
finishes at desk scale.
"""

from __future__ import annotations

import math

from .errors import SchemaError

__all__ = ["PRESETS", "preset_scenario"]

_L = 1e-5
_VF = 1e5
_W = _VF / _L  # one dimensionless frequency unit, rad/s

_UNITS = {
    "length": "m",
    "time": "s",
    "angular_frequency": "rad/s",
    "frequency": "Hz",
    "voltage": "V",
}


def _base(name, kind="radar"):
    return {
        "name": name,
        "kind": kind,
        "units": dict(_UNITS),
        "preset": name,
    }


def _fig4():
    # vacuum contrast (maximized over tau_2) against the Leviton width for
    # weak, intermediate and strong coupling
    cfg = _base("fig4")
    cfg.update({
        "coupler": {"variant": "counter_propagating", "length": _L,
                    "v_fermi": _VF, "alpha": 0.2},
        "probe": {"tau_e": 0.1 * _L / _VF, "t_e": 0.0},
        "interferometer": {"tau_2": "maximize"},
        "radiation": {"variant": "vacuum"},
        "sweep": {"variable": "tau_e", "start": 0.02 * _L / _VF,
                  "stop": 1.0 * _L / _VF, "num": 25},
        "solver": {},
        "series": [
            {"label": "alpha0.2",
             "coupler": {"alpha": 0.2}},
            {"label": "alpha1",
             "coupler": {"alpha": 1.0}},
            {"label": "alpha15",
             "coupler": {"alpha": 15.0}},
        ],
    })
    return cfg


def _fig_squeezing(name, tau_e):
    omega0 = math.pi * _W
    cfg = _base(name)
    cfg.update({
        "coupler": {"variant": "counter_propagating", "length": _L,
                    "v_fermi": _VF, "alpha": 0.2},
        "probe": {"tau_e": tau_e, "t_e": 0.0},
        "interferometer": {"tau_2": "maximize"},
        "radiation": {"variant": "squeezed", "omega0": omega0, "q0": 5.0,
                      "squeezing_db": 1.25},
        "sweep": {"variable": "t_e", "start": 0.0,
                  "stop": math.pi / omega0, "num": 161},
        "solver": {},
        "series": [
            {"label": "db0.86", "radiation": {"squeezing_db": 0.86}},
            {"label": "db1.25", "radiation": {"squeezing_db": 1.25}},
            {"label": "db3", "radiation": {"squeezing_db": 3.0}},
        ],
    })
    return cfg


def _fig8():
    gamma0 = 1e9
    cfg = _base("fig8")
    cfg.update({
        "coupler": {"variant": "counter_propagating", "length": _L,
                    "v_fermi": _VF, "alpha": 0.1},
        "probe": {"tau_e": 1e-11, "t_e": 0.0},
        "interferometer": {"tau_2": "maximize"},
        "radiation": {"variant": "fock", "n": 1, "omega0": 2.0 * _W,
                      "gamma0": gamma0},
        "sweep": {"variable": "t_e", "start": -2.0 / gamma0,
                  "stop": 9.0 / gamma0, "num": 111},
        "solver": {},
        "series": [
            {"label": f"alpha{a}_x{x}",
             "coupler": {"alpha": alpha},
             "radiation": {"omega0": x * _W}}
            for a, alpha in (("0.1", 0.1), ("15", 15.0))
            for x in (2.0, 5.5, 10.0)
        ],
    })
    return cfg


def _fig10():
    cfg = _base("fig10", kind="coupler")
    cfg.update({
        "coupler": {"variant": "top_gate", "length": _L, "v_fermi": _VF,
                    "alpha": 0.2},
        "sweep": {"variable": "omega", "start": 1e-4 * _W,
                  "stop": 6.0 * math.pi * _W, "num": 601,
                  "quantity": "topgate_t"},
        "solver": {},
        "series": [
            {"label": "alpha0.2", "coupler": {"alpha": 0.2}},
            {"label": "alpha15", "coupler": {"alpha": 15.0}},
        ],
    })
    return cfg


def _fig12():
    cfg = _base("fig12", kind="coupler")
    cfg.update({
        "coupler": {"variant": "counter_propagating", "length": _L,
                    "v_fermi": _VF, "alpha": 0.2},
        "sweep": {"variable": "omega", "start": 1e-4 * _W,
                  "stop": 6.0 * math.pi * _W, "num": 601,
                  "quantity": "xi"},
        "solver": {},
        "series": [
            {"label": "alpha0.2_xi", "coupler": {"alpha": 0.2}},
            {"label": "alpha15_xi", "coupler": {"alpha": 15.0}},
        ],
    })
    return cfg


def _squeeze_min():
    omega0 = math.pi * _W
    cfg = _base("squeeze-min", kind="squeeze-min")
    cfg.update({
        "coupler": {"variant": "counter_propagating", "length": _L,
                    "v_fermi": _VF, "alpha": 0.2},
        "radiation": {"variant": "squeezed", "omega0": omega0, "q0": 5.0,
                      "z": 0.1},
        "sweep": {"variable": "z", "start": 0.0, "stop": 0.3, "num": 61},
        "solver": {},
        "series": [{"label": "min_contrast"}],
    })
    return cfg


def _emp_heat():
    gamma0 = 1e9
    cfg = _base("emp-heat", kind="emp-heat")
    cfg.update({
        "radiation": {"variant": "fock", "n": 1, "omega0": 2.0 * _W,
                      "gamma0": gamma0},
        "sweep": {"variable": "t", "start": -1.0 / gamma0,
                  "stop": 8.0 / gamma0, "num": 181},
        "solver": {},
        "series": [{"label": "heat"}],
    })
    return cfg


PRESETS = {
    "fig4": _fig4,
    "fig6": lambda: _fig_squeezing("fig6", 15e-12),
    "fig7": lambda: _fig_squeezing("fig7", 2.5e-12),
    "fig8": _fig8,
    "fig10": _fig10,
    "fig12": _fig12,
    "squeeze-min": _squeeze_min,
    "emp-heat": _emp_heat,
}


def preset_scenario(name: str) -> dict:
    """Raw config dict of a named preset."""
    try:
        factory = PRESETS[name]
    except KeyError:
        raise SchemaError(
            f"unknown preset {name!r}; available: {sorted(PRESETS)}"
        ) from None
    return factory()
