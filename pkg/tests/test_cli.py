import json
import math

import numpy as np
import pytest

from eqradar.cli import main, plot_csv, run
from eqradar.config import validate_scenario
from eqradar.errors import SchemaError
from eqradar.presets import PRESETS, preset_scenario

L, VF = 1e-5, 1e5
W = VF / L

UNITS = {
    "length": "m",
    "time": "s",
    "angular_frequency": "rad/s",
    "frequency": "Hz",
    "voltage": "V",
}


def vacuum_config(name="vac", num=5):
    return {
        "name": name,
        "units": dict(UNITS),
        "coupler": {"variant": "counter_propagating", "length": L,
                    "v_fermi": VF, "alpha": 0.2},
        "probe": {"tau_e": 0.2 * L / VF, "t_e": 0.0},
        "interferometer": {"tau_2": 0.5 * L / VF},
        "radiation": {"variant": "vacuum"},
        "sweep": {"variable": "t_e", "start": 0.0, "stop": 1e-10, "num": num},
        "solver": {},
    }


# ---------------------------------------------------------------------------
# schema validation
# ---------------------------------------------------------------------------

def test_schema_accepts_vacuum_scenario():
    sc = validate_scenario(vacuum_config())
    assert sc.kind == "radar"
    assert len(sc.series) == 1


def test_schema_rejects_unknown_keys():
    cfg = vacuum_config()
    cfg["coupler"]["lenght"] = 1.0  # typo must be fatal
    with pytest.raises(SchemaError):
        validate_scenario(cfg)
    cfg = vacuum_config()
    cfg["extra_section"] = {}
    with pytest.raises(SchemaError):
        validate_scenario(cfg)


def test_schema_requires_si_units_block():
    cfg = vacuum_config()
    del cfg["units"]
    with pytest.raises(SchemaError):
        validate_scenario(cfg)
    cfg = vacuum_config()
    cfg["units"]["length"] = "um"
    with pytest.raises(SchemaError):
        validate_scenario(cfg)


def test_schema_rejects_bad_values():
    cfg = vacuum_config()
    cfg["probe"]["tau_e"] = -1.0
    with pytest.raises(SchemaError):
        validate_scenario(cfg)
    cfg = vacuum_config()
    cfg["sweep"] = {"variable": "nonsense", "start": 0, "stop": 1, "num": 3}
    with pytest.raises(SchemaError):
        validate_scenario(cfg)
    cfg = vacuum_config()
    cfg["radiation"] = {"variant": "squeezed", "omega0": 1e10, "q0": 5.0}
    with pytest.raises(SchemaError):
        validate_scenario(cfg)  # needs z or squeezing_db


def test_unit_round_trip_dimensionless_groups():
    # SI -> dimensionless -> SI round trip at machine precision
    cfg = vacuum_config()
    sc = validate_scenario(cfg)
    l = sc.coupler["length"]
    vf = sc.coupler["v_fermi"]
    omega = 3.7 * vf / l
    x = omega * l / vf
    assert abs(x * vf / l - omega) / omega < 1e-12
    tau = 0.8 * l / vf
    assert abs((tau * vf / l) * l / vf - tau) / tau < 1e-12


# ---------------------------------------------------------------------------
# run() artifacts
# ---------------------------------------------------------------------------

def test_run_vacuum_relative_is_one(tmp_path):
    manifest = run(vacuum_config(), out_dir=tmp_path)
    csv = tmp_path / "vac.csv"
    assert csv.exists()
    lines = csv.read_text().splitlines()
    assert lines[0].startswith("# ")
    assert lines[1] == "scan_value,x_re,x_im,abs_x,baseline_abs,relative_abs"
    for line in lines[2:]:
        assert line.split(",")[5] == "1"
    assert (tmp_path / "vac.manifest.json").exists()
    assert manifest["outputs"] == ["vac.csv"]


def test_run_deterministic_byte_identical(tmp_path):
    cfg = {
        **vacuum_config(name="det"),
        "radiation": {"variant": "squeezed", "omega0": math.pi * W,
                      "q0": 5.0, "squeezing_db": 1.25},
    }
    a_dir = tmp_path / "a"
    b_dir = tmp_path / "b"
    run(cfg, out_dir=a_dir)
    run(cfg, out_dir=b_dir)
    a = (a_dir / "det.csv").read_bytes()
    b = (b_dir / "det.csv").read_bytes()
    assert a == b
    am = (a_dir / "det.manifest.json").read_bytes()
    bm = (b_dir / "det.manifest.json").read_bytes()
    assert am == bm


def test_run_parallel_jobs_identical(tmp_path):
    cfg = vacuum_config(name="par", num=4)
    run(cfg, out_dir=tmp_path / "serial", jobs=1)
    run(cfg, out_dir=tmp_path / "parallel", jobs=2)
    assert (tmp_path / "serial" / "par.csv").read_bytes() == \
        (tmp_path / "parallel" / "par.csv").read_bytes()


def test_run_from_file_and_exit_codes(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(vacuum_config(name="file")))
    code = main(["run", str(path), "--out", str(tmp_path), "--jobs", "1"])
    assert code == 0
    assert (tmp_path / "file.csv").exists()

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "x"}))
    assert main(["run", str(bad), "--out", str(tmp_path)]) == 2

    assert main(["run", str(tmp_path / "missing.json"),
                 "--out", str(tmp_path)]) == 4


def test_run_solver_failure_exit_code(tmp_path):
    cfg = vacuum_config(name="fail")
    # force an omega_max far too small for the probe: the damped integrals
    # cannot be evaluated and the run must exit with the solver code
    cfg["solver"] = {"omega_max": 5.0 * W}
    path = tmp_path / "fail.json"
    path.write_text(json.dumps(cfg))
    assert main(["run", str(path), "--out", str(tmp_path)]) == 3


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def test_every_preset_validates():
    for name in PRESETS:
        sc = validate_scenario(preset_scenario(name))
        assert sc.preset == name


def test_fig_presets_parameters():
    fig6 = preset_scenario("fig6")
    assert fig6["coupler"]["alpha"] == pytest.approx(0.2)
    assert fig6["probe"]["tau_e"] == pytest.approx(15e-12)
    fig7 = preset_scenario("fig7")
    assert fig7["probe"]["tau_e"] == pytest.approx(2.5e-12)
    fig8 = preset_scenario("fig8")
    assert fig8["radiation"]["gamma0"] == pytest.approx(1e9)
    assert {s["coupler"].get("alpha") for s in fig8["series"]} == {0.1, 15.0}
    fig4 = preset_scenario("fig4")
    assert [s["coupler"]["alpha"] for s in fig4["series"]] == [0.2, 1.0, 15.0]


def test_coupler_presets_run_end_to_end(tmp_path):
    for name in ("fig10", "fig12", "squeeze-min", "emp-heat"):
        manifest = run(preset=name, out_dir=tmp_path, plot=True)
        stem = manifest["name"]
        assert (tmp_path / f"{stem}.manifest.json").exists()
        svg = (tmp_path / f"{stem}.svg").read_text()
        assert svg.startswith("<svg")
        assert svg.count("<polyline") == len(manifest["series"])


def test_preset_with_override_runs_reduced(tmp_path):
    # exercise the preset + config override path with a desk-size grid
    override = {
        "sweep": {"num": 5, "start": 0.06 * L / VF, "stop": 0.3 * L / VF},
        "series": [{"label": "alpha0.2", "coupler": {"alpha": 0.2}}],
    }
    manifest = run(override, preset="fig4", out_dir=tmp_path, jobs=1)
    csv = tmp_path / "fig4.csv"
    assert csv.exists()
    data = np.loadtxt(csv, delimiter=",", skiprows=2)
    assert data.shape == (5, 6)
    # vacuum contrast grows with the Leviton width
    assert np.all(np.diff(data[:, 3]) > 0)


# ---------------------------------------------------------------------------
# plotting
# ---------------------------------------------------------------------------

def test_plot_csv_roundtrip(tmp_path):
    run(vacuum_config(name="toplot"), out_dir=tmp_path)
    svg = plot_csv([tmp_path / "toplot.csv"], tmp_path / "out.svg", y="abs")
    text = svg.read_text()
    assert text.startswith("<svg")
    assert text.count("<polyline") == 1


def test_plot_rejects_malformed_csv(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("not,a,sweep\n1,2,3\n")
    with pytest.raises(SchemaError):
        plot_csv([bad], tmp_path / "x.svg")
    empty = tmp_path / "empty.csv"
    empty.write_text("# comment\nscan_value,x_re,x_im,abs_x,baseline_abs,relative_abs\n")
    with pytest.raises(SchemaError):
        plot_csv([empty], tmp_path / "x.svg")
