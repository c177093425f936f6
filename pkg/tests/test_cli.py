import json
import os

import numpy as np
import pytest

from floqamp import cli

S1 = {
    "model.eta_omega": 10,
    "model.eta_kappa": 10,
    "model.eta_gamma": 10,
    "model.eta_p": 19.8,
    "model.phi": "pi/2",
}


def _run(tmp_path, command, extra=(), config=None, name="out"):
    out = tmp_path / name
    args = [command, "--out", str(out), "--threads", "1"]
    if config is not None:
        cfg = tmp_path / f"{name}.yaml"
        cfg.write_text(json.dumps(config))
        args += ["--config", str(cfg)]
    return cli.main(args + list(extra)), out


def _csv(path):
    return np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding="utf-8")


def test_parse_number():
    assert cli.parse_number("pi/2") == pytest.approx(np.pi / 2)
    assert cli.parse_number("-pi/2") == pytest.approx(-np.pi / 2)
    assert cli.parse_number("2*pi") == pytest.approx(2 * np.pi)
    assert cli.parse_number("1e-3") == 1e-3
    assert cli.parse_number(3) == 3.0
    for bad in ("__import__('os')", "pi/0", "e"):
        with pytest.raises(cli.ConfigError):
            cli.parse_number(bad)


def test_config_nesting_and_overrides(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("model:\n  eta_p: 12\n  phi: -pi/2\nsweep.param: eta_p\nsweep:\n  start: 1\n  stop: 2\n  count: 3\n")
    args = cli.build_parser().parse_args(["snr", "--config", str(cfg), "--model.eta_p", "13"])
    rc = cli.resolve_config(args)
    assert rc["model.eta_p"] == 13.0
    assert rc["model.phi"] == pytest.approx(-np.pi / 2)
    assert rc.sweep_values().tolist() == [1.0, 1.5, 2.0]
    assert rc["drive.n_d"] is None


@pytest.mark.parametrize(
    "flat",
    [
        {"model.eta_q": 1},
        {"sweep.param": "beta", "sweep.start": 0, "sweep.stop": 1, "sweep.count": 2},
        {"sweep.param": "eta_p"},
        {"output.format": "png"},
        {"drive.n_d": 1.5},
        {"dynamics.kappa_b": 10},
        {"numerics.harmonic": "best"},
    ],
)
def test_config_errors(flat):
    with pytest.raises(cli.ConfigError):
        cli.RunConfig.from_flat(flat)


def test_exit_codes(tmp_path):
    assert _run(tmp_path, "green-map", config={"model.eta_q": 1})[0] == cli.EXIT_CONFIG
    assert _run(tmp_path, "green-map", ["--config", str(tmp_path / "missing.yaml")])[0] == cli.EXIT_CONFIG
    assert _run(tmp_path, "green-map", ["--model.eta_omega", "-1"])[0] == cli.EXIT_CONFIG
    # beta = 2.5: no topological window, reported cleanly
    rc, _ = _run(tmp_path, "solitons", ["--model.eta_p", "35"], config=S1)
    assert rc == cli.EXIT_CONFIG
    # beta = 1 at s = 3: the Green's function is numerically singular
    crit = {"model.eta_kappa": 30, "model.eta_gamma": 30, "model.eta_p": 60}
    assert _run(tmp_path, "green-map", config=crit)[0] == cli.EXIT_NUMERIC
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(["winding-map", "--out", str(blocker / "sub")]) == cli.EXIT_IO


def test_green_map_outputs(tmp_path):
    rc, out = _run(tmp_path, "green-map", ["--format", "svg", "--numerics.n_trunc", "30"], config=S1)
    assert rc == 0
    names = sorted(os.listdir(out))
    for stem in ("green_map.csv", "green_overlay.csv", "singular_values.csv", "green_map.svg"):
        assert stem in names and stem + ".meta.json" in names
    meta = json.load(open(out / "green_map.csv.meta.json"))
    assert meta["config"]["model.eta_p"] == 19.8
    assert meta["version"]
    assert meta["summary"]["e1_over_e0"] > 10
    assert (meta["summary"]["argmax_n"], meta["summary"]["argmax_m"]) == (19, -19)
    data = _csv(out / "green_map.csv")
    assert data.dtype.names == ("n", "m", "abs_g")
    assert len(data) == 61 * 61


def test_trivial_green_map_is_diagonal(tmp_path):
    zero = {"model.eta_omega": 0, "model.eta_kappa": 0, "model.eta_gamma": 0, "model.eta_p": 0}
    rc, out = _run(tmp_path, "green-map", ["--numerics.omega_bar", "0.5", "--numerics.n_trunc", "5"], config=zero)
    assert rc == 0
    data = _csv(out / "green_map.csv")
    off = data["abs_g"][data["n"] != data["m"]]
    assert not off.any()


def test_winding_map_block(tmp_path):
    rc, out = _run(
        tmp_path,
        "winding-map",
        ["--numerics.omega_bar_points", "2", "--numerics.n_trunc", "30"],
        config={"model.eta_kappa": 30, "model.eta_gamma": 30, "model.eta_p": 58.5},
    )
    assert rc == 0
    data = _csv(out / "winding_map.csv")
    at0 = data[data["omega_bar"] == 0.0]
    ones = at0["n"][at0["nu"] == 1]
    assert ones.min() == -19 and ones.max() == 19
    assert set(np.unique(data["nu"]).tolist()) == {0, 1}
    rc, out = _run(tmp_path, "winding-map", ["--model.eta_p", "10", "--numerics.n_trunc", "10"], name="b0")
    assert not _csv(out / "winding_map.csv")["nu"].any()
    rc, out = _run(
        tmp_path, "winding-map", ["--model.phi=-pi/2", "--numerics.n_trunc", "30", "--numerics.omega_bar_points", "2"],
        config={"model.eta_kappa": 30, "model.eta_gamma": 30, "model.eta_p": 58.5}, name="neg",
    )
    assert set(np.unique(_csv(out / "winding_map.csv")["nu"]).tolist()) == {-1, 0}


def test_solitons_critical_point(tmp_path):
    rc, out = _run(tmp_path, "solitons", config={"model.eta_kappa": 30, "model.eta_gamma": 30, "model.eta_p": 60})
    assert rc == 0
    summary = _csv(out / "solitons_summary.csv")
    right = summary[summary["side"] == "right"][0]
    assert right["sigma_r"] == pytest.approx(np.sqrt(15))
    assert np.isinf(right["sigma_i_sq"])
    assert right["fidelity"] >= 0.99
    assert "re_v_jr" in _csv(out / "solitons.csv").dtype.names


def test_snr_zero_pump_is_infinite(tmp_path):
    rc, out = _run(
        tmp_path, "snr", ["--model.eta_p", "0", "--numerics.quad_points", "32", "--numerics.samples", "16"]
    )
    assert rc == 0
    row = _csv(out / "snr_sweep.csv")
    assert np.isinf(row["snr_max"]) and row["stable_flag"] == 1


def test_dynamics_without_drive(tmp_path):
    rc, out = _run(tmp_path, "dynamics", ["--drive.amplitude", "0", "--dynamics.periods", "2"], config=S1)
    assert rc == 0
    traj = _csv(out / "trajectory_one_mode.csv")
    assert not traj["re_a"].any() and not traj["im_a"].any()
    report = json.load(open(out / "dynamics_report.json"))
    assert report["report"]["t_end"] == 2.0


def test_dynamics_three_mode(tmp_path):
    rc, out = _run(
        tmp_path, "dynamics",
        ["--dynamics.periods", "1", "--dynamics.kappa_b", "20", "--dynamics.kappa_c", "40", "--model.eta_p", "15"],
        config=S1,
    )
    assert rc == 0
    three = _csv(out / "trajectory_three_mode.csv")
    assert three.dtype.names == ("t", "re_a", "im_a", "re_b", "im_b", "re_cstar", "im_cstar")
    report = json.load(open(out / "dynamics_report.json"))["report"]
    assert 0 < report["three_mode_vs_one_mode"] < 1


def test_sweep_command(tmp_path):
    extra = ["--sweep.param", "eta_p", "--sweep.start", "12", "--sweep.stop", "24", "--sweep.count", "3"]
    rc, out = _run(tmp_path, "sweep", extra, config=S1)
    assert rc == 0
    data = _csv(out / "sweep.csv")
    assert data.dtype.names[0] == "eta_p"
    assert data["stable_flag"].tolist() == [1, 1, 0]
    assert _run(tmp_path, "sweep", config=S1, name="nosweep")[0] == cli.EXIT_CONFIG


def test_json_format_copies_tables(tmp_path):
    rc, out = _run(tmp_path, "winding-map", ["--format", "json", "--numerics.n_trunc", "10",
                                             "--numerics.omega_bar_points", "1"])
    assert rc == 0
    records = json.load(open(out / "winding_map.json"))
    assert set(records[0]) == {"n", "omega_bar", "nu", "boundary"}


def test_snr_sweep_through_critical_point(tmp_path):
    extra = ["--sweep.param", "eta_p", "--sweep.start", "19", "--sweep.stop", "21", "--sweep.count", "3",
             "--numerics.quad_points", "32", "--numerics.samples", "16", "--numerics.n_trunc", "40"]
    rc, out = _run(tmp_path, "snr", extra, config=S1)
    assert rc == 0
    data = _csv(out / "snr_sweep.csv")
    assert data["stable_flag"].tolist() == [1, 0, 0]
    assert np.isnan(data["snr_max"][1])
