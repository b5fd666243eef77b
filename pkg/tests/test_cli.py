import json
import math

import numpy as np
import pytest

from lzkzm import __version__
from lzkzm import config as cfgmod
from lzkzm import io
from lzkzm.cli import main
from lzkzm.config import ConfigError, resolve


def run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    rc = main([*argv, "--out", str(out)])
    return rc, out


def rows(path):
    comments, data = io.read_csv(path)
    return comments, data


# ---------------------------------------------------------------- config

def test_every_preset_resolves():
    for name in cfgmod.PRESETS:
        cfg = resolve(name)
        assert set(cfg) <= set(cfgmod.SCHEMA)
    assert resolve("kzm-scan")["tau_q_i"][0] == 2500.0


def test_precedence_preset_file_flags(tmp_path):
    f = tmp_path / "c.toml"
    f.write_text('preset = "freezeout"\n[protocol]\nt_lz_ns = 33.0\ndelta_mhz = 15\n')
    cfg = resolve("scheme-a-map", f, {"delta_mhz": "12.5", "t1_ns": None})
    assert cfg["scheme"] == "B"          # from the preset named in the file
    assert cfg["t_lz_ns"] == 33.0        # file beats preset
    assert cfg["delta_mhz"] == 12.5      # flag beats file
    assert cfg["eps_f_min_mhz"] == -200  # untouched keys of the CLI preset survive


@pytest.mark.parametrize("text", ['bogus = 1\n', 'preset = "nope"\n', 'delta_mhz = "abc"\n', 'x = [\n'])
def test_bad_files_raise_config_error(tmp_path, text):
    f = tmp_path / "c.toml"
    f.write_text(text)
    with pytest.raises(ConfigError):
        resolve(None, f)


def test_list_and_inf_parsing():
    cfg = resolve(None, overrides={"t_lz_list_ns": "10, 20 40", "t1_ns": "inf", "ed_n_spins": "4,6"})
    assert cfg["t_lz_list_ns"] == [10.0, 20.0, 40.0]
    assert cfg["t1_ns"] == math.inf
    assert cfg["ed_n_spins"] == [4, 6]
    with pytest.raises(ConfigError):
        resolve(None, overrides={"ed_n_spins": "4.5"})
    with pytest.raises(ConfigError):
        resolve("no-such-preset")


# ---------------------------------------------------------------- io

def test_csv_preamble_and_round_trip(tmp_path):
    p = tmp_path / "x.csv"
    io.write_csv(p, ["a", "b"], [[0.1, np.int64(3)], [1e-300, "z"]], "demo", {"t1_ns": math.inf})
    comments, data = io.read_csv(p)
    assert comments[0] == f"# lzkzm {__version__} demo"
    assert json.loads(comments[1].removeprefix("# config: ")) == {"t1_ns": "inf"}
    assert float(data[0]["a"]) == 0.1 and data[0]["b"] == "3" and float(data[1]["a"]) == 1e-300
    with pytest.raises(ValueError):
        io.write_csv(p, ["a"], [[1, 2]], "demo", {})


def test_json_meta_and_sidecar(tmp_path):
    p = tmp_path / "s.json"
    io.write_json(p, {"v": float("inf")}, "demo", {"k": 1})
    doc = json.loads(p.read_text())
    assert doc["v"] == "inf" and doc["_meta"]["version"] == __version__ and doc["_meta"]["config"] == {"k": 1}
    assert io.sidecar("dir/run.csv", "fit").name == "run.fit.json"
    assert io.sidecar("-", "fit") is None


# ---------------------------------------------------------------- commands

def test_lz_run_is_reproducible_and_pure_without_decoherence(tmp_path):
    rc1, a = run(tmp_path, "lz-run", "--decoherence", "none", name="a.csv")
    rc2, b = run(tmp_path, "lz-run", "--decoherence", "none", name="b.csv")
    assert rc1 == rc2 == 0
    assert a.read_bytes() == b.read_bytes()
    _, data = rows(a)
    assert float(data[0]["t_ns"]) == 0.0 and float(data[-1]["t_ns"]) == 40.0
    assert all(abs(float(r["purity"]) - 1) < 1e-9 for r in data)
    assert all(abs(float(r["rho00"]) + float(r["rho11"]) - 1) < 1e-12 for r in data)


def test_region_flips_once_at_freeze_out(tmp_path):
    rc, out = run(tmp_path, "lz-run", "--preset", "scheme-b-regions")
    assert rc == 0
    _, data = rows(out)
    labels = [r["region"] for r in data]
    flips = [i for i in range(1, len(labels)) if labels[i] != labels[i - 1]]
    assert labels[0] == "impulse" and labels[-1] == "adiabatic" and len(flips) == 1
    i = flips[0]
    assert float(data[i - 1]["t_over_that"]) <= 1.0 < float(data[i]["t_over_that"])


def test_sweep_corners_match_single_runs(tmp_path):
    grid = ["--eps-f-min-mhz", "-200", "--eps-f-max-mhz", "100", "--eps-f-step-mhz", "100",
            "--t-lz-min-ns", "5", "--t-lz-max-ns", "15", "--t-lz-step-ns", "5"]
    rc, out = run(tmp_path, "sweep", *grid)
    assert rc == 0
    _, data = rows(out)
    assert len(data) == 4 * 3
    for e, t in ((-200, 5), (100, 15), (100, 5)):
        cell = next(r for r in data if float(r["eps_f_mhz"]) == e and float(r["t_lz_ns"]) == t)
        rc, single = run(tmp_path, "lz-run", "--preset", "scheme-a-map", "--eps-f-mhz", str(e),
                         "--t-lz-ns", str(t), name=f"s{e}_{t}.csv")
        last = rows(single)[1][-1]
        for col in ("rho00", "rho11", "re01", "im01", "p_plus"):
            assert cell[col] == last[col], (e, t, col)


def test_sweep_flat_cell_keeps_ground_state(tmp_path):
    # eps_f == eps_i means no chirp; without decoherence the eigenstate is stationary
    rc, out = run(tmp_path, "sweep", "--decoherence", "none", "--eps-f-min-mhz", "-200", "--eps-f-max-mhz", "-200",
                  "--t-lz-min-ns", "5", "--t-lz-max-ns", "60", "--t-lz-step-ns", "55")
    assert rc == 0
    assert all(float(r["p_plus"]) < 1e-12 for r in rows(out)[1])


def test_regions_writes_alpha_fit(tmp_path):
    rc, out = run(tmp_path, "regions", "--t-lz-list-ns", "10,40", "--alpha-fit-t-lz-ns", "10,30,60,90")
    assert rc == 0
    doc = json.loads(out.with_name("out.regions.json").read_text())
    assert set(doc["t_hat_ns"]) == {"10.0", "40.0"}
    assert doc["alpha_used"] == pytest.approx(math.pi / 4)
    assert len(doc["alpha_fit"]["samples"]) == 4 and doc["alpha_fit"]["alpha"] > 0
    _, data = rows(out)
    assert {r["t_lz_ns"] for r in data} == {"10.0", "40.0"}


def test_freezeout_summary(tmp_path):
    rc, out = run(tmp_path, "freezeout", "--t-lz-list-ns", "40")
    assert rc == 0
    doc = json.loads(out.with_name("out.freezeout.json").read_text())["displacements"]["40.0"]
    assert doc["frozen"] is True
    assert doc["impulse_displacement"] < doc["adiabatic_displacement"]


def test_kzm_scan_then_fit(tmp_path):
    rc, out = run(tmp_path, "kzm-scan", "--n-k", "8", "--tau-q-i", "100,400,2500")
    assert rc == 0
    comments, data = rows(out)
    assert len(data) == 3 and data[0]["range_policy"] == "fixed:10" and data[0]["t1_ns"] == "inf"
    side = json.loads(out.with_name("out.fit.json").read_text())
    rc, fit_out = run(tmp_path, "fit", str(out), name="fit.json")
    assert rc == 0
    refit = json.loads(fit_out.read_text())
    assert refit["fit"] == side["fit"]


def test_kzm_scan_too_few_points(tmp_path):
    rc, out = run(tmp_path, "kzm-scan", "--n-k", "4", "--tau-q-i", "400")
    assert rc == 0
    assert json.loads(out.with_name("out.fit.json").read_text())["fit"] is None
    rc, _ = run(tmp_path, "fit", str(out), name="fit.json")
    assert rc == 3


def test_kzm_scan_warns_on_finite_size(tmp_path, capsys):
    rc, _ = run(tmp_path, "kzm-scan", "--n-k", "2", "--tau-q-i", "10000", "--n-spins", "100")
    assert rc == 0
    assert "finite-size" in capsys.readouterr().err


def test_ed_check_rows(tmp_path):
    rc, out = run(tmp_path, "ed-check", "--ed-tau-q", "1,2,4,8")
    assert rc == 0
    _, data = rows(out)
    assert [float(r["tau_q"]) for r in data] == [1.0, 2.0, 4.0, 8.0]
    assert all(r["n_spins"] == "8" for r in data)
    for r in data:
        assert float(r["kink_density_modesum_exact"]) == pytest.approx(float(r["kink_density_ed"]), abs=1e-8)


@pytest.mark.parametrize("argv", [
    ["ed-check", "--ed-n-spins", "7"],
    ["ed-check", "--ed-n-spins", "14"],
    ["lz-run", "--t-lz-ns", "0"],
    ["lz-run", "--scheme", "C"],
    ["lz-run", "--delta-mhz", "oops"],
    ["kzm-scan", "--range-policy", "fixed:0.5", "--tau-q-i", "100"],
    ["sweep", "--t-lz-step-ns", "0"],
    ["fit"],
    ["nope"],
])
def test_bad_input_exits_with_config_code(tmp_path, argv, capsys):
    rc, _ = run(tmp_path, *argv)
    assert rc == 2


def test_missing_fit_input(tmp_path):
    rc, _ = run(tmp_path, "fit", str(tmp_path / "missing.csv"), name="f.json")
    assert rc == 2
