import json
import math
import os
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

import antikz
from antikz import cli, lz
from antikz.errors import StepUnderflowError


def test_parse_grid():
    assert cli.parse_grid("1,10,100") == [1.0, 10.0, 100.0]
    g = cli.parse_grid("log:1:100:3")
    assert g == pytest.approx([1.0, 10.0, 100.0])
    assert cli.parse_grid("lin:0:1:3") == [0.0, 0.5, 1.0]
    for bad in ("", "a,b", "log:0:1:3", "log:1:2", "1,nan", "lin:0:1:0"):
        with pytest.raises(cli.ConfigError):
            cli.parse_grid(bad)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=8))
def test_parse_grid_roundtrip(vals):
    assert cli.parse_grid(",".join(cli._fmt(v) for v in vals)) == vals


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_roundtrip(x):
    s = cli._fmt(x)
    assert float(s) == x
    assert len(s.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 17


def test_config_precedence(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("# sweep\nkappa = 2,3\nlambda=1e-2\nn-spins = 10\nrtol=1e-6\n")
    cfg = cli.resolve_config(["lz-prob", "--config", str(cfgfile), "--kappa", "5", "--window=-40,40"])
    assert cfg.kappa == [5.0]
    assert cfg.lam == [1e-2]
    assert cfg.n_spins == 10
    assert cfg.rtol == 1e-6
    assert cfg.window == (-40.0, 40.0)
    assert cfg.threads == 1
    meta = dict(cfg.metadata())
    assert meta["kappa"] == "5.0" and meta["window"] == "-40.0,40.0" and meta["J"] == "1"
    assert "threads" not in meta


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense\n")
    with pytest.raises(cli.ConfigError):
        cli.load_config(str(bad))
    bad.write_text("colour = red\n")
    with pytest.raises(cli.ConfigError):
        cli.load_config(str(bad))
    with pytest.raises(cli.ConfigError):
        cli.load_config(str(tmp_path / "missing.cfg"))
    with pytest.raises(cli.ConfigError):
        cli.resolve_config(["ising-defect", "--n-spins", "7"])
    with pytest.raises(cli.ConfigError):
        cli.resolve_config(["vopt", "--lambda", "0.5"])
    with pytest.raises(cli.ConfigError):
        cli.resolve_config(["lz-prob", "--window=3,1"])


def test_exit_codes(tmp_path, monkeypatch, capsys):
    assert cli.main(["lz-prob", "--kappa", "-1"]) == cli.EXIT_CONFIG
    assert cli.main(["lz-prob", "--rtol", "zero"]) == cli.EXIT_CONFIG
    assert cli.main(["bogus"]) == cli.EXIT_CONFIG

    def boom(*a, **k):
        raise StepUnderflowError("forced")

    monkeypatch.setattr(lz, "evolve_master", boom)
    assert cli.main(["lz-prob", "--kappa", "1"]) == cli.EXIT_NUMERIC
    assert "numerical failure" in capsys.readouterr().err


def test_lz_prob_table(tmp_path):
    out = tmp_path / "p.csv"
    plot = tmp_path / "p.gp"
    rc = cli.main(["lz-prob", "--kappa", "1,10,100", "--lambda", "1e-3", "--out", str(out), "--plot", str(plot)])
    assert rc == 0
    text = out.read_text()
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert lines[0].split(",")[:3] == ["kappa", "lambda", "P_numeric"]
    rows = [[float(v) for v in l.split(",")] for l in lines[1:]]
    assert len(rows) == 3
    for r in rows:
        assert r[4] < r[2] < 0.5
    assert "# command=lz-prob" in text
    assert "# column P_numeric: master equation" in text
    script = plot.read_text()
    assert str(out) in script and "using 1:2 " not in script


def test_lz_prob_noiseless():
    cfg = cli.RunConfig(command="lz-prob", kappa=[0.5, 1.0], lam=[0.0]).validate()
    t = cli.cmd_lz_prob(cfg)
    for num, non_ad in zip(t.column("P_numeric"), t.column("P_non_ad")):
        assert abs(num - non_ad) < 1e-2


def test_lz_prob_deterministic_with_mc():
    cfg = cli.RunConfig(command="lz-prob", kappa=[1.0, 2.0], lam=[1e-2], window=(-20.0, 20.0),
                        mc_traj=30, seed=7).validate()
    a = cli.cmd_lz_prob(cfg).to_csv()
    cfg.threads = 4
    b = cli.cmd_lz_prob(cfg).to_csv()
    assert a == b
    assert "P_mc_stderr" in a


def test_ising_defect_table_and_cache(tmp_path):
    cache = tmp_path / "cache"
    cfg = cli.RunConfig(command="ising-defect", kappa=[2.0, 5.0], lam=[0.0, 5e-3], n_spins=10,
                        window=(-60.0, 60.0), cache=str(cache)).validate()
    fresh = cli.cmd_ising_defect(cfg)
    assert all(0.0 <= v <= 1.0 for v in fresh.column("n_numeric"))
    assert all(math.isnan(v) for v in fresh.column("n_reciprocal")[:2])
    files = sorted(os.listdir(cache))
    assert len(files) == 4
    cached = cli.cmd_ising_defect(cfg)
    assert cached.to_csv() == fresh.to_csv()

    # corrupt one entry: warning, recompute, same result
    (cache / files[0]).write_text("garbage\n")
    with pytest.warns(RuntimeWarning, match="corrupt cache"):
        again = cli.cmd_ising_defect(cfg)
    assert again.to_csv() == fresh.to_csv()
    assert (cache / files[0]).read_text().splitlines()[1].startswith("key=")


def test_cache_key_sensitivity():
    a, _ = cli.ResultCache.key("ising_sum", 1.0, 1e-8)
    b, _ = cli.ResultCache.key("ising_sum", 1.0, 1e-9)
    c, canon = cli.ResultCache.key("ising_sum", 1.0, 1e-8)
    assert a != b and a == c
    assert canon.split("|")[0] == antikz.__version__


def test_vopt_table():
    cfg = cli.RunConfig(command="vopt", lam=[1e-3, 5e-3], vnum="inf_order").validate()
    t = cli.cmd_vopt(cfg)
    row = t.rows[0]
    assert row[3] == pytest.approx(0.1081, abs=1e-4)
    assert row[4] / row[3] == pytest.approx(0.939, abs=1e-3)
    assert any(n.startswith("slope_v_1st=") for n in t.notes)
    slope = float([n for n in t.notes if n.startswith("slope_v_1st=")][0].split("=")[1])
    assert slope == pytest.approx(2 / 3, abs=1e-12)


def test_selftest_fast_subset(tmp_path, monkeypatch):
    from antikz import acceptance

    calls = []

    def fake_run_all(fast, report):
        calls.append(fast)
        r = acceptance.CriterionResult(1, "stub", True, "ok", 0.0)
        report(r)
        return [r]

    monkeypatch.setattr(acceptance, "run_all", fake_run_all)
    out = tmp_path / "s.json"
    assert cli.main(["selftest", "--fast", "--out", str(out)]) == 0
    assert calls == [True]
    assert json.loads(out.read_text())["passed"] is True


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "antikz", "lz-prob", "--kappa", "0", "--lambda", "0"],
                       capture_output=True, text=True)
    assert r.returncode == 2
    r = subprocess.run([sys.executable, "-m", "antikz", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "ising-defect" in r.stdout
