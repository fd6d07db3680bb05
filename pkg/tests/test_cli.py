"""CLI: config loading, overrides, run directories, exit codes, reproducibility."""

import json
from pathlib import Path

import pytest

from brinkflow.cli import main
from brinkflow.config import ConfigError, config_hash, load_config

FAST = [
    "--override", "cutoff=4",
    "--override", "grid=12",
    "--override", "dt=0.01",
    "--override", "T=0.05",
]


def run_dir_of(out: Path) -> Path:
    dirs = [p for p in out.iterdir() if p.is_dir()]
    assert len(dirs) == 1
    return dirs[0]


def test_load_config_defaults():
    loaded = load_config(None)
    cfg = loaded.sim
    assert cfg.params.mu == 0.1 and cfg.params.alpha == -0.5 and cfg.params.beta == 1.0
    assert cfg.params.r == 3.0 and cfg.params.q == 2.0
    assert cfg.cutoff == 32 and cfg.grid == 96
    assert cfg.dt == 1e-3 and cfg.T == 1.0 and cfg.epsilon == 0.1
    assert cfg.scheme == "IFRK4" and cfg.law == "zigzag"


def test_load_config_empty_file_is_defaults(tmp_path):
    path = tmp_path / "empty.toml"
    path.write_text("", encoding="utf-8")
    assert load_config(path).sim == load_config(None).sim


def test_load_config_rejects_q_ge_r(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[params]\nr = 2.0\nq = 3.0\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="q < r required"):
        load_config(path)


def test_load_config_aggregates_errors(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("dt = -1.0\ncutoff = 0\n[params]\nmu = -2.0\n", encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert len(info.value.errors) >= 3


def test_load_config_unknown_key(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("viscosity = 0.1\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(path)


def test_uniqueness_warning_for_critical_3d():
    loaded = load_config(None, overrides=(
        "dim=3", "params.r=3.0", "params.beta=1.0", "params.mu=0.4", "ic.kind=random",
    ))
    assert any("2*beta*mu" in w for w in loaded.warnings)


def test_missing_law_file_is_config_error(tmp_path, capsys):
    code = main(["simulate", "--out", str(tmp_path), "--override", "law=/nonexistent/law.json"])
    assert code == 3
    payload = json.loads(capsys.readouterr().out)
    assert any("does not exist" in m for m in payload["messages"])


def test_mode_lists_from_toml(tmp_path):
    path = tmp_path / "modes.toml"
    path.write_text(
        "cutoff = 6\ngrid = 18\nT = 0.0\nlaw = \"zero\"\n"
        "[ic]\nkind = \"modes\"\n"
        "[[ic.modes]]\nk = [1, 0]\nre = [0.0, 0.0]\nim = [0.0, -0.5]\n",
        encoding="utf-8",
    )
    loaded = load_config(path)
    from brinkflow import solver as sol
    from brinkflow import spectral as sp
    import math

    state = sol.build_initial_state(loaded.sim)
    # the Hermitian part of the single seeded mode gives u2 = 0.5 sin(x1)
    assert sp.norm(state, "H") ** 2 == pytest.approx(math.pi**2 / 2, rel=1e-12)
    assert state.max_divergence() < 1e-15


def test_override_types():
    loaded = load_config(None, overrides=("params.mu=0.25", "law=zero", "cutoff=8"))
    assert loaded.sim.params.mu == 0.25
    assert loaded.sim.law == "zero"
    assert loaded.sim.cutoff == 8


def test_hash_is_pure_function_of_config():
    a = load_config(None, overrides=("cutoff=8",)).sim
    b = load_config(None, overrides=("cutoff=8",)).sim
    c = load_config(None, overrides=("cutoff=9",)).sim
    assert config_hash(a) == config_hash(b) != config_hash(c)


def test_simulate_t_zero(tmp_path):
    code = main(["simulate", "--out", str(tmp_path), "--override", "T=0.0",
                 "--override", "cutoff=4", "--override", "grid=12"])
    assert code == 0
    run = run_dir_of(tmp_path)
    lines = (run / "ledger.csv").read_text().strip().splitlines()
    assert len(lines) == 2  # header + single row
    manifest = json.loads((run / "manifest.json").read_text())
    assert manifest["config_hash"] == run.name
    assert manifest["command"] == "simulate"


def test_simulate_reproducible_ledger(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--out", str(out1), *FAST]) == 0
    assert main(["simulate", "--out", str(out2), *FAST]) == 0
    led1 = (run_dir_of(out1) / "ledger.csv").read_bytes()
    led2 = (run_dir_of(out2) / "ledger.csv").read_bytes()
    assert led1 == led2
    assert run_dir_of(out1).name == run_dir_of(out2).name


def test_cli_config_error_exit_code(tmp_path, capsys):
    code = main(["simulate", "--out", str(tmp_path), "--override", "params.q=4.0"])
    assert code == 3
    payload = json.loads(capsys.readouterr().out)
    assert payload["failure"] == "config"
    assert any("q < r" in m for m in payload["messages"])


def test_cli_blow_up_exit_code(tmp_path, capsys):
    code = main([
        "simulate", "--out", str(tmp_path),
        "--override", "params.alpha=-1e8", "--override", "params.beta=1e-6",
        "--override", "cutoff=4", "--override", "grid=12",
        "--override", "dt=0.5", "--override", "T=5.0", "--override", "law=zero",
    ])
    assert code == 4
    out = capsys.readouterr().out
    assert "blow-up" in out


def test_law_inspect_contains_example_row(tmp_path):
    code = main(["law-inspect", "--out", str(tmp_path), "--override", "cutoff=4",
                 "--override", "grid=12"])
    assert code == 0
    run = run_dir_of(tmp_path)
    rows = (run / "law.csv").read_text().splitlines()
    target = [r for r in rows if r.startswith("0.5,")]
    assert target and float(target[0].split(",")[1]) == 1.5
    report = json.loads((run / "reports" / "law.json").read_text())
    assert report["passed"]
    assert report["c1"] == pytest.approx(1.1)
    assert report["c2"] == pytest.approx(3.0, abs=1e-3)


def test_energy_report_passes(tmp_path):
    code = main(["energy-report", "--out", str(tmp_path), *FAST])
    assert code == 0
    report = json.loads((run_dir_of(tmp_path) / "reports" / "energy.json").read_text())
    assert report["passed"] and report["energy_ok"]
    assert report["apriori"]["passed"]


def test_hvi_check_passes(tmp_path):
    code = main(["hvi-check", "--out", str(tmp_path),
                 "--override", "cutoff=4", "--override", "grid=12",
                 "--override", "dt=0.005", "--override", "T=0.1",
                 "--override", "snapshot_count=4"])
    assert code == 0
    report = json.loads((run_dir_of(tmp_path) / "reports" / "hvi.json").read_text())
    assert report["passed"] and report["n_records"] > 0


def test_uniqueness_refuses_inadmissible_regime(tmp_path, capsys):
    code = main(["uniqueness", "--out", str(tmp_path),
                 "--override", "dim=3", "--override", "params.mu=0.4",
                 "--override", "params.beta=1.0", "--override", "params.r=3.0",
                 "--override", "ic.kind=random",
                 "--override", "cutoff=3", "--override", "grid=9",
                 "--override", "dt=0.01", "--override", "T=0.02"])
    assert code == 3
    captured = capsys.readouterr()
    assert "2*beta*mu" in captured.out
    report = json.loads((run_dir_of(tmp_path) / "reports" / "failure.json").read_text())
    assert report["failure"] == "regime"


def test_uniqueness_passes_2d(tmp_path):
    code = main(["uniqueness", "--out", str(tmp_path), *FAST])
    assert code == 0
    report = json.loads((run_dir_of(tmp_path) / "reports" / "uniqueness.json").read_text())
    assert report["passed"]


def test_converge_runs(tmp_path):
    code = main(["converge", "--out", str(tmp_path),
                 "--override", "cutoff=4", "--override", "grid=12",
                 "--override", "dt=0.01", "--override", "T=0.1",
                 "--override", "snapshot_count=5",
                 "--override", 'study.eps_ladder=[0.2,0.1]'])
    assert code == 0
    report = json.loads((run_dir_of(tmp_path) / "reports" / "converge.json").read_text())
    assert report["cauchy_ok"]
    assert len(report["entries"]) == 1
