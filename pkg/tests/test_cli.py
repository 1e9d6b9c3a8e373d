import json
from pathlib import Path

import numpy as np
import pytest

import graphflow as gf
from graphflow import cli

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def tiny_config(**overrides):
    cfg = {
        "graph": {"family": "lattice", "N": 1},
        "initial_data": {"kind": "delta", "center": [0], "amplitude": 1.0},
        "solver": {"p": 3.0, "t_min": 0.01, "t_max": 20.0, "num_instants": 55,
                   "rtol": 1e-8, "atol": 1e-12, "n0": 8},
        "profile": {"kind": "lattice", "c0": 1.0},
        "checks": [
            {"type": "decay_fit", "window": [0.5, 20],
             "theoretical_slope": -0.25, "tolerance": 0.15},
            {"type": "sup_bound", "window": [0.5, 20]},
            {"type": "lower_bound"},
        ],
        "seed": 7,
    }
    cfg.update(overrides)
    return cfg


def test_validate_good_config():
    assert cli.validate_config(tiny_config()) == []


def test_validate_rejects_unknown_key():
    cfg = tiny_config()
    cfg["grpah"] = {}
    errors = cli.validate_config(cfg)
    assert errors and any("grpah" in e for e in errors)


def test_validate_rejects_p_two():
    cfg = tiny_config()
    cfg["solver"]["p"] = 2.0
    errors = cli.validate_config(cfg)
    assert errors and any("solver/p" in e for e in errors)


def test_validate_requires_seed_for_randomized_profile():
    cfg = tiny_config(profile={"kind": "bruteforce", "size_cap": 2})
    del cfg["seed"]
    errors = cli.validate_config(cfg)
    assert any("seed" in e for e in errors)


def test_validate_cross_field_rules():
    cfg = tiny_config()
    del cfg["graph"]["N"]
    assert any("requires N" in e for e in cli.validate_config(cfg))
    cfg2 = tiny_config(checks=[{"type": "slow_decay", "q": 4.0}])
    assert any("power_law" in e for e in cli.validate_config(cfg2))


def test_run_writes_artifacts(tmp_path):
    report = cli.run(tiny_config(), tmp_path / "out")
    out = tmp_path / "out"
    for name in ["manifest.json", "report.json", "trajectory.csv",
                 "plotdata.csv", "check_decay_fit.json",
                 "check_sup_decay_upper.csv", "check_mass_lower.json"]:
        assert (out / name).exists(), name
    assert report["pass"]
    assert "decay_slope" in report
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config_hash"] == report["config_hash"]
    assert manifest["certified"]


def test_run_deterministic_bytes(tmp_path):
    cli.run(tiny_config(), tmp_path / "a")
    cli.run(tiny_config(), tmp_path / "b")
    for name in ["trajectory.csv", "plotdata.csv", "check_sup_decay_upper.csv",
                 "report.json"]:
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes()


def test_run_rejects_invalid_config(tmp_path):
    cfg = tiny_config()
    cfg["solver"]["p"] = 2.0
    with pytest.raises(cli.ConfigError):
        cli.run(cfg, tmp_path / "out")


def test_main_validate_config(tmp_path, capsys):
    path = tmp_path / "good.json"
    path.write_text(json.dumps(tiny_config()))
    assert cli.main(["validate-config", str(path)]) == 0
    bad = tiny_config()
    bad["solver"]["p"] = 2.0
    bad_path = tmp_path / "bad.json"
    bad_path.write_text(json.dumps(bad))
    assert cli.main(["validate-config", str(bad_path)]) == 2
    err = capsys.readouterr().err
    assert "solver/p" in err


def test_main_simulate_and_fit_round_trip(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(tiny_config()))
    out = tmp_path / "run"
    assert cli.main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    capsys.readouterr()
    assert cli.main(["fit", "--traj-dir", str(out), "--window", "0.5", "20"]) == 0
    fit = json.loads(capsys.readouterr().out)
    # pure recomputation from the stored CSV reproduces the report slope
    assert abs(fit["slope"] - report["decay_slope"]) <= 1e-12


def test_main_fk_subcommand(tmp_path):
    out = tmp_path / "fk"
    assert cli.main(["fk", "--config", str(CONFIG_DIR / "fk_lattice1d.json"),
                     "--out", str(out)]) == 0
    table = (out / "fk_profile.csv").read_text().splitlines()
    assert table[0] == "v,lambda"
    assert table[1] == "2,2"  # singleton entry (v, lambda) = (2, 2)


def test_main_verify_subcommand(tmp_path):
    cfg = tiny_config(snapshots=True)
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "run"
    assert cli.main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
    vout = tmp_path / "verify"
    assert cli.main(["verify", "--config", str(cfg_path), "--traj-dir", str(out),
                     "--out", str(vout)]) == 0
    assert (vout / "check_sup_decay_upper.json").exists()


def test_main_missing_config_is_usage_error(tmp_path):
    assert cli.main(["simulate", "--config", str(tmp_path / "nope.json")]) == 2


def test_main_check_failure_exit_code(tmp_path):
    cfg = tiny_config(checks=[{"type": "decay_fit", "window": [0.5, 20],
                               "theoretical_slope": 1.0, "tolerance": 0.01}])
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert cli.main(["simulate", "--config", str(cfg_path),
                     "--out", str(tmp_path / "out")]) == 1


def test_main_solver_failure_exit_code(tmp_path):
    cfg = tiny_config()
    cfg["solver"]["eps_trunc"] = 1e-300
    cfg["solver"]["max_expansions"] = 2
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert cli.main(["simulate", "--config", str(cfg_path),
                     "--out", str(tmp_path / "out")]) == 3


def test_run_product_graph_family(tmp_path):
    cfg = tiny_config(
        graph={"family": "product", "N": 1,
               "H": {"edges": [["a", "b", 1.0]]}},
        initial_data={"kind": "delta", "center": [0, 0], "amplitude": 1.0},
        profile={"kind": "bruteforce", "size_cap": 2},
        checks=[{"type": "lower_bound"}])
    report = cli.run(cfg, tmp_path / "out")
    assert report["pass"]


def test_run_custom_graph_family(tmp_path):
    # small cycle as an adjacency file; string vertex ids throughout
    path = tmp_path / "cycle.txt"
    path.write_text("a b 1\nb c 1\nc d 1\nd a 1\n")
    cfg = tiny_config(
        graph={"family": "custom", "adjacency_file": str(path)},
        initial_data={"kind": "delta", "center": "a", "amplitude": 1.0},
        solver={"p": 3.0, "t_min": 0.01, "t_max": 5.0, "num_instants": 12,
                "n0": 2, "max_expansions": 3},
        profile={"kind": "bruteforce", "size_cap": 2},
        checks=[])
    report = cli.run(cfg, tmp_path / "out")
    assert report["certified"]
    # finite graph: the whole cycle fits in B_2 and mass is conserved
    traj_csv = (tmp_path / "out" / "trajectory.csv").read_text().splitlines()
    masses = [float(r.split(",")[1]) for r in traj_csv[1:]]
    assert abs(masses[-1] - masses[0]) <= 1e-8 * masses[0]


def test_shipped_configs_validate():
    for path in sorted(CONFIG_DIR.glob("*.json")):
        cfg = json.loads(path.read_text())
        assert cli.validate_config(cfg) == [], path.name


def test_config_hash_stable():
    h1 = cli.config_hash(tiny_config())
    h2 = cli.config_hash(json.loads(json.dumps(tiny_config())))
    assert h1 == h2 and len(h1) == 64


def test_trajectory_export_and_load_round_trip(tmp_path):
    z1 = gf.lattice_generator(1)
    cfg = gf.SolverConfig(p=3.0, instants=gf.log_instants(0.1, 10.0, 9), n0=8)
    traj = gf.solve_cauchy(z1, gf.delta_field(z1, (0,)), cfg)
    outdir = tmp_path / "t"
    cli.export_trajectory(traj, outdir, snapshots=True)
    manifest = {
        "config": {"solver": {"p": 3.0, "t_min": 0.1, "t_max": 10.0,
                              "num_instants": 9}},
        "center": "0",
        "certified": traj.certified,
        "certified_radius": traj.certified_radius,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest))
    again = cli.load_trajectory(outdir, z1)
    assert np.array_equal(again.values, traj.values)
    assert again.region.vertices == traj.region.vertices
