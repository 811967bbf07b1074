import json

import numpy as np
import pytest

from greedy_qaoa import cli
from greedy_qaoa.errors import ContractError
from greedy_qaoa.experiment import CSV_COLUMNS, ExperimentConfig, rows_to_csv, run_experiment
from greedy_qaoa.optimizer import OptimizerOptions
from greedy_qaoa.problem import generate_graph, save_graph
from greedy_qaoa.simulator import mixer_sign_fault
from greedy_qaoa.verify import VerifyConfig, check_gradient, verify_suite


def small_cfg(**kw):
    base = dict(ensemble="RRG3", n=6, count=2, p_max=3, strategies=("greedy", "interp", "tqa"), grid_resolution=12)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_json_roundtrip():
    cfg = small_cfg(p_E=None, optimizer=OptimizerOptions(tol_grad=1e-9), out_dir="/tmp/x")
    back = ExperimentConfig.from_json(cfg.to_json())
    assert back == cfg and back.to_json() == cfg.to_json()


def test_config_validation():
    with pytest.raises(ContractError):
        small_cfg(strategies=("annealing",))
    with pytest.raises(ContractError):
        small_cfg(ensemble="GNP")
    with pytest.raises(ContractError):
        small_cfg(p_max=0)


def test_single_instance_greedy():
    g = generate_graph("RRG3", 8, 5)
    bundle = run_experiment(small_cfg(count=1, strategies=("greedy",)), graphs=[g])
    rows = bundle["summary"]
    assert [r["p"] for r in rows] == [1, 2, 3]
    assert np.all(np.diff([r["mean_ratio"] for r in rows]) >= 0)
    assert bundle["status"] == "ok" and bundle["schema_version"] == 1


def test_experiment_deterministic_csv(tmp_path):
    a = run_experiment(small_cfg(out_dir=str(tmp_path / "a")))
    b = run_experiment(small_cfg(out_dir=str(tmp_path / "b")))
    ca, cb = (tmp_path / "a" / "summary.csv").read_bytes(), (tmp_path / "b" / "summary.csv").read_bytes()
    assert ca == cb
    assert ca.decode().splitlines()[0] == ",".join(CSV_COLUMNS)
    res = json.loads((tmp_path / "a" / "results.json").read_text())
    assert res["schema_version"] == 1 and len(res["instances"]) == 2
    assert rows_to_csv(a["summary"]) == rows_to_csv(b["summary"])


def test_worker_pool_matches_serial(monkeypatch):
    serial = rows_to_csv(run_experiment(small_cfg(strategies=("tqa",)))["summary"])
    monkeypatch.setenv("GREEDY_QAOA_WORKERS", "2")
    assert rows_to_csv(run_experiment(small_cfg(strategies=("tqa",)))["summary"]) == serial


def test_partial_failure_recorded():
    cfg = small_cfg(count=1, strategies=("greedy",), optimizer=OptimizerOptions(max_iter=1))
    bundle = run_experiment(cfg)
    assert bundle["status"] == "failed"
    assert bundle["instances"][0]["errors"]


def test_verify_suite_passes():
    rep = verify_suite()
    assert rep.passed, "\n".join(rep.lines())
    assert rep.singular_ts == 0


def test_verify_detects_mixer_fault():
    with mixer_sign_fault():
        assert not check_gradient(VerifyConfig()).passed
        assert not verify_suite().passed


def test_cli_end_to_end(tmp_path, capsys):
    gpath = tmp_path / "g.json"
    assert cli.main(["gen-graph", "--n", "6", "--seed", "1", "--out", str(gpath)]) == 0
    out = tmp_path / "r.json"
    assert cli.main(["run", "--strategy", "greedy", "--graph", str(gpath), "--p-max", "3", "--out", str(out),
                     "--grid-resolution", "12"]) == 0
    res = json.loads(out.read_text())
    assert res["strategy"] == "GREEDY" and res["schema_version"] == 1
    assert [d["p"] for d in res["per_depth"]] == [1, 2, 3]
    assert set(res["per_depth"][0]) >= {"p", "energy", "ratio", "angles", "grad_norm", "inertia", "wall_ms"}
    assert cli.main(["run", "--strategy", "tqa", "--graph", str(gpath), "--p-max", "2", "--out", str(out),
                     "--tqa-swap"]) == 0
    ig, dot = tmp_path / "ig.json", tmp_path / "ig.dot"
    assert cli.main(["initgraph", "--graph", str(gpath), "--p-max", "3", "--out", str(ig), "--dot", str(dot),
                     "--expand-cap", "0", "--grid-resolution", "12"]) == 0
    assert dot.read_text().startswith("digraph")
    assert cli.main(["verify"]) == 0
    assert "PASS gradient-fd" in capsys.readouterr().out


def test_cli_errors(tmp_path):
    assert cli.main(["run", "--strategy", "greedy", "--graph", str(tmp_path / "missing.json"), "--p-max", "2",
                     "--out", str(tmp_path / "o.json")]) == 2
    with pytest.raises(SystemExit):
        cli.main(["run", "--strategy", "nope"])


def test_cli_partial_exit(tmp_path):
    gpath = tmp_path / "g.json"
    save_graph(generate_graph("RRG3", 6, 2), gpath)
    assert cli.main(["run", "--strategy", "tqa", "--graph", str(gpath), "--p-max", "3", "--max-iter", "2",
                     "--out", str(tmp_path / "o.json")]) == 1
