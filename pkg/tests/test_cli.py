import json

import pytest

from netform.cli import EXIT_CONFIG, EXIT_DATA, EXIT_OK, EXIT_POLICY, main
from netform.testing import MockChatServer

P3 = 'kind = "p3"\nn = 16\ndelta = 2\nseed = 1\n\n[policy]\nkind = "random"\n'


@pytest.fixture
def p3_config(tmp_path):
    p = tmp_path / "p3.toml"
    p.write_text(P3)
    return p


def test_simulate_analyze_report_fit(tmp_path, p3_config, capsys):
    out = tmp_path / "run"
    assert main(["simulate", str(p3_config), "--out", str(out)]) == EXIT_OK
    assert (out / "manifest.json").exists()
    capsys.readouterr()
    assert main(["analyze", str(out)]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["kind"] == "p3" and rep["replay_ok"]
    assert main(["report", str(out), "--format", "csv"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("metric,value\n")
    assert main(["fit", str(out)]) == EXIT_OK
    table = capsys.readouterr().out
    assert "PA" in table and "AIC(k=3)" in table


def test_simulate_seed_override_and_runs(tmp_path, p3_config, capsys):
    out = tmp_path / "multi"
    assert main(["simulate", str(p3_config), "--out", str(out), "--runs", "2", "--seed", "9"]) == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert summary["run_dirs"] == ["run-00-00", "run-00-01"]
    cfgs = [json.loads((out / d / "manifest.json").read_text())["config"]["seed"] for d in summary["run_dirs"]]
    assert cfgs == [9, 10]


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('kind = "p3"\nn = -4\n')
    assert main(["simulate", str(bad)]) == EXIT_CONFIG
    assert "line 2" in capsys.readouterr().err


def test_survey_subcommand_checks_kind(p3_config):
    assert main(["survey", str(p3_config)]) == EXIT_CONFIG


def test_data_error_exit_code(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "nothing")]) == EXIT_DATA
    edges = tmp_path / "e.tsv"
    edges.write_text("1\t1\n")
    attrs = tmp_path / "a.csv"
    attrs.write_text("id,x\n1,a\n")
    assert main(["ingest", str(edges), str(attrs)]) == EXIT_DATA


def test_ingest(tmp_path, capsys):
    edges = tmp_path / "e.tsv"
    edges.write_text("5\t7\n")
    attrs = tmp_path / "a.csv"
    attrs.write_text("id,x\n5,a\n7,b\n")
    assert main(["ingest", str(edges), str(attrs), "--out", str(tmp_path / "norm")]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == {"edges": 1, "features": ["x"], "nodes": 2}
    assert (tmp_path / "norm" / "edges.tsv").read_text() == "0\t1\n"


def test_garbage_llm_aborts_with_exit_3_and_partial_artifact(tmp_path):
    with MockChatServer("I refuse to answer in JSON.") as server:
        cfg = tmp_path / "llm.toml"
        cfg.write_text(f'kind = "p2"\nn = 10\nT = 3\n\n[policy]\nkind = "llm"\nendpoint = "{server.url}"\n'
                       f'model = "mock"\nmax_retries = 2\n')
        out = tmp_path / "aborted"
        assert main(["simulate", str(cfg), "--out", str(out)]) == EXIT_POLICY
        assert server.hits == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "aborted"


def test_endpoint_and_temperature_overrides(tmp_path):
    with MockChatServer('[{"name": "Person 3"}]') as server:
        cfg = tmp_path / "llm.toml"
        cfg.write_text('kind = "p2"\nn = 10\nT = 2\n\n[policy]\nkind = "llm"\nendpoint = "http://127.0.0.1:9/v1"\n'
                       'model = "mock"\nmax_retries = 0\n')
        rc = main(["simulate", str(cfg), "--out", str(tmp_path / "o"), "--endpoint", server.url,
                   "--temperature", "0.3"])
        assert rc in (EXIT_OK, EXIT_POLICY)
        assert server.hits >= 1
        assert server.requests[0]["temperature"] == 0.3
