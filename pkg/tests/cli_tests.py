import json
import sys
from pathlib import Path

import click
import pytest
from click.testing import CliRunner

# -------------------------------
# Locate modules
# -------------------------------
PROJECT_ROOT = Path(__file__).resolve().parents[1]
SCRIPTS_DIR = PROJECT_ROOT / "Scripts"
DATASETS_DIR = PROJECT_ROOT / "datasets"
sys.path.insert(0, str(SCRIPTS_DIR))

from main import cli, run
from run_logger import read_events, verify_log


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


def _invoke(runner, args):
    result = runner.invoke(cli, args, prog_name="loopk")
    payload = json.loads(result.stdout) if result.stdout.strip().startswith("{") else None
    return result, payload


def test_weights_enumerate(runner):
    result, out = _invoke(runner, ["weights", "enumerate", "--type", "A1", "--level", "2"])
    assert result.exit_code == 0
    assert out["status"] == "pass"
    assert out["data"]["count"] == 3
    assert out["data"]["weights"] == [[0], [1], [2]]
    assert out["command"][:2] == ["weights", "enumerate"]


def test_weights_cross_check(runner):
    result, out = _invoke(runner, ["weights", "enumerate", "--type", "A2", "--level", "1", "--cross-check", "--qorder", "6"])
    assert result.exit_code == 0
    assert out["diagnostics"]["invariant_theta_rank"] == 3


def test_alcove_fold(runner):
    result, out = _invoke(runner, ["alcove", "fold", "--type", "A1", "--h", "7/10"])
    assert result.exit_code == 0
    assert out["data"]["point"] == ["3/10"]
    assert out["data"]["walls"] == []
    assert out["data"]["witness_ok"]


def test_theta_expand(runner):
    result, out = _invoke(runner, ["theta", "expand", "--type", "A1", "--level", "1", "--lambda", "0", "--qorder", "9"])
    assert result.exit_code == 0
    terms = out["data"]["terms"]
    assert len(terms) == 7
    assert sorted({t["q"] for t in terms}) == ["0", "1", "4", "9"]
    assert all(t["coeff"] == 1 and t["u"] == 1 for t in terms)
    assert out["data"]["truncation"] == "9"


def test_stdout_is_deterministic(runner):
    args = ["theta", "expand", "--type", "B2", "--level", "1", "--lambda", "0,1", "--qorder", "4"]
    first, _ = _invoke(runner, args)
    second, _ = _invoke(runner, args)
    assert first.stdout == second.stdout
    assert "elapsed_s" in first.stderr


def test_report_hash_is_stable(runner):
    _, a = _invoke(runner, ["root", "describe", "--type", "G2"])
    _, b = _invoke(runner, ["root", "describe", "--type", "G2"])
    assert a["report_hash"] == b["report_hash"]
    assert len(a["report_hash"]) == 64
    assert a["data"]["cartan"] == [[2, -3], [-1, 2]]


def test_unsupported_type_is_a_structured_failure(runner):
    result, out = _invoke(runner, ["root", "describe", "--type", "E9"])
    assert result.exit_code == 1
    assert out["status"] == "fail"
    assert out["diagnostics"]["error"]["kind"] == "configuration"


def test_missing_option_is_a_usage_error(runner):
    result = runner.invoke(cli, ["alcove", "fold", "--h", "1/2"])
    assert result.exit_code == 2


def test_eta_table_on_odd_lattice(runner):
    result, out = _invoke(runner, ["modular", "eta-table", "--gram", "[[1]]"])
    assert result.exit_code == 0
    assert out["data"]["even_lattice"] is False
    assert any(e["eta"] == 1 for e in out["data"]["entries"])
    assert out["data"]["descends_to_w_sl2"] == {"1": False, "2": True}


def test_eta_table_on_root_datum(runner):
    result, out = _invoke(runner, ["modular", "eta-table", "--type", "C2"])
    assert result.exit_code == 0
    assert all(e["eta"] == 0 for e in out["data"]["entries"])


def test_gkm_check_from_files(runner):
    graph = str(DATASETS_DIR / "a1_flag_graph.json")
    result, out = _invoke(runner, ["gkm", "check", "--graph", graph,
                                   "--class", str(DATASETS_DIR / "a1_line_bundle_class.json")])
    assert result.exit_code == 0
    assert out["data"]["verdict"]["passed"]
    result, out = _invoke(runner, ["gkm", "check", "--graph", graph,
                                   "--class", str(DATASETS_DIR / "a1_failing_class.json")])
    assert result.exit_code == 1
    assert out["data"]["verdict"]["failing_edge"] == 0


def test_gkm_build_flag(runner):
    result, out = _invoke(runner, ["gkm", "build-flag", "--type", "A2"])
    assert result.exit_code == 0
    assert len(out["data"]["graph"]["vertices"]) == 6
    assert out["data"]["axioms"]["passed"]


def test_stalk_support_both_inputs(runner):
    result, out = _invoke(runner, ["stalk", "support", "--type", "A1", "--h1", "1/2", "--h2", "0"])
    assert result.exit_code == 0
    assert out["data"]["walls"] == [0]
    assert out["data"]["vanishing_roots"] == [{"m": -1, "alpha": [-2]}, {"m": 1, "alpha": [2]}]
    result, again = _invoke(runner, ["stalk", "support", "--type", "A1", "--tau", "0+1i", "--h", "0-1/2i"])
    assert result.exit_code == 0
    assert again["data"] == out["data"]


def test_stalk_free_support(runner):
    _, out = _invoke(runner, ["stalk", "free-support", "--type", "A2", "--h1", "0,1", "--h2", "1/2,0"])
    assert out["data"]["supported"] is False


def test_low_qorder_is_indeterminate(runner):
    result, out = _invoke(runner, ["modular", "verify-section", "--type", "A1", "--qorder", "2",
                                   "--tau", "0+0.5i", "--h", "0.1", "--beta", "1"])
    assert result.exit_code == 3
    assert out["status"] == "indeterminate"
    assert out["diagnostics"]["error"]["kind"] == "insufficient_truncation"


def test_tau_below_floor_fails(runner):
    result, out = _invoke(runner, ["modular", "verify-section", "--type", "A1", "--tau", "0+0.2i"])
    assert result.exit_code == 1
    assert out["diagnostics"]["error"]["kind"] == "domain"


def test_verify_group(runner):
    result, out = _invoke(runner, ["--seed", "4", "modular", "verify-group", "--type", "A1", "--samples", "3"])
    assert result.exit_code == 0
    assert out["data"]["seed"] == 4


def test_run_log_and_out_file(runner, tmp_path):
    log = tmp_path / "runs.jsonl"
    out_file = tmp_path / "report.json"
    for _ in range(2):
        result, _ = _invoke(runner, ["--log", str(log), "--out", str(out_file), "alcove", "fold", "--type", "A2", "--h", "1/2,1/2"])
        assert result.exit_code == 0
    assert verify_log(log) == []
    events = read_events(log)
    assert len(events) == 2 and events[0]["status"] == "pass"
    assert json.loads(out_file.read_text(encoding="utf-8"))["data"]["walls"] == [0]


def test_config_file(runner, tmp_path):
    good = tmp_path / "good.yaml"
    good.write_text("max_rank: 2\n", encoding="utf-8")
    result, out = _invoke(runner, ["--config", str(good), "root", "describe", "--type", "A3"])
    assert result.exit_code == 1
    assert out["diagnostics"]["error"]["kind"] == "capacity"
    bad = tmp_path / "bad.yaml"
    bad.write_text("qorderr: 3\n", encoding="utf-8")
    result = runner.invoke(cli, ["--config", str(bad), "root", "describe", "--type", "A1"])
    assert result.exit_code == 2


def test_text_mode(runner):
    result = runner.invoke(cli, ["--text", "weights", "enumerate", "--type", "A1", "--level", "1"])
    assert result.exit_code == 0
    assert "status" in result.stdout and "pass" in result.stdout


def test_programmatic_run():
    report = run(["theta", "cover-divisibility", "--type", "A1", "--length", "1", "--qorder", "4"])
    assert report.status == "pass"
    assert report.data["pairs"] == 2
    with pytest.raises(click.UsageError):
        run(["theta", "expand"])


def test_unreadable_gram_is_a_structured_failure(runner):
    for gram in ['[["x"]]', "[1]", "[[1, 2]]", "[[1"]:
        result, out = _invoke(runner, ["modular", "eta-table", "--gram", gram])
        assert result.exit_code == 1, gram
        assert out["diagnostics"]["error"]["kind"] == "domain"


def test_malformed_graph_file_is_a_structured_failure(runner, tmp_path):
    bad = tmp_path / "graph.json"
    bad.write_text(json.dumps({"edges": []}), encoding="utf-8")
    result, out = _invoke(runner, ["gkm", "check", "--graph", str(bad),
                                   "--class", str(DATASETS_DIR / "a1_line_bundle_class.json")])
    assert result.exit_code == 1
    assert out["status"] == "fail"
    assert out["diagnostics"]["error"]["kind"] == "domain"


def test_cover_divisibility_on_a_nonzero_weight(runner):
    result, out = _invoke(runner, ["theta", "cover-divisibility", "--type", "A1", "--level", "2",
                                   "--lambda", "1", "--length", "2", "--qorder", "16"])
    assert result.exit_code == 0
    assert out["data"]["counts"]["pass"] == 6
