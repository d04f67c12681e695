import json

import pytest

from contextlab.cli import main
from contextlab.models import behavior_to_json, dump_json

from .conftest import FIXTURES


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


# =============================================================================
# decide / validate
# =============================================================================

def test_decide_ks_prbox(capsys):
    code, data = run_json(capsys, "decide", "--theory", "ks", str(FIXTURES / "prbox.json"))
    assert code == 0
    assert data["verdict"] == "contextual"
    assert data["lp"] == {"variables": 16, "constraints": 17}
    assert len(data["input_sha256"]) == 64


def test_decide_ks_refuses_disturbing(capsys):
    code, data = run_json(capsys, "decide", "--theory", "ks", str(FIXTURES / "disturbing1.json"))
    assert code == 65
    assert data["error"] == "DisturbingBehaviorError"
    assert data["witness"]["contexts"] == ["c12", "c23"]
    assert len(data["input_sha256"]) == 64


def test_decide_cbd2_prbox(capsys):
    code, data = run_json(capsys, "decide", "--theory", "cbd2", str(FIXTURES / "prbox.json"))
    assert code == 0
    assert data["theory"] == "cbd2"
    assert data["verdict"] == "contextual"


def test_decide_is_deterministic(capsys):
    _, first = run(capsys, "decide", "--theory", "cbd2", str(FIXTURES / "disturbing1.json"))
    _, second = run(capsys, "decide", "--theory", "cbd2", str(FIXTURES / "disturbing1.json"))
    assert first == second


def test_dump_lp(capsys, tmp_path):
    path = tmp_path / "lp.tsv"
    code, _ = run(capsys, "decide", "--theory", "ks", str(FIXTURES / "prbox.json"), "--dump-lp", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0].startswith("constraint\t-1,-1,-1,-1\t")
    assert lines[-1].startswith("normalization\t")
    assert len(lines) == 18


def test_validate(capsys):
    code, data = run_json(capsys, "validate", str(FIXTURES / "disturbing1.json"))
    assert code == 0
    assert data["valid"] is True
    assert data["nondisturbing"] is False
    assert data["binary"] is True


# =============================================================================
# Input errors
# =============================================================================

def test_unknown_flag_exits_64(capsys):
    code, _ = run(capsys, "decide", "--frobnicate", str(FIXTURES / "prbox.json"))
    assert code == 64


def test_missing_command_exits_64(capsys):
    assert run(capsys)[0] == 64


def test_bad_json_exits_64(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, data = run_json(capsys, "decide", "--theory", "ks", str(path))
    assert code == 64
    assert data["error"] == "FormatError"


def test_unnormalized_behavior_exits_64(capsys, tmp_path, prbox):
    data = behavior_to_json(prbox)
    data["contexts"][0]["distribution"] = {"-1,-1": "1/2", "+1,+1": "1/4"}
    path = tmp_path / "bad.json"
    path.write_text(dump_json(data))
    code, out = run_json(capsys, "decide", "--theory", "ks", str(path))
    assert code == 64
    assert "sums to 3/4" in out["message"]
    assert len(out["input_sha256"]) == 64

    code, out = run_json(capsys, "validate", str(path))
    assert code == 64
    assert out["valid"] is False


# =============================================================================
# transform / consistification / principles
# =============================================================================

def test_transform_to_file(capsys, tmp_path):
    out_path = tmp_path / "nested.json"
    code, data = run_json(
        capsys, "transform", "--spec", str(FIXTURES / "specs" / "drop_c14.json"),
        str(FIXTURES / "prbox.json"), "-o", str(out_path),
    )
    assert code == 0
    assert data["kind"] == "nest"
    written = json.loads(out_path.read_text())
    assert [c["name"] for c in written["contexts"]] == ["c12", "c23", "c34"]


def test_transform_to_stdout(capsys):
    code, data = run_json(
        capsys, "transform", "--spec", str(FIXTURES / "specs" / "consistify.json"), str(FIXTURES / "prbox.json")
    )
    assert code == 0
    assert data["kind"] == "consistify"
    assert len(data["input_sha256"]) == 64
    assert len(data["spec_sha256"]) == 64
    assert len(data["behavior"]["observables"]) == 8
    assert "provenance" in data["behavior"]


def test_verify_consistification(capsys):
    code, data = run_json(capsys, "verify-consistification", str(FIXTURES / "maximally_disturbing.json"))
    assert code == 0
    assert data["round_trip"] is True
    assert data["nondisturbing"] is True
    assert data["verdicts_agree"] is True


def test_check_principle_on_frozen_violation(capsys, tmp_path, frozen_violation):
    behavior_path = tmp_path / "pair2.json"
    behavior_path.write_text(dump_json(frozen_violation["behavior"]))
    code, data = run_json(
        capsys, "check-principle", "--principle", "post-processing", "--theory", "cbd2",
        "--spec", str(FIXTURES / "specs" / "product_q1_q2.json"), str(behavior_path), "--commutation",
    )
    assert code == 0
    assert data["status"] == "violated"
    assert data["commutation"]["commutes"] is False


def test_check_principle_ks_respected(capsys):
    code, data = run_json(
        capsys, "check-principle", "--principle", "nestedness", "--theory", "ks",
        "--spec", str(FIXTURES / "specs" / "drop_c14.json"), str(FIXTURES / "prbox.json"),
    )
    assert code == 0
    assert data["status"] == "respected"


def test_check_principle_kind_mismatch(capsys):
    code, _ = run(
        capsys, "check-principle", "--principle", "coarse-graining", "--theory", "ks",
        "--spec", str(FIXTURES / "specs" / "drop_c14.json"), str(FIXTURES / "prbox.json"),
    )
    assert code == 64


# =============================================================================
# search / numlab
# =============================================================================

def test_ks_search_small_budget(capsys):
    code, out = run(capsys, "search", "--config", str(FIXTURES / "search" / "ks_cycle4.json"), "--budget", "3")
    assert code == 0
    lines = out.strip().splitlines()
    summary = json.loads(lines[-1])["summary"]
    assert summary["candidates"] == 3
    assert summary["violations"] == 0
    assert len(summary["config_sha256"]) == 64


@pytest.mark.slow
def test_cbd2_search_output_matches_exit_code(capsys):
    code, out = run(capsys, "search", "--config", str(FIXTURES / "search" / "cbd2_pair2.json"))
    records = [json.loads(line) for line in out.strip().splitlines()]
    summary = records[-1]["summary"]
    assert summary["violations"] == len(records) - 1
    assert code == (0 if summary["violations"] else 2)
    for record in records[:-1]:
        assert record["principle"] in ("nestedness", "coarse-graining", "post-processing")


def test_numlab(capsys):
    code, data = run_json(capsys, "numlab", "--nmax", "100")
    assert code == 0
    assert data["axioms"]["smallest_transported_counterexample"] == 9
    assert data["equivalence"]["mismatches"] == []


# =============================================================================
# Flags and error output
# =============================================================================

def test_max_vars_refuses_large_lp(capsys):
    code, data = run_json(capsys, "decide", "--theory", "ks", str(FIXTURES / "prbox.json"), "--max-vars", "8")
    assert code == 65
    assert data["error"] == "SizeLimitError"
    assert "16 variables, limit is 8" in data["message"]
    assert len(data["input_sha256"]) == 64


def test_max_vars_at_exact_size_decides(capsys):
    code, data = run_json(capsys, "decide", "--theory", "ks", str(FIXTURES / "prbox.json"), "--max-vars", "16")
    assert code == 0
    assert data["verdict"] == "contextual"


def test_no_validate_lets_transform_through(capsys, tmp_path, prbox):
    data = behavior_to_json(prbox)
    data["contexts"][0]["distribution"] = {"-1,-1": "1/2", "+1,+1": "1/4"}
    path = tmp_path / "unnormalized.json"
    path.write_text(dump_json(data))
    spec = str(FIXTURES / "specs" / "drop_c14.json")

    code, out = run_json(capsys, "transform", "--spec", spec, str(path))
    assert code == 64
    assert out["error"] == "FormatError"
    assert len(out["input_sha256"]) == 64

    code, out = run_json(capsys, "transform", "--spec", spec, str(path), "--no-validate")
    assert code == 0
    contexts = {c["name"]: c for c in out["behavior"]["contexts"]}
    assert sorted(contexts) == ["c12", "c23", "c34"]
    assert contexts["c12"]["distribution"] == {"-1,-1": "1/2", "+1,+1": "1/4"}


def test_unknown_post_processing_function_exits_64(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(dump_json({"kind": "post_process", "sources": ["q1", "q2"], "name": "f", "function": "xor"}))
    code, out = run_json(capsys, "transform", "--spec", str(spec), str(FIXTURES / "prbox.json"))
    assert code == 64
    assert "unknown post-processing function" in out["message"]
    assert len(out["input_sha256"]) == 64
