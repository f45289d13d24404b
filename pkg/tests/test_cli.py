import io
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from ctcbox.boxes import box_from_spec, named_box
from ctcbox.cli import main
from ctcbox.deutsch import example, matrix_to_json


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_list_text_and_json(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    assert "pr" in out and "svetlichny" in out
    code, out, _ = run(capsys, "list", "--json")
    data = json.loads(out)
    assert [b["name"] for b in data["boxes"]] == ["pr", "svetlichny",
                                                  "mermin1", "mermin2"]
    assert data["deutsch_examples"] == ["swap", "grandfather", "cnot", "product"]


def test_show_json_round_trips(capsys):
    code, out, _ = run(capsys, "show", "--box", "pr", "--json")
    assert code == 0
    assert box_from_spec(json.loads(out)) == named_box("pr")


def test_show_constrained_rows(capsys):
    code, out, _ = run(capsys, "show", "--box", "pr", "--ctc", "alice,bob",
                       "--json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert rows[0]["outcomes"] == [{"out": [0, 0], "p": "1"}]
    assert rows[1]["paradox"] is True
    code, out, _ = run(capsys, "show", "--box", "pr", "--ctc", "bob")
    assert "PARADOX" not in out and "w.p. 1" in out


def test_verify_ok_and_failure(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--box", "pr")
    assert code == 0 and "no-signaling OK" in out and "CHSH value 4" in out

    mapping = {(0, 0): (0, 0), (0, 1): (1, 1), (1, 0): (0, 0), (1, 1): (0, 1)}
    spec = {"parties": 2,
            "table": [{"in": list(i), "out": list(o), "p": "1"}
                      for i, o in mapping.items()]}
    path = tmp_path / "leaky.json"
    path.write_text(json.dumps(spec))
    code, out, _ = run(capsys, "verify", "--spec", str(path), "--json")
    assert code == 1
    data = json.loads(out)
    assert data["ok"] is False
    witness = data["results"][0]["witness"]
    assert witness["coalition"] == ["alice"]
    assert witness["inputs_a"] == [0, 0] and witness["inputs_b"] == [0, 1]


def test_verify_all_builtins(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert out.count("no-signaling OK") == 4


def test_verify_accepts_named_check(capsys):
    code, out, _ = run(capsys, "verify", "no-signaling", "--box", "svetlichny")
    assert code == 0 and "no-signaling OK" in out
    with pytest.raises(SystemExit):
        run(capsys, "verify", "positivity", "--box", "svetlichny")


def test_box_spec_prefix_loads_file(capsys, tmp_path):
    path = tmp_path / "box.json"
    path.write_text(json.dumps({"parties": 2, "constraint": [[0, 1]]}))
    code, out, _ = run(capsys, "show", "--box", f"spec:{path}", "--json")
    assert code == 0
    assert box_from_spec(json.loads(out)) == named_box("pr")


def test_analyze_json_report(capsys):
    code, out, _ = run(capsys, "analyze", "--box", "svetlichny",
                       "--ctc", "alice", "--sender", "alice",
                       "--receivers", "bob,charlie", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["summary"]["dependent_settings"] == 2
    dependent = [e for e in data["entries"] if e["dependent"]]
    assert [e["setting"] for e in dependent] == [[0, 0], [1, 1]]
    assert dependent[0]["rule"] == {"00": 0, "01": 1, "10": 1, "11": 0}
    assert dependent[1]["rule"] == {"00": 1, "01": 0, "10": 0, "11": 1}
    notes = [e["note"] for e in data["entries"] if not e["dependent"]]
    assert all(note for note in notes)


def test_analyze_text_mentions_notes(capsys):
    code, out, _ = run(capsys, "analyze", "--box", "svetlichny",
                       "--ctc", "alice", "--sender", "alice",
                       "--receivers", "bob,charlie")
    assert code == 0
    assert "note:" in out and "summary: 2/4" in out


def test_analyze_scan_text(capsys):
    code, out, _ = run(capsys, "analyze", "--box", "pr", "--ctc", "bob")
    assert code == 0
    assert "direction alice -> bob: 0/2 settings dependent (0/4 cases)" in out
    assert "direction bob -> alice: 1/2 settings dependent (2/4 cases)" in out
    assert ("overall: 1/2 directions signal; 1/4 settings dependent "
            "(2/8 cases)") in out


def test_analyze_scan_json(capsys):
    code, out, _ = run(capsys, "analyze", "--box", "svetlichny",
                       "--ctc", "bob,charlie", "--json")
    assert code == 0
    data = json.loads(out)
    summary = data["summary"]
    assert summary["directions"] == 9
    assert summary["dependent_directions"] == 4
    assert summary["settings"] == 24 and summary["dependent_settings"] == 8
    assert summary["cases"] == 48 and summary["dependent_cases"] == 16
    directions = {(r["sender"], tuple(r["coalition"])): r["summary"]
                  for r in data["reports"]}
    # the looped pair cannot be reached, but each of them reaches alice
    for coalition in (("bob",), ("charlie",), ("bob", "charlie")):
        assert directions[("alice", coalition)]["dependent_settings"] == 0
    bob_to_pair = directions[("bob", ("alice", "charlie"))]
    assert bob_to_pair["dependent_settings"] == 2
    assert bob_to_pair["dependent_cases"] == 4
    assert bob_to_pair["impractical"] is True
    assert directions[("bob", ("alice",))]["dependent_settings"] == 2
    assert directions[("bob", ("alice",))]["impractical"] is False


def test_analyze_rejects_overlapping_roles(capsys):
    code, _, err = run(capsys, "analyze", "--box", "pr", "--ctc", "bob",
                       "--sender", "alice", "--receivers", "alice")
    assert code == 2 and "error:" in err


def test_analyze_rejects_half_specified_direction(capsys):
    code, _, err = run(capsys, "analyze", "--box", "pr", "--ctc", "bob",
                       "--sender", "alice")
    assert code == 2 and "go together" in err
    code, _, err = run(capsys, "analyze", "--box", "pr", "--ctc", "bob",
                       "--receivers", "alice")
    assert code == 2 and "go together" in err


def test_analyze_requires_box(capsys):
    code, _, err = run(capsys, "analyze", "--sender", "alice",
                       "--receivers", "bob")
    assert code == 2 and "error:" in err


def test_spec_from_stdin(capsys, monkeypatch):
    spec = json.dumps({"parties": 2, "constraint": [[0, 1]]})
    monkeypatch.setattr(sys, "stdin", io.StringIO(spec))
    code, out, _ = run(capsys, "show", "--spec", "-", "--json")
    assert code == 0
    assert json.loads(out) == {"parties": 2, "constraint": [[0, 1]]}


def test_bad_spec_file_reports_usage_error(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "show", "--spec", str(path))
    assert code == 2 and "error:" in err
    code, _, err = run(capsys, "show", "--spec", str(tmp_path / "missing.json"))
    assert code == 2 and "error:" in err
    path = tmp_path / "float.json"
    path.write_text(json.dumps({"parties": 2, "table": [
        {"in": [0, 0], "out": [0, 0], "p": 0.5}]}))
    code, _, err = run(capsys, "show", "--spec", str(path))
    assert code == 2 and "error:" in err


def test_deutsch_example_json(capsys):
    code, out, _ = run(capsys, "deutsch", "--example", "swap",
                       "--crosscheck", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["converged"] and data["iterations"] <= 2
    assert data["sigma"][0][0] == [0.75, 0.0]
    assert data["crosscheck"]["permutation"] == [0, 2, 1, 3]
    assert data["crosscheck"]["prediction_match"] is True
    assert data["ok"] is True


def test_deutsch_problem_file(capsys, tmp_path):
    u, rho, d_loop = example("grandfather")
    problem = {"unitary": matrix_to_json(u), "rho_cr": matrix_to_json(rho),
               "d_loop": d_loop}
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(problem))
    code, out, _ = run(capsys, "deutsch", "--file", str(path), "--json")
    assert code == 0
    data = json.loads(out)
    assert np.asarray(data["sigma"])[:, :, 0] == pytest.approx(np.eye(2) / 2)


def test_deutsch_usage_errors(capsys, tmp_path):
    code, _, err = run(capsys, "deutsch")
    assert code == 2 and "error:" in err
    code, _, err = run(capsys, "deutsch", "--example", "bogus")
    assert code == 2
    code, _, err = run(capsys, "deutsch", "--example", "swap",
                       "--file", "x.json")
    assert code == 2
    code, _, err = run(capsys, "deutsch", "--example", "product",
                       "--crosscheck")
    assert code == 2 and "permutation" in err
    path = tmp_path / "incomplete.json"
    path.write_text(json.dumps({"unitary": matrix_to_json(np.eye(2))}))
    code, _, err = run(capsys, "deutsch", "--file", str(path))
    assert code == 2


def test_deutsch_max_iter_budget(capsys, tmp_path):
    code, _, _ = run(capsys, "deutsch", "--example", "swap", "--max-iter", "5")
    assert code == 0

    # converges at step 1 through the averaged iterates; a zero budget
    # stops before that and must be reported as a failed check
    perm = [2, 5, 0, 8, 11, 1, 3, 6, 9, 4, 7, 10]
    u = np.zeros((12, 12))
    for source, target in enumerate(perm):
        u[target, source] = 1
    rho = np.diag([0.5, 0.5, 0, 0])
    problem = {"unitary": matrix_to_json(u), "rho_cr": matrix_to_json(rho),
               "d_loop": 3}
    path = tmp_path / "oscillating.json"
    path.write_text(json.dumps(problem))
    code, out, _ = run(capsys, "deutsch", "--file", str(path),
                       "--max-iter", "0")
    assert code == 1 and "DID NOT CONVERGE" in out
    code, out, _ = run(capsys, "deutsch", "--file", str(path), "--json")
    data = json.loads(out)
    assert code == 0 and data["converged"] and data["from_average"]


def test_reproduce_single_and_all(capsys):
    code, out, _ = run(capsys, "reproduce", "--table", "I")
    assert code == 0 and "scenario I:" in out and "overall: OK" in out
    assert "scenario II:" not in out
    code, out_all, _ = run(capsys, "reproduce", "--all")
    assert code == 0
    code, out_table_all, _ = run(capsys, "reproduce", "--table", "all")
    assert code == 0
    assert out_all == out_table_all
    for key in ("I", "II", "III", "IV"):
        assert f"scenario {key}:" in out_all


def test_reproduce_json(capsys):
    code, out, _ = run(capsys, "reproduce", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["ok"] is True
    assert [s["key"] for s in data["scenarios"]] == ["I", "II", "III", "IV"]
    rows = {tuple(r["in"]): tuple(r["out"]) for r in data["scenarios"][0]["rows"]}
    assert rows == {(0, 0): (0, 0), (0, 1): (1, 1), (1, 0): (0, 0), (1, 1): (0, 1)}


def test_reproduce_rejects_unknown_table(capsys):
    code, _, err = run(capsys, "reproduce", "--table", "V")
    assert code == 2 and "error:" in err


def test_seed_variable_is_inert():
    argv = [sys.executable, "-m", "ctcbox.cli", "analyze", "--box", "mermin2",
            "--ctc", "alice", "--sender", "alice", "--receivers", "bob,charlie",
            "--json"]
    env = dict(os.environ)
    env["NONLOCAL_CTC_SEED"] = "12345"
    with_seed = subprocess.run(argv, capture_output=True, env=env)
    env["NONLOCAL_CTC_SEED"] = "99999"
    other_seed = subprocess.run(argv, capture_output=True, env=env)
    assert with_seed.returncode == other_seed.returncode == 0
    assert with_seed.stdout == other_seed.stdout
