import json
import pathlib
import subprocess
import sys

import pytest

from behaveq.cli import load_system, save_system

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
SRC = str(pathlib.Path(__file__).resolve().parent.parent / "src")
GOLDEN = str(DATA / "paper-nda.json")
MOORE = str(DATA / "trace-vs-failure.json")


def run_cli(args, cwd=None):
    env = {"PYTHONPATH": SRC, "PATH": "/usr/bin:/bin:/usr/local/bin"}
    return subprocess.run(
        [sys.executable, "-m", "behaveq.cli", *args],
        capture_output=True, text=True, env=env, cwd=cwd)


LWA_DOC = {
    "kind": "lwa",
    "states": ["x", "y"],
    "alphabet": ["a"],
    "output": {"x": "0", "y": "3"},
    "matrices": {"a": [["0", "2"], ["0", "0"]]},
}

CTS_DOC = {
    "kind": "cts",
    "conditions": ["k", "k2"],
    "states": ["u", "v"],
    "transitions": [{"cond": "k", "from": "u", "to": "v"}],
}


# ------------------------------------------------------------ round trips

def test_round_trip_all_kinds():
    docs = [json.load(open(GOLDEN)), json.load(open(MOORE)), LWA_DOC, CTS_DOC]
    for doc in docs:
        system = load_system(doc)
        again = load_system(save_system(system))
        assert again == system


def test_schema_violation_messages():
    from behaveq.cli import SchemaError
    with pytest.raises(SchemaError):
        load_system({"kind": "nda", "states": ["x"]})
    with pytest.raises(SchemaError):
        load_system({"kind": "starship"})
    with pytest.raises(SchemaError):
        load_system({"kind": "nda", "states": ["x", "x"], "alphabet": ["a"],
                     "transitions": [], "accepting": []})


# ---------------------------------------------------------------- equiv

def test_equiv_pair_equivalent_exit_zero():
    res = run_cli(["equiv", GOLDEN, "--pair", "{x,y}", "{y}", "--json"])
    assert res.returncode == 0, res.stderr
    payload = json.loads(res.stdout)
    assert payload["equivalent"] is True


def test_equiv_pair_inequivalent_exit_one_with_witness():
    res = run_cli(["equiv", GOLDEN, "--pair", "{x}", "{y}", "--json"])
    assert res.returncode == 1
    payload = json.loads(res.stdout)
    assert payload["equivalent"] is False
    assert payload["witness"] == "[b]↓"


def test_equiv_all_classes(tmp_path):
    res = run_cli(["equiv", GOLDEN, "--all", "--json"])
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    classes = {frozenset(c) for c in payload["classes"]}
    assert frozenset({"{y}", "{x,y}"}) in classes
    assert frozenset({"{y,z}", "{x,y,z}"}) in classes


def test_equiv_cts_all(tmp_path):
    path = tmp_path / "cts.json"
    path.write_text(json.dumps(CTS_DOC))
    res = run_cli(["equiv", str(path), "--json"])
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["classes"]["k"] == [["u"], ["v"]]
    assert payload["classes"]["k2"] == [["u", "v"]]
    res = run_cli(["equiv", str(path), "--pair", "u", "v", "--json"])
    assert res.returncode == 1
    payload = json.loads(res.stdout)
    assert payload["per_condition"] == {"k": False, "k2": True}


def test_equiv_lwa_pair(tmp_path):
    path = tmp_path / "lwa.json"
    path.write_text(json.dumps(LWA_DOC))
    res = run_cli(["equiv", str(path), "--pair", "x", "y", "--json"])
    assert res.returncode == 1
    payload = json.loads(res.stdout)
    assert payload["equivalent"] is False
    assert "witness" in payload
    res = run_cli(["equiv", str(path), "--pair", "[0,1]", "y", "--json"])
    assert res.returncode == 0


def test_equiv_moore_semantics_flag():
    res = run_cli(["equiv", MOORE, "--pair", "{p0}", "{q0}", "--json"])
    assert res.returncode == 0
    res = run_cli(["equiv", MOORE, "--pair", "{p0}", "{q0}",
                   "--semantics", "failure", "--json"])
    assert res.returncode == 1
    payload = json.loads(res.stdout)
    assert payload["witness"] == "[a]↓"


# -------------------------------------------------------------- quotient

def test_quotient_golden():
    res = run_cli(["quotient", GOLDEN, "--json"])
    assert res.returncode == 0, res.stderr
    payload = json.loads(res.stdout)
    assert len(payload["automaton"]["states"]) == 6
    assert payload["homomorphism"] is True
    assert payload["automaton"]["accepting"] == ["{z}"]
    assert set(payload["witness"]["x"]) == {"{x,y}", "{x,y,z}"}
    assert set(payload["witness"]["y"]) == {"{y}", "{x,y}", "{y,z}", "{x,y,z}"}
    assert set(payload["redundant"]) == {"{}", "{y,z}", "{x,y,z}"}


def test_quotient_identity_eq_full_dfa():
    res = run_cli(["quotient", GOLDEN, "--identity-eq", "--json"])
    payload = json.loads(res.stdout)
    assert len(payload["automaton"]["states"]) == 8
    assert payload["homomorphism"] is True


def test_quotient_mutated_accepting(tmp_path):
    doc = json.load(open(GOLDEN))
    doc["accepting"] = []
    path = tmp_path / "mutated.json"
    path.write_text(json.dumps(doc))
    res = run_cli(["quotient", str(path), "--json"])
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["homomorphism"] is True
    assert len(payload["automaton"]["states"]) == 1


def test_quotient_rejects_non_nda(tmp_path):
    path = tmp_path / "cts.json"
    path.write_text(json.dumps(CTS_DOC))
    res = run_cli(["quotient", str(path)])
    assert res.returncode == 2


# ----------------------------------------------------------------- check

def test_check_laws_random():
    res = run_cli(["check", "--random", "nda", "--laws",
                   "--trials", "5", "--seed", "3", "--json"])
    assert res.returncode == 0, res.stderr
    payload = json.loads(res.stdout)
    assert payload["all_passed"] is True


def test_check_laws_corruption_fails():
    res = run_cli(["check", "--random", "nda", "--laws", "--trials", "5",
                   "--seed", "3", "--corruption", "lift", "--json"])
    assert res.returncode == 1
    payload = json.loads(res.stdout)
    assert payload["all_passed"] is False


def test_check_adequacy_file():
    res = run_cli(["check", GOLDEN, "--adequacy", "--json"])
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["all_passed"] is True


def test_check_requires_mode():
    res = run_cli(["check", GOLDEN])
    assert res.returncode == 2


# ------------------------------------------------------------------ eval

def test_eval_word_and_table():
    res = run_cli(["eval", GOLDEN, "--subset", "{x}", "--word", "a", "--json"])
    assert res.returncode == 0
    assert json.loads(res.stdout)["accepted"] is True
    res = run_cli(["eval", GOLDEN, "--subset", "{x}", "--maxlen", "1", "--json"])
    payload = json.loads(res.stdout)
    assert payload["theory"]["↓"] is False
    assert payload["theory"]["[a]↓"] is True


def test_eval_cts_formula(tmp_path):
    path = tmp_path / "cts.json"
    path.write_text(json.dumps(CTS_DOC))
    res = run_cli(["eval", str(path), "--formula", "!([] !tt)", "--json"])
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["satisfied"] == [{"cond": "k", "state": "u"}]


def test_eval_lwa_word(tmp_path):
    path = tmp_path / "lwa.json"
    path.write_text(json.dumps(LWA_DOC))
    res = run_cli(["eval", str(path), "--state", "x", "--word", "a", "--json"])
    payload = json.loads(res.stdout)
    assert payload["weight"] == "6"


def test_eval_moore_word_and_cts_depth(tmp_path):
    res = run_cli(["eval", MOORE, "--subset", "{p0}", "--word", "a", "--json"])
    assert res.returncode == 0
    assert json.loads(res.stdout)["output"] == "1"
    path = tmp_path / "cts.json"
    path.write_text(json.dumps(CTS_DOC))
    res = run_cli(["eval", str(path), "--depth", "1", "--json"])
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    rendered = {e["formula"] for e in payload["formulas"]}
    assert "tt" in rendered and any("□" in f for f in rendered)


# ----------------------------------------------------------- determinize

def test_determinize_forward_and_backward():
    res = run_cli(["determinize", GOLDEN, "--initials", "{x,y}", "--json"])
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert "{x,y}" in payload["states"]
    assert payload["outputs"]["{z}"] is True
    res = run_cli(["determinize", GOLDEN, "--direction", "backward", "--json"])
    payload = json.loads(res.stdout)
    assert {"from": "{z}", "action": "a", "to": "{x,y}"} in payload["transitions"]
    assert payload["accepting"] == "{z}"


# ----------------------------------------------------------- determinism

def test_reports_are_byte_identical_across_runs():
    args = ["check", "--random", "cts", "--laws", "--adequacy",
            "--trials", "4", "--seed", "99", "--json"]
    first = run_cli(args)
    second = run_cli(args)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout
    assert first.stdout.strip()


def test_input_error_exit_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli(["equiv", str(bad)]).returncode == 2
    missing = tmp_path / "missing.json"
    assert run_cli(["equiv", str(missing)]).returncode == 2
