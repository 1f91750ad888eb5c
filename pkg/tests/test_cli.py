import json

import pytest

from equisums.cli import RunConfig, main, parse_multiset
from equisums.errors import DomainError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out), err


def test_parse_multiset_grammar():
    A = parse_multiset("1,1^2, 3", 7)
    assert A.entries == ((1, 3), (3, 1))
    notes = []
    assert parse_multiset("8,-1", 7, notes).entries == ((1, 1), (6, 1))
    assert len(notes) == 2
    with pytest.raises(DomainError, match="position 2"):
        parse_multiset("1,x", 7)
    with pytest.raises(DomainError, match="position 4"):
        parse_multiset("1,2^y", 7)


def test_run_config_validation():
    with pytest.raises(DomainError):
        RunConfig(budget=0)
    with pytest.raises(DomainError):
        RunConfig(jobs=0)
    assert RunConfig().seed == 0


def test_analyze(capsys):
    code, rep, _ = run_json(capsys, "analyze", "-n", "7", "-A", "1,2,4")
    assert code == 0 and rep["uniform"] and rep["conditions"]["pow2_ok"] and rep["conditions"]["sum_ok"]
    assert rep["profile"] == ["1"] * 7
    code, rep, _ = run_json(capsys, "analyze", "-n", "7", "-A", "1,5,3")
    assert not rep["uniform"]
    assert {d["residue"]: d["delta"] for d in rep["deviations"]} == {0: "-1", 1: "1"}
    code, rep, _ = run_json(capsys, "analyze", "-n", "4", "-A", "1,3")
    assert not rep["uniform"] and not rep["conditions"]["pow2_ok"] and rep["r"] is None


def test_analyze_text_and_notice(capsys):
    code, out, err = run(capsys, "analyze", "-n", "7", "-A", "8,2,4")
    assert code == 0 and "equidistributed: yes" in out and "reduced to 1" in err


def test_domain_errors_exit_2(capsys):
    assert run(capsys, "analyze", "-n", "2", "-A", "1")[0] == 2
    assert run(capsys, "analyze", "-n", "7", "-A", "1,,2")[0] == 2
    assert run(capsys, "analyze", "-n", "7", "-n", "9", "-A", "1")[0] == 2


def test_construct(capsys):
    code, rep, _ = run_json(capsys, "construct", "-n", "7", "-B", "1:+++")
    assert code == 0 and rep["uniform"] and rep["match"]
    code, rep, _ = run_json(capsys, "construct", "-n", "7", "-B", "1:+--")
    assert not rep["uniform"] and rep["match"] and rep["bump_residue"] == 1
    assert rep["predicted"] == rep["profile"] == ["0", "2", "1", "1", "1", "1", "1"]
    code, out, err = run(capsys, "construct", "-n", "5", "-B", "1:++--")
    assert code == 2 and "signs 1 and 3" in err
    assert run(capsys, "construct", "-n", "9", "-B", "3:++++++")[0] == 2


def test_decompose(capsys):
    code, rep, _ = run_json(capsys, "decompose", "-n", "7", "-A", "3,5,6")
    assert rep["decomposed"] and [b["leader"] for b in rep["blocks"]] == [3]
    code, rep, _ = run_json(capsys, "decompose", "-n", "7", "-A", "1,2,3")
    assert rep["blocks"][0]["signs"] == "++-"
    code, rep, _ = run_json(capsys, "decompose", "-n", "7", "-A", "1,1^2")
    assert code == 0 and not rep["decomposed"] and rep["obstruction"]["orbit_leader"] == 1
    code, rep, _ = run_json(capsys, "decompose", "-n", "17", "-A", "1,2,3,4,8,10,11,12")
    assert not rep["decomposed"] and len(rep["half_length_blocks"]) == 2


def test_count(capsys):
    code, reps, err = run_json(capsys, "count", "-n", "7", "-n", "5", "-n", "15")
    assert code == 0 and "skipping 15" in err
    assert [r["modulus"] for r in reps] == [7, 5]
    c7, c5 = reps[0]["counts"], reps[1]["counts"]
    assert (c7["formula"], c7["distinct_sets"], c7["brute_force"]) == ("3", "3", "3")
    assert (c5["formula"], c5["distinct_sets"]) == ("4", "1") and c5["flags"]["formula_vs_sets"] is False
    code, reps, _ = run_json(capsys, "count", "-n", "23", "--budget", "1048576")
    assert reps[0]["counts"]["brute_force"] == "skipped: budget"
    assert reps[0]["counts"]["configurations"] == "91"


def test_count_budget_exit_3(capsys):
    assert run(capsys, "count", "-n", "23", "--budget", "10")[0] == 3


@pytest.mark.parametrize(
    "argv",
    [
        ("analyze", "-n", "7", "-A", "1,5,3"),
        ("construct", "-n", "17", "-B", "1:+-+-+-+-;3:++++++++"),
        ("decompose", "-n", "17", "-A", "1,2,3,4,8,10,11,12"),
        ("count", "-n", "9"),
        ("verify", "lemma1"),
    ],
)
def test_json_round_trip(capsys, argv):
    code, out, _ = run(capsys, *argv, "--json")
    parsed = json.loads(out)
    assert json.loads(json.dumps(parsed)) == parsed
    assert json.dumps(parsed, indent=2) == out.rstrip("\n")


def test_verify_selectors(capsys):
    code, rep, _ = run_json(capsys, "verify", "thm5", "--seed", "7")
    assert code == 0 and rep["suites"][0]["checked"] == 1000
    code, rep, _ = run_json(capsys, "verify", "lemma1")
    assert code == 0 and rep["suites"][0]["status"] == "pass"
    code, rep, _ = run_json(capsys, "verify", "thm2", "--cases", "50")
    assert [s["name"] for s in rep["suites"]] == ["thm2"]
    assert rep["suites"][0]["status"] == "pass"
