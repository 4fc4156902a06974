import json
import subprocess
import sys

import pytest

from idts.cli import BAD_INPUT, FAILED, OK, main
from idts.syntax import parse

from oracles import fixture_path


def fx(name):
    return str(fixture_path(name))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def broken(tmp_path):
    p = tmp_path / "broken.idts"
    p.write_text("inductive nat = z : nat | s : nat -> nat\n")
    return str(p)


@pytest.fixture
def cyclic(tmp_path):
    p = tmp_path / "cyclic.idts"
    p.write_text("inductive nat = z : nat .\nsymbol f : nat -> nat arity 1 .\n"
                 "symbol g : nat -> nat arity 1 .\nprecedence f > g .\nprecedence g > f .\n")
    return str(p)


def test_check_accepts_ordinal_addition(capsys):
    code, out, _ = run(capsys, "check", fx("ord_addition"))
    assert code == OK
    assert "3/3 rules accepted" in out and out.rstrip().endswith("SN guaranteed")


def test_check_rejects_division(capsys):
    code, out, _ = run(capsys, "check", fx("division"))
    assert code == FAILED
    assert "[rejected] 6: div(s(X), s(Y))" in out
    assert "5/6 rules accepted" in out


@pytest.mark.parametrize("argv,expected", [
    (["check", "ack"], OK),
    (["check", "insert"], OK),
    (["check", "proc"], OK),
    (["check", "division"], FAILED),
    (["check", "bad_positivity"], FAILED),
    (["normalize", "ack", "-e", "ack22"], OK),
    (["normalize", "ack", "-e", "ack(s(s(s(z))), s(s(s(z))))", "--fuel", "50"], FAILED),
    (["normalize", "ack", "-e", "ack(z"], BAD_INPUT),
    (["normalize", "ack", "-e", r"ack(z, \x:nat. x)"], BAD_INPUT),
    (["recursors", "types", "--class", "ord", "--target", "nat"], OK),
    (["recursors", "types", "--class", "nope", "--target", "nat"], FAILED),
    (["recursors", "types", "--class", "nat", "--target", "nat ->"], BAD_INPUT),
    (["currify", "foldl_sum", "--symbol", "plus"], OK),
    (["currify", "foldl_sum", "--symbol", "plus_c"], FAILED),
    (["currify", "foldl_sum", "--symbol", "nope"], BAD_INPUT),
    (["encode-cond", "insert"], OK),
    (["erase", "ord_addition", "-e", "add(X, lim(F))", "--wrt", "ord"], OK),
    (["erase", "ord_addition", "-e", "add(X, lim(F))", "--wrt", "bool"], BAD_INPUT),
])
def test_exit_code_matrix(capsys, argv, expected):
    argv = [argv[0], fx(argv[1])] + argv[2:]
    code, _, _ = run(capsys, *argv)
    assert code == expected


def test_exit_codes_for_bad_files(capsys, broken, cyclic, tmp_path):
    assert run(capsys, "check", broken)[0] == BAD_INPUT
    assert run(capsys, "check", str(tmp_path / "missing.idts"))[0] == BAD_INPUT
    code, out, _ = run(capsys, "check", cyclic)
    assert code == FAILED and "cycle" in out


def test_parse_error_has_position(capsys, broken):
    _, _, err = run(capsys, "check", broken)
    assert "broken.idts:2:1:" in err


def test_normalize_ackermann(capsys):
    code, out, _ = run(capsys, "normalize", fx("ack"), "-e", "ack(s(s(z)), s(s(z)))")
    assert code == OK
    assert out.strip() == "s(s(s(s(s(s(s(z)))))))"


def test_normalize_trace_and_json(capsys):
    code, out, _ = run(capsys, "normalize", fx("append_map"), "-e", "doubled", "--trace",
                       "--strategy", "innermost", "--format", "structured")
    data = json.loads(out)
    assert code == OK
    assert data["normal_form"] == "cons(s(z), cons(s(s(z)), nil))"
    assert data["steps"] == len(data["trace"]["steps"])
    code, out, _ = run(capsys, "normalize", fx("append_map"), "-e", "doubled", "--trace")
    assert out.splitlines()[0].startswith("step 1: ")


def test_fuel_exhaustion_message(capsys):
    code, out, _ = run(capsys, "normalize", fx("ack"), "-e", "ack(s(s(s(z))), s(z))",
                       "--fuel", "5", "--format", "structured")
    assert code == FAILED
    assert "fuel 5 exhausted" in json.loads(out)["error"]


def test_check_explain(capsys):
    code, out, _ = run(capsys, "check", fx("append_map"), "--explain")
    assert "CC6 recursive call" in out and "accessible by" in out
    code, out, _ = run(capsys, "--format", "structured", "check", fx("append_map"),
                       "--explain")
    data = json.loads(out)
    assert data["replay"] is True and data["sn_guaranteed"] is True
    assert data["rules"][4]["derivation"].startswith("CC5[cons]")


def test_check_constructor_rules_warn(capsys):
    code, out, _ = run(capsys, "check", fx("nnf"))
    assert code == OK
    assert "warning: termination is not claimed" in out


@pytest.mark.parametrize("argv", [
    ["recursors", "types", "--class", "listtree", "--target", "nat -> nat"],
    ["currify", "foldl_sum", "--symbol", "foldl"],
    ["encode-cond", "insert"],
])
def test_generated_specs_parse_back(capsys, argv):
    code, out, _ = run(capsys, argv[0], fx(argv[1]), *argv[2:])
    assert code == OK
    spec = parse(out)
    spec.rule_system()
    assert not any(r.is_conditional for r in spec.rules) or argv[0] != "encode-cond"


def test_erase_output(capsys):
    code, out, _ = run(capsys, "erase", fx("ordrec"), "-e", "ordrec(z, Y, Z, oz)",
                       "--wrt", "ord")
    assert code == OK
    assert out.strip() == "bot_nat"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "idts", "check", fx("ack")],
                         capture_output=True, text=True)
    assert res.returncode == OK
    assert "3/3 rules accepted" in res.stdout


def test_shipped_fixtures_mirror_package_data():
    from pathlib import Path

    root = Path(__file__).resolve().parent.parent / "fixtures"
    shipped = {p.name: p.read_text(encoding="utf-8") for p in root.glob("*.idts")}
    packaged = {name: fixture_path(name[:-5]).read_text(encoding="utf-8") for name in shipped}
    assert shipped and shipped == packaged
