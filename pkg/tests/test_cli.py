import json

import pytest

from kgcalc.cli import format_system, main, parse_system
from kgcalc.relations import generate_jacobi_relations
from kgcalc.series import parse_series


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_canon(capsys):
    assert run(capsys, "canon", "k 1 2 ; 1 0") == (0, "-1 * k 1 2 ; 0 1\n", "")
    assert run(capsys, "canon", "k 2 2 ; 0 1 ; 0 1")[1] == "1 * k 2 2 ; 0 1 ; 0 1\n"


def test_cycles(capsys):
    assert run(capsys, "cycles", "k 2 2 ; 0 3 ; 1 2")[1] == "true\n"
    assert run(capsys, "cycles", "k 1 2 ; 0 1")[1] == "false\n"


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "--aerial", "3", "--ground", "2", "--loopy-hkr")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "count=4 bigrade=(3,2)" and len(lines) == 5
    _, out, _ = run(capsys, "enumerate", "--aerial", "2", "--ground", "2")
    assert out.splitlines()[0] == "count=6 bigrade=(2,2)"


def test_bracket_and_reduce(capsys, tmp_path):
    code, out, _ = run(capsys, "bracket", "1/2 * k 1 2 ; 0 1", "1/2 * k 1 2 ; 0 1")
    assert code == 0
    aa = tmp_path / "aa.txt"
    aa.write_text(out)
    assert parse_series(out)
    code, out, _ = run(capsys, "reduce", str(aa), "--mod", "jacobi+coboundary:2,3")
    assert code == 0 and "# verdict: member" in out
    code, out, _ = run(capsys, "reduce", str(aa), "--mod", "jacobi:2,3", "--format", "json")
    doc = json.loads(out)
    assert doc["verdict"] == "non-member" and doc["normal_form"]


def test_relations_roundtrip(capsys, tmp_path):
    code, out, _ = run(capsys, "relations", "--aerial", "2", "--ground", "3", "--jacobi")
    assert code == 0 and out.startswith("system jacobi(2,3)\n")
    system = parse_system(out)
    assert system.rank == 1 and format_system(system) == out
    f = tmp_path / "j.txt"
    f.write_text(out)
    code, out, _ = run(capsys, "reduce", "k 2 3 ; 0 1 ; 2 3", "--mod", str(f))
    assert code == 0
    _, out, _ = run(capsys, "relations", "--aerial", "2", "--ground", "3", "--coboundary")
    assert out.startswith("system coboundary(2,3)")


def test_format_system_direct():
    s = generate_jacobi_relations(2, 3)
    assert parse_system(format_system(s)).raw == s.raw


def test_mc_and_gauge(capsys, tmp_path):
    f = tmp_path / "a.txt"
    f.write_text("1 * k 0 2 ;\n1/2 * k 1 2 ; 0 1\n")
    assert run(capsys, "mc-check", str(f), "--order", "1")[1].startswith("# residual order 1: zero")
    code, out, _ = run(capsys, "gauge", str(f), "--graph", "-1 * k 2 1 ; 2 0 ; 1 0", "--param", "2*alpha", "--max-order", "2")
    assert code == 0 and "-4*alpha * k 2 2 ; 0 3 ; 1 2" in out


def test_evaluate(capsys, tmp_path):
    pi = tmp_path / "pi.txt"
    pi.write_text("dim 2\n1 2 : 1\n")
    code, out, _ = run(capsys, "evaluate", "1 * k 0 2 ;\n1 * k 1 2 ; 0 1", "--bivector", str(pi), "--args", "x1,x2")
    assert (code, out) == (0, "x1*x2 + 1\n")


@pytest.mark.parametrize(
    "argv",
    [
        ["canon", "k 1 2 ; 0 1 ;"],
        ["enumerate", "--aerial", "7", "--ground", "2"],
        ["reduce", "k 1 2 ; 0 1", "--mod", "jacobi:2,3"],
        ["reduce", "k 1 2 ; 0 1", "--mod", "bogus:2,3"],
        ["evaluate", "k 1 2 ; 0 1", "--bivector", "/nonexistent", "--args", "x1"],
    ],
)
def test_input_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_unknown_flag(capsys):
    with pytest.raises(SystemExit) as e:
        main(["canon", "--bogus", "k 1 2 ; 0 1"])
    assert e.value.code == 2


def test_obstruction(capsys, tmp_path):
    out_json = tmp_path / "r.json"
    code, out, _ = run(capsys, "obstruction", "--report", str(out_json))
    assert code == 0
    assert out.splitlines()[-1].startswith("verdict: OBSTRUCTED (requires")
    assert "beta = 0" in out.splitlines()[-1]
    assert json.loads(out_json.read_text())["verdict"].startswith("OBSTRUCTED")
