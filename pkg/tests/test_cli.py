import json

import pytest

from partcalc import linear as lm
from partcalc import partition as pc
from partcalc.cli import main, split_top_level


@pytest.fixture
def run(capsys):
    def _run(*argv):
        code = main(list(argv))
        out = capsys.readouterr()
        return code, out.out.strip(), out.err.strip()

    return _run


@pytest.fixture
def matrices(tmp_path):
    paths = {}
    for name, u in {"m2": lm.non_orthogonal_example(2), "rot": lm.rotation_matrix()}.items():
        path = tmp_path / f"{name}.txt"
        path.write_text(u.to_text())
        paths[name] = str(path)
    bad = tmp_path / "bad.txt"
    bad.write_text("n 2 2\n1 2\n")
    paths["bad"] = str(bad)
    return paths


def test_split_top_level():
    assert split_top_level("b(3), b(3)*, P(0,2): {l1,l2}") == ["b(3)", "b(3)*", "P(0,2): {l1,l2}"]


def test_eval(run):
    assert run("eval", "pair ; copair") == (0, "P(0,0): loops=1", "")
    code, out, _ = run("eval", "pair ox up1")
    assert code == 0 and out == "P(0,3): {l1,l2}{l3} loops=0"


def test_eval_round_trip(run):
    for expr in ("b(3)", "sigma(4)", "crossline ox pair*", "mult(pair,1,3)", "pdouble(crossline, 3)"):
        _, out, _ = run("eval", expr)
        literal = out.rsplit(" loops=", 1)[0]
        assert run("eval", literal)[1] == out


def test_eval_structured(run):
    code, out, _ = run("eval", "copair ; pair", "--format", "structured")
    assert code == 0 and json.loads(out) == {"partition": pc.format_partition(pc.tau(2)), "loops": 0}


def test_classify(run):
    code, out, _ = run("classify", "b(3)")
    assert code == 0 and out.splitlines()[0] == "cases=[A] conclusion=InPO"
    assert out.splitlines()[1].startswith("clause: ")
    assert run("classify", "crossline")[1].splitlines()[0] == "cases=[E(3)] conclusion=ImpliesTau(3)"


def test_enumerate(run):
    assert run("enumerate", "--pred", "nc", "--points", "0,4") == (0, "count=14", "")
    code, out, _ = run("enumerate", "--pred", "ncm:3", "--points", "0,3", "--list")
    assert out.splitlines() == ["count=1", "P(0,3): {l1,l2,l3}"]
    code, _, err = run("enumerate", "--points", "4,4", "--max-elements", "10")
    assert code == 5 and err.startswith("error: BoundExceeded")


def test_check(run, matrices):
    code, out, _ = run("check", "--p", "pair", "--matrix", matrices["m2"])
    assert code == 1 and out == "FAILS alpha=() beta=(1,1) lhs=1 rhs=5"
    assert run("check", "--p", "up1", "--matrix", matrices["m2"], "--intertwiner") == (0, "HOLDS", "")
    assert run("check", "--p", "copair", "--matrix", matrices["rot"], "--both")[:2] == (0, "HOLDS")
    code, out, _ = run("check", "--p", "pair", "--matrix", matrices["m2"], "--format", "structured")
    assert json.loads(out)["status"] == "FAILS"


def test_tmap(run):
    code, out, _ = run("tmap", "--p", "pair", "--n", "2")
    assert code == 0 and out.splitlines() == ["T P(0,2): {l1,l2} n=2 shape=4x1 nnz=2", "0 0 1", "3 0 1"]


def test_witness_inverse(run, matrices):
    code, out, _ = run("witness-inverse", "--p", "pair", "--matrix", matrices["rot"])
    assert code == 0
    assert lm.RationalMatrix.from_text(out) == lm.rotation_matrix().transpose()
    code, _, err = run("witness-inverse", "--p", "b(3)", "--matrix", matrices["rot"])
    assert code == 4 and err.startswith("error: Unsupported")


def test_closure_and_member(run, tmp_path):
    report = str(tmp_path / "report.json")
    code, out, _ = run("closure", "--gen", "pair, copair", "--max-points", "6", "-o", report)
    assert code == 0 and out.splitlines()[0].startswith("members=")
    code, out, _ = run("member", "P(0,4)#{1,4}{2,3}", "--in", report)
    assert code == 0 and out.splitlines()[0] == "Member P(0,4): {l1,l4}{l2,l3}"
    assert run("member", "crossline", "--in", report)[1] == "NotFoundWithinBounds P(0,4): {l1,l3}{l2,l4}"


def test_closure_semantic(run):
    code, out, _ = run("closure", "--gen", "fourblock", "--gen", "crossline, crossline*", "--semantic")
    assert code == 0
    assert "rule R1: " in out and "P(0,2): {l1,l2}" in out.splitlines()


@pytest.mark.parametrize(
    "argv, code, prefix",
    [
        (("eval", "pair ox"), 3, "error: ParseError"),
        (("eval", "pair ; pair"), 3, "error: ArityMismatch"),
        (("classify", "up1 ox up1"), 3, "error: PreconditionError"),
        (("check", "--p", "pair", "--matrix", "/nonexistent/m.txt"), 3, "error: FileNotFoundError"),
    ],
)
def test_error_exit_codes(run, argv, code, prefix):
    got, out, err = run(*argv)
    assert got == code and not out and err.startswith(prefix)
    assert len(err.splitlines()) == 1


def test_bad_matrix(run, matrices):
    code, _, err = run("check", "--p", "pair", "--matrix", matrices["bad"])
    assert code == 3 and err.startswith("error: ")


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
