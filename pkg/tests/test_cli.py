import pytest

from gfodd.cli import EXIT_BUDGET, EXIT_ERROR, EXIT_NO, EXIT_YES, main, parse_graph
from gfodd.core import GfoddError
from gfodd.formats import parse_gfodd, parse_interp
from gfodd.evaluate import eval_map


@pytest.fixture
def ham(tmp_path):
    path = tmp_path / "ham.gfodd"
    assert main(["gen", "hampath", "3", "-o", str(path)]) == EXIT_YES
    return path


@pytest.fixture
def worked(tmp_path):
    path = tmp_path / "worked.interp"
    path.write_text("domain 3\nE: (0,2) (2,0) (0,1) (1,0)\n")
    return path


def test_eval(ham, worked, capsys):
    assert main(["eval", str(ham), str(worked)]) == EXIT_YES
    assert "MAP = 1" in capsys.readouterr().out
    assert main(["eval", str(ham), str(worked), "--value", "2"]) == EXIT_NO


def test_check_reports_ordering(ham, tmp_path, capsys):
    assert main(["check", str(ham)]) == EXIT_YES
    assert "sorted" in capsys.readouterr().out
    bad = tmp_path / "bad.gfodd"
    bad.write_text("pred p/1\nagg max x\nnode 0 = p(x) ? 1 : 2\nnode 1 = p(x) ? 2 : 2\nleaf 2 = 1\nroot 0\n")
    assert main(["check", str(bad)]) == EXIT_YES
    assert "unsorted: 1 edge" in capsys.readouterr().out


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.gfodd"
    bad.write_text("leaf 0 = -1\nroot 0\n")
    assert main(["check", str(bad)]) == EXIT_ERROR
    assert "negative leaf" in capsys.readouterr().err
    assert main(["check", str(tmp_path / "missing")]) == EXIT_ERROR


def test_sat_prints_space_and_refeedable_witness(ham, tmp_path, capsys):
    assert main(["sat", str(ham), "-N", "3"]) == EXIT_YES
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "search space: 530 interpretations with 1..3 objects"
    witness = out.split("):\n", 1)[1]
    i = parse_interp(witness)
    assert eval_map(parse_gfodd(ham.read_text()), i) == 1
    w = tmp_path / "w.interp"
    w.write_text(witness)
    assert main(["eval", str(ham), str(w), "--value", "1"]) == EXIT_YES


def test_sat_budget(ham):
    assert main(["sat", str(ham), "-N", "3", "--max-interpretations", "2"]) == EXIT_BUDGET


def test_value_and_equiv(ham, tmp_path, capsys):
    assert main(["value", str(ham), "-N", "2", "--target", "1"]) == EXIT_NO
    assert main(["equiv", str(ham), str(ham), "-N", "2"]) == EXIT_YES
    comp = tmp_path / "comp.gfodd"
    assert main(["complement", str(ham), "--max", "1", "-o", str(comp)]) == EXIT_YES
    assert main(["equiv", str(ham), str(comp), "-N", "1"]) == EXIT_NO
    assert "counterexample" in capsys.readouterr().out


def test_apply_and_export(ham, tmp_path, capsys):
    out = tmp_path / "sum.gfodd"
    assert main(["apply", str(ham), str(ham), "--op", "plus", "--policy", "block-merge", "-o", str(out)]) == EXIT_YES
    g = parse_gfodd(out.read_text())
    assert len(g.variables) == 6
    assert main(["export-dot", str(ham)]) == EXIT_YES
    assert capsys.readouterr().out.startswith("digraph")


def test_gen_family(tmp_path, capsys):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 4 3\n1 -2 4 0\n-1 2 3 0\n1 3 -4 0\n")
    assert main(["gen", "3sat", str(cnf), "-o", str(tmp_path / "s.gfodd")]) == EXIT_YES
    qd = tmp_path / "q.qdimacs"
    qd.write_text("p cnf 3 2\na 1 0\ne 2 0\na 3 0\n1 2 3 0\n-1 -2 3 0\n")
    istar = tmp_path / "istar.interp"
    assert main(["gen", "qbf-eval", str(qd), "-o", str(tmp_path / "e.gfodd"), "--interp-out", str(istar)]) == 0
    assert main(["eval", str(tmp_path / "e.gfodd"), str(istar), "--value", "1"]) == EXIT_YES
    assert main(["gen", "qbf-equiv", str(qd), "--out1", str(tmp_path / "b1"), "--out2", str(tmp_path / "b")]) == 0
    assert main(["equiv", str(tmp_path / "b1"), str(tmp_path / "b"), "-N", "2"]) == EXIT_YES
    ed = tmp_path / "e2.qdimacs"
    ed.write_text("p cnf 2 1\ne 1 0\na 2 0\n1 1 1 0\n")
    assert main(["gen", "qbf-sat", str(ed), "-o", str(tmp_path / "qs")]) == EXIT_YES
    assert main(["sat", str(tmp_path / "qs"), "-N", "3"]) == EXIT_YES
    a1, a2 = tmp_path / "a1", tmp_path / "a2"
    assert main(["gen", "arrowing", "2:0-1", "3:0-1,1-2,0-2", "3:0-1,1-2,0-2", "--out1", str(a1), "--out2", str(a2)]) == 0
    assert main(["edge-removal", str(a1), str(a2), "-N", "2"]) == EXIT_NO
    assert main(["gen", "value-instance", str(a1), str(a2), "-o", str(tmp_path / "v")]) == EXIT_YES
    assert main(["value", str(tmp_path / "v"), "-N", "2", "--target", "1"]) == EXIT_YES
    assert main(["gen", "arrowing", "2:0-1"]) == EXIT_ERROR


def test_deterministic_output(ham, capsys):
    main(["sat", str(ham), "-N", "3"])
    first = capsys.readouterr().out
    main(["sat", str(ham), "-N", "3"])
    assert capsys.readouterr().out == first


def test_parse_graph():
    g = parse_graph("3:0-1, 1-2")
    assert g.num_nodes == 3 and g.edges == {(0, 1), (1, 2)}
    assert parse_graph("2:").edges == frozenset()
    with pytest.raises(GfoddError):
        parse_graph("3;0-1")
