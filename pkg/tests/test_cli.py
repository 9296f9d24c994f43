import json
import xml.dom.minidom

import pytest

from slicecalc.cli import main
from slicecalc.mackey import GroupContext
from slicecalc.reps import parse_rep

from .test_reps import TABLE_C27, TAGS_C27


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- vseq --------------------------------------------------------------------------


def test_vseq_reproduces_c27_table(capsys):
    code, out, _ = run(capsys, "vseq", "--p", "3", "--n", "3", "--max", "27", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["j"] for r in rows] == list(range(1, 28))
    ctx = GroupContext(3, 3)
    for r in rows:
        V = parse_rep(r["rep"], ctx)
        assert (V.triv, *V.mult) == TABLE_C27[r["j"]]
        assert r.get("tag") == TAGS_C27.get(r["j"])


def test_vseq_text_tags_row_26(capsys):
    code, out, _ = run(capsys, "vseq", "--p", "3", "--n", "3", "--max", "27")
    assert code == 0
    row = next(line for line in out.splitlines() if line.split()[:1] == ["26"])
    assert "2ρ-λ" in row


def test_vseq_max_zero_is_empty(capsys):
    code, out, _ = run(capsys, "vseq", "--p", "3", "--n", "3", "--max", "0", "--format", "json")
    assert code == 0 and json.loads(out)["rows"] == []


@pytest.mark.parametrize("argv", [["--p", "4", "--n", "2"], ["--p", "3", "--n", "0"], ["--p", "3"]])
def test_vseq_bad_parameters(capsys, argv):
    code, _, err = run(capsys, "vseq", *argv, "--max", "3")
    assert code == 2 and err


# -- homology ----------------------------------------------------------------------


def test_homology_lambda_with_Z(capsys):
    code, out, _ = run(capsys, "homology", "--p", "3", "--n", "1", "--rep", "1l0", "--coeff", "Z", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert [h["s"] for h in d["degrees"]] == [0, 2]
    assert [h["name"] for h in d["degrees"]] == ["B(1,0)", "Z"]


def test_homology_trivial_suspension(capsys):
    code, out, _ = run(capsys, "homology", "--p", "3", "--n", "2", "--rep", "2t", "--coeff", "B(1,0)")
    assert code == 0
    assert "H_2 = B(1,0)" in out and "H_0" not in out and "H_1" not in out


def test_homology_zero_coefficients(capsys):
    code, out, _ = run(capsys, "homology", "--p", "3", "--n", "2", "--rep", "2t+l0", "--coeff", "B(0,0)", "--format", "json")
    assert code == 0 and json.loads(out)["degrees"] == []


def test_homology_parse_error_reports_position(capsys):
    code, _, err = run(capsys, "homology", "--p", "3", "--n", "2", "--rep", "2t+x", "--coeff", "Z")
    assert code == 2 and "3" in err


def test_homology_unknown_coefficient(capsys):
    code, _, err = run(capsys, "homology", "--p", "3", "--n", "2", "--rep", "l0", "--coeff", "Q(1)")
    assert code == 2 and "Q(1)" in err


def test_homology_clamping_warns(capsys):
    code, _, err = run(capsys, "homology", "--p", "3", "--n", "2", "--rep", "l0", "--coeff", "B(5,0)")
    assert code == 0 and err.startswith("warning:")


# -- verify ------------------------------------------------------------------------


def test_verify_c9_passes(capsys):
    code, out, _ = run(capsys, "verify", "--p", "3", "--n", "2", "--max-dim", "8")
    d = json.loads(out)
    assert code == 0 and d["mismatched"] == 0 and d["matched"] > 0
    assert d["matched"] + d["ambiguous"] == len(d["cases"])


def test_verify_vacuous(capsys):
    code, out, _ = run(capsys, "verify", "--p", "3", "--n", "1", "--max-dim", "0")
    assert code == 0 and json.loads(out)["mismatched"] == 0


def test_verify_catches_injected_fault(capsys):
    code, out, err = run(capsys, "verify", "--p", "3", "--n", "2", "--max-dim", "4", "--inject-fault")
    assert code == 1 and json.loads(out)["mismatched"] > 0 and "mismatch" in err


def test_verify_is_thread_independent(capsys, monkeypatch):
    monkeypatch.setenv("SLICECALC_THREADS", "1")
    _, one, _ = run(capsys, "verify", "--p", "3", "--n", "2", "--max-dim", "6")
    monkeypatch.setenv("SLICECALC_THREADS", "4")
    _, four, _ = run(capsys, "verify", "--p", "3", "--n", "2", "--max-dim", "6")
    assert one == four


def test_bad_thread_count(capsys, monkeypatch):
    monkeypatch.setenv("SLICECALC_THREADS", "zero")
    code, _, err = run(capsys, "verify", "--p", "3", "--n", "1", "--max-dim", "2")
    assert code == 2 and "SLICECALC_THREADS" in err


# -- chart -------------------------------------------------------------------------


def test_chart_c27_svg(capsys, tmp_path):
    out = tmp_path / "c27.svg"
    argv = ["chart", "--p", "3", "--n", "3", "--target", "inf-lambda", "--trange", "-2:54", "--out", str(out)]
    assert run(capsys, *argv)[0] == 0
    first = out.read_bytes()
    xml.dom.minidom.parseString(first)
    assert run(capsys, *argv)[0] == 0
    assert out.read_bytes() == first


def test_chart_finite_has_Z_column_at_2m(capsys):
    code, out, _ = run(capsys, "chart", "--p", "3", "--n", "3", "--target", "m-lambda:8", "--trange", "0:20", "--format", "json")
    assert code == 0
    cells = json.loads(out)["cells"]
    assert {c["functor"] for c in cells if c["t"] == 16} >= {"Z"}
    assert max(c["t"] for c in cells) == 16


def test_chart_empty_range(capsys, tmp_path):
    out = tmp_path / "empty.svg"
    code, _, _ = run(capsys, "chart", "--p", "3", "--n", "3", "--target", "inf-lambda", "--trange", "9:4", "--out", str(out))
    assert code == 0
    assert xml.dom.minidom.parseString(out.read_bytes()).documentElement.tagName == "svg"


def test_chart_annotations_file(capsys, tmp_path):
    ann = tmp_path / "arrows.json"
    ann.write_text(json.dumps([{"from": [8, 8], "to": [6, 8], "kind": "extension"}]))
    code, out, _ = run(capsys, "chart", "--p", "3", "--n", "3", "--target", "inf-lambda", "--trange", "0:8", "--annotations", str(ann))
    assert code == 0 and "stroke-dasharray" in out
    ann.write_text("[{")
    assert run(capsys, "chart", "--p", "3", "--n", "3", "--target", "inf-lambda", "--trange", "0:8", "--annotations", str(ann))[0] == 2


def test_chart_unwritable_path(capsys, tmp_path):
    bad = tmp_path / "missing" / "dir" / "c.svg"
    code, _, err = run(capsys, "chart", "--p", "3", "--n", "1", "--target", "inf-lambda", "--trange", "0:4", "--out", str(bad))
    assert code == 2 and str(bad) in err


def test_chart_bad_target(capsys):
    code, _, _ = run(capsys, "chart", "--p", "3", "--n", "1", "--target", "lambda", "--trange", "0:4")
    assert code == 2
