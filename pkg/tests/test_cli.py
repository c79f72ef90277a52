import json
import subprocess
import sys

import pytest

from twistfloer.cli import main
from twistfloer.complexes import GradedModule
from twistfloer.excision import DerivationLog, replay


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_two_bridge_json(capsys):
    code, out, _ = run(capsys, "two-bridge", "--m", "2", "--n", "-1", "--d", "1", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"summands": [{"type": "free_field", "ring": "Lambda", "rank": 2}, {"type": "tower"}]}


def test_two_bridge_outside_the_hypothesis(capsys):
    # |m + n| = 3 violates |m + n| <= 1
    code, out, err = run(capsys, "two-bridge", "--m", "2", "--n", "1", "--d", "1", "--format", "json")
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "family-out-of-scope"


def test_whitehead_zero_is_out_of_scope(capsys):
    code, _, err = run(capsys, "whitehead", "--n", "0")
    assert code == 1
    assert json.loads(err) == {"error": "family-out-of-scope", "message": "the Whitehead family needs n != 0"}


def test_snf_linking_matrix(capsys):
    code, out, _ = run(capsys, "snf", "--matrix", "[[-1,1],[1,0]]")
    assert code == 0
    assert out.splitlines() == ["diag(1, 1)", "rank 2", "signature 0"]
    code, out, _ = run(capsys, "snf", "--ring", "F2[t]", "--matrix", '[["t+1","t^2+1"],["1","t"]]', "--format", "json")
    assert json.loads(out) == {"ring": "F2[t]", "diagonal": ["1", "t+1"], "rank": 2}


@pytest.mark.parametrize(
    "argv",
    [
        ("twist-knot", "--n", "5"),
        ("twist-knot", "--n", "-3", "--d", "2/3"),
        ("whitehead", "--n", "4"),
        ("borromean", "--m", "-2", "--n", "3"),
        ("two-bridge", "--m", "-3", "--n", "3", "--clasp", "-1"),
    ],
)
def test_json_reports_round_trip(capsys, argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    text = out.rstrip("\n")
    assert GradedModule.from_json(text).to_json() == text


def test_markdown_report_and_files(capsys, tmp_path):
    report, log = tmp_path / "r.md", tmp_path / "log.json"
    code, out, _ = run(capsys, "twist-knot", "--n", "2", "--out", str(report), "--log", str(log))
    assert code == 0 and out == ""
    text = report.read_text()
    assert "HF+ = Lambda^2(-3/2)" in text and "## Derivation" in text
    module, same = replay(DerivationLog.from_json(log.read_text()))
    assert same and module.field_rank("Lambda") == 2


def test_input_documents(capsys, tmp_path):
    toml = tmp_path / "b.toml"
    toml.write_text('family = "borromean"\nm = 2\nn = -3\nd = "1/2"\n')
    code, out, _ = run(capsys, "borromean", "--input", str(toml), "--format", "json")
    assert code == 0 and json.loads(out)["summands"][0]["rank"] == 6
    js = tmp_path / "w.json"
    js.write_text('{"family": "whitehead", "n": 3}')
    code, out, _ = run(capsys, "whitehead", "--input", str(js), "--format", "json")
    assert json.loads(out)["summands"][0]["rank"] == 3


def test_malformed_documents_report_positions(capsys, tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text('family = "borromean"\nm = = 2\n')
    code, _, err = run(capsys, "borromean", "--input", str(bad))
    payload = json.loads(err)
    assert code == 1 and payload["error"] == "parse" and payload["line"] == 2
    badjson = tmp_path / "c.json"
    badjson.write_text(
        '{"ring": "F2(t)[U]",\n "generators": [{"name": "a", "grading": "1"}, {"name": "b", "grading": "2"}],\n'
        ' "entries": [{"row": 1, "col": 0, "coeff": "t*U+"}]}'
    )
    code, _, err = run(capsys, "complex-homology", str(badjson))
    payload = json.loads(err)
    assert code == 1 and payload["line"] == 3


def test_complex_homology(capsys, tmp_path):
    doc = tmp_path / "c.json"
    doc.write_text(
        json.dumps(
            {
                "ring": "F2(t)[U]",
                "generators": [{"name": "a", "grading": "1"}, {"name": "b", "grading": "2"}],
                "entries": [{"row": 1, "col": 0, "coeff": "t*U"}],
            }
        )
    )
    code, out, _ = run(capsys, "complex-homology", str(doc), "--format", "json")
    assert code == 0
    assert json.loads(out) == {"summands": [{"type": "u_torsion", "ring": "F2(t)", "k": 1, "rank": 1, "top": "2"}]}


def test_verify_is_deterministic(capsys):
    first = run(capsys, "verify", "--only", "1,5,9", "--format", "json")
    second = run(capsys, "verify", "--only", "1,5,9", "--format", "json")
    assert first == second and first[0] == 0
    rows = json.loads(first[1])
    assert [r["criterion"] for r in rows] == [1, 5, 9] and all(r["passed"] for r in rows)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "twistfloer", "whitehead", "--n", "2", "--format", "json"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"summands": [{"type": "free_field", "ring": "Lambda", "rank": 2}]}
