import json
import shutil
import subprocess
import sys

import pytest

from sector_doubler.cli import RunConfig, UsageError, main
from sector_doubler.graph_emit import parse_dot
from sector_doubler.inclusion_data import BUILTIN_FILES, data_dir


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_examples_lists_five(capsys):
    code, out, _ = run(capsys, "examples")
    lines = out.strip().splitlines()
    assert code == 0
    assert len(lines) == 5
    assert lines[0].startswith("e6: SU(2)_10 ⊂ SO(5)_1")
    assert lines[-1].startswith("e24: SU(3)_21 ⊂ (E7)_1")


def test_examples_json(capsys):
    code, out, _ = run(capsys, "examples", "--format", "json")
    doc = json.loads(out)
    assert doc["schema"] == "v1"
    assert [e["name"] for e in doc["examples"]] == ["e6", "e8", "e8cc", "e12", "e24"]
    assert doc["examples"][4]["ambient"] == "(E7)_1"


@pytest.mark.parametrize("name,count,ratio,splits", [
    ("e6", 10, "1/2", [["(5,1)", 2]]),
    ("e8cc", 14, "1", []),
    ("e12", 27, "1", [["(6,3;0)", 3], ["(6,3;1)", 3], ["(6,3;2)", 3]]),
])
def test_analyze_json(capsys, name, count, ratio, splits):
    code, out, _ = run(capsys, "analyze", name, "--mode", "chiral", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["schema"] == "v1"
    assert doc["n_irreducibles"] == count
    assert doc["upsilon_ratio"] == ratio
    assert doc["splits"] == splits
    assert doc["certificate"]["ok"]
    for key in ("ring", "subsystem", "Z_validation", "gram", "irreducibles", "identifications"):
        assert key in doc


def test_analyze_text_order(capsys):
    code, out, _ = run(capsys, "analyze", "e6")
    assert code == 0
    order = [out.index(s) for s in ("branching:", "deg =", "Gram diagonal", "irreducibles: 10",
                                    "dual principal graph")]
    assert order == sorted(order)
    assert "Upsilon ratio = 1/2" in out


def test_analyze_full_mode_degenerate(capsys):
    code, out, _ = run(capsys, "analyze", "e8", "--mode", "full", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["resolved"] is False
    assert len(doc["factorization_candidates"]) >= 2


def test_analyze_full_mode_too_large(capsys):
    code, _, err = run(capsys, "analyze", "e24", "--mode", "full")
    assert code == 2
    assert "double_engine:" in err


@pytest.mark.parametrize("name,fig", [("e6", "fig1.json"), ("e8", "fig2.json")])
def test_graph_golden_pass(capsys, name, fig):
    code, out, _ = run(capsys, "graph", name, "--golden", fig)
    assert code == 0
    assert out.startswith(f'graph "{name}"')


def test_graph_golden_mismatch_sets_exit_code(capsys):
    code, _, err = run(capsys, "graph", "e8cc", "--golden", "fig4.json")
    assert code == 1
    assert "golden.edges" in err


def test_graph_golden_with_deleted_edge(capsys, tmp_path):
    doc = json.loads((data_dir() / "fig1.json").read_text())
    doc["edges"].pop()
    p = tmp_path / "g.json"
    p.write_text(json.dumps(doc))
    code, _, _ = run(capsys, "graph", "e6", "--golden", str(p), "--format", "json")
    assert code == 1


def test_graph_dot_parseable(capsys):
    code, out, _ = run(capsys, "graph", "e6", "--format", "dot")
    g = parse_dot(out)
    assert code == 0
    assert sorted(g.top) == ["0", "10", "2"]
    assert len(g.bottom) == 10


def test_graph_text(capsys):
    code, out, _ = run(capsys, "graph", "e6", "--format", "text")
    assert code == 0
    assert "(5,1)_1" in out


def test_output_file(capsys, tmp_path):
    target = tmp_path / "e6.json"
    code, out, _ = run(capsys, "analyze", "e6", "--format", "json", "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["n_irreducibles"] == 10


@pytest.mark.parametrize("argv", [
    ("analyze", "e6", "--format", "dot"),
    ("analyze",),
    ("graph", "e6", "--mode", "full"),
    ("analyze", "e6", "--golden", "x.json"),
    ("verify", "e6", "--all"),
    ("analyze", "e6", "--index-rtol", "0"),
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("sector-doubler: error:")


def test_unknown_spec_is_module_qualified(capsys):
    code, _, err = run(capsys, "analyze", "nope")
    assert code == 2
    assert "inclusion_data:" in err


def test_run_config_validation():
    assert RunConfig("graph", "e6").format == "dot"
    with pytest.raises(UsageError):
        RunConfig("frobnicate")


def test_outputs_are_byte_identical(capsys):
    first = run(capsys, "analyze", "e12", "--format", "json")[1]
    second = run(capsys, "analyze", "e12", "--format", "json")[1]
    assert first == second


def test_verify_single_spec(capsys):
    code, out, _ = run(capsys, "verify", "e6", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["ok"] and doc["schema"] == "v1"
    assert {c["criterion"] for c in doc["criteria"]} >= {1, 2, 3, 4, 5, 6, 7, 8}


def test_verify_user_descriptor(capsys, tmp_path):
    p = tmp_path / "mine.json"
    shutil.copy(data_dir() / BUILTIN_FILES["e8cc"], p)
    code, out, _ = run(capsys, "verify", str(p))
    assert code == 0
    assert "certificate.global_index" in out


def test_verify_corrupted_data_names_file(capsys, tmp_path, monkeypatch):
    for f in data_dir().glob("*.json"):
        shutil.copy(f, tmp_path / f.name)
    doc = json.loads((tmp_path / BUILTIN_FILES["e8"]).read_text())
    # swap one tau_0 label for another label of the same colour: loads fine, breaks Z
    for entry in doc["branching"]:
        if entry[0] == "0" and entry[1] == "10":
            entry[1] = "8"
    (tmp_path / BUILTIN_FILES["e8"]).write_text(json.dumps(doc))
    monkeypatch.setenv("SECTOR_DOUBLER_DATA", str(tmp_path))
    code, out, _ = run(capsys, "verify", "e8")
    assert code == 1
    assert BUILTIN_FILES["e8"] in out
    assert "commutes_" in out


def test_verify_unparsable_data_names_file(capsys, tmp_path, monkeypatch):
    for f in data_dir().glob("*.json"):
        shutil.copy(f, tmp_path / f.name)
    (tmp_path / BUILTIN_FILES["e6"]).write_text("{ not json")
    monkeypatch.setenv("SECTOR_DOUBLER_DATA", str(tmp_path))
    code, out, _ = run(capsys, "verify", "e6")
    assert code == 1
    assert f"{BUILTIN_FILES['e6']}: parse error at line 1" in out


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sector_doubler.cli", "examples"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.count("\n") == 5
