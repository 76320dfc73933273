import json
import subprocess
import sys
from pathlib import Path

import pytest

from gadgetlab import catalog
from gadgetlab.cli import run
from gadgetlab.gadget import Gadget
from gadgetlab.simulation import CONSTRUCTIONS_DIR

CATALOG = Path(catalog.__file__).parent / "catalog"


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def call_json(capsys, *argv):
    code, out, _ = call(capsys, *argv, "--json")
    data = json.loads(out)
    assert data["format"] == 1 and data["exit"] == code
    return code, data


@pytest.fixture
def qbf_file(tmp_path):
    def write(text, name="q.qdimacs"):
        path = tmp_path / name
        path.write_text(text)
        return path
    return write


class TestClassify:
    def test_ap2t_file(self, capsys):
        code, out, _ = call(capsys, "classify", CATALOG / "ap2t.json")
        assert code == 0
        assert out.strip() == "AP2T: PSPACE-complete (toggle+toggle)"

    def test_catalog_name(self, capsys):
        code, data = call_json(capsys, "classify", "1-toggle")
        assert code == 0 and data["verdict"] == "P"

    def test_nondeterministic_is_error(self, capsys):
        code, _, err = call(capsys, "classify", "branching-hallway")
        assert code == 2 and "deterministic" in err


class TestVerify:
    def test_catalog(self, capsys):
        code, out, _ = call(capsys, "verify", "--catalog")
        assert code == 0
        assert out.strip().endswith("22/22 claims accepted")

    def test_single_claim_json(self, capsys):
        code, data = call_json(capsys, "verify", CONSTRUCTIONS_DIR / "ap2t-to-c2t.json")
        assert code == 0
        assert data["claims"][0]["name"] == "ap2t-to-c2t"
        assert data["claims"][0]["classes"] == 2

    def test_failing_claim(self, capsys, tmp_path):
        data = json.loads((CONSTRUCTIONS_DIR / "ap2t-to-c2t.json").read_text())
        data["initial_state"] = "1"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        code, out, _ = call(capsys, "verify", path)
        assert code == 1 and out.startswith("FAIL")

    def test_nothing_to_verify(self, capsys):
        assert call(capsys, "verify")[0] == 2


class TestReduceSolve:
    def test_forall_unsolvable(self, capsys, qbf_file, tmp_path):
        out = tmp_path / "p.json"
        code, _, _ = call(capsys, "reduce", qbf_file("q a 1\n1 0\n"), "-o", out)
        assert code == 0
        code, text, _ = call(capsys, "solve", out)
        assert code == 1 and text.startswith("unsolvable")

    def test_exists_solvable_with_witness(self, capsys, qbf_file, tmp_path):
        out = tmp_path / "p.json"
        call(capsys, "reduce", qbf_file("q e 1\n1 0\n"), "-o", out)
        code, data = call_json(capsys, "solve", out, "--witness")
        assert code == 0 and data["solvable"] and data["witness"]

    def test_bfs_algorithm(self, capsys, qbf_file, tmp_path):
        out = tmp_path / "p.json"
        call(capsys, "reduce", qbf_file("q e 1\n1 0\n"), "-o", out)
        code, data = call_json(capsys, "solve", out, "--algorithm", "bfs")
        assert data["algorithm"] == "bfs"

    def test_cap_exceeded(self, capsys, qbf_file, tmp_path):
        out = tmp_path / "p.json"
        call(capsys, "reduce", qbf_file("q e 1 a 2\n1 2 0\n"), "-o", out)
        code, _, err = call(capsys, "solve", out, "--cap", "3")
        assert code == 2 and "3 configurations" in err

    def test_reduce_stats_and_basis(self, capsys, qbf_file):
        code, data = call_json(capsys, "reduce", qbf_file("q e 1\n1 0\n"), "--basis", "AP2T")
        assert code == 0
        assert set(data["gadgets"]) <= {"AP2T", "branching-hallway"}
        assert data["puzzle"]["start"] == "start"

    def test_reduce_json_input(self, capsys, qbf_file):
        path = qbf_file(json.dumps({"prefix": [["e", 1]], "clauses": [[1]]}), "q.json")
        code, out, _ = call(capsys, "reduce", path, "--stats", "--no-planar")
        assert code == 0 and "formula: Ex1. (x1)" in out

    def test_bad_formula(self, capsys, qbf_file):
        code, _, err = call(capsys, "reduce", qbf_file("q e 1\n2 0\n"))
        assert code == 2 and "unquantified" in err


class TestCatalog:
    def test_list(self, capsys):
        code, out, _ = call(capsys, "catalog", "--list")
        assert code == 0
        assert len(out.strip().splitlines()) == len(catalog.catalog_names())

    @pytest.mark.parametrize("name", catalog.catalog_names())
    def test_emit_round_trip(self, capsys, tmp_path, name):
        path = tmp_path / "g.json"
        assert call(capsys, "catalog", "--emit", name, "-o", path)[0] == 0
        assert Gadget.load(path) == catalog.get(name)


class TestErrors:
    def test_missing_file(self, capsys):
        code, _, err = call(capsys, "solve", "/nonexistent/p.json")
        assert code == 2 and "p.json" in err

    def test_error_names_file_and_field(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({"gadgets": [{"id": "g", "type": "AP2T"}],
                                    "connections": [], "externals": {"s": ["g", "q"]},
                                    "start": "s", "goal": "s"}))
        code, data = call_json(capsys, "solve", path)
        assert code == 2
        assert "broken.json" in data["error"] and "externals['s']" in data["error"]

    def test_bad_json(self, capsys, tmp_path):
        path = tmp_path / "x.json"
        path.write_text("{")
        code, _, err = call(capsys, "solve", path)
        assert code == 2 and "x.json" in err

    def test_usage_error(self, capsys):
        assert call(capsys, "frobnicate")[0] == 2


class TestBench:
    def test_solver(self, capsys):
        code, data = call_json(capsys, "bench", "solver", "--count", "20")
        assert code == 0 and data["mismatches"] == 0

    def test_catalog(self, capsys):
        code, data = call_json(capsys, "bench", "catalog")
        assert code == 0 and data["failures"] == []


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gadgetlab", "classify", "NTL"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "NTL: PSPACE-complete (toggle+lock)"
