import json
import subprocess
import sys

import pytest

from bakermodel.cli import main, parse_job, run

F3_ARGS = ["--field", "3", "--poly", "(x^2+1)^2 + y - y^3"]
F2_ARGS = ["--field", "2", "--poly", "x^4+1+y^2+y^3"]
WORKED = {"0,1": [[1, 0], [0, 1]], "1,2": [[1, 1], [1, 2]], "1,1": [[1, 0], [1, 1]]}


@pytest.fixture
def worked_file(tmp_path):
    path = tmp_path / "matrices.json"
    path.write_text(json.dumps(WORKED))
    return str(path)


def test_parse_job_examples():
    job = parse_job(F3_ARGS + ["points"])
    assert job.command == "points" and job.tower.p == 3
    job = parse_job(F2_ARGS + ["resolve", "--mode", "full-charts"])
    assert job.mode == "full-charts"
    job = parse_job(["--field", "4", "--poly", "x+y+t", "polygon"])
    assert (job.tower.p, job.tower.n) == (2, 2)


def test_options_after_command():
    job = parse_job(["points", "--field", "5", "--poly", "x+y+1", "--format", "json"])
    assert job.format == "json" and job.tower.p == 5


def test_points_table_f3():
    code, out, err, _ = run(F3_ARGS + ["points"])
    assert code == 0 and not err
    assert out.splitlines()[-1] == "3 orbits, 6 points over the closure"
    code, out, _, _ = run(F3_ARGS + ["points", "--format", "json"])
    degrees = sorted(o["residue_degree"] for o in json.loads(out)["orbits"])
    assert degrees == [1, 2, 3]


def test_points_nondegenerate_rows():
    code, out, _, _ = run(["--field", "5", "--poly", "x^3*y+y^3+x+2", "points", "--format", "json"])
    total = sum(o["residue_degree"] for o in json.loads(out)["orbits"])
    _, poly, _, _ = run(["--field", "5", "--poly", "x^3*y+y^3+x+2", "polygon", "--format", "json"])
    assert total == sum(e["lattice_length"] for e in json.loads(poly)["edges"])


@pytest.mark.parametrize("argv,code", [
    (["--field", "5", "--poly", "x+", "points"], 2),
    (["--field", "3^x", "--poly", "x+y+1", "points"], 2),
    (["--field", "6", "--poly", "x+y+1", "points"], 3),
    (["--field", "5", "--poly", "(x+y+1)^2", "resolve"], 3),
    (["--field", "5", "--poly", "x^2*y", "resolve"], 3),
    (["--field", "5", "--s", "5", "--h", "x+1", "superelliptic"], 3),
    (["--field", "2", "--poly", "x^4+1+y^2+y^3", "--max-iterations", "1", "points"], 4),
    (["--field", "5", "--poly-file", "/nonexistent/poly.txt", "points"], 1),
    (["--field", "5", "--poly", "x+y+1", "bogus"], 2),
])
def test_exit_codes(argv, code):
    assert run(argv)[0] == code


def test_parse_error_reports_position(capsys):
    assert main(["--field", "5", "--poly", "x^2+*y", "points"]) == 2
    assert "position 4" in capsys.readouterr().err


def test_bad_delta_override(tmp_path):
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"1,2": [1, 5]}))
    assert run(F2_ARGS + ["--delta-override", str(path), "resolve"])[0] == 3
    path.write_text("{not json")
    assert run(F2_ARGS + ["--delta-override", str(path), "resolve"])[0] == 2


def test_worked_example_export(worked_file):
    argv = F2_ARGS + ["--mode", "full-charts", "--matrix-override", worked_file, "export", "--format", "json"]
    code, out, _, _ = run(argv)
    data = json.loads(out)
    assert code == 0
    assert [o["beta"] for o in data["overrides"]["matrix"]] == [[0, 1], [1, 1], [1, 2]]
    g4 = next(n for n in data["nodes"] if n["level"] == 2)
    assert g4["F"] == "X2^2 + X2*Y^2 + 1"
    assert g4["meta"]["matrix"] == [[1, 0, 0], [0, 1, 1], [0, 1, 2]]
    assert g4["meta"]["ideal_generators"] == ["X1 + X2*Y + 1"]
    assert data["reports"]["outer_regular"] and data["reports"]["interior_count"] == 3
    assert set(data) == {"field", "input", "mode", "overrides", "polygon", "nodes", "orbits", "reports"}


def test_json_round_trip_and_determinism():
    argv = F3_ARGS + ["export", "--format", "json", "--assert-connected"]
    first, second = run(argv)[1], run(argv)[1]
    assert first == second
    data = json.loads(first)
    assert data["reports"]["genus"] == 3
    _, pts, _, _ = run(F3_ARGS + ["points", "--format", "json"])
    assert data["orbits"] == json.loads(pts)["orbits"]


def test_dot_export_counts(worked_file):
    argv = F2_ARGS + ["--matrix-override", worked_file, "export", "--format", "dot"]
    code, out, _, _ = run(argv)
    assert code == 0 and out.startswith("digraph forest {")
    node_lines = [ln for ln in out.splitlines() if "[label=" in ln and "->" not in ln]
    edge_lines = [ln for ln in out.splitlines() if "->" in ln]
    assert len(node_lines) == 6 and len(edge_lines) == 3


def test_out_file(tmp_path):
    path = tmp_path / "pts.txt"
    assert main(F3_ARGS + ["points", "--out", str(path)]) == 0
    assert "residue degree" in path.read_text()
    assert main(F3_ARGS + ["points", "--out", str(tmp_path / "missing" / "x.txt")]) == 1


def test_guard_still_emits_partial_forest():
    code, out, err, _ = run(F2_ARGS + ["--max-iterations", "1", "export", "--format", "json"])
    assert code == 4 and "guard" in err
    assert json.loads(out)["reports"]["terminated"] is False


def test_superelliptic_command():
    argv = ["--field", "5", "--s", "2", "--h", "(x-1)^2*(x+2)", "superelliptic", "--cross-check",
            "--format", "json"]
    code, out, _, _ = run(argv)
    data = json.loads(out)
    assert code == 0 and data["cross_check"]["match"]
    assert data["outer_regular_level"] == 2
    assert data["resolved_roots"][0]["restriction"] == "2*X^2 + 1"


def test_check_and_genus_commands():
    code, out, _, _ = run(F3_ARGS + ["check", "--format", "json"])
    data = json.loads(out)
    assert code == 0 and data["smooth"] and not data["nondegenerate"]
    code, out, _, _ = run(F3_ARGS + ["genus", "--assert-connected", "--format", "json"])
    assert json.loads(out)["exact_genus"] == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bakermodel", "--field", "5", "--poly", "x+y+1", "points"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "3 orbits" in proc.stdout
