import csv
import json
import subprocess
import sys

from multicontract.cli import main
from multicontract.instance import load, validate


def test_gen_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen", "--n", "5", "--m", "2", "--seed", "42", "--out", str(a)]) == 0
    assert main(["gen", "--n", "5", "--m", "2", "--seed", "42", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.json"
    main(["gen", "--n", "5", "--m", "2", "--seed", "43", "--out", str(c)])
    assert c.read_bytes() != a.read_bytes()


def test_gen_classes_are_valid(tmp_path):
    for kind in ("additive", "budget_additive", "coverage", "xos"):
        for costs in ("zero", "low", "random"):
            path = tmp_path / f"{kind}-{costs}.json"
            assert main(["gen", "--n", "5", "--m", "2", "--class", kind, "--costs", costs, "--out", str(path)]) == 0
            inst = load(path)
            assert validate(inst) == []
            if costs == "zero":
                assert all(c == 0 for row in inst.costs for c in row)


def test_solve_prints_report(tmp_path, capsys):
    path = tmp_path / "i.json"
    main(["gen", "--n", "4", "--m", "2", "--seed", "1", "--out", str(path)])
    capsys.readouterr()
    assert main(["solve", str(path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["method"] in ("DominantMatching", "LpPipeline")
    assert "total_revenue" in doc


def test_solve_exact(tmp_path, capsys):
    path = tmp_path / "i.json"
    main(["gen", "--n", "4", "--m", "2", "--seed", "1", "--out", str(path)])
    capsys.readouterr()
    assert main(["solve", str(path), "--exact"]) == 0
    assert json.loads(capsys.readouterr().out)["method"] == "BruteForce"


def test_solve_debug_lp(tmp_path, capsys):
    path = tmp_path / "i.json"
    main(["gen", "--n", "6", "--m", "1", "--class", "additive", "--costs", "zero", "--seed", "0", "--out", str(path)])
    capsys.readouterr()
    assert main(["solve", str(path), "--debug-lp", "--delta", "0.25"]) == 0
    assert "basis:" in capsys.readouterr().err


def test_malformed_file_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["solve", str(path)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_missing_file_and_bad_flags_exit_2(tmp_path):
    assert main(["solve", str(tmp_path / "nope.json")]) == 2
    assert main(["gen", "--n", "3"]) == 2
    assert main(["frobnicate"]) == 2


def test_bench_rows(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--count", "10", "--n", "5", "--m", "2", "--seed", "7", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 10
    assert list(rows[0]) == ["seed", "n", "m", "class", "approx", "exact", "ratio"]
    assert [int(r["seed"]) for r in rows] == list(range(7, 17))
    for r in rows:
        assert 0 < float(r["ratio"]) <= 1 + 1e-9
    assert "median ratio" in capsys.readouterr().out


def test_bench_zero_count(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--count", "0", "--n", "5", "--m", "2", "--out", str(out)]) == 0
    assert out.read_text().strip() == "seed,n,m,class,approx,exact,ratio"


def test_module_entry_point(tmp_path):
    path = tmp_path / "i.json"
    proc = subprocess.run(
        [sys.executable, "-m", "multicontract", "gen", "--n", "3", "--m", "1", "--out", str(path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and path.exists()
