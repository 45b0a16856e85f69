from __future__ import annotations

import subprocess
import sys

import pytest

from jokerkit import fpmodule
from jokerkit.cli import main, read_chart_tsv, render_svg
from jokerkit.fpmodule import FiniteModule


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def joker_file(tmp_path, capsys):
    path = tmp_path / "joker.mod"
    assert run(capsys, "module", "build", str(path))[0] == 0
    return path


def test_build_uses_file_stem_as_preset(joker_file):
    assert FiniteModule.from_text(joker_file.read_text()) == fpmodule.joker()


def test_build_unknown_preset(tmp_path, capsys):
    code, _, err = run(capsys, "module", "build", str(tmp_path / "nothing.mod"))
    assert code == 2 and "unknown preset" in err


def test_sigma(joker_file, capsys):
    assert run(capsys, "module", "sigma", str(joker_file))[:2] == (0, "2\n")


def test_dual_and_iso(joker_file, tmp_path, capsys):
    dual_path = tmp_path / "jd.mod"
    code, out, _ = run(capsys, "module", "dual", str(joker_file), "-o", str(dual_path))
    assert code == 0 and out == "shift 4\n"
    assert run(capsys, "module", "iso", str(joker_file), str(dual_path))[1] == "false\n"
    assert run(capsys, "module", "iso", str(joker_file), str(dual_path), "--algebra", "A(1)")[1] == "true\n"
    again = tmp_path / "jdd.mod"
    run(capsys, "module", "dual", str(dual_path), "-o", str(again))
    assert run(capsys, "module", "iso", str(joker_file), str(again))[1] == "true\n"


def test_double(joker_file, capsys):
    code, out, _ = run(capsys, "module", "double", str(joker_file), "--k", "1")
    assert code == 0
    assert sorted(FiniteModule.from_text(out).dims) == [0, 2, 4, 6, 8]


def test_split_failure_exits_one(joker_file, capsys):
    code, _, err = run(capsys, "module", "split", str(joker_file), "--cut", "1")
    assert code == 1 and "not a direct sum" in err


def test_bad_module_file_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.mod"
    bad.write_text("2\n0 1\n0 0 1 7\n")
    code, _, err = run(capsys, "module", "sigma", str(bad))
    assert code == 2 and "line 3" in err
    code, _, err = run(capsys, "module", "sigma", str(tmp_path / "missing.mod"))
    assert code == 2 and "cannot read" in err


def test_usage_errors_exit_two(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "module")[0] == 2
    assert run(capsys, "dickson", "gens", "--n", "9")[0] == 2
    assert run(capsys, "dickson", "joker", "--k", "3")[0] == 2


def test_dickson_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "dickson", "gens", "--n", "2")
    assert code == 0 and out.splitlines()[0].startswith("x2 = ")
    code, out, _ = run(capsys, "dickson", "joker", "--k", "1")
    assert code == 0 and "isomorphic to suspend(double(J,1), 4): True" in out
    y = tmp_path / "y.mod"
    assert run(capsys, "dickson", "ymodule", "-o", str(y))[0] == 0
    code, out, _ = run(capsys, "module", "split", str(y), "--cut", "15", "--algebra", "A(2)")
    assert code == 0 and out.startswith("low: [8, 12, 14, 15]")
    assert run(capsys, "module", "split", str(y), "--cut", "15")[0] == 1


def test_ext_compute_is_byte_identical(joker_file, tmp_path, capsys):
    a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
    for path in (a, b):
        code = run(capsys, "ext", "compute", str(joker_file), "--max-s", "4", "--max-t", "12", "--products", "-o", str(path))[0]
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    shift, classes, edges, diffs = read_chart_tsv(a.read_text())
    assert shift == 0 and (0, 0, 0) in classes and edges and not diffs
    svg = tmp_path / "a.svg"
    assert run(capsys, "chart", "render", str(a), "-o", str(svg))[0] == 0
    text = svg.read_text()
    assert text.startswith("<svg") and text.count("<circle") == len(classes)
    assert run(capsys, "ext", "compute", str(joker_file), "--algebra", "A")[0] == 2


def test_render_rejects_malformed_rows():
    from jokerkit.cli import UsageError

    with pytest.raises(UsageError, match="line 2"):
        read_chart_tsv("# shift=0\n0\tx\t0\n")
    assert render_svg("").startswith("<svg")


def test_sseq_run_writes_page(tmp_path, capsys):
    page = tmp_path / "page3.tsv"
    code, out, _ = run(capsys, "sseq", "run", "-o", str(page))
    assert code == 0
    assert out.count("PASS") == 15 and "FAIL" not in out
    assert "# page=3" in page.read_text()


def test_verify_prints_table(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    lines = out.splitlines()
    assert sum(line.startswith("PASS") for line in lines) == 10
    assert lines[-1].startswith("note: double(J,1) occupies degrees 0 2 4 6 8")


def test_module_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "jokerkit.cli", "dickson", "gens", "--n", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "x1 = t1\n"
