import csv
import json
import subprocess
import sys

import pytest

import discrete_fk.spectral as spectral
from discrete_fk import shapes
from discrete_fk.cli import main
from discrete_fk.io import emit_json, emit_text


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def plus_file(tmp_path):
    p = tmp_path / "plus.txt"
    p.write_text(emit_text(shapes.plus()))
    return p


def test_spectrum_plus(capsys, plus_file):
    code, out, _ = run(capsys, "spectrum", str(plus_file))
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1 and data["command"] == "spectrum"
    assert data["lambda_d"] == pytest.approx(2.0, abs=1e-9)
    assert data["boundary_identity_residual"] < 1e-8


def test_spectrum_builtin_and_json_input(capsys, tmp_path):
    p = tmp_path / "sq.json"
    p.write_text(emit_json(shapes.square(2)))
    _, a, _ = run(capsys, "spectrum", str(p), "--method", "dense")
    _, b, _ = run(capsys, "spectrum", "square:2", "--method", "dense")
    assert json.loads(a)["lambda_d"] == pytest.approx(2.0)
    assert a == b


def test_empty_shape_exit_1(capsys, tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("....\n")
    code, _, err = run(capsys, "spectrum", str(p))
    assert code == 1
    assert "empty shape" in err


def test_malformed_shape_reports_position(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("#.\n#x\n")
    code, _, err = run(capsys, "spectrum", str(p))
    assert code == 1
    assert "line 2, column 2" in err


def test_validation_errors_exit_1(capsys):
    assert run(capsys, "search", "--n", "0")[0] == 1
    assert run(capsys, "search", "--n", "15")[0] == 1
    assert run(capsys, "sandwich", "plus", "--m", "-3")[0] == 1
    assert run(capsys, "walk", "plus", "--bogus")[0] == 1
    assert run(capsys, "walk", "plus", "--start", "9,9")[0] == 1
    assert run(capsys, "walk", "plus", "domino", "--k", "2")[0] == 1
    assert run(capsys, "spectrum", "no-such-shape")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1


def test_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("FK_THREADS", "zero")
    assert run(capsys, "spectrum", "plus")[0] == 1
    monkeypatch.setenv("FK_THREADS", "2")
    assert run(capsys, "spectrum", "plus")[0] == 0


def test_nonconvergence_exit_2(capsys, monkeypatch):
    monkeypatch.setattr(spectral, "DENSE_CAP", 3)
    orig = spectral.lambda_d

    def short(g, tol=1e-10, method="power", max_iter=3):
        return orig(g, tol, method, max_iter)

    monkeypatch.setattr(spectral, "lambda_d", short)
    code, _, err = run(capsys, "spectrum", "square:6")
    assert code == 2
    assert "best estimate" in err


def test_search_n4(capsys):
    code, out, _ = run(capsys, "search", "--n", "4", "--mode", "exhaustive")
    assert code == 0
    rec = json.loads(out)["records"][0]
    assert len(rec["minimizers"]) == 1
    assert rec["minimizers"][0]["text"] == "##\n##\n"


def test_search_table_and_svgs(capsys, tmp_path):
    code, out, _ = run(capsys, "search", "--n", "5", "--table", "--svg-dir", str(tmp_path))
    assert code == 0
    assert json.loads(out)["strictly_decreasing"]
    assert len(list(tmp_path.glob("minimizers_n*.svg"))) == 5


def test_symmetrize_outputs(capsys, tmp_path):
    svg = tmp_path / "s.svg"
    code, out, _ = run(capsys, "symmetrize", "square:2", "--axis", "diagonal", "--svg", str(svg))
    assert code == 0
    data = json.loads(out)
    assert data["lambda_after"] <= data["lambda_before"] + 1e-9
    assert svg.read_text().count("<svg") == 1


def test_walk_csv_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    _, out1, _ = run(capsys, "walk", "plus", "--k", "6", "--trials", "20000", "--seed", "3", "--csv", str(a))
    _, out2, _ = run(capsys, "walk", "plus", "--k", "6", "--trials", "20000", "--seed", "3", "--csv", str(b))
    assert out1 == out2
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(a.open()))
    assert rows[0] == ["k", "p_exact", "p_mc", "band"]
    assert float(rows[2][1]) == 1.0  # centre start, k = 1
    data = json.loads(out1)
    assert data["seed"] == 3 and data["start"] == [0, 0]


def test_walk_decay(capsys):
    code, out, _ = run(capsys, "walk", "square:3", "domino", "--k", "200")
    assert code == 0
    data = json.loads(out)
    assert data["slope"] == pytest.approx(1.0397207708, rel=1e-6)


def test_disk_and_sandwich(capsys, tmp_path):
    code, out, _ = run(capsys, "disk", "--n-list", "25,100", "--m", "2")
    assert code == 0
    assert [r["n"] for r in json.loads(out)["reports"]] == [25, 100]
    pgm = tmp_path / "m.pgm"
    code, out, _ = run(capsys, "sandwich", "square:3", "--m", "4", "--pgm", str(pgm))
    assert code == 0
    assert json.loads(out)["upper"]["status"] in ("holds", "inconclusive")
    assert pgm.read_bytes().startswith(b"P5\n12 12\n255\n")


def test_render_plus_counts(capsys):
    code, out, _ = run(capsys, "render", "plus")
    assert code == 0
    assert out.count('stroke="#000000"') == 5
    assert out.count("stroke-dasharray") == 8


def test_render_uniform_eigenfunction(capsys, tmp_path):
    _, out, _ = run(capsys, "spectrum", "square:2", "-o", str(tmp_path / "r.json"))
    code, svg, _ = run(capsys, "render", str(tmp_path / "r.json"), "--eigenfunction")
    assert code == 0
    fills = {line.split('fill="')[1].split('"')[0] for line in svg.splitlines() if 'stroke="#000000"' in line}
    assert fills == {"#2166ac"}


def test_render_symmetrize_report(capsys, tmp_path):
    run(capsys, "symmetrize", "p_pentomino", "-o", str(tmp_path / "s.json"))
    code, svg, _ = run(capsys, "render", str(tmp_path / "s.json"))
    assert code == 0
    assert "before" in svg and "after" in svg


def test_outputs_byte_identical_across_processes(tmp_path):
    cmds = [
        ["render", "p_pentomino", "--eigenfunction"],
        ["spectrum", "plus"],
        ["walk", "domino", "--k", "3", "--trials", "5000", "--seed", "1"],
    ]
    for cmd in cmds:
        outs = [
            subprocess.run([sys.executable, "-m", "discrete_fk", *cmd], capture_output=True, check=True).stdout
            for _ in range(2)
        ]
        assert outs[0] == outs[1]
