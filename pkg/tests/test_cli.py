import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from cscmat.cli import BENCH_COLUMNS, BenchConfig, UsageError, main, run_bench, run_command


def run(argv):
    out = io.StringIO()
    code = run_command(argv, out)
    return code, out.getvalue()


def bench_rows(text):
    lines = text.splitlines()
    assert lines[0].startswith("# clock: ")
    return list(csv.DictReader(lines[1:]))


def test_bench_csv_schema():
    code, text = run(["bench", "--op", "add", "--order", "200", "--tmin", "0", "--nrun", "3"])
    assert code == 0
    assert text.splitlines()[1] == ",".join(BENCH_COLUMNS)
    (row,) = bench_rows(text)
    assert row["op"] == "add" and row["branch"] == "-" and int(row["n_runs"]) == 3
    assert int(row["order"]) == 200 and float(row["density"]) == 0.01
    assert 300 <= int(row["nnz"]) <= 500 and float(row["mean_seconds"]) >= 0


def test_bench_env_defaults(monkeypatch):
    monkeypatch.setenv("CSCMAT_TMIN", "0")
    monkeypatch.setenv("CSCMAT_NRUN", "2")
    _, text = run(["bench", "--op", "mul", "--order", "50"])
    assert int(bench_rows(text)[0]["n_runs"]) == 2


def test_single_run_with_zero_tmin():
    res = run_bench(BenchConfig(op="add", order=20, tmin=0.0, nrun=1))
    assert res.n_runs == 1


def test_bench_honours_tmin_with_a_fake_clock():
    ticks = iter(np.arange(0.0, 100.0, 0.25))
    res = run_bench(BenchConfig(op="add", order=10, tmin=2.0, nrun=1), clock=lambda: next(ticks))
    # every timed call advances the fake clock by one tick
    assert res.n_runs == 8 and res.mean_seconds == 0.25


def test_bench_seed_fixes_nnz():
    a = run_bench(BenchConfig(op="add", order=100, tmin=0, nrun=1, seed=3))
    b = run_bench(BenchConfig(op="add", order=100, tmin=0, nrun=1, seed=3))
    assert a.nnz == b.nnz


def test_bench_solve(fixtures):
    _, text = run(["bench", "--op", "solve", "--file", str(fixtures / "lower_6x6.mtx"),
                   "--tmin", "0", "--nrun", "2"])
    row = bench_rows(text)[0]
    assert row["branch"] == "step5" and row["order"] == "6"


@pytest.mark.parametrize("kwargs", [dict(op="div"), dict(tmin=-1), dict(nrun=0),
                                    dict(op="solve"), dict(density=2.0)])
def test_bench_config_validation(kwargs):
    with pytest.raises(UsageError):
        BenchConfig(**kwargs)


def test_solve_lower(fixtures):
    code, text = run(["solve", str(fixtures / "lower_6x6.mtx")])
    assert code == 0
    assert "# branch\tstep5" in text
    body = [ln.split("\t") for ln in text.splitlines() if not ln.startswith("#")]
    assert body[0] == ["row", "x1"] and len(body) == 7


def test_solve_tridiagonal_and_forced(fixtures, tmp_path):
    f = str(fixtures / "tridiagonal_8x8.mtx")
    _, text = run(["solve", f])
    assert "# branch\tstep4a-i" in text or "# branch\tstep4a-ii" in text
    rhs = tmp_path / "b.txt"
    np.savetxt(rhs, np.arange(8.0))
    code, text = run(["solve", f, "--rhs", str(rhs), "--force-type", "Full", "--bandden", "1"])
    assert code == 0 and "# branch\tstep8" in text


def test_analyze(fixtures):
    _, text = run(["analyze", str(fixtures / "tridiagonal_8x8.mtx")])
    props = dict(ln.split("\t") for ln in text.splitlines()[1:])
    assert props["type"] == "Tridiagonal" and props["band_density"] == "1.0"
    assert props["hermitian"] == "true" and props["nnz"] == "22"


def test_order_modes(fixtures):
    f = str(fixtures / "general_3x4.mtx")
    _, text = run(["order", f, "--mode", "dmperm"])
    fields = dict(ln.split("\t") for ln in text.splitlines()[1:])
    assert fields["structural_rank"] == "2"
    assert sorted(map(int, fields["col_perm"].split())) == [1, 2, 3, 4]
    _, text = run(["order", str(fixtures / "tridiagonal_8x8.mtx")])
    assert sorted(map(int, text.splitlines()[1].split("\t")[1].split())) == list(range(1, 9))
    code, _ = run(["order", f, "--mode", "colperm"])
    assert code == 0


def test_plot_commands(fixtures, tmp_path):
    f = str(fixtures / "symmetric_2x2.mtx")
    _, text = run(["spy", f])
    assert text.splitlines()[0] == "points 2 2 4"
    xy = tmp_path / "xy.txt"
    np.savetxt(xy, [[0.0, 0.0], [1.0, 0.0]])
    _, text = run(["gplot", f, "--xy", str(xy)])
    assert text.splitlines()[0] == "segments 2 2 4"
    _, text = run(["etree", str(fixtures / "tridiagonal_8x8.mtx"), "--parents"])
    assert text.splitlines()[1:3] == ["1\t2", "2\t3"] and text.splitlines()[-1] == "8\t0"
    _, text = run(["etree", f])
    assert text.startswith("tree 2 2 2")


def test_fem_demo(tmp_path):
    surf = tmp_path / "surface.txt"
    code, text = run(["fem-demo", "--surface", str(surf)])
    lines = text.splitlines()
    assert code == 0 and lines[0] == "node\tx\ty\tV" and len(lines) == 56
    v = np.array([float(ln.split("\t")[3]) for ln in lines[1:]])
    assert v.min() == 10.0 and v.max() == 20.0
    assert surf.read_text().startswith("segments 55 55 320")
    _, text = run(["fem-demo", "--uniform"])
    rows = np.array([[float(t) for t in ln.split("\t")] for ln in text.splitlines()[1:]])
    assert np.allclose(rows[:, 3], 10 + 10 * (rows[:, 1] - 1), atol=1e-12)


@pytest.mark.parametrize("argv", [["nosuch"], ["bench", "--bogus"], ["solve", "/no/such.mtx"],
                                  ["bench", "--op", "solve"], []])
def test_user_errors_exit_1(argv):
    assert run(argv)[0] == 1


def test_parse_error_exits_1(tmp_path):
    bad = tmp_path / "bad.mtx"
    bad.write_text("%%MatrixMarket matrix array real general\n1 1\n1\n")
    assert run(["solve", str(bad)])[0] == 1


def test_help_exits_0():
    assert run(["--help"])[0] == 0


def test_internal_error_exits_2(monkeypatch):
    import cscmat.cli as cli

    def boom(*_):
        raise RuntimeError("bug")

    monkeypatch.setattr(cli, "build_strip_mesh", boom)
    assert run(["fem-demo"])[0] == 2


def test_module_entry_point(fixtures):
    proc = subprocess.run([sys.executable, "-m", "cscmat", "analyze",
                           str(fixtures / "lower_6x6.mtx")], capture_output=True, text=True)
    assert proc.returncode == 0 and "type\tLower" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "cscmat", "nosuch"], capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stdout == ""
    assert main(["analyze", str(fixtures / "lower_6x6.mtx")]) == 0
