import numpy as np
import pytest

from conftest import Y4
from matmech import io
from matmech.cli import run


def _run(capsys, argv):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def _csv_rows(out):
    return [ln for ln in out.splitlines() if ln and not ln.startswith("#")]


def test_analyze_ranges(capsys):
    code, out, _ = _run(capsys, ["analyze", "--strategy", "hier", "--workload", "ranges", "--n", "4", "--epsilon", "1"])
    assert code == 0
    rows = _csv_rows(out)
    assert rows[0] == "query_index,exact_mse" and len(rows) == 11
    total = float(next(ln for ln in out.splitlines() if ln.startswith("# total=")).split("=")[1])
    assert total == pytest.approx(sum(float(r.split(",")[1]) for r in rows[1:]), rel=1e-9)
    for key in ("max", "sensitivity", "l2_bound", "svb_sensitivity"):
        assert f"# {key}=" in out
    assert out.startswith("# matmech analyze\n")


def test_strategy_file_is_fig1(tmp_path, capsys):
    p = tmp_path / "y4.mat"
    code, _, _ = _run(capsys, ["strategy", "--kind", "wavelet", "--n", "4", "--out", str(p)])
    assert code == 0
    assert np.array_equal(io.read_matrix(p), Y4)
    assert p.read_text().startswith("# matmech strategy")


def test_workload_round_trip(tmp_path, capsys):
    p = tmp_path / "w.mat"
    assert run(["workload", "--kind", "ranges", "--n", "5", "--out", str(p)]) == 0
    W = io.read_matrix(p)
    assert W.shape == (15, 5)
    q = tmp_path / "w2.mat"
    io.write_matrix(W, q)
    assert io.read_matrix(q).tobytes() == W.tobytes()


def test_answer_vanishing_noise(tmp_path, capsys):
    x = tmp_path / "x.vec"
    io.write_matrix(np.array([5.0, 7.0]), x)
    argv = ["answer", "--strategy", "identity", "--n", "2", "--data", str(x), "--epsilon", "1e9", "--seed", "7"]
    code, out, _ = _run(capsys, argv)
    assert code == 0
    vals = [float(r.split(",")[1]) for r in _csv_rows(out)[1:]]
    assert np.allclose(vals, [5.0, 7.0], atol=1e-6)
    _, again, _ = _run(capsys, argv)
    assert again == out


def test_answer_gaussian(tmp_path, capsys):
    x = tmp_path / "x.vec"
    io.write_matrix(np.ones(4), x)
    code, out, _ = _run(capsys, ["answer", "--strategy", "hier", "--data", str(x), "--epsilon", "1", "--delta", "1e-5",
                                 "--workload", "ranges"])
    assert code == 0 and "# mechanism=gaussian" in out
    assert len(_csv_rows(out)) == 11


def test_optimize_table(tmp_path, capsys):
    p = tmp_path / "a.mat"
    code, out, _ = _run(capsys, ["optimize", "--workload", "ranges", "--n", "4", "--method", "minsens",
                                 "--strategy", "wavelet", "--iters", "100", "--strategy-out", str(p)])
    assert code == 0
    rows = _csv_rows(out)
    assert rows[0] == "method,objective,sensitivity"
    assert [r.split(",")[0] for r in rows[1:]] == ["svb", "l2", "descent", "minsens", "augment"]
    A = io.read_matrix(p)
    assert np.abs(A).sum(axis=0).max() <= 2.210 + 1e-3


@pytest.mark.parametrize("check", ["mc", "lsq", "haar", "growth"])
def test_verify(capsys, check):
    argv = ["verify", "--check", check, "--n", "4", "--trials", "200000", "--n-list", "16,32,64"]
    code, out, _ = _run(capsys, argv)
    assert code == 0
    assert f"# PASS check={check}" in out


def test_verify_reports_failure(capsys):
    code, out, _ = _run(capsys, ["verify", "--check", "mc", "--n", "4", "--trials", "20000", "--tolerance", "1e-6"])
    assert code == 1 and "# FAIL" in out


def test_bench(capsys):
    code, out, _ = _run(capsys, ["bench", "--n-list", "4,8", "--strategies", "identity,hier"])
    rows = _csv_rows(out)
    assert code == 0
    assert rows[0] == "n,strategy,workload,total_error,max_error"
    assert rows[1].startswith("4,identity,ranges,40.0,8.0")
    assert len(rows) == 5


def test_bench_other_workload(capsys):
    code, out, _ = _run(capsys, ["bench", "--n-list", "4", "--workload", "predicates", "--strategies", "wavelet"])
    assert code == 0 and len(_csv_rows(out)) == 2


def test_same_argv_same_bytes(capsys):
    argv = ["verify", "--check", "mc", "--n", "4", "--trials", "50000", "--seed", "9"]
    _, a, _ = _run(capsys, argv)
    _, b, _ = _run(capsys, argv)
    assert a == b


@pytest.mark.parametrize(
    "argv",
    [["strategy", "--kind", "hier", "--n", "4", "--bogus"], ["frobnicate"], ["analyze", "--strategy", "hier"], []],
)
def test_usage_errors(capsys, argv):
    code, _, err = _run(capsys, argv)
    assert code == 2
    assert "usage:" in err


def test_domain_error(capsys):
    code, _, err = _run(capsys, ["strategy", "--kind", "hier", "--n", "6"])
    assert code == 1 and "NotPowerOfTwo" in err


def test_missing_file(capsys):
    code, _, err = _run(capsys, ["analyze", "--strategy", "file:/nonexistent", "--workload", "identity", "--n", "2"])
    assert code == 1


def test_help_lists_csv_columns(capsys):
    code, out, _ = _run(capsys, ["bench", "--help"])
    assert code == 0 and "n,strategy,workload,total_error,max_error" in out
