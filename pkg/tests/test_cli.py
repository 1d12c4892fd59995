import csv
import subprocess
import sys

import numpy as np
import pytest

from redqmc import __version__
from redqmc import io as rio
from redqmc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _kv(out):
    return dict(line.split(" = ", 1) for line in out.splitlines() if " = " in line)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "redqmc", "--version"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert __version__ in res.stdout


def test_cbc_writes_genvec(capsys, tmp_path):
    out = tmp_path / "g.txt"
    code, text, _ = run(capsys, "cbc", "--m", "5", "--s", "6", "--w", "log:1",
                        "--out", str(out))
    assert code == 0
    kv = _kv(text)
    assert float(kv["squared_error"]) <= float(kv["bound"])
    g = rio.read_genvec(out)
    assert " ".join(map(str, g.z)) == kv["z"]


def test_matprod_algorithms_agree(capsys, tmp_path):
    res = {}
    for algo in ("naive", "alg1", "alg2"):
        code, text, _ = run(capsys, "--seed", "3", "matprod", "--m", "5", "--s", "6",
                            "--w", "log:1", "--algo", algo, "--out", str(tmp_path / f"{algo}.txt"))
        assert code == 0
        res[algo] = (rio.read_matrix(tmp_path / f"{algo}.txt"), _kv(text))
    np.testing.assert_allclose(res["alg1"][0], res["naive"][0], atol=1e-12)
    np.testing.assert_allclose(res["alg2"][0], res["naive"][0], atol=1e-12)
    assert res["alg1"][1]["multiplies"] == res["alg1"][1]["predicted_multiplies"]
    assert int(res["naive"][1]["multiplies"]) == 32 * 6 * 4


def test_matprod_transform_with_files(capsys, tmp_path):
    g = tmp_path / "g.txt"
    run(capsys, "cbc", "--m", "4", "--s", "3", "--out", str(g))
    A = tmp_path / "A.txt"
    rio.write_matrix(A, np.arange(6.0).reshape(3, 2))
    outs = []
    for algo in ("alg1", "naive"):
        p = tmp_path / f"{algo}.txt"
        code, text, _ = run(capsys, "matprod", "--genvec", str(g), "--matrix", str(A),
                            "--transform", "normal", "--shift", "seed:1", "--algo", algo,
                            "--out", str(p))
        assert code == 0 and "shifts" in _kv(text)
        outs.append(rio.read_matrix(p))
    np.testing.assert_allclose(outs[0], outs[1], atol=1e-11)


def test_matprod_report(capsys, tmp_path):
    rep = tmp_path / "r.csv"
    code, _, _ = run(capsys, "matprod", "--m", "4", "--s", "3", "--w", "log:1", "--tau", "2",
                     "--report", str(rep))
    assert code == 0
    (row,) = list(csv.DictReader(open(rep)))
    assert (row["algo"], row["b"], row["m"], row["s"], row["tau"]) == ("alg1", "2", "4", "3", "2")
    assert int(row["multiplies"]) == 2 * (16 + 8 + 8)
    assert int(row["wall_ns"]) > 0


def test_output_dir_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("REDQMC_OUTPUT_DIR", str(tmp_path))
    code, _, _ = run(capsys, "matprod", "--m", "3", "--s", "2", "--out", "p.txt")
    assert code == 0
    assert (tmp_path / "p.txt").exists()


def test_net_subcommands(capsys, tmp_path):
    code, text, _ = run(capsys, "net", "reduce", "--m", "3", "--s", "2", "--w", "log:1")
    assert code == 0 and "# C2" in text
    code, text, _ = run(capsys, "net", "points", "--m", "3", "--s", "2")
    pts = np.array([[float(v) for v in ln.split()] for ln in text.splitlines()[1:]])
    assert pts.shape == (8, 2)
    code, text, _ = run(capsys, "net", "dual", "--m", "3", "--s", "2", "--u", "1,2",
                        "--out", str(tmp_path / "d.txt"))
    assert int(_kv(text)["elements"]) == 8
    code, text, _ = run(capsys, "net", "tvalue", "--m", "3", "--s", "2", "--u", "1,2")
    assert _kv(text)["t"] == "2"
    code, text, _ = run(capsys, "--seed", "2", "net", "bound", "--m", "3", "--s", "3",
                        "--random", "--w", "log:1")
    kv = _kv(text)
    assert float(kv["bound"]) == pytest.approx(float(kv["first_term"]) + float(kv["second_term"]))
    code, text, _ = run(capsys, "net", "bound", "--m", "3", "--s", "3", "--t", "1", "--single-inner-t")
    assert code == 0


def test_net_genmat_file(capsys, tmp_path):
    p = tmp_path / "c.txt"
    code, _, _ = run(capsys, "--seed", "1", "net", "reduce", "--random", "--m", "3",
                     "--s", "2", "--out", str(p))
    code, text, _ = run(capsys, "net", "tvalue", "--genmat", str(p), "--u", "1",
                        "--unreduced")
    assert code == 0 and "t" in _kv(text)


def test_rmc_csv(capsys, tmp_path):
    p = tmp_path / "r.csv"
    code, _, _ = run(capsys, "rmc", "--m", "4", "--s", "3", "--w", "log:1", "--reps", "3",
                     "--dist", "normal", "--integrand", "square", "--out", str(p))
    assert code == 0
    rows = list(csv.DictReader(open(p)))
    assert [r["rep"] for r in rows] == ["0", "1", "2"]
    assert all(int(r["multiplies"]) == 3 * (16 + 8 + 8) for r in rows)
    # a subcommand seed overrides the global one
    run(capsys, "--seed", "5", "rmc", "--m", "3", "--s", "2", "--out", str(tmp_path / "a.csv"))
    run(capsys, "rmc", "--seed", "5", "--m", "3", "--s", "2", "--out", str(tmp_path / "b.csv"))
    run(capsys, "rmc", "--m", "3", "--s", "2", "--out", str(tmp_path / "c.csv"))
    est = [next(csv.DictReader(open(tmp_path / f"{k}.csv")))["estimate"] for k in "abc"]
    assert est[0] == est[1] != est[2]


def test_bench_timing_and_option(capsys, tmp_path):
    cfg = tmp_path / "t.cfg"
    cfg.write_text("sweep = s\nvalues = 4, 8\nm = 4\ntau = 2\nreps = 1\n")
    code, _, _ = run(capsys, "bench", "timing", "--config", str(cfg),
                     "--out", str(tmp_path / "t.csv"))
    assert code == 0
    assert len(list(csv.DictReader(open(tmp_path / "t.csv")))) == 6
    ocfg = tmp_path / "o.cfg"
    ocfg.write_text("m_values = 6 7\nc_values = 0 1\nreps = 2\n")
    code, _, _ = run(capsys, "bench", "option", "--config", str(ocfg),
                     "--out", str(tmp_path / "o.csv"))
    assert code == 0
    rows = list(csv.DictReader(open(tmp_path / "o.csv")))
    assert [(r["m"], r["c"]) for r in rows] == [("6", "0"), ("7", "0"), ("6", "1"), ("7", "1")]


@pytest.mark.parametrize("argv,code", [
    (["cbc", "--b", "4"], "invalid-parameter"),
    (["matprod", "--genvec", "/nonexistent/file"], "parse-error"),
    (["net", "dual", "--u", "1,x"], "invalid-parameter"),
    (["rmc", "--reps", "0"], "invalid-parameter"),
])
def test_errors_exit_nonzero(capsys, argv, code):
    rc, _, err = run(capsys, *argv)
    assert rc == 1
    assert err.startswith(f"error [{code}]")
