import json
import shutil

import numpy as np
import pytest

from l0path import cli, io


@pytest.fixture
def i2_files(tmp_path):
    io.write_matrix_csv(tmp_path / "A.csv", np.eye(2))
    io.write_matrix_csv(tmp_path / "y.csv", [3.0, 4.0])
    return tmp_path


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.mark.parametrize("algo", ["csbr", "l0pd"])
def test_solve_worked_case(i2_files, algo):
    out = i2_files / f"{algo}.json"
    assert run("solve", "--algo", algo, "--A", i2_files / "A.csv", "--y", i2_files / "y.csv", "--out", out) == 0
    path = io.read_json(out)["path"]
    np.testing.assert_allclose(path["lambdas"], [16.0, 9.0, 0.0], atol=1e-12)
    assert path["supports"] == [[], [1], [0, 1]]


def test_solve_sbr_trace(i2_files):
    out, trace = i2_files / "sbr.json", i2_files / "trace.jsonl"
    rc = run("solve", "--algo", "sbr", "--lambda", 12, "--A", i2_files / "A.csv", "--y", i2_files / "y.csv",
             "--out", out, "--trace", trace)
    assert rc == 0
    res = io.read_json(out)
    assert res["support"] == [1] and res["error"] == pytest.approx(9.0)
    moves = [json.loads(line) for line in trace.read_text().splitlines()]
    assert [(m["move"], m["atom"]) for m in moves] == [("add", 1)]
    assert run("solve", "--algo", "sbr", "--A", i2_files / "A.csv", "--y", i2_files / "y.csv") == cli.EXIT_USAGE


def test_missing_and_malformed_files(tmp_path, i2_files):
    assert run("solve", "--algo", "csbr", "--A", tmp_path / "nope.csv", "--y", i2_files / "y.csv") == cli.EXIT_USAGE
    (tmp_path / "bad.csv").write_text("3,2\n1,2\n")
    assert run("solve", "--algo", "csbr", "--A", tmp_path / "bad.csv", "--y", i2_files / "y.csv") == cli.EXIT_USAGE
    io.write_matrix_csv(tmp_path / "y3.csv", [1.0, 2.0, 3.0])
    assert run("solve", "--algo", "csbr", "--A", i2_files / "A.csv", "--y", tmp_path / "y3.csv") == cli.EXIT_USAGE


def test_gen_then_lambda_stop(tmp_path):
    d = tmp_path / "a"
    assert run("gen", "--scenario", "A", "--trial", 2, "--out", d) == 0
    meta = io.read_json(d / "meta.json")
    assert (meta["m"], meta["n"]) == (300, 282) and len(meta["support_star"]) == 30
    A, y = io.read_matrix_csv(d / "A.csv"), io.read_vector_csv(d / "y.csv")
    lam1 = float(np.max((A.T @ y) ** 2 / np.sum(A * A, axis=0)))
    stop = 1e-2 * lam1
    out, poly = tmp_path / "pd.json", tmp_path / "poly.json"
    assert run("solve", "--algo", "l0pd", "--A", d / "A.csv", "--y", d / "y.csv", "--lambda-stop", stop,
               "--out", out, "--polygon", poly) == 0
    pg = io.read_json(poly)
    upper = [float(b) for b in pg["breakpoints"][:-1]]  # upper end of each edge
    explored = [e["explored"] for e in pg["edges"]]
    assert all(u > stop for u, x in zip(upper, explored) if x)
    first_open = explored.index(False)
    assert upper[first_open] <= stop
    assert len(io.read_json(out)["path"]["supports"]) == len(pg["edges"])


def test_select_and_plot(i2_files):
    out = i2_files / "p.json"
    run("solve", "--algo", "csbr", "--A", i2_files / "A.csv", "--y", i2_files / "y.csv", "--out", out)
    sel = i2_files / "sel.json"
    assert run("select", "--path", out, "--criterion", "aic", "--out", sel) == 0
    assert io.read_json(sel)["segment"] in (0, 1, 2)
    svg = i2_files / "p.svg"
    assert run("plot", out, "--out", svg) == 0
    assert svg.read_text().startswith("<svg")
    assert run("plot", i2_files / "sel.json", "--out", svg) == cli.EXIT_USAGE


def test_oracle(tmp_path):
    assert run("oracle", "--check", "all", "--n", 8, "--trials", 20, "--dump-dir", tmp_path) == 0
    assert not list(tmp_path.glob("oracle_fail_*"))
    assert run("oracle", "--n", 20) == cli.EXIT_USAGE
    for kind in ("jumps", "deconv"):
        assert run("oracle", "--check", "dominance", "--dict", kind, "--n", 8, "--trials", 3) == 0


def test_oracle_replay(tmp_path):
    rng = np.random.default_rng(3)
    dump = tmp_path / "case.json"
    io.write_json(dump, {"A": rng.standard_normal((8, 6)), "y": rng.standard_normal(8), "check": "all"})
    assert run("oracle", "--replay", dump) == 0


def test_bench_is_reproducible(tmp_path):
    out, kept = tmp_path / "bench.json", tmp_path / "first.json"
    argv = ("bench", "--scenario", "E", "--trials", 1, "--seed", 5, "--out", out)
    assert run(*argv) == 0
    shutil.copy(out, kept)
    assert run(*argv) == 0
    a, b = io.read_json(kept), io.read_json(out)
    assert io.strip_timing(a) == io.strip_timing(b)
    assert "cpu_seconds" in a["results"]["l0pd"]["trials"][0]["timing"]
    assert set(a["results"]) == {"csbr", "l0pd"}


def test_bench_csv_and_plots(tmp_path):
    out, table, figs = tmp_path / "b.json", tmp_path / "b.csv", tmp_path / "figs"
    assert run("bench", "--scenario", "E", "--algo", "csbr", "--trials", 2, "--out", out, "--csv", table,
               "--plot", figs) == 0
    rows = table.read_text().splitlines()
    assert rows[0].startswith("Scenario E") and any(r.startswith("SE") for r in rows)
    assert (figs / "mean_j_E.svg").exists()
    assert len(list(figs.glob("curve_E_csbr_t*.svg"))) == 2
    svg = tmp_path / "m.svg"
    assert run("plot", out, "--out", svg) == 0
