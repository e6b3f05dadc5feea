"""Command-line behavior: dispatch, formats, exit codes, determinism."""

import json
import os

import numpy as np
import pytest

from conftest import diamond_graph, toy_bipartite, two_cliques
from ratioforge.cli import (
    EXIT_INCOMPATIBLE,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_UNCERTIFIED,
    EXIT_USAGE,
    RunSpec,
    bench,
    main,
    run,
)
from ratioforge.flow import dump_dimacs, undirected_to_flow
from ratioforge.problems import dump_bipartite, dump_edge_list
from ratioforge.setfn import SolverConfig


@pytest.fixture
def k5k3_file(tmp_path):
    path = tmp_path / "k5k3.txt"
    path.write_text(dump_edge_list(two_cliques(5, 3)))
    return path


@pytest.fixture
def toy_bip_file(tmp_path):
    path = tmp_path / "toy.bip"
    path.write_text(dump_bipartite(toy_bipartite()))
    return path


@pytest.fixture
def diamond_file(tmp_path):
    g, s, t = diamond_graph()
    path = tmp_path / "diamond.dimacs"
    path.write_text(dump_dimacs(undirected_to_flow(g, s, t)))
    return path


def test_solve_dsg_flow_exact(k5k3_file, tmp_path):
    summary = tmp_path / "sum.csv"
    code = main(["solve", "--problem", "dsg", "--algo", "flow",
                 "--input", str(k5k3_file), "--summary", str(summary)])
    assert code == EXIT_OK
    fields = summary.read_text().strip().split(",")
    assert fields[0] == "dsg" and fields[1] == "flow"
    assert float(fields[2]) == 2.0
    assert fields[6] == "exact"


def test_solve_hnsn_mnp(toy_bip_file):
    spec = RunSpec("hnsn", "mnp", str(toy_bip_file),
                   SolverConfig(max_iters=100, eps=0.01))
    result = run(spec)
    assert result.exit_code == EXIT_OK
    assert result.best_obj == pytest.approx(3.0)
    assert result.certified == "gap<=eps2"


def test_solve_mincut_supergreedy(diamond_file):
    spec = RunSpec("mincut", "supergreedy", str(diamond_file),
                   SolverConfig(max_iters=500, trace_every=10))
    result = run(spec)
    assert result.best_obj == pytest.approx(2.0)


def test_solve_mincut_baseline(diamond_file):
    spec = RunSpec("mincut", "exact_flow_baseline", str(diamond_file))
    result = run(spec)
    assert result.best_obj == pytest.approx(2.0)
    assert result.certified == "exact"


def test_solve_membership_roundtrip(tmp_path, k3):
    gfile = tmp_path / "k3.txt"
    gfile.write_text(dump_edge_list(k3))
    yfile = tmp_path / "y.txt"
    yfile.write_text("0.4\n0.5\n2.1\n")
    spec = RunSpec("membership", "supergreedy", str(gfile),
                   SolverConfig(max_iters=50), y_path=str(yfile))
    result = run(spec)
    assert result.best_obj == pytest.approx(0.1)
    assert result.certified == "exact"


def test_solve_mnp_problem(k5k3_file):
    spec = RunSpec("mnp", "mnp", str(k5k3_file), SolverConfig(max_iters=200, eps=1e-5))
    result = run(spec)
    # squared norm of the exact point: five entries at 2, three at 1
    assert result.best_obj == pytest.approx(23.0, abs=1e-6)


def test_usage_error_exit_code():
    assert main(["solve", "--problem", "dsg"]) == EXIT_USAGE
    assert main(["solve", "--problem", "nope", "--algo", "flow",
                 "--input", "x"]) == EXIT_USAGE


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 1\n0 5\n")
    assert main(["solve", "--problem", "dsg", "--algo", "flow",
                 "--input", str(bad)]) == EXIT_PARSE


def test_incompatible_exit_code(k5k3_file, capsys):
    code = main(["solve", "--problem", "pmean", "--algo", "flow",
                 "--input", str(k5k3_file)])
    assert code == EXIT_INCOMPATIBLE
    err = capsys.readouterr().err
    assert "valid algos" in err


def test_uncertified_budget_exit(k5k3_file):
    spec = RunSpec("dsg", "fw", str(k5k3_file),
                   SolverConfig(max_iters=3, eps=0.001))
    result = run(spec)
    assert result.exit_code == EXIT_UNCERTIFIED
    assert result.certified == "heuristic"


def test_anchored_requires_anchor_file(k5k3_file):
    assert main(["solve", "--problem", "anchored", "--algo", "supergreedy",
                 "--input", str(k5k3_file)]) == EXIT_USAGE


def test_trace_files_bit_identical(k5k3_file, tmp_path):
    t1, t2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for target in (t1, t2):
        spec = RunSpec("dsg", "supergreedy", str(k5k3_file),
                       SolverConfig(max_iters=40, trace_every=5),
                       trace_path=str(target))
        run(spec)
    assert t1.read_bytes() == t2.read_bytes()


def test_trace_schema_written(k5k3_file, tmp_path):
    trace = tmp_path / "t.csv"
    spec = RunSpec("dsg", "fw", str(k5k3_file), SolverConfig(max_iters=10),
                   trace_path=str(trace))
    run(spec)
    lines = trace.read_text().strip().splitlines()
    assert lines[0] == "iter,elapsed_s,best_obj,norm_sq,gap,set_size"
    assert len(lines) > 2


def test_bench_four_algorithms_agree(k5k3_file, tmp_path):
    suite = tmp_path / "suite.json"
    runs = [{"name": f"dsg_{algo}", "problem": "dsg", "algo": algo,
             "input": str(k5k3_file), "iters": 60}
            for algo in ("supergreedy", "fw", "mnp", "flow")]
    suite.write_text(json.dumps({"runs": runs}))
    outdir = tmp_path / "out"
    assert bench(suite, outdir) == EXIT_OK
    summary = (outdir / "summary.csv").read_text().strip().splitlines()
    assert summary[0].startswith("name,problem,algo")
    finals = [float(line.split(",")[3]) for line in summary[1:]]
    assert all(v == pytest.approx(2.0) for v in finals)
    for algo in ("supergreedy", "fw", "mnp", "flow"):
        assert (outdir / f"dsg_{algo}.csv").exists()


def test_bench_empty_suite(tmp_path):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps({"runs": []}))
    outdir = tmp_path / "out"
    assert bench(suite, outdir) == EXIT_OK
    assert (outdir / "summary.csv").read_text().strip().splitlines()[0].startswith("name,")


def test_bench_records_failures_and_continues(k5k3_file, tmp_path):
    suite = tmp_path / "suite.json"
    runs = [
        {"name": "bad", "problem": "dsg", "algo": "flow", "input": "missing.txt"},
        {"name": "good", "problem": "dsg", "algo": "flow", "input": str(k5k3_file)},
    ]
    suite.write_text(json.dumps({"runs": runs}))
    outdir = tmp_path / "out"
    assert bench(suite, outdir) == EXIT_OK
    lines = (outdir / "summary.csv").read_text().strip().splitlines()
    assert any("error" in line for line in lines)
    assert any(line.startswith("good,") and ",exact" in line for line in lines)


def test_bench_parallel_workers(k5k3_file, tmp_path, monkeypatch):
    monkeypatch.setenv("RATIOFORGE_THREADS", "2")
    suite = tmp_path / "suite.json"
    runs = [{"name": f"r{i}", "problem": "dsg", "algo": "flow",
             "input": str(k5k3_file)} for i in range(3)]
    suite.write_text(json.dumps({"runs": runs}))
    outdir = tmp_path / "out"
    assert bench(suite, outdir) == EXIT_OK
    lines = (outdir / "summary.csv").read_text().strip().splitlines()
    assert len(lines) == 4
