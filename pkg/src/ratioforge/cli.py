"""Command-line entry point: dataset loading, solver dispatch, trace and
summary emission, and the benchmark harness.

Exit codes: 0 ok, 1 usage, 2 parse failure, 3 incompatible problem/algo,
4 budget exhausted without certification.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .brute import QP_LIMIT, SET_LIMIT, brute_force
from .extract import best_prefix_dense, best_prefix_sparse, membership_decide, sfm_extract
from .flow import (
    edmonds_karp,
    flow_dsg_solver,
    flow_hnsn_solver,
    flow_to_undirected,
    load_dimacs,
    push_relabel,
    undirected_to_flow,
)
from .problems import (
    AnchorSet,
    ParseError,
    anchored_oracle,
    dsg_oracle,
    fmt_num,
    hnsn_oracle,
    load_bipartite,
    load_edge_list,
    load_ids,
    load_vector,
    membership_oracle,
    mincut_oracle,
    MembershipInstance,
    pmean_oracle,
)
from .setfn import SolverConfig
from .universal import (
    ConvergenceTrace,
    TraceRow,
    VirtualClock,
    WallClock,
    dense_objective,
    frank_wolfe,
    fujishige_wolfe,
    norm_objective,
    sfm_objective,
    supergreedy_pp,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INCOMPATIBLE = 3
EXIT_UNCERTIFIED = 4

PROBLEMS = ("dsg", "pmean", "hnsn", "anchored", "mincut", "membership", "mnp")
ALGOS = ("supergreedy", "fw", "mnp", "flow", "exact_flow_baseline", "brute")

COMPAT = {
    "dsg": {"supergreedy", "fw", "mnp", "flow", "exact_flow_baseline", "brute"},
    "pmean": {"supergreedy", "fw", "mnp", "brute"},
    "hnsn": {"supergreedy", "fw", "mnp", "flow", "exact_flow_baseline", "brute"},
    "anchored": {"supergreedy", "fw", "mnp", "brute"},
    "mincut": {"supergreedy", "fw", "mnp", "exact_flow_baseline", "brute"},
    "membership": {"supergreedy", "fw", "mnp", "brute"},
    "mnp": {"supergreedy", "fw", "mnp", "brute"},
}

_UNIVERSAL = {"supergreedy": supergreedy_pp, "fw": frank_wolfe, "mnp": fujishige_wolfe}


class IncompatibleRun(ValueError):
    pass


class UsageError(ValueError):
    pass


@dataclass
class RunSpec:
    problem: str
    algo: str
    input_path: str
    config: SolverConfig = field(default_factory=SolverConfig)
    p: float = 1.0
    anchors_path: str | None = None
    y_path: str | None = None
    trace_path: str | None = None
    summary_path: str | None = None
    wallclock: bool = False

    def validate(self) -> None:
        if self.problem not in PROBLEMS:
            raise UsageError(f"unknown problem {self.problem!r}")
        if self.algo not in ALGOS:
            raise UsageError(f"unknown algo {self.algo!r}")
        if self.algo not in COMPAT[self.problem]:
            valid = ", ".join(sorted(COMPAT[self.problem]))
            raise IncompatibleRun(
                f"algo {self.algo!r} does not apply to problem {self.problem!r}; "
                f"valid algos: {valid}")
        if self.problem == "anchored" and self.anchors_path is None:
            raise UsageError("problem 'anchored' requires --anchors <file>")
        if self.problem == "membership" and self.y_path is None:
            raise UsageError("problem 'membership' requires --y <file>")


@dataclass
class RunResult:
    exit_code: int
    best_obj: float
    set_size: int
    elapsed_s: float
    iterations: int
    certified: str

    def summary_line(self, problem: str, algo: str) -> str:
        return ",".join([problem, algo, fmt_num(self.best_obj),
                         str(self.set_size), fmt_num(self.elapsed_s),
                         str(self.iterations), self.certified])


def _load_instance(spec: RunSpec):
    """Returns (oracle, objective, context dict)."""
    ctx: dict = {}
    if spec.problem in ("dsg", "pmean", "anchored", "membership", "mnp"):
        g = load_edge_list(spec.input_path)
        ctx["graph"] = g
        if spec.problem == "dsg":
            return dsg_oracle(g), dense_objective(), ctx
        if spec.problem == "pmean":
            return pmean_oracle(g, spec.p), dense_objective(), ctx
        if spec.problem == "anchored":
            anchors = AnchorSet.from_ids(g.n, load_ids(spec.anchors_path))
            return anchored_oracle(g, anchors), dense_objective(), ctx
        if spec.problem == "membership":
            y = load_vector(spec.y_path, g.n)
            return membership_oracle(MembershipInstance(g, y)), dense_objective(), ctx
        return dsg_oracle(g), norm_objective(), ctx
    if spec.problem == "hnsn":
        b = load_bipartite(spec.input_path)
        ctx["bipartite"] = b
        return hnsn_oracle(b), dense_objective(), ctx
    fi = load_dimacs(spec.input_path)
    g = flow_to_undirected(fi)
    ctx["graph"] = g
    ctx["s"], ctx["t"] = fi.source, fi.sink
    oracle = mincut_oracle(g, fi.source, fi.sink)
    return oracle, sfm_objective(offset=oracle.delta_s), ctx


def _single_row_trace(clock, best_obj: float, set_size: int) -> ConvergenceTrace:
    trace = ConvergenceTrace()
    trace.append(TraceRow(1, clock.read(), best_obj, None, None, set_size))
    return trace


def _run_loaded(spec: RunSpec, oracle, objective, ctx) -> tuple[RunResult, ConvergenceTrace]:
    clock = WallClock() if spec.wallclock else VirtualClock()
    cfg = spec.config

    if spec.algo in _UNIVERSAL:
        solver = _UNIVERSAL[spec.algo]
        if spec.problem == "membership":
            decision = membership_decide(oracle, solver, cfg)
            trace = decision.trace
            best = decision.violation if decision.answer == "NO" else 0.0
            size = 0 if decision.witness is None else int(decision.witness.size)
            certified = "exact" if decision.answer in ("YES", "NO") else "heuristic"
            code = EXIT_OK if decision.answer != "UNDECIDED" else EXIT_UNCERTIFIED
            iters = trace.rows[-1].iteration if trace.rows else 0
            return RunResult(code, best, size, trace.rows[-1].elapsed_s if trace.rows else 0.0,
                             iters, certified), trace
        point, trace = solver(oracle, cfg, objective=objective, clock=clock)
        last = trace.rows[-1]
        gaps = [row.gap for row in trace.rows if row.gap is not None]
        best_gap = min(gaps) if gaps else float("inf")
        if cfg.eps > 0 and best_gap <= cfg.eps ** 2:
            certified = "gap<=eps2"
            code = EXIT_OK
        elif cfg.eps > 0:
            certified = "heuristic"
            code = EXIT_UNCERTIFIED
        else:
            certified = "heuristic"
            code = EXIT_OK
        best_obj = last.best_obj if last.best_obj is not None else point.norm_sq
        return RunResult(code, float(best_obj), last.set_size, last.elapsed_s,
                         last.iteration, certified), trace

    if spec.algo == "flow":
        trace = ConvergenceTrace()
        if spec.problem == "dsg":
            sol = flow_dsg_solver(ctx["graph"], trace=trace, clock=clock)
        else:
            sol = flow_hnsn_solver(ctx["bipartite"], trace=trace, clock=clock)
        last = trace.rows[-1]
        return RunResult(EXIT_OK, sol.ratio, sol.size, last.elapsed_s,
                         last.iteration, "exact"), trace

    if spec.algo == "exact_flow_baseline":
        if spec.problem == "mincut":
            fi = undirected_to_flow(ctx["graph"], ctx["s"], ctx["t"])
            clock.add(4 * (fi.n + fi.m))
            cut = edmonds_karp(fi)
            trace = _single_row_trace(clock, cut.value, int(cut.source_side.size))
            return RunResult(EXIT_OK, cut.value, int(cut.source_side.size),
                             trace.rows[-1].elapsed_s, 1, "exact"), trace
        trace = ConvergenceTrace()
        if spec.problem == "dsg":
            sol = flow_dsg_solver(ctx["graph"], engine=edmonds_karp, trace=trace,
                                  clock=clock)
        else:
            sol = flow_hnsn_solver(ctx["bipartite"], engine=edmonds_karp,
                                   trace=trace, clock=clock)
        last = trace.rows[-1]
        return RunResult(EXIT_OK, sol.ratio, sol.size, last.elapsed_s,
                         last.iteration, "exact"), trace

    # brute force
    n = oracle.n
    limit = QP_LIMIT if spec.problem == "mnp" else SET_LIMIT
    if n > limit:
        raise IncompatibleRun(f"brute force limited to n <= {limit}, got {n}")
    clock.add(n * (1 << n))
    if spec.problem == "mnp":
        x = brute_force(oracle, "mnp_qp")
        best = float(x @ x)
        trace = _single_row_trace(clock, best, 0)
        return RunResult(EXIT_OK, best, 0, trace.rows[-1].elapsed_s, 1, "exact"), trace
    if spec.problem == "mincut":
        ids, value = brute_force(oracle, "min_f")
        best = value + oracle.delta_s
        trace = _single_row_trace(clock, best, int(ids.size))
        return RunResult(EXIT_OK, best, int(ids.size), trace.rows[-1].elapsed_s,
                         1, "exact"), trace
    if spec.problem == "membership":
        table = oracle.value_table(SET_LIMIT)
        mask = int(np.argmax(table))
        ids = np.flatnonzero([(mask >> b) & 1 for b in range(n)])
        best = float(table[mask])
        trace = _single_row_trace(clock, best, int(ids.size))
        return RunResult(EXIT_OK, best, int(ids.size), trace.rows[-1].elapsed_s,
                         1, "exact"), trace
    sol = brute_force(oracle, "max_ratio")
    trace = _single_row_trace(clock, sol.ratio, sol.size)
    return RunResult(EXIT_OK, sol.ratio, sol.size, trace.rows[-1].elapsed_s,
                     1, "exact"), trace


def run(spec: RunSpec) -> RunResult:
    """Execute one run spec, writing the trace CSV and summary line."""
    spec.validate()
    oracle, objective, ctx = _load_instance(spec)
    result, trace = _run_loaded(spec, oracle, objective, ctx)
    if spec.trace_path:
        trace.write(spec.trace_path)
    line = result.summary_line(spec.problem, spec.algo)
    if spec.summary_path:
        with open(spec.summary_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(line + "\n")
    return result


# ---------------------------------------------------------------------------
# Benchmark suites
# ---------------------------------------------------------------------------


def _spec_from_entry(entry: dict, base: Path) -> tuple[str, RunSpec]:
    name = entry.get("name")
    if not name:
        raise UsageError("every suite entry needs a 'name'")
    cfg = SolverConfig(
        max_iters=int(entry.get("iters", 100)),
        eps=float(entry.get("eps", 0.0)),
        trace_every=int(entry.get("trace_every", 1)),
    )

    def _resolve(key):
        val = entry.get(key)
        return str(base / val) if val else None

    spec = RunSpec(
        problem=entry["problem"],
        algo=entry["algo"],
        input_path=str(base / entry["input"]),
        config=cfg,
        p=float(entry.get("p", 1.0)),
        anchors_path=_resolve("anchors"),
        y_path=_resolve("y"),
        wallclock=bool(entry.get("wallclock", False)),
    )
    return name, spec


def _bench_one(args) -> tuple[str, str]:
    name, spec = args
    try:
        result = run(spec)
        return name, result.summary_line(spec.problem, spec.algo)
    except Exception as exc:  # failures are recorded, the suite continues
        return name, f"{spec.problem},{spec.algo},error,,,,{type(exc).__name__}: {exc}"


def bench(suite_path, outdir) -> int:
    """Run every spec of a JSON suite, one trace per entry plus a summary CSV."""
    suite_path = Path(suite_path)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        payload = json.loads(suite_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(suite_path, exc.lineno, exc.msg, exc.colno)
    entries = payload["runs"] if isinstance(payload, dict) else payload
    base = suite_path.parent
    jobs = []
    for entry in entries:
        name, spec = _spec_from_entry(entry, base)
        spec.trace_path = str(outdir / f"{name}.csv")
        jobs.append((name, spec))
    workers = int(os.environ.get("RATIOFORGE_THREADS", "1"))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(job) for job in jobs]
    lines = ["name,problem,algo,best_obj,set_size,elapsed_s,iterations,certified"]
    lines += [f"{name},{line}" for name, line in rows]
    (outdir / "summary.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argparse front end
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ratioforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one problem/algorithm pair")
    solve.add_argument("--problem", required=True, choices=PROBLEMS)
    solve.add_argument("--algo", required=True, choices=ALGOS)
    solve.add_argument("--input", required=True)
    solve.add_argument("--iters", type=int, default=100)
    solve.add_argument("--eps", type=float, default=0.0)
    solve.add_argument("--trace-every", type=int, default=1)
    solve.add_argument("--trace", default=None, help="trace CSV output path")
    solve.add_argument("--summary", default=None, help="summary line output path")
    solve.add_argument("--p", type=float, default=1.0, help="degree exponent")
    solve.add_argument("--anchors", default=None, help="anchor vertex file")
    solve.add_argument("--y", default=None, help="membership query vector file")
    solve.add_argument("--seed", type=int, default=None,
                       help="reserved; all algorithms are deterministic")
    solve.add_argument("--wallclock", action="store_true",
                       help="real timing instead of the deterministic work clock")

    benchp = sub.add_parser("bench", help="run a JSON suite of specs")
    benchp.add_argument("--suite", required=True)
    benchp.add_argument("--outdir", required=True)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "bench":
            return bench(args.suite, args.outdir)
        cfg = SolverConfig(max_iters=args.iters, eps=args.eps,
                           trace_every=args.trace_every)
        spec = RunSpec(problem=args.problem, algo=args.algo,
                       input_path=args.input, config=cfg, p=args.p,
                       anchors_path=args.anchors, y_path=args.y,
                       trace_path=args.trace, summary_path=args.summary,
                       wallclock=args.wallclock)
        result = run(spec)
        print(result.summary_line(spec.problem, spec.algo))
        return result.exit_code
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except IncompatibleRun as exc:
        print(f"incompatible run: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE


if __name__ == "__main__":
    sys.exit(main())
