"""Command-line entry point.

Exit codes: 0 ok, 1 usage, 2 verification mismatch, 3 sampling failure,
4 input/output or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import oracles
from .conn2 import (biconnectivity, bridges, connected_components, format_bridges,
                    format_coloring, pipeline_config)
from .dfs import DEFAULT_SAMPLE_CONSTANT, SamplingFailure, leaf_sampling_dfs
from .graph import (GENERATOR_KINDS, Graph, GraphFormatError, compute_depths, diameter_exact,
                    format_edge_list, generate, parse_edge_list, spanning_forest)
from .mpc import RoundLedger, report
from .rmq import block_width, rmq_arrays, rmq_preprocess
from .tree import lca_arrays, prepare

ALGORITHMS = ("bridges", "biconn", "dfs", "lca", "rmq", "components")
EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_FAIL, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mpcgraph", description="Round-charged MPC graph algorithms.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, algo_required):
        p.add_argument("--algo", choices=ALGORITHMS, required=algo_required)
        p.add_argument("--delta", type=float, default=0.5)
        p.add_argument("--gamma", type=float, default=0.0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--metrics", help="write the round/space report as JSON here")
        p.add_argument("--threshold", type=int,
                       help="local threshold s for the DFS stage (default: machine capacity)")
        p.add_argument("--sample-constant", type=float, default=DEFAULT_SAMPLE_CONSTANT)

    def source(p):
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--gen", metavar="KIND:N[:M]")
        group.add_argument("--input", metavar="FILE")
        p.add_argument("--queries", metavar="FILE", help="'u v' (lca) or 'l r' (rmq) lines")
        p.add_argument("--values", metavar="FILE", help="whitespace-separated integers for rmq")

    gen = sub.add_parser("gen", help="write a generated graph as an edge list")
    gen.add_argument("--gen", metavar="KIND:N[:M]", required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")

    run = sub.add_parser("run", help="run an algorithm")
    common(run, True)
    source(run)
    verify = sub.add_parser("verify", help="run an algorithm and compare with a sequential oracle")
    common(verify, True)
    source(verify)
    bench = sub.add_parser("bench", help="sweep n over powers of two")
    common(bench, True)
    bench.add_argument("--gen", metavar="KIND", required=True)
    bench.add_argument("--min-exp", type=int, default=4)
    bench.add_argument("--max-exp", type=int, default=12)
    return parser


def parse_gen(text: str) -> tuple[str, int, int | None]:
    parts = text.split(":")
    if len(parts) not in (2, 3) or parts[0] not in GENERATOR_KINDS:
        raise UsageError(f"--gen expects KIND:N[:M] with KIND in {', '.join(GENERATOR_KINDS)}")
    try:
        nums = [int(x) for x in parts[1:]]
    except ValueError:
        raise UsageError(f"--gen sizes must be integers, got {text!r}") from None
    return parts[0], nums[0], nums[1] if len(nums) == 2 else None


def load_graph(args) -> Graph:
    if getattr(args, "input", None):
        with open(args.input) as fh:
            return parse_edge_list(fh)
    kind, n, m = parse_gen(args.gen)
    try:
        return generate(kind, n, seed=args.seed, m=m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _read_pairs(path: str) -> np.ndarray:
    with open(path) as fh:
        data = np.array(fh.read().split(), dtype=np.int64)
    if len(data) % 2:
        raise GraphFormatError(f"{path}: odd number of integers in query file")
    return data.reshape(-1, 2)


# -- algorithm runners: each returns (text output, comparable result) ----------

def _forest_dfs(g: Graph, args, ledger: RoundLedger):
    """DFS sequence of every spanning tree, one list per component."""
    p, lab = spanning_forest(g, "bfs_layered", ledger)
    s = args.threshold or ledger.config.local_capacity
    rng = np.random.default_rng(args.seed)
    out, branches = [], []
    for root, members in sorted(lab.groups().items()):
        sub, back = p.restrict(members, root)
        branch = ledger.fork()
        with branch.stage("dfs"):
            seq = leaf_sampling_dfs(s, sub, rng, branch, sample_constant=args.sample_constant)
        out.append(back[seq.entries].tolist())
        branches.append(branch)
    ledger.join(branches)
    return p, out


def _lca_queries(g: Graph, args, lab) -> np.ndarray:
    if args.queries:
        q = _read_pairs(args.queries)
        if ((q < 1) | (q > g.n)).any():
            raise GraphFormatError("lca query vertex out of range")
        if (lab[q[:, 0]] != lab[q[:, 1]]).any() or (q[:, 0] == q[:, 1]).any():
            raise UsageError("lca queries need two distinct vertices of one component")
        return q
    rng = np.random.default_rng(args.seed + 1)
    us = rng.integers(1, g.n + 1, 4 * max(g.n, 25))
    vs = rng.integers(1, g.n + 1, len(us))
    keep = (us != vs) & (lab[us] == lab[vs])
    return np.column_stack([us[keep], vs[keep]])[:100]


def _rmq_inputs(g: Graph, args, ledger: RoundLedger):
    if args.values:
        with open(args.values) as fh:
            values = np.array(fh.read().split(), dtype=np.int64)
        if len(values) == 0:
            raise GraphFormatError(f"{args.values}: no values")
    else:
        # depths along the DFS sequences of the spanning forest
        p, seqs = _forest_dfs(g, args, ledger)
        dep = compute_depths(p, ledger).dep
        values = dep[np.concatenate([np.asarray(s) for s in seqs])]
    n = len(values)
    t = block_width(n)
    if args.queries:
        q = _read_pairs(args.queries)
    else:
        rng = np.random.default_rng(args.seed + 2)
        if n <= t:
            raise UsageError(f"sequence of length {n} admits no range of width {t}")
        ls = rng.integers(1, n - t + 1, 100)
        rs = ls + t + (rng.random(100) * (n - ls - t + 1)).astype(np.int64)
        q = np.column_stack([ls, rs])
    return values, q


def run_algorithm(algo: str, g: Graph, args, ledger: RoundLedger):
    if algo == "bridges":
        b = bridges(g, args.seed, ledger, threshold=args.threshold,
                    sample_constant=args.sample_constant)
        return format_bridges(b), b
    if algo == "biconn":
        col = biconnectivity(g, args.seed, ledger, threshold=args.threshold,
                             sample_constant=args.sample_constant)
        return format_coloring(col), col
    if algo == "dfs":
        _, seqs = _forest_dfs(g, args, ledger)
        return "".join(" ".join(map(str, s)) + "\n" for s in seqs), seqs
    if algo == "components":
        lab = connected_components(g, ledger)
        return "".join(f"{v} {lab.label[v]}\n" for v in range(1, g.n + 1)), lab.label[1:].tolist()
    if algo == "lca":
        p, lab = spanning_forest(g, "bfs_layered", ledger)
        q = _lca_queries(g, args, lab.label)
        dep, ct, table = prepare(p, ledger)
        lca, _, _ = lca_arrays(p, dep, ct, table, q[:, 0], q[:, 1], ledger)
        rows = list(zip(q[:, 0].tolist(), q[:, 1].tolist(), lca.tolist()))
        return "".join(f"{u} {v} {a}\n" for u, v, a in rows), (p, rows)
    if algo == "rmq":
        values, q = _rmq_inputs(g, args, ledger)
        index = rmq_preprocess(values, ledger)
        mins = rmq_arrays(index, q[:, 0], q[:, 1], ledger)
        rows = list(zip(q[:, 0].tolist(), q[:, 1].tolist(), mins.tolist()))
        return "".join(f"{l} {r} {m}\n" for l, r, m in rows), (values, rows)
    raise UsageError(f"unknown algorithm {algo!r}")


def counterexample(algo: str, g: Graph, result) -> str | None:
    """Smallest disagreement with the sequential oracle, or ``None``."""
    if algo == "bridges":
        want = oracles.tarjan_bridges(g)
        diff = sorted(want ^ result)
        if diff:
            u, v = diff[0]
            side = "missing" if (u, v) in want else "unexpected"
            return f"bridge {u} {v} {side}"
    elif algo == "biconn":
        pair = oracles.first_partition_mismatch(result, oracles.hopcroft_tarjan_blocks(g))
        if pair:
            (a, b), (c, d) = pair
            return f"edges {a} {b} and {c} {d} grouped differently from the oracle"
    elif algo == "dfs":
        p, lab = spanning_forest(g, "bfs_layered")
        for (root, members), got in zip(sorted(lab.groups().items()), result):
            sub, back = p.restrict(members, root)
            want = [int(back[v]) for v in oracles.sequential_dfs(sub)]
            if got != want:
                i = next((k for k, (x, y) in enumerate(zip(got, want)) if x != y),
                         min(len(got), len(want)))
                return (f"component of {root}: position {i + 1} is "
                        f"{got[i] if i < len(got) else 'end'}, expected "
                        f"{want[i] if i < len(want) else 'end'}")
    elif algo == "components":
        want = oracles.bfs_components(g)[1:]
        for v, (x, y) in enumerate(zip(result, want), start=1):
            if x != y:
                return f"vertex {v} labelled {x}, expected {y}"
    elif algo == "lca":
        p, rows = result
        for u, v, a in rows:
            b = oracles.brute_lca(p, u, v)
            if a != b:
                return f"lca({u}, {v}) = {a}, expected {b}"
    elif algo == "rmq":
        values, rows = result
        for l, r, m in rows:
            want = oracles.brute_rmq(values.tolist(), l, r)
            if m != want:
                return f"min over [{l}, {r}] = {m}, expected {want}"
    return None


def _write(path: str | None, text: str) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _metrics(args, g: Graph, ledger: RoundLedger) -> dict:
    out = report(ledger)
    cfg = ledger.config
    out.update(algorithm=args.algo, n=g.n, m=g.m, seed=args.seed,
               local_capacity=cfg.local_capacity, machine_count=cfg.machine_count,
               delta=cfg.delta, gamma=cfg.gamma)
    return out


def _ledger(g: Graph, args) -> RoundLedger:
    if not 0.0 < args.delta < 1.0:
        raise UsageError(f"--delta must lie in (0, 1), got {args.delta}")
    if args.gamma < 0:
        raise UsageError(f"--gamma must be non-negative, got {args.gamma}")
    return RoundLedger(pipeline_config(g, args.delta, args.gamma))


def cmd_gen(args) -> int:
    kind, n, m = parse_gen(args.gen)
    try:
        g = generate(kind, n, seed=args.seed, m=m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(args.out, format_edge_list(g))
    return EXIT_OK


def cmd_run(args, verify: bool = False) -> int:
    g = load_graph(args)
    ledger = _ledger(g, args)
    text, result = run_algorithm(args.algo, g, args, ledger)
    if args.metrics:
        with open(args.metrics, "w") as fh:
            json.dump(_metrics(args, g, ledger), fh, indent=2)
            fh.write("\n")
    if not verify:
        _write(args.out, text)
        return EXIT_OK
    problem = counterexample(args.algo, g, result)
    if problem:
        print(f"MISMATCH {args.algo}: {problem}", file=sys.stderr)
        return EXIT_MISMATCH
    _write(args.out, f"OK {args.algo} n={g.n} m={g.m} rounds={ledger.rounds_charged}\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.gen not in GENERATOR_KINDS:
        raise UsageError(f"--gen expects a generator kind: {', '.join(GENERATOR_KINDS)}")
    if args.min_exp > args.max_exp:
        raise UsageError("--min-exp exceeds --max-exp")
    lines = ["n D rounds forest_rounds peak_space\n"]
    for k in range(args.min_exp, args.max_exp + 1):
        n = 2 ** k
        m = 2 * n if args.gen == "gnm" else None
        try:
            g = generate(args.gen, n, seed=args.seed, m=m)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        ledger = _ledger(g, args)
        run_algorithm(args.algo, g, args, ledger)
        forest = ledger.rounds_in_stage("spanning_forest")
        lines.append(f"{n} {diameter_exact(g)} {ledger.rounds_charged - forest} "
                     f"{forest} {ledger.peak_space}\n")
    _write(args.out, "".join(lines))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return cmd_gen(args)
        if args.command == "bench":
            return cmd_bench(args)
        return cmd_run(args, verify=args.command == "verify")
    except UsageError as exc:
        print(f"mpcgraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SamplingFailure as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (OSError, GraphFormatError) as exc:
        print(f"mpcgraph: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
