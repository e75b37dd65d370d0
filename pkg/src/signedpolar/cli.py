"""Command-line entry points.

Subcommands: ``query`` (single seeded search), ``synth`` (write a synthetic
graph plus ground truth), ``experiment`` (parameter-grid campaign to CSV),
``oracle-check`` (brute-force bound suite on small random instances), and
``bench`` (timing smoke test at scale).

Exit codes: 0 success, 1 usage error, 2 data error, 3 solver/verification
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .graph import GraphError
from .harness import (
    ExperimentConfig,
    QueryConfig,
    experiment_csv,
    query,
    run_experiment,
    sample_seed_pairs,
)
from .io import IngestError, ingest, write_edge_list, write_ground_truth
from .metrics import MetricError
from .oracle import OracleError, verify_approximation, verify_relaxation
from .spectral import SolverError
from .synth import (
    SynthError,
    SynthParams,
    generate,
    generate_scaled,
    random_signed_graph,
    reference_average_degree,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SOLVER = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _labels_arg(text: str) -> tuple:
    return tuple(t for t in text.split(",") if t)


def _floats_arg(text: str) -> tuple:
    return tuple(float(t) for t in text.split(",") if t)


def _ints_arg(text: str) -> tuple:
    return tuple(int(t) for t in text.split(",") if t)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="signedpolar", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("query", help="run one seeded search on a graph file")
    q.add_argument("--graph", required=True)
    q.add_argument("--directed", action="store_true")
    q.add_argument("--s1", type=_labels_arg, default=())
    q.add_argument("--s2", type=_labels_arg, default=())
    q.add_argument("--kappa", type=float, default=0.9)
    q.add_argument("--k", type=float, default=None,
                   help="volume budget; sets kappa = sqrt(1/k)")
    q.add_argument("--eps", type=float, default=1e-3)
    q.add_argument("--cg-tol", type=float, default=1e-8)
    q.add_argument("--emit-vector", action="store_true")
    q.add_argument("--out", default=None)

    s = sub.add_parser("synth", help="write a synthetic polarized graph")
    s.add_argument("--eta", type=float, default=0.05)
    s.add_argument("--pairs", type=int, default=8)
    s.add_argument("--band-size", type=int, default=20)
    s.add_argument("--outliers", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True,
                   help="prefix; writes <out>.edges and <out>.truth.json")

    e = sub.add_parser("experiment", help="parameter-grid campaign to CSV")
    e.add_argument("--eta", type=_floats_arg, default=(0.05,))
    e.add_argument("--seed-sizes", type=_ints_arg, default=(2,))
    e.add_argument("--kappas", type=_floats_arg, default=(0.9,))
    e.add_argument("--pairs", type=int, default=8)
    e.add_argument("--band-size", type=int, default=20)
    e.add_argument("--outliers", type=int, default=0)
    e.add_argument("--graphs", type=int, default=10)
    e.add_argument("--queries", type=int, default=10)
    e.add_argument("--eps", type=float, default=1e-3)
    e.add_argument("--cg-tol", type=float, default=1e-8)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--timings", action="store_true",
                   help="append wall-time columns (breaks byte determinism)")
    e.add_argument("--out", default=None)

    o = sub.add_parser("oracle-check",
                       help="verify the provable bounds on small instances")
    o.add_argument("--instances", type=int, default=30)
    o.add_argument("--max-nodes", type=int, default=12)
    o.add_argument("--seed", type=int, default=0)

    b = sub.add_parser("bench", help="timing smoke test on a synthetic graph")
    b.add_argument("--nodes", type=int, default=100_000)
    b.add_argument("--avg-degree", type=float, default=None)
    b.add_argument("--eta", type=float, default=0.05)
    b.add_argument("--kappa", type=float, default=0.9)
    b.add_argument("--cg-tol", type=float, default=1e-8)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--doubling", action="store_true",
                   help="also time the rounding step at twice the node count")
    return p


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_query(args) -> int:
    kappa = args.kappa if args.k is None else float(np.sqrt(1.0 / args.k))
    try:
        config = QueryConfig(
            graph_path=args.graph,
            s1_labels=args.s1,
            s2_labels=args.s2,
            kappa=kappa,
            eps=args.eps,
            cg_tol=args.cg_tol,
            output_path=args.out,
            emit_vector=args.emit_vector,
        )
    except ValueError as exc:
        raise SolverError(str(exc)) from exc
    g = ingest(config.graph_path, directed=args.directed)
    doc = query(
        g,
        config.s1_labels,
        config.s2_labels,
        kappa=config.kappa,
        eps=config.eps,
        cg_tol=config.cg_tol,
        emit_vector=config.emit_vector,
    )
    _emit(json.dumps(doc, indent=2) + "\n", config.output_path)
    return EXIT_OK


def _cmd_synth(args) -> int:
    g, truth = generate(
        SynthParams(
            pairs=args.pairs,
            band_size=args.band_size,
            outliers=args.outliers,
            eta=args.eta,
            rng_seed=args.seed,
        )
    )
    write_edge_list(f"{args.out}.edges", g)
    write_ground_truth(f"{args.out}.truth.json", truth)
    sys.stderr.write(
        f"wrote {g.node_count} nodes, {g.edge_count} edges to {args.out}.edges\n"
    )
    return EXIT_OK


def _cmd_experiment(args) -> int:
    config = ExperimentConfig(
        etas=args.eta,
        seed_sizes=args.seed_sizes,
        kappas=args.kappas,
        pairs=args.pairs,
        band_size=args.band_size,
        outliers=args.outliers,
        graphs_per_config=args.graphs,
        queries_per_graph=args.queries,
        eps=args.eps,
        cg_tol=args.cg_tol,
        rng_seed=args.seed,
        include_timings=args.timings,
    )
    rows = run_experiment(config)
    _emit(experiment_csv(rows, include_timings=args.timings), args.out)
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    violations = 0
    for i in range(args.instances):
        n = int(rng.integers(6, args.max_nodes + 1))
        g = random_signed_graph(
            n, extra_edges=int(rng.integers(n, 3 * n)),
            rng_seed=int(rng.integers(2**63)),
        )
        nodes = rng.permutation(n)
        s1, s2 = {int(nodes[0])}, {int(nodes[1])}
        k = float(rng.choice([2.0, 3.0, 4.0]))
        rel = verify_relaxation(g, s1, s2, k)
        app = verify_approximation(g, s1, s2, k)
        ok = rel.ok and app.ok
        violations += 0 if ok else 1
        print(
            f"instance {i:3d} n={n:2d} k={k:.0f} "
            f"lambda={rel.lambda_value:.4f} h={rel.h_value:.4f} "
            f"beta_out={app.beta_out:.4f} "
            f"{'ok' if ok else 'VIOLATION'}"
        )
    print(f"{args.instances - violations}/{args.instances} instances satisfied all bounds")
    if violations:
        raise SolverError(f"{violations} bound violations")
    return EXIT_OK


def _bench_once(n, avg_degree, eta, kappa, cg_tol, seed, solve: bool):
    g, _ = generate_scaled(n, avg_degree, eta=eta, rng_seed=seed)
    if solve:
        pair = sample_seed_pairs(g, t=0.0, count=1, rng_seed=seed)[0]
        doc = query(g, [pair[0]], [pair[1]], kappa=kappa, cg_tol=cg_tol)
        return g, doc["timings"]["solve_ms"], doc["timings"]["round_ms"]
    from .sweep import fast_sweep

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(g.node_count)  # dense vector: worst-case sweep
    best = np.inf
    for _ in range(3):
        t0 = time.perf_counter()
        fast_sweep(g, x)
        best = min(best, (time.perf_counter() - t0) * 1e3)
    return g, None, best


def _cmd_bench(args) -> int:
    avg_degree = args.avg_degree
    if avg_degree is None:
        ref = SynthParams(pairs=8, band_size=20, eta=args.eta, rng_seed=0)
        avg_degree = reference_average_degree(ref)
    g, solve_ms, round_ms = _bench_once(
        args.nodes, avg_degree, args.eta, args.kappa, args.cg_tol, args.seed,
        solve=True,
    )
    doc = {
        "nodes": g.node_count,
        "edges": g.edge_count,
        "avg_degree": 2 * g.edge_count / g.node_count,
        "solve_ms": solve_ms,
        "round_ms": round_ms,
        "total_ms": solve_ms + round_ms,
    }
    if args.doubling:
        g2, _, round2 = _bench_once(
            2 * args.nodes, avg_degree, args.eta, args.kappa, args.cg_tol,
            args.seed + 1, solve=False,
        )
        doc["doubled_nodes"] = g2.node_count
        doc["doubled_round_ms"] = round2
        doc["round_scaling"] = round2 / round_ms if round_ms else float("nan")
    print(json.dumps(doc, indent=2))
    return EXIT_OK


_COMMANDS = {
    "query": _cmd_query,
    "synth": _cmd_synth,
    "experiment": _cmd_experiment,
    "oracle-check": _cmd_oracle_check,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (IngestError, GraphError, SynthError, MetricError, FileNotFoundError) as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EXIT_DATA
    except (SolverError, OracleError) as exc:
        sys.stderr.write(f"solver error: {exc}\n")
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
