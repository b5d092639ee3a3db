"""Command-line surface: stats, clean, rank, sweep, compare, spectral, synth.

All machine-readable outputs carry ``"schema": "birank/1"`` and stable key
order.  Exit codes: 0 on success, 2 on input errors, 3 when a ranking did
not converge (unless ``--allow-partial``).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import compare_rankings, spectral_report, top_k_indices
from .errors import BirankError, DimensionMismatch, NotConverged
from .graph import BipartiteGraph, build_graph
from .ingest import (
    EdgeList,
    clean_edge_list,
    compute_stats,
    drop_isolated,
    parse_konect,
    parse_matrix_market,
    parse_tsv,
)
from .operators import Partition, RankParams
from .rankers import RankingResult, bipartite_rank, ncdaware_rank, page_rank
from .synth import SyntheticSpec, generate_bipartite

SCHEMA = "birank/1"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3


def _read_edge_list(path: str, fmt: str, one_based: bool) -> EdgeList:
    data = Path(path).read_bytes()
    if fmt == "konect":
        return parse_konect(data)
    if fmt == "mm":
        return parse_matrix_market(data)
    if fmt == "tsv":
        return parse_tsv(data, one_based=one_based)
    raise ValueError(f"unknown format {fmt!r}")


def _load_clean_graph(args) -> BipartiteGraph:
    """Parse, drop isolated vertices, and build; leaves components alone."""
    edges = _read_edge_list(args.input, args.format, args.one_based)
    m, n = edges.sizes()
    compact, _ = drop_isolated(edges, m, n)
    return build_graph(compact.entries, compact.declared_m, compact.declared_n)


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2)
    if path is None or path == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n", encoding="utf-8")


def _json_scalar(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _ranking_payload(result: RankingResult) -> dict:
    params = result.params
    return {
        "schema": SCHEMA,
        "algorithm": result.algorithm,
        "epsilon": params.epsilon,
        "eta": params.eta if result.algorithm == "ncdaware" else None,
        "mu": params.mu if result.algorithm == "ncdaware" else None,
        "tol": params.tol,
        "iterations": result.report.iterations,
        "converged": result.report.converged,
        "residuals": [float(r) for r in result.report.residuals],
        "rate_estimate": result.report.rate_estimate,
        "runtime_ms": result.report.runtime_s * 1e3,
        "warnings": list(result.warnings),
    }


def _write_scores_csv(path: str, g: BipartiteGraph, scores: np.ndarray, top_k) -> None:
    k = len(scores) if top_k is None else min(top_k, len(scores))
    order = top_k_indices(scores, k)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["rank", "global_index", "side", "label", "score"])
        for rank, idx in enumerate(order, start=1):
            side = "u" if idx < g.m else "v"
            writer.writerow([rank, int(idx), side, g.label(int(idx)), repr(float(scores[idx]))])


def _read_scores_csv(path: str) -> dict:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        return {int(row["global_index"]): float(row["score"]) for row in reader}


def _load_partition(path: str, num_vertices: int) -> Partition:
    """One block id per line, line number = global vertex index."""
    ids = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        ids.append(int(line))
    if len(ids) != num_vertices:
        raise DimensionMismatch(
            f"partition file lists {len(ids)} vertices, graph has {num_vertices}"
        )
    return Partition.from_block_ids(np.asarray(ids))


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_stats(args) -> int:
    edges = _read_edge_list(args.input, args.format, args.one_based)
    m, n = edges.sizes()
    compact, clean = drop_isolated(edges, m, n)
    g = build_graph(compact.entries, compact.declared_m, compact.declared_n)
    stats = compute_stats(g)

    # report the file as given: isolated vertices are singleton components
    isolated = clean.removed_isolated
    iso_u = m - g.m
    iso_v = n - g.n
    component_sizes = sorted(
        list(stats.component_sizes) + [1] * isolated, reverse=True
    )
    payload = {
        "schema": SCHEMA,
        "rows": m,
        "cols": n,
        "nnz": stats.nnz,
        "density": stats.nnz / (m * n),
        "connected": len(component_sizes) == 1,
        "component_sizes": component_sizes,
        "largest_fraction": component_sizes[0] / (m + n),
        "isolated_vertices": isolated,
    }
    _write_json(args.json, payload)

    if args.hist_csv:
        with open(args.hist_csv, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["degree", "count", "side"])
            if iso_u:
                writer.writerow([0, iso_u, "u"])
            for degree, count in sorted(stats.degree_histogram_u.items()):
                writer.writerow([degree, count, "u"])
            if iso_v:
                writer.writerow([0, iso_v, "v"])
            for degree, count in sorted(stats.degree_histogram_v.items()):
                writer.writerow([degree, count, "v"])
    return EXIT_OK


def cmd_clean(args) -> int:
    edges = _read_edge_list(args.input, args.format, args.one_based)
    m, n = edges.sizes()
    graph, report = clean_edge_list(edges, m, n)

    with open(args.out_edges, "w", encoding="utf-8") as handle:
        for u in range(graph.m):
            cols = graph.fwd.row(u)
            vals = graph.fwd.row_values(u)
            for j, v in enumerate(cols):
                if vals is None:
                    handle.write(f"{u}\t{int(v)}\n")
                else:
                    handle.write(f"{u}\t{int(v)}\t{_format_weight(vals[j])}\n")

    payload = {
        "schema": SCHEMA,
        "removed_isolated": report.removed_isolated,
        "kept_component_vertices": report.kept_component_vertices,
        "retained_fraction": report.retained_fraction,
        "kept_rows": graph.m,
        "kept_cols": graph.n,
        "index_map": [int(x) for x in report.index_map],
    }
    _write_json(args.report, payload)
    return EXIT_OK


def _format_weight(w: float) -> str:
    return repr(int(w)) if float(w).is_integer() else repr(float(w))


def _run_algorithm(g: BipartiteGraph, args) -> RankingResult:
    params = RankParams(
        epsilon=args.epsilon,
        eta=args.eta,
        mu=args.mu,
        tol=args.tol,
        max_iter=args.max_iter,
        h_mode=args.h_mode,
    )
    if args.algorithm == "bipartite":
        return bipartite_rank(g, params)
    if args.algorithm == "pagerank":
        return page_rank(g, params)
    partition = (
        _load_partition(args.partition, g.num_vertices)
        if args.partition
        else None
    )
    if partition is None:
        raise BirankError("ncdaware needs --partition FILE")
    return ncdaware_rank(g, partition, params)


def cmd_rank(args) -> int:
    g = _load_clean_graph(args)
    result = _run_algorithm(g, args)
    _write_scores_csv(args.scores_csv, g, result.scores(), args.top_k)
    _write_json(args.report, _ranking_payload(result))
    if not result.report.converged and not args.allow_partial:
        print(
            f"not converged after {result.report.iterations} iterations "
            f"(last residual {result.report.residuals[-1]:.3e})",
            file=sys.stderr,
        )
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_sweep(args) -> int:
    g = _load_clean_graph(args)
    dataset = Path(args.input).stem
    epsilons = [float(tok) for tok in args.epsilons.split(",") if tok]
    algorithms = [tok.strip() for tok in args.algorithms.split(",") if tok.strip()]
    bad = [a for a in algorithms if a not in ("bipartite", "pagerank")]
    if bad:
        raise BirankError(f"sweep supports bipartite and pagerank, not {bad[0]!r}")

    with open(args.out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["dataset", "algorithm", "epsilon", "iterations", "converged"])
        for algorithm in algorithms:
            for eps in epsilons:
                params = RankParams(
                    epsilon=eps, tol=args.tol, max_iter=args.max_iter, h_mode=args.h_mode
                )
                if algorithm == "bipartite":
                    result = bipartite_rank(g, params)
                else:
                    result = page_rank(g, params)
                writer.writerow(
                    [
                        dataset,
                        algorithm,
                        eps,
                        result.report.iterations,
                        result.report.converged,
                    ]
                )
    return EXIT_OK


def cmd_compare(args) -> int:
    a = _read_scores_csv(args.a)
    b = _read_scores_csv(args.b)
    if set(a) != set(b):
        raise DimensionMismatch(
            f"vertex sets differ ({len(a)} vs {len(b)} entries); "
            "compare full, untruncated score files"
        )
    order = sorted(a)
    vec_a = np.array([a[i] for i in order])
    vec_b = np.array([b[i] for i in order])
    report = compare_rankings(vec_a, vec_b, args.k)
    _write_json(
        args.out,
        {
            "schema": SCHEMA,
            "k": report.k,
            "l1_distance": report.l1_distance,
            "linf_distance": report.linf_distance,
            "topk_jaccard": report.topk_jaccard,
            "kendall_tau_topk": report.kendall_tau_topk,
        },
    )
    return EXIT_OK


def cmd_spectral(args) -> int:
    g = _load_clean_graph(args)
    stats = compute_stats(g)
    if not stats.connected:
        raise BirankError(
            "spectral checks need a connected graph; run 'clean' first"
        )
    report = spectral_report(g, args.epsilon, tol=args.tol, h_mode=args.h_mode)
    _write_json(
        args.out,
        {
            "schema": SCHEMA,
            "epsilon": report.epsilon,
            "structural_eigenvalue": report.structural_eigenvalue,
            "eigenpair_residual": report.eigenpair_residual,
            "lambda2_estimate": report.lambda2_estimate,
            "structural_is_subdominant": report.structural_is_subdominant,
        },
    )
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = SyntheticSpec(
        m=args.m, n=args.n, mean_degree=args.mean_degree, gamma=args.gamma, seed=args.seed
    )
    graph, report = generate_bipartite(spec)
    with open(args.out, "w", encoding="utf-8") as handle:
        for u in range(graph.m):
            for v in graph.fwd.row(u):
                handle.write(f"{u}\t{int(v)}\n")
    _write_json(
        args.report,
        {
            "schema": SCHEMA,
            "m": spec.m,
            "n": spec.n,
            "seed": spec.seed,
            "mean_degree_target": spec.mean_degree,
            "gamma_target": spec.gamma,
            "kept_m": report.kept_m,
            "kept_n": report.kept_n,
            "nnz": report.nnz,
            "mean_degree_realized": report.realized_mean_degree,
            "gamma_realized": report.realized_gamma,
            "retained_fraction": report.retained_fraction,
        },
    )
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _add_input_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="edge list file")
    parser.add_argument(
        "--format", choices=("konect", "mm", "tsv"), default="tsv", help="input format"
    )
    parser.add_argument(
        "--one-based", action="store_true", help="TSV ids start at 1 instead of 0"
    )


def _add_rank_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--epsilon", type=float, default=0.85)
    parser.add_argument("--eta", type=float, default=0.85)
    parser.add_argument("--mu", type=float, default=0.1)
    parser.add_argument("--tol", type=float, default=1e-8)
    parser.add_argument("--max-iter", type=int, default=100_000)
    parser.add_argument("--h-mode", choices=("uniform", "weighted"), default="uniform")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="birank",
        description="Ranking toolkit for bipartite graphs with side-restricted teleportation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="graph statistics as JSON (+ degree histogram CSV)")
    _add_input_options(p)
    p.add_argument("--json", default="-", help="stats JSON path, '-' for stdout")
    p.add_argument("--hist-csv", default=None, help="degree histogram CSV path")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("clean", help="drop isolated vertices, keep the giant component")
    _add_input_options(p)
    p.add_argument("--out-edges", required=True, help="cleaned 0-based TSV output")
    p.add_argument("--report", default="-", help="clean report JSON path")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("rank", help="compute a ranking vector")
    _add_input_options(p)
    p.add_argument(
        "--algorithm", choices=("bipartite", "pagerank", "ncdaware"), default="bipartite"
    )
    _add_rank_params(p)
    p.add_argument("--partition", default=None, help="block id per line (ncdaware)")
    p.add_argument("--scores-csv", required=True, help="ranking CSV output")
    p.add_argument("--report", default="-", help="convergence JSON path")
    p.add_argument("--top-k", type=int, default=None, help="truncate the CSV to k rows")
    p.add_argument(
        "--allow-partial",
        action="store_true",
        help="exit 0 even when the iteration did not converge",
    )
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("sweep", help="iteration counts over a teleport-factor grid")
    _add_input_options(p)
    p.add_argument("--epsilons", default="0.8,0.85,0.9,0.95")
    p.add_argument("--algorithms", default="bipartite,pagerank")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--h-mode", choices=("uniform", "weighted"), default="uniform")
    p.add_argument("--out", required=True, help="sweep CSV output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="distance and agreement of two score files")
    p.add_argument("--a", required=True, help="first ranking CSV")
    p.add_argument("--b", required=True, help="second ranking CSV")
    p.add_argument("--k", type=int, required=True, help="top-k cut for set metrics")
    p.add_argument("--out", default="-", help="comparison JSON path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("spectral", help="structural eigenpair and rate estimate")
    _add_input_options(p)
    p.add_argument("--epsilon", type=float, default=0.85)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--h-mode", choices=("uniform", "weighted"), default="uniform")
    p.add_argument("--out", default="-", help="spectral JSON path")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("synth", help="generate a synthetic bipartite graph")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mean-degree", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="edge TSV output")
    p.add_argument("--report", default="-", help="generation report JSON path")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (BirankError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
