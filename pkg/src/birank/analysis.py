"""Structural and spectral verification plus a dense brute-force oracle.

The dense builders here construct transition matrices entrywise from their
definitions with plain loops, on purpose: they share no code with the
matrix-free kernels in :mod:`birank.operators`, so agreement between the
two routes is a meaningful check rather than a tautology.  Everything
dense is guarded by a size limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import kendalltau

from .errors import (
    DimensionMismatch,
    NotConverged,
    NotStochastic,
    NotStronglyConnected,
    TooLarge,
)
from .graph import BipartiteGraph, SparseRows
from .operators import (
    NcdTeleport,
    Partition,
    RankParams,
    block_teleport_matvec,
    build_ncd_teleport,
    link_matvec_right,
    side_partition,
)
from .rankers import power_method
from . import operators

__all__ = [
    "SpectralReport",
    "CouplingReport",
    "ComparisonReport",
    "verify_structural_eigenpair",
    "estimate_lambda2",
    "spectral_report",
    "h_structure",
    "p_structure",
    "is_strongly_connected",
    "period",
    "ncd_coupling",
    "compare_rankings",
    "dense_link_matrix",
    "dense_block_teleport_matrix",
    "dense_pagerank_matrix",
    "dense_bipartiterank_matrix",
    "dense_ncdaware_matrix",
    "dense_oracle",
]

DENSE_LIMIT = 512
STRUCTURE_LIMIT = 2048
SUBDOMINANT_TOLERANCE = 0.02


@dataclass(frozen=True)
class SpectralReport:
    """Outcome of the structural eigenpair and rate checks.

    The signed side-indicator vector (+1 on U, -1 on V) is an eigenvector
    of the side-teleporting chain with eigenvalue ``1 - 2 * epsilon``
    regardless of the graph; ``eigenpair_residual`` measures how exactly
    the matrix-free operators reproduce that.  ``lambda2_estimate`` is the
    empirical convergence rate, and ``structural_is_subdominant`` reports
    whether it matches ``|1 - 2 * epsilon|`` within a small threshold.
    """

    epsilon: float
    structural_eigenvalue: float
    eigenpair_residual: float
    lambda2_estimate: float | None = None
    structural_is_subdominant: bool | None = None


@dataclass(frozen=True)
class CouplingReport:
    """Maximum per-row off-block transition mass of a stochastic matrix."""

    zeta: float
    max_offblock: float
    mean_offblock: float
    partition: Partition


@dataclass(frozen=True)
class ComparisonReport:
    l1_distance: float
    linf_distance: float
    topk_jaccard: float
    kendall_tau_topk: float
    k: int


# --------------------------------------------------------------------------
# structural eigenpair and rate
# --------------------------------------------------------------------------


def signed_side_vector(g: BipartiteGraph) -> np.ndarray:
    """+1 on side U, -1 on side V."""
    return np.concatenate([np.ones(g.m), -np.ones(g.n)])


def verify_structural_eigenpair(
    g: BipartiteGraph, sides: Partition, epsilon: float, h_mode: str = "uniform"
) -> SpectralReport:
    """Check the built-in eigenpair of the side-teleporting chain.

    Applies the chain to the signed side-indicator vector through the
    matrix-free operators (the link part flips the sign of each side's
    unit mass, the teleport part preserves it) and reports the max-norm
    residual against ``(1 - 2 * epsilon)`` times the vector.
    """
    v = signed_side_vector(g)
    image = epsilon * link_matvec_right(g, v, h_mode) + (
        1.0 - epsilon
    ) * block_teleport_matvec(sides, v)
    lam = (1.0 - epsilon) - epsilon
    residual = float(np.abs(image - lam * v).max())
    return SpectralReport(
        epsilon=epsilon, structural_eigenvalue=lam, eigenpair_residual=residual
    )


def estimate_lambda2(
    g: BipartiteGraph,
    sides: Partition,
    epsilon: float,
    tol: float = 1e-10,
    h_mode: str = "uniform",
    init=None,
) -> float:
    """Empirical subdominant-eigenvalue magnitude of the side-teleporting
    chain, from the tail of the power-method residual ratios.

    Raises :class:`NotConverged` when the run does not reach ``tol``.
    """
    params = RankParams(epsilon=epsilon, tol=tol, h_mode=h_mode)
    result = power_method(
        lambda x: operators.bipartiterank_step(g, sides, x, params),
        g.num_vertices,
        tol=tol,
        max_iter=params.max_iter,
        init=init,
        algorithm="bipartite",
        params=params,
    )
    if not result.report.converged:
        raise NotConverged(
            f"power method did not reach tol={tol} in {params.max_iter} iterations"
        )
    return result.report.rate_estimate


def spectral_report(
    g: BipartiteGraph,
    epsilon: float,
    tol: float = 1e-10,
    h_mode: str = "uniform",
    subdominant_tolerance: float = SUBDOMINANT_TOLERANCE,
) -> SpectralReport:
    """Combined eigenpair residual and rate estimate for one graph."""
    sides = side_partition(g)
    base = verify_structural_eigenpair(g, sides, epsilon, h_mode)
    estimate = estimate_lambda2(g, sides, epsilon, tol, h_mode)
    return SpectralReport(
        epsilon=epsilon,
        structural_eigenvalue=base.structural_eigenvalue,
        eigenpair_residual=base.eigenpair_residual,
        lambda2_estimate=estimate,
        structural_is_subdominant=bool(
            abs(estimate - abs(1.0 - 2.0 * epsilon)) <= subdominant_tolerance
        ),
    )


# --------------------------------------------------------------------------
# transition structures, connectivity, period
# --------------------------------------------------------------------------


def h_structure(g: BipartiteGraph) -> SparseRows:
    """Directed structure of the link operator over global indices."""
    n = g.num_vertices
    row_ptr = np.concatenate([g.fwd.row_offsets, g.fwd.nnz + g.bwd.row_offsets[1:]])
    cols = np.concatenate([g.fwd.col_indices + g.m, g.bwd.col_indices])
    return SparseRows(row_ptr.astype(np.int64), cols.astype(np.int64), n)


def p_structure(g: BipartiteGraph) -> SparseRows:
    """Structure of the side-teleporting chain: link edges plus complete
    within-side edges including self-loops.  Quadratic in the side sizes,
    intended for fixtures; raises :class:`TooLarge` beyond the limit."""
    n = g.num_vertices
    if n > STRUCTURE_LIMIT:
        raise TooLarge(f"{n} vertices exceeds structure limit {STRUCTURE_LIMIT}")
    dense = np.zeros((n, n), dtype=bool)
    dense[: g.m, : g.m] = True
    dense[g.m :, g.m :] = True
    hs = h_structure(g)
    row_ids = np.repeat(np.arange(n), hs.row_lengths())
    dense[row_ids, hs.col_indices] = True
    rows, cols = np.nonzero(dense)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=offsets[1:])
    return SparseRows(offsets, cols.astype(np.int64), n)


def strongly_connected_components(structure: SparseRows) -> np.ndarray:
    """Component id per vertex (iterative Tarjan over the CSR rows)."""
    n = structure.n_rows
    if structure.n_cols != n:
        raise DimensionMismatch("transition structure must be square")
    row_ptr, cols = structure.row_offsets, structure.col_indices

    index = np.full(n, -1, dtype=np.int64)
    lowlink = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=bool)
    comp = np.full(n, -1, dtype=np.int64)
    stack: list[int] = []
    next_index = 0
    n_comps = 0

    for root in range(n):
        if index[root] != -1:
            continue
        # each frame is (vertex, position in its edge list)
        work = [(root, row_ptr[root])]
        index[root] = lowlink[root] = next_index
        next_index += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, ptr = work[-1]
            if ptr < row_ptr[v + 1]:
                work[-1] = (v, ptr + 1)
                w = cols[ptr]
                if index[w] == -1:
                    index[w] = lowlink[w] = next_index
                    next_index += 1
                    stack.append(int(w))
                    on_stack[w] = True
                    work.append((int(w), row_ptr[w]))
                elif on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    lowlink[parent] = min(lowlink[parent], lowlink[v])
                if lowlink[v] == index[v]:
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp[w] = n_comps
                        if w == v:
                            break
                    n_comps += 1
    return comp


def is_strongly_connected(structure: SparseRows) -> tuple[bool, int]:
    """Whether the directed structure is strongly connected, and its
    number of strongly connected components."""
    comp = strongly_connected_components(structure)
    count = int(comp.max()) + 1 if len(comp) else 0
    return count == 1, count


def period(structure: SparseRows) -> int:
    """Common period of a strongly connected transition structure.

    BFS from vertex 0 assigns levels; every edge (u, v) contributes
    ``|level[u] + 1 - level[v]|`` to a running gcd (zero contributions are
    skipped).  The gcd over all edges equals the gcd of all cycle lengths.
    Returns 0 for a single vertex with no edges.
    """
    connected, count = is_strongly_connected(structure)
    if not connected:
        raise NotStronglyConnected(f"structure has {count} strongly connected components")
    n = structure.n_rows
    row_ptr, cols = structure.row_offsets, structure.col_indices

    level = np.full(n, -1, dtype=np.int64)
    level[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for w in cols[row_ptr[u] : row_ptr[u + 1]]:
                if level[w] == -1:
                    level[w] = level[u] + 1
                    nxt.append(int(w))
        frontier = nxt

    g = 0
    row_ids = np.repeat(np.arange(n), structure.row_lengths())
    diffs = np.abs(level[row_ids] + 1 - level[cols])
    for d in np.unique(diffs):
        if d > 0:
            g = math.gcd(g, int(d))
            if g == 1:
                break
    return g


# --------------------------------------------------------------------------
# coupling degree
# --------------------------------------------------------------------------


def ncd_coupling(matrix: SparseRows, partition: Partition) -> CouplingReport:
    """Maximum per-row off-block mass of a row-stochastic matrix.

    Row sums must equal 1 within 1e-10, otherwise :class:`NotStochastic`.
    """
    if matrix.n_rows != matrix.n_cols:
        raise DimensionMismatch("coupling is defined for square matrices")
    if matrix.n_rows != partition.num_vertices:
        raise DimensionMismatch("partition size does not match the matrix")
    if matrix.values is None:
        raise NotStochastic("structure-only matrix has no transition values")
    n = matrix.n_rows
    row_ids = np.repeat(np.arange(n), matrix.row_lengths())
    row_sums = np.bincount(row_ids, weights=matrix.values, minlength=n)
    worst = float(np.abs(row_sums - 1.0).max()) if n else 0.0
    if worst > 1e-10:
        raise NotStochastic(f"row sums deviate from 1 by up to {worst}")

    off = partition.block_of[row_ids] != partition.block_of[matrix.col_indices]
    off_mass = np.bincount(row_ids[off], weights=matrix.values[off], minlength=n)
    return CouplingReport(
        zeta=float(off_mass.max()),
        max_offblock=float(off_mass.max()),
        mean_offblock=float(off_mass.mean()),
        partition=partition,
    )


# --------------------------------------------------------------------------
# ranking comparison
# --------------------------------------------------------------------------


def top_k_indices(scores: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest scores, ties broken by ascending index."""
    order = np.lexsort((np.arange(len(scores)), -np.asarray(scores, dtype=float)))
    return order[:k]


def compare_rankings(a, b, k: int) -> ComparisonReport:
    """Distance and ranking-agreement metrics between two score vectors.

    The top-k sets use descending score with ascending-index tie-breaks;
    the rank correlation is computed over the intersection of the two
    top-k sets (the whole vertex set when ``k`` covers it).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    if not 1 <= k <= len(a):
        raise DimensionMismatch(f"k={k} outside [1, {len(a)}]")

    top_a = top_k_indices(a, k)
    top_b = top_k_indices(b, k)
    set_a, set_b = set(top_a.tolist()), set(top_b.tolist())
    union = set_a | set_b
    common = sorted(set_a & set_b)
    jaccard = len(common) / len(union) if union else 1.0

    if len(common) >= 2:
        tau = kendalltau(a[common], b[common]).statistic
        if math.isnan(tau):
            tau = 0.0
    else:
        tau = 1.0 if common else 0.0

    return ComparisonReport(
        l1_distance=float(np.abs(a - b).sum()),
        linf_distance=float(np.abs(a - b).max()),
        topk_jaccard=float(jaccard),
        kendall_tau_topk=float(tau),
        k=k,
    )


# --------------------------------------------------------------------------
# dense oracle
# --------------------------------------------------------------------------


def _check_dense_size(n: int) -> None:
    if n > DENSE_LIMIT:
        raise TooLarge(f"{n} vertices exceeds dense limit {DENSE_LIMIT}")


def _neighbor_weights(graph, u):
    """Out-neighbors of u with raw weights, from either input kind."""
    if isinstance(graph, BipartiteGraph):
        if u < graph.m:
            cols = graph.fwd.row(u) + graph.m
            vals = graph.fwd.row_values(u)
        else:
            cols = graph.bwd.row(u - graph.m)
            vals = graph.bwd.row_values(u - graph.m)
    else:
        cols = graph.row(u)
        vals = graph.row_values(u)
    if vals is None:
        vals = np.ones(len(cols))
    return cols, vals


def _graph_size(graph) -> int:
    if isinstance(graph, BipartiteGraph):
        return graph.num_vertices
    if graph.n_rows != graph.n_cols:
        raise DimensionMismatch("directed adjacency must be square")
    return graph.n_rows


def dense_link_matrix(graph, h_mode: str = "uniform") -> np.ndarray:
    """Row-normalized adjacency built entrywise from its definition.
    Dangling rows stay zero."""
    n = _graph_size(graph)
    _check_dense_size(n)
    out = np.zeros((n, n))
    for u in range(n):
        cols, vals = _neighbor_weights(graph, u)
        if len(cols) == 0:
            continue
        if h_mode == "uniform":
            for c in cols:
                out[u, c] = 1.0 / len(cols)
        else:
            total = vals.sum()
            for c, w in zip(cols, vals):
                out[u, c] = w / total
    return out


def dense_block_teleport_matrix(partition: Partition) -> np.ndarray:
    """Within-block uniform teleport, entry ``1 / |block(u)|`` when u and v
    share a block."""
    n = partition.num_vertices
    _check_dense_size(n)
    out = np.zeros((n, n))
    for u in range(n):
        members = np.nonzero(partition.block_of == partition.block_of[u])[0]
        for v in members:
            out[u, v] = 1.0 / len(members)
    return out


def dense_pagerank_matrix(graph, params: RankParams) -> np.ndarray:
    n = _graph_size(graph)
    _check_dense_size(n)
    h = dense_link_matrix(graph, params.h_mode)
    s = h.copy()
    for u in range(n):
        if s[u].sum() == 0.0:
            s[u, :] = 1.0 / n
    return params.epsilon * s + (1.0 - params.epsilon) / n


def dense_bipartiterank_matrix(
    g: BipartiteGraph, sides: Partition, params: RankParams
) -> np.ndarray:
    h = dense_link_matrix(g, params.h_mode)
    m = dense_block_teleport_matrix(sides)
    return params.epsilon * h + (1.0 - params.epsilon) * m


def dense_ncdaware_matrix(graph, partition: Partition, params: RankParams) -> np.ndarray:
    """NCD-aware chain built from the block-set definition: vertex u
    teleports to block b with weight ``1 / N_u`` when b is u's block or an
    out-neighbor's block, spread uniformly over b's members."""
    n = _graph_size(graph)
    _check_dense_size(n)
    h = dense_link_matrix(graph, params.h_mode)
    s = h.copy()
    for u in range(n):
        if s[u].sum() == 0.0:
            s[u, :] = 1.0 / n

    block_members = [
        np.nonzero(partition.block_of == b)[0] for b in range(partition.num_blocks)
    ]
    m = np.zeros((n, n))
    for u in range(n):
        cols, _ = _neighbor_weights(graph, u)
        reach = {int(partition.block_of[u])}
        for c in cols:
            reach.add(int(partition.block_of[c]))
        for b in reach:
            members = block_members[b]
            for v in members:
                m[u, v] = 1.0 / (len(reach) * len(members))

    eta, mu = params.eta, params.mu
    return eta * s + mu * m + (1.0 - eta - mu) / n


def dense_power_iteration(matrix: np.ndarray, tol: float = 1e-13, max_iter: int = 500_000):
    n = matrix.shape[0]
    pi = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        new = pi @ matrix
        new = new / new.sum()
        residual = float(np.abs(new - pi).sum())
        pi = new
        if residual <= tol:
            return pi
    raise NotConverged(f"dense power iteration did not reach {tol}")


def dense_oracle(
    graph,
    algorithm: str,
    params: RankParams | None = None,
    partition: Partition | None = None,
    tol: float = 1e-13,
) -> np.ndarray:
    """Ground-truth stationary distribution from a fully materialized
    transition matrix, for inputs of at most ``DENSE_LIMIT`` vertices."""
    params = params or RankParams()
    if algorithm == "bipartite":
        sides = partition if partition is not None else side_partition(graph)
        matrix = dense_bipartiterank_matrix(graph, sides, params)
    elif algorithm == "pagerank":
        matrix = dense_pagerank_matrix(graph, params)
    elif algorithm == "ncdaware":
        if partition is None:
            raise ValueError("ncdaware oracle needs a partition")
        matrix = dense_ncdaware_matrix(graph, partition, params)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return dense_power_iteration(matrix, tol=tol)
