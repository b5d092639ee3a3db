"""Matrix-free linear operators for the ranking chains.

All operators act on probability row vectors laid out in the global vertex
order (side U first, then side V).  Nothing here materializes a dense
matrix: one step over the link structure costs O(nnz) and one step over a
block teleport costs O(N).

Three families are provided:

* the row-stochastic link operator built from the adjacency (out-edges
  normalized by degree, or by weight sums in ``weighted`` mode);
* the side/block teleport operator that spreads a vertex's mass uniformly
  over its own block, used by the bipartite ranking chain and expressible
  as a rank-``K`` product of two sparse factors;
* the neighborhood-block teleport used by the NCD-aware chain, where a
  vertex teleports into the blocks spanned by itself and its out-links.

Operators accept either a :class:`~birank.graph.BipartiteGraph` (edges are
treated as bidirectional) or a square :class:`~birank.graph.SparseRows`
interpreted as a directed out-adjacency, so the PageRank and NCD-aware
chains also run on general directed structures.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyBlock
from .graph import BipartiteGraph, SparseRows

__all__ = [
    "RankVector",
    "RankParams",
    "Partition",
    "side_partition",
    "link_matvec",
    "link_matvec_right",
    "block_teleport_matvec",
    "pagerank_step",
    "bipartiterank_step",
    "NcdTeleport",
    "build_ncd_teleport",
    "ncd_teleport_matvec",
    "ncdaware_step",
]

H_MODES = ("uniform", "weighted")


@dataclass(frozen=True)
class RankVector:
    """A probability distribution over all vertices.

    Entries are non-negative and sum to one within 1e-10.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1:
            raise DimensionMismatch("rank vector must be one-dimensional")
        if np.any(vals < 0):
            raise ValueError("rank vector has negative entries")
        if abs(vals.sum() - 1.0) > 1e-10:
            raise ValueError(f"rank vector sums to {vals.sum()!r}, not 1")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)

    @classmethod
    def uniform(cls, size: int) -> "RankVector":
        return cls(np.full(size, 1.0 / size))


@dataclass(frozen=True)
class RankParams:
    """Parameters shared by the ranking chains.

    ``epsilon`` is the probability of following a link rather than
    teleporting (0.85 by default).  The ergodicity guarantees of the full
    algorithms need ``0 < epsilon < 1``; the step operators themselves
    remain well defined at the endpoints, so the closed interval is
    accepted.  ``eta`` and ``mu`` are the link and block-teleport weights
    of the NCD-aware chain, with ``eta > 0``, ``mu >= 0`` and
    ``eta + mu < 1``.  ``tol`` is the L1 threshold on successive iterates.
    """

    epsilon: float = 0.85
    eta: float = 0.85
    mu: float = 0.0
    tol: float = 1e-8
    max_iter: int = 100_000
    h_mode: str = "uniform"

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon {self.epsilon} outside [0, 1]")
        if self.eta <= 0.0 or self.mu < 0.0 or self.eta + self.mu >= 1.0:
            raise ValueError(
                f"need eta > 0, mu >= 0 and eta + mu < 1, got eta={self.eta}, mu={self.mu}"
            )
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.h_mode not in H_MODES:
            raise ValueError(f"h_mode must be one of {H_MODES}")


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of every vertex to exactly one block."""

    block_of: np.ndarray
    block_sizes: np.ndarray

    def __post_init__(self):
        block_of = np.asarray(self.block_of, dtype=np.int64)
        object.__setattr__(self, "block_of", block_of)
        object.__setattr__(
            self, "block_sizes", np.asarray(self.block_sizes, dtype=np.int64)
        )

    @property
    def num_vertices(self) -> int:
        return len(self.block_of)

    @property
    def num_blocks(self) -> int:
        return len(self.block_sizes)

    @classmethod
    def from_block_ids(cls, block_of, num_blocks: int | None = None) -> "Partition":
        block_of = np.asarray(block_of, dtype=np.int64)
        if len(block_of) == 0:
            raise DimensionMismatch("partition over zero vertices")
        if block_of.min() < 0:
            raise ValueError("negative block id")
        k = int(block_of.max()) + 1 if num_blocks is None else num_blocks
        if block_of.max() >= k:
            raise ValueError("block id outside declared range")
        return cls(block_of, np.bincount(block_of, minlength=k))


def side_partition(g: BipartiteGraph) -> Partition:
    """Two-block partition: block 0 is side U, block 1 is side V."""
    block_of = np.concatenate(
        [np.zeros(g.m, dtype=np.int64), np.ones(g.n, dtype=np.int64)]
    )
    return Partition(block_of, np.array([g.m, g.n], dtype=np.int64))


# --------------------------------------------------------------------------
# normalized out-edge view, shared by every link operator
# --------------------------------------------------------------------------

# per-object memo of the flattened, row-normalized adjacency; keyed by
# identity so immutable graphs pay the O(nnz) setup once
_VIEW_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


@dataclass(frozen=True, eq=False)
class _LinkView:
    n: int
    row_ptr: np.ndarray
    cols: np.ndarray
    norm_values: dict = field(default_factory=dict)
    raw_values: np.ndarray | None = None
    dangling: np.ndarray | None = None  # indices of zero-out-degree rows


def _link_view(graph) -> _LinkView:
    view = _VIEW_CACHE.get(graph)
    if view is not None:
        return view
    if isinstance(graph, BipartiteGraph):
        fwd, bwd = graph.fwd, graph.bwd
        row_ptr = np.concatenate(
            [fwd.row_offsets, fwd.nnz + bwd.row_offsets[1:]]
        ).astype(np.int64)
        cols = np.concatenate([fwd.col_indices + graph.m, bwd.col_indices])
        raw = None
        if graph.weights_present:
            raw = np.concatenate([fwd.values, bwd.values])
        dangling = np.zeros(0, dtype=np.int64)  # construction forbids degree 0
        view = _LinkView(graph.num_vertices, row_ptr, cols, {}, raw, dangling)
    elif isinstance(graph, SparseRows):
        if graph.n_rows != graph.n_cols:
            raise DimensionMismatch(
                f"directed adjacency must be square, got {graph.n_rows}x{graph.n_cols}"
            )
        lengths = graph.row_lengths()
        view = _LinkView(
            graph.n_rows,
            graph.row_offsets,
            graph.col_indices,
            {},
            graph.values,
            np.nonzero(lengths == 0)[0].astype(np.int64),
        )
    else:
        raise TypeError(f"expected BipartiteGraph or SparseRows, got {type(graph)!r}")
    _VIEW_CACHE[graph] = view
    return view


def _normalized(view: _LinkView, h_mode: str) -> np.ndarray:
    if h_mode not in H_MODES:
        raise ValueError(f"h_mode must be one of {H_MODES}")
    if h_mode == "weighted" and view.raw_values is None:
        h_mode = "uniform"  # unweighted input: both modes coincide
    vals = view.norm_values.get(h_mode)
    if vals is not None:
        return vals
    lengths = np.diff(view.row_ptr)
    if h_mode == "uniform":
        with np.errstate(divide="ignore"):
            inv = np.where(lengths > 0, 1.0 / lengths, 0.0)
        vals = np.repeat(inv, lengths)
    else:
        sums = np.add.reduceat(view.raw_values, view.row_ptr[:-1], dtype=float)
        sums = np.where(lengths > 0, sums, 1.0)
        vals = view.raw_values / np.repeat(sums, lengths)
    view.norm_values[h_mode] = vals
    return vals


def _row_ids(view: _LinkView) -> np.ndarray:
    ids = view.norm_values.get("_row_ids")
    if ids is None:
        ids = np.repeat(np.arange(view.n, dtype=np.int64), np.diff(view.row_ptr))
        view.norm_values["_row_ids"] = ids
    return ids


def _as_pi(pi, size: int) -> np.ndarray:
    arr = np.asarray(pi, dtype=float)
    if arr.shape != (size,):
        raise DimensionMismatch(f"expected vector of length {size}, got shape {arr.shape}")
    return arr


def link_matvec(graph, pi, h_mode: str = "uniform") -> np.ndarray:
    """Left product of ``pi`` with the row-stochastic link operator.

    Entry ``j`` of the result collects ``pi[i] / d_i`` (or the weighted
    analogue) over all in-neighbors ``i`` of ``j``.  Rows without
    out-edges contribute nothing; callers that need stochastic output add
    the dangling correction themselves (see :func:`pagerank_step`).
    """
    view = _link_view(graph)
    x = _as_pi(pi, view.n)
    contrib = np.repeat(x, np.diff(view.row_ptr)) * _normalized(view, h_mode)
    return np.bincount(view.cols, weights=contrib, minlength=view.n)


def link_matvec_right(graph, x, h_mode: str = "uniform") -> np.ndarray:
    """Right product: entry ``i`` is the ``H``-weighted mean of ``x`` over
    the out-neighbors of ``i``.  Used for eigenpair residual checks."""
    view = _link_view(graph)
    vec = _as_pi(x, view.n)
    contrib = vec[view.cols] * _normalized(view, h_mode)
    return np.bincount(_row_ids(view), weights=contrib, minlength=view.n)


def block_teleport_matvec(partition: Partition, pi) -> np.ndarray:
    """Left product with the within-block uniform teleport operator.

    For every vertex ``j`` in block ``b`` the output is the mean of ``pi``
    over ``b``: the operator factorizes as (scatter to blocks) times
    (broadcast back), so the product costs O(N) and never materializes
    the N-by-N matrix.  The operator is symmetric, hence left and right
    products coincide.
    """
    x = _as_pi(pi, partition.num_vertices)
    sums = np.bincount(partition.block_of, weights=x, minlength=partition.num_blocks)
    sizes = np.where(partition.block_sizes > 0, partition.block_sizes, 1)
    return (sums / sizes)[partition.block_of]


def pagerank_step(graph, pi, params: RankParams) -> np.ndarray:
    """One power step of the classic teleporting chain.

    Computes ``epsilon * (pi @ H)`` plus the uniform teleport term
    ``(epsilon * dangling_mass + 1 - epsilon) / N``; dangling rows only
    exist for directed inputs, cleaned bipartite graphs have none.
    """
    view = _link_view(graph)
    x = _as_pi(pi, view.n)
    eps = params.epsilon
    out = eps * link_matvec(graph, x, params.h_mode)
    dangling_mass = float(x[view.dangling].sum()) if len(view.dangling) else 0.0
    out += (eps * dangling_mass + (1.0 - eps)) / view.n
    return out


def bipartiterank_step(g: BipartiteGraph, sides: Partition, pi, params: RankParams) -> np.ndarray:
    """One power step of the side-teleporting bipartite chain:
    ``epsilon * (pi @ H) + (1 - epsilon) * (pi @ M)`` with ``M`` the
    within-side uniform teleport."""
    x = _as_pi(pi, g.num_vertices)
    eps = params.epsilon
    return eps * link_matvec(g, x, params.h_mode) + (1.0 - eps) * block_teleport_matvec(
        sides, x
    )


# --------------------------------------------------------------------------
# NCD-aware teleport
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NcdTeleport:
    """Factorized neighborhood-block teleport.

    ``block_sets`` stores, in CSR layout (``offsets`` / ``blocks``), the
    sorted set of blocks reachable from each vertex: its own block plus
    the blocks of its out-neighbors.  Row ``u`` of the left factor puts
    weight ``1 / N_u`` on each of those ``N_u`` blocks; row ``k`` of the
    right factor spreads block ``k`` uniformly over its members.
    """

    offsets: np.ndarray
    blocks: np.ndarray
    partition: Partition

    def block_counts(self) -> np.ndarray:
        """``N_u``: number of distinct blocks reachable from each vertex."""
        return np.diff(self.offsets)

    def block_set(self, u: int) -> np.ndarray:
        return self.blocks[self.offsets[u] : self.offsets[u + 1]]

    def dense_left_factor(self) -> np.ndarray:
        """Dense N x K left factor (1/N_u on each reachable block)."""
        counts = self.block_counts()
        n, k = len(self.offsets) - 1, self.partition.num_blocks
        out = np.zeros((n, k))
        rows = np.repeat(np.arange(n), counts)
        out[rows, self.blocks] = 1.0 / np.repeat(counts, counts)
        return out

    def dense_right_factor(self) -> np.ndarray:
        """Dense K x N right factor (uniform over each block's members)."""
        part = self.partition
        out = np.zeros((part.num_blocks, part.num_vertices))
        out[part.block_of, np.arange(part.num_vertices)] = 1.0 / part.block_sizes[
            part.block_of
        ]
        return out


def build_ncd_teleport(graph, partition: Partition) -> NcdTeleport:
    """Compute each vertex's reachable block set and return the factorized
    teleport operator.

    For a bipartite graph, edges count in both directions; for a directed
    adjacency, out-edges only.  A vertex with no out-edges reaches just
    its own block.  Raises :class:`EmptyBlock` if the partition declares a
    block with no members.
    """
    view = _link_view(graph)
    if partition.num_vertices != view.n:
        raise DimensionMismatch(
            f"partition covers {partition.num_vertices} vertices, graph has {view.n}"
        )
    if np.any(partition.block_sizes == 0):
        empty = int(np.nonzero(partition.block_sizes == 0)[0][0])
        raise EmptyBlock(f"block {empty} has no members")

    block_of = partition.block_of
    offsets = [0]
    blocks: list[np.ndarray] = []
    for u in range(view.n):
        nbrs = view.cols[view.row_ptr[u] : view.row_ptr[u + 1]]
        reach = np.unique(np.concatenate([block_of[nbrs], block_of[u : u + 1]]))
        blocks.append(reach)
        offsets.append(offsets[-1] + len(reach))
    return NcdTeleport(
        np.asarray(offsets, dtype=np.int64),
        np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.int64),
        partition,
    )


def ncd_teleport_matvec(teleport: NcdTeleport, pi) -> np.ndarray:
    """Left product with the neighborhood-block teleport, via its two
    sparse factors: scatter ``pi[u] / N_u`` onto reachable blocks, then
    spread each block total uniformly over its members."""
    part = teleport.partition
    x = _as_pi(pi, part.num_vertices)
    counts = teleport.block_counts()
    per_block = np.bincount(
        teleport.blocks,
        weights=np.repeat(x / counts, counts),
        minlength=part.num_blocks,
    )
    return (per_block / part.block_sizes)[part.block_of]


def ncdaware_step(graph, teleport: NcdTeleport, pi, params: RankParams) -> np.ndarray:
    """One power step of the NCD-aware chain:
    ``eta * (pi @ S) + mu * (pi @ M) + (1 - eta - mu) * uniform`` with the
    dangling part of ``S`` folded into the uniform term."""
    view = _link_view(graph)
    x = _as_pi(pi, view.n)
    eta, mu = params.eta, params.mu
    out = eta * link_matvec(graph, x, params.h_mode)
    out += mu * ncd_teleport_matvec(teleport, x)
    dangling_mass = float(x[view.dangling].sum()) if len(view.dangling) else 0.0
    out += (eta * dangling_mass + (1.0 - eta - mu)) / view.n
    return out
