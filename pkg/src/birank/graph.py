"""Immutable sparse bipartite graph with both traversal directions.

Vertices use a single global index space: side U occupies ``[0, m)`` and
side V occupies ``[m, m + n)``.  Edges only connect U to V and are stored
twice, once per direction, in compressed sparse row form.  Probability
vectors produced elsewhere in the package follow the same global order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptySide,
    IndexOutOfRange,
    IsolatedVertex,
    NonPositiveWeight,
)

__all__ = ["SparseRows", "BipartiteGraph", "build_graph", "component_labels"]


@dataclass(frozen=True, eq=False)
class SparseRows:
    """Compressed sparse row storage.

    ``row_offsets`` has length ``rows + 1``; the column indices of row ``i``
    are ``col_indices[row_offsets[i]:row_offsets[i + 1]]``, strictly
    increasing within each row.  ``values`` is ``None`` for unweighted
    structures (all entries implicitly 1).
    """

    row_offsets: np.ndarray
    col_indices: np.ndarray
    n_cols: int
    values: np.ndarray | None = None

    @property
    def n_rows(self) -> int:
        return len(self.row_offsets) - 1

    @property
    def nnz(self) -> int:
        return int(self.row_offsets[-1])

    def row(self, i: int) -> np.ndarray:
        """Column indices of row ``i``."""
        return self.col_indices[self.row_offsets[i] : self.row_offsets[i + 1]]

    def row_values(self, i: int) -> np.ndarray | None:
        if self.values is None:
            return None
        return self.values[self.row_offsets[i] : self.row_offsets[i + 1]]

    def row_lengths(self) -> np.ndarray:
        return np.diff(self.row_offsets)

    def transpose(self) -> "SparseRows":
        """Swap rows and columns.

        A stable sort on the column keys keeps rows ascending inside each
        output row, so the result is canonical and a double transpose
        reproduces the original arrays bit for bit.
        """
        offsets = np.zeros(self.n_cols + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.col_indices, minlength=self.n_cols), out=offsets[1:])
        order = np.argsort(self.col_indices, kind="stable")
        row_ids = np.repeat(np.arange(self.n_rows, dtype=np.int64), self.row_lengths())
        vals = None if self.values is None else self.values[order]
        return SparseRows(offsets, row_ids[order], self.n_rows, vals)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols))
        row_ids = np.repeat(np.arange(self.n_rows), self.row_lengths())
        out[row_ids, self.col_indices] = 1.0 if self.values is None else self.values
        return out

    @classmethod
    def from_dense(cls, matrix) -> "SparseRows":
        matrix = np.asarray(matrix, dtype=float)
        rows, cols = np.nonzero(matrix)
        offsets = np.zeros(matrix.shape[0] + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=matrix.shape[0]), out=offsets[1:])
        return cls(offsets, cols.astype(np.int64), matrix.shape[1], matrix[rows, cols])

    @classmethod
    def from_edges(
        cls, rows, cols, n_rows: int, n_cols: int, values=None
    ) -> "SparseRows":
        """Canonicalize an edge soup: sort by (row, col), merge duplicates.

        Duplicate coordinates sum their weights; with ``values=None`` they
        collapse to a single entry.
        """
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        vals = None if values is None else np.asarray(values, dtype=float)[order]
        if len(rows):
            keep = np.concatenate([[True], (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])])
        else:
            keep = np.zeros(0, dtype=bool)
        if vals is not None:
            group = np.cumsum(keep) - 1
            vals = np.bincount(group, weights=vals, minlength=int(keep.sum()))
        rows, cols = rows[keep], cols[keep]
        offsets = np.zeros(n_rows + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n_rows), out=offsets[1:])
        return cls(offsets, cols, n_cols, vals)


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Two-sided graph, immutable after construction.

    ``fwd`` holds the U-to-V adjacency (columns are V-local indices in
    ``[0, n)``); ``bwd`` holds the transposed V-to-U adjacency.  Both carry
    the same edge multiset.  Every vertex has degree at least one; inputs
    with isolated vertices must be cleaned first (see ``ingest``).
    """

    m: int
    n: int
    fwd: SparseRows
    bwd: SparseRows
    weights_present: bool
    labels_u: tuple | None = None
    labels_v: tuple | None = None

    @property
    def num_vertices(self) -> int:
        return self.m + self.n

    @property
    def nnz(self) -> int:
        return self.fwd.nnz

    def side(self, v: int) -> int:
        """0 for U-vertices, 1 for V-vertices."""
        self._check_index(v)
        return 0 if v < self.m else 1

    def degree(self, v: int) -> int:
        """Unweighted neighbor count of global vertex ``v``."""
        self._check_index(v)
        if v < self.m:
            return int(self.fwd.row_offsets[v + 1] - self.fwd.row_offsets[v])
        w = v - self.m
        return int(self.bwd.row_offsets[w + 1] - self.bwd.row_offsets[w])

    def degrees(self) -> np.ndarray:
        """Degrees of all vertices in global order."""
        return np.concatenate([self.fwd.row_lengths(), self.bwd.row_lengths()])

    def neighbors(self, v: int) -> np.ndarray:
        """Global indices of the neighbors of ``v``."""
        self._check_index(v)
        if v < self.m:
            return self.fwd.row(v) + self.m
        return self.bwd.row(v - self.m)

    def label(self, v: int) -> str:
        """External label of ``v``; per-side positional default."""
        if v < self.m:
            return str(self.labels_u[v]) if self.labels_u else f"u{v}"
        w = v - self.m
        return str(self.labels_v[w]) if self.labels_v else f"v{w}"

    def _check_index(self, v: int) -> None:
        if not 0 <= v < self.num_vertices:
            raise IndexOutOfRange(f"vertex {v} outside [0, {self.num_vertices})")


def build_graph(edges, m: int, n: int, labels_u=None, labels_v=None) -> BipartiteGraph:
    """Build a canonical :class:`BipartiteGraph` from 0-based edge tuples.

    ``edges`` is an iterable of ``(u, v)`` or ``(u, v, weight)`` tuples with
    ``0 <= u < m`` and ``0 <= v < n``; a weight of ``None`` means
    unweighted.  If any edge carries a weight the graph is weighted and
    weightless entries default to 1.  Duplicate pairs sum their weights
    (or collapse when unweighted).

    Raises :class:`EmptySide`, :class:`IndexOutOfRange`,
    :class:`NonPositiveWeight` or :class:`IsolatedVertex`.
    """
    if m <= 0 or n <= 0:
        raise EmptySide(f"both sides must be non-empty, got m={m}, n={n}")

    us, vs, ws = [], [], []
    weights_present = False
    for edge in edges:
        if len(edge) == 2:
            u, v, w = edge[0], edge[1], None
        else:
            u, v, w = edge
        if not (0 <= u < m):
            raise IndexOutOfRange(f"u index {u} outside [0, {m})")
        if not (0 <= v < n):
            raise IndexOutOfRange(f"v index {v} outside [0, {n})")
        if w is not None:
            if w <= 0:
                raise NonPositiveWeight(f"edge ({u}, {v}) has weight {w}")
            weights_present = True
        us.append(u)
        vs.append(v)
        ws.append(w)

    values = None
    if weights_present:
        values = [1.0 if w is None else float(w) for w in ws]
    fwd = SparseRows.from_edges(us, vs, m, n, values)
    bwd = fwd.transpose()

    deg_u = fwd.row_lengths()
    deg_v = bwd.row_lengths()
    for arr, offset in ((deg_u, 0), (deg_v, m)):
        dead = np.nonzero(arr == 0)[0]
        if len(dead):
            raise IsolatedVertex(
                f"vertex {int(dead[0]) + offset} has degree 0; clean the input first"
            )

    if labels_u is not None and len(labels_u) != m:
        raise DimensionMismatch(f"expected {m} U labels, got {len(labels_u)}")
    if labels_v is not None and len(labels_v) != n:
        raise DimensionMismatch(f"expected {n} V labels, got {len(labels_v)}")

    return BipartiteGraph(
        m=m,
        n=n,
        fwd=fwd,
        bwd=bwd,
        weights_present=weights_present,
        labels_u=tuple(labels_u) if labels_u is not None else None,
        labels_v=tuple(labels_v) if labels_v is not None else None,
    )


def component_labels(g: BipartiteGraph) -> tuple[np.ndarray, list[int]]:
    """Connected-component label per global vertex, plus component sizes.

    Components are numbered in order of their smallest global vertex, so
    labels (and any tie-breaking on them) are deterministic.
    """
    N = g.num_vertices
    labels = np.full(N, -1, dtype=np.int64)
    sizes: list[int] = []
    for start in range(N):
        if labels[start] != -1:
            continue
        comp = len(sizes)
        labels[start] = comp
        stack = [start]
        count = 0
        while stack:
            x = stack.pop()
            count += 1
            for y in g.neighbors(x):
                if labels[y] == -1:
                    labels[y] = comp
                    stack.append(int(y))
        sizes.append(count)
    return labels, sizes
