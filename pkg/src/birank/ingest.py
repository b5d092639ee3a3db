"""Edge-list parsing, graph cleaning, and descriptive statistics.

Three text formats are supported:

* the KONECT ``out.*`` layout: ``%`` comment lines, then whitespace
  separated ``u v [weight [timestamp]]`` records with 1-based ids and a
  separate id namespace per side (timestamps are discarded);
* MatrixMarket coordinate files (``real``, ``integer`` or ``pattern``
  fields, ``general`` symmetry only);
* plain TSV ``u v [weight]`` records, 0- or 1-based by flag.

Cleaning removes degree-zero vertices and can restrict a graph to its
largest connected component; both steps report an index map from old to
new global indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AllVerticesIsolated,
    EmptyFile,
    MalformedLine,
    NnzMismatch,
    UnsupportedHeader,
)
from .graph import BipartiteGraph, SparseRows, build_graph, component_labels

__all__ = [
    "EdgeList",
    "GraphStats",
    "CleanReport",
    "parse_konect",
    "parse_matrix_market",
    "parse_tsv",
    "drop_isolated",
    "giant_component",
    "clean_edge_list",
    "compute_stats",
]

DROPPED = -1  # index_map marker for removed vertices


@dataclass
class EdgeList:
    """Parsed edges with 0-based per-side ids and optional weights."""

    entries: list
    declared_m: int | None = None
    declared_n: int | None = None

    def sizes(self, m: int | None = None, n: int | None = None) -> tuple[int, int]:
        """Explicit sizes if given, else the declared/inferred ones."""
        m = m if m is not None else self.declared_m
        n = n if n is not None else self.declared_n
        if m is None or n is None:
            raise ValueError("edge list has no declared sizes; pass m and n")
        return m, n


@dataclass(frozen=True)
class GraphStats:
    rows: int
    cols: int
    nnz: int
    density: float
    connected: bool
    component_sizes: tuple
    largest_fraction: float
    degree_histogram_u: dict
    degree_histogram_v: dict


@dataclass(frozen=True)
class CleanReport:
    """What a cleaning step removed and how indices moved.

    ``index_map[old_global_index]`` is the new global index, or
    ``DROPPED`` (-1) for removed vertices.
    """

    removed_isolated: int
    kept_component_vertices: int
    retained_fraction: float
    index_map: np.ndarray


def _lines(source):
    """Iterate decoded lines from bytes, str, a path, or a file object."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    elif hasattr(source, "read"):
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    else:
        with open(source, "rb") as handle:
            text = handle.read().decode("utf-8")
    return text.splitlines()


def _parse_id(token: str, line_no: int, one_based: bool) -> int:
    try:
        value = int(token)
    except ValueError:
        raise MalformedLine(line_no, f"bad vertex id {token!r}") from None
    value -= 1 if one_based else 0
    if value < 0:
        raise MalformedLine(line_no, f"vertex id {token!r} below the valid range")
    return value


def _parse_weight(token: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise MalformedLine(line_no, f"bad weight {token!r}") from None


def _finish(entries: list, what: str) -> EdgeList:
    if not entries:
        raise EmptyFile(f"no data records in {what}")
    m = max(u for u, _, _ in entries) + 1
    n = max(v for _, v, _ in entries) + 1
    return EdgeList(entries, declared_m=m, declared_n=n)


def parse_konect(source) -> EdgeList:
    """Parse the KONECT bipartite ``out.*`` text layout.

    Records are ``u v [weight [timestamp]]`` with 1-based ids; lines
    starting with ``%`` are comments.  Timestamps are discarded and the
    declared sizes are inferred from the largest ids seen.
    """
    entries = []
    for line_no, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        fields = line.split()
        if len(fields) < 2 or len(fields) > 4:
            raise MalformedLine(line_no, f"expected 2-4 fields, got {len(fields)}")
        u = _parse_id(fields[0], line_no, one_based=True)
        v = _parse_id(fields[1], line_no, one_based=True)
        w = _parse_weight(fields[2], line_no) if len(fields) >= 3 else None
        entries.append((u, v, w))
    return _finish(entries, "KONECT input")


def parse_matrix_market(source) -> EdgeList:
    """Parse a MatrixMarket coordinate file.

    Only ``matrix coordinate (real|integer|pattern) general`` headers are
    accepted; the dimension line fixes the declared sizes and the entry
    count must match it exactly.
    """
    lines = _lines(source)
    if not lines:
        raise EmptyFile("empty MatrixMarket input")
    header = lines[0].strip().split()
    if len(header) != 5 or header[0].lower() != "%%matrixmarket":
        raise UnsupportedHeader(f"not a MatrixMarket header: {lines[0]!r}")
    _, obj, fmt, kind, symmetry = (token.lower() for token in header)
    if obj != "matrix" or fmt != "coordinate":
        raise UnsupportedHeader(f"unsupported object/format {obj!r}/{fmt!r}")
    if kind not in ("real", "integer", "pattern"):
        raise UnsupportedHeader(f"unsupported field {kind!r}")
    if symmetry != "general":
        raise UnsupportedHeader(f"unsupported symmetry {symmetry!r}")
    pattern = kind == "pattern"

    dims = None
    entries = []
    declared_nnz = 0
    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        fields = line.split()
        if dims is None:
            if len(fields) != 3:
                raise MalformedLine(line_no, "dimension line must be 'rows cols nnz'")
            try:
                dims = tuple(int(t) for t in fields)
            except ValueError:
                raise MalformedLine(line_no, f"bad dimension line {line!r}") from None
            declared_nnz = dims[2]
            continue
        expected = 2 if pattern else 3
        if len(fields) != expected:
            raise MalformedLine(line_no, f"expected {expected} fields, got {len(fields)}")
        u = _parse_id(fields[0], line_no, one_based=True)
        v = _parse_id(fields[1], line_no, one_based=True)
        w = _parse_weight(fields[2], line_no) if not pattern else None
        entries.append((u, v, w))

    if dims is None:
        raise EmptyFile("MatrixMarket input has no dimension line")
    if len(entries) != declared_nnz:
        raise NnzMismatch(f"header declares {declared_nnz} entries, found {len(entries)}")
    if not entries:
        raise EmptyFile("MatrixMarket input has no entries")
    return EdgeList(entries, declared_m=dims[0], declared_n=dims[1])


def parse_tsv(source, one_based: bool = False) -> EdgeList:
    """Parse generic whitespace-separated ``u v [weight]`` records.

    Lines starting with ``#`` or ``%`` are comments.  Ids are 0-based
    unless ``one_based`` is set.
    """
    entries = []
    for line_no, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", "%")):
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise MalformedLine(line_no, f"expected 2-3 fields, got {len(fields)}")
        u = _parse_id(fields[0], line_no, one_based)
        v = _parse_id(fields[1], line_no, one_based)
        w = _parse_weight(fields[2], line_no) if len(fields) == 3 else None
        entries.append((u, v, w))
    return _finish(entries, "TSV input")


def drop_isolated(edges: EdgeList, m: int, n: int) -> tuple[EdgeList, CleanReport]:
    """Remove degree-zero vertices and compact the id spaces.

    Idempotent: a second pass on the output is the identity.  Raises
    :class:`AllVerticesIsolated` when no edges remain.
    """
    if not edges.entries:
        raise AllVerticesIsolated("edge list is empty")
    count = len(edges.entries)
    us = np.fromiter((e[0] for e in edges.entries), dtype=np.int64, count=count)
    vs = np.fromiter((e[1] for e in edges.entries), dtype=np.int64, count=count)
    deg_u = np.bincount(us, minlength=m)
    deg_v = np.bincount(vs, minlength=n)

    keep_u = np.nonzero(deg_u > 0)[0]
    keep_v = np.nonzero(deg_v > 0)[0]
    new_u = np.full(m, DROPPED, dtype=np.int64)
    new_v = np.full(n, DROPPED, dtype=np.int64)
    new_u[keep_u] = np.arange(len(keep_u))
    new_v[keep_v] = np.arange(len(keep_v))

    remapped = [
        (int(new_u[u]), int(new_v[v]), w) for (u, v, w) in edges.entries
    ]
    index_map = np.concatenate(
        [new_u, np.where(new_v >= 0, new_v + len(keep_u), DROPPED)]
    )
    kept = len(keep_u) + len(keep_v)
    report = CleanReport(
        removed_isolated=(m + n) - kept,
        kept_component_vertices=kept,
        retained_fraction=kept / (m + n),
        index_map=index_map,
    )
    return EdgeList(remapped, declared_m=len(keep_u), declared_n=len(keep_v)), report


def giant_component(g: BipartiteGraph) -> tuple[BipartiteGraph, CleanReport]:
    """Restrict a graph to its largest connected component.

    Equal-size components tie-break on the smallest global vertex index,
    which is the order :func:`component_labels` numbers them in.  A
    connected input is returned unchanged with retained fraction 1.
    """
    labels, sizes = component_labels(g)
    if len(sizes) == 1:
        identity = np.arange(g.num_vertices, dtype=np.int64)
        return g, CleanReport(0, g.num_vertices, 1.0, identity)

    winner = int(np.argmax(sizes))  # argmax keeps the first (lowest-index) maximum
    keep = labels == winner
    keep_u = np.nonzero(keep[: g.m])[0]
    keep_v = np.nonzero(keep[g.m :])[0]
    new_u = np.full(g.m, DROPPED, dtype=np.int64)
    new_v = np.full(g.n, DROPPED, dtype=np.int64)
    new_u[keep_u] = np.arange(len(keep_u))
    new_v[keep_v] = np.arange(len(keep_v))

    # edges never straddle components, so filtering on the U endpoint is enough
    row_ids = np.repeat(np.arange(g.m), g.fwd.row_lengths())
    mask = keep[row_ids]
    us = new_u[row_ids[mask]]
    vs = new_v[g.fwd.col_indices[mask]]
    vals = g.fwd.values[mask] if g.fwd.values is not None else None
    fwd = SparseRows.from_edges(us, vs, len(keep_u), len(keep_v), vals)
    sub = BipartiteGraph(
        m=len(keep_u),
        n=len(keep_v),
        fwd=fwd,
        bwd=fwd.transpose(),
        weights_present=g.weights_present,
        labels_u=tuple(g.labels_u[i] for i in keep_u) if g.labels_u else None,
        labels_v=tuple(g.labels_v[i] for i in keep_v) if g.labels_v else None,
    )
    index_map = np.concatenate(
        [new_u, np.where(new_v >= 0, new_v + len(keep_u), DROPPED)]
    )
    kept = len(keep_u) + len(keep_v)
    report = CleanReport(
        removed_isolated=0,
        kept_component_vertices=kept,
        retained_fraction=kept / g.num_vertices,
        index_map=index_map,
    )
    return sub, report


def clean_edge_list(
    edges: EdgeList, m: int | None = None, n: int | None = None
) -> tuple[BipartiteGraph, CleanReport]:
    """Full cleaning pipeline: drop isolated vertices, build the graph,
    keep the giant component.  The report composes both steps, with the
    retained fraction measured against the original ``m + n``."""
    m, n = edges.sizes(m, n)
    compact, first = drop_isolated(edges, m, n)
    g = build_graph(compact.entries, compact.declared_m, compact.declared_n)
    giant, second = giant_component(g)

    index_map = first.index_map.copy()
    alive = index_map >= 0
    index_map[alive] = second.index_map[index_map[alive]]
    kept = second.kept_component_vertices
    report = CleanReport(
        removed_isolated=first.removed_isolated,
        kept_component_vertices=kept,
        retained_fraction=kept / (m + n),
        index_map=index_map,
    )
    return giant, report


def compute_stats(g: BipartiteGraph) -> GraphStats:
    """Size, density, component and degree-distribution summary.

    Histograms map degree to vertex count, one per side, ready for
    log-log plotting (no binning is applied here).
    """
    _, sizes = component_labels(g)
    ordered = tuple(sorted(sizes, reverse=True))
    deg_u = g.fwd.row_lengths()
    deg_v = g.bwd.row_lengths()

    def histogram(degrees) -> dict:
        values, counts = np.unique(degrees, return_counts=True)
        return {int(d): int(c) for d, c in zip(values, counts)}

    return GraphStats(
        rows=g.m,
        cols=g.n,
        nnz=g.nnz,
        density=g.nnz / (g.m * g.n),
        connected=len(ordered) == 1,
        component_sizes=ordered,
        largest_fraction=ordered[0] / g.num_vertices,
        degree_histogram_u=histogram(deg_u),
        degree_histogram_v=histogram(deg_v),
    )
