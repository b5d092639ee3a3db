"""Reproducible synthetic bipartite graphs with heavy-tailed degrees.

The generator draws a power-law degree sequence for each side (the count
of vertices with degree k falls off like ``k ** -gamma``), scales it to a
target mean degree, equalizes the two sides' edge-stub totals, and joins
the stubs by a configuration-model pairing.  Duplicate pairs are repaired
by re-shuffling the colliding stubs for a few rounds before any leftovers
collapse, after which isolated vertices are dropped and the largest
connected component is kept.  Everything is driven by one seeded
generator, so a fixed seed reproduces the graph byte for byte.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DisconnectedAfterCleaningWarning
from .graph import BipartiteGraph
from .ingest import EdgeList, clean_edge_list

__all__ = [
    "SyntheticSpec",
    "GenerationReport",
    "sample_powerlaw_degrees",
    "fit_powerlaw_exponent",
    "generate_bipartite",
]

REPAIR_ROUNDS = 40


@dataclass(frozen=True)
class SyntheticSpec:
    """Generation request: side sizes, graph-wide mean degree
    (``2 * edges / (m + n)``), degree exponent and seed."""

    m: int
    n: int
    mean_degree: float
    gamma: float
    seed: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("both sides need at least one vertex")
        if self.gamma <= 1.0:
            raise ValueError("gamma must exceed 1")
        if self.mean_degree <= 0:
            raise ValueError("mean degree must be positive")


@dataclass(frozen=True)
class GenerationReport:
    kept_m: int
    kept_n: int
    nnz: int
    realized_mean_degree: float
    realized_gamma: float
    retained_fraction: float


def sample_powerlaw_degrees(
    rng: np.random.Generator, count: int, gamma: float, cap: int, target_sum: int
) -> np.ndarray:
    """Degrees in ``[1, cap]`` with tail ``k ** -gamma``, adjusted so they
    sum to ``target_sum``.

    Sampling inverts the CDF of the truncated discrete law, then scales
    multiplicatively toward the requested mean (a log-axis shift, which
    preserves the slope) and finally nudges random entries by one until
    the stub total matches.
    """
    ks = np.arange(1, cap + 1, dtype=float)
    cdf = np.cumsum(ks ** -gamma)
    cdf /= cdf[-1]
    base = np.searchsorted(cdf, rng.random(count)) + 1

    natural_mean = float(np.dot(np.arange(1, cap + 1), np.diff(cdf, prepend=0.0)))
    scale = (target_sum / count) / natural_mean
    degrees = np.clip(np.round(base * scale).astype(np.int64), 1, cap)

    diff = int(target_sum - degrees.sum())
    while diff != 0:
        i = int(rng.integers(count))
        if diff > 0 and degrees[i] < cap:
            degrees[i] += 1
            diff -= 1
        elif diff < 0 and degrees[i] > 1:
            degrees[i] -= 1
            diff += 1
    return degrees


def fit_powerlaw_exponent(degrees, bin_factor: float = 2.0) -> float:
    """Exponent estimate from the slope of the log-binned histogram.

    Counts are accumulated in geometric bins and divided by the bin
    widths; a least-squares line through the occupied bins on log-log
    axes gives the (negated) exponent.  Raw per-degree bins are not used
    because their sparse tail flattens the fit badly.
    """
    degrees = np.asarray(degrees, dtype=float)
    degrees = degrees[degrees >= 1]
    edges = [1.0]
    while edges[-1] <= degrees.max():
        edges.append(edges[-1] * bin_factor)
    edges = np.asarray(edges)
    counts, _ = np.histogram(degrees, bins=edges)
    centers = np.sqrt(edges[:-1] * edges[1:])
    widths = np.diff(edges)
    occupied = counts > 0
    if occupied.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(
        np.log(centers[occupied]), np.log(counts[occupied] / widths[occupied]), 1
    )
    return -float(slope)


def _pair_stubs(rng, deg_u, deg_v, n) -> np.ndarray:
    """Configuration pairing with collision repair; returns unique pairs."""
    stubs_u = np.repeat(np.arange(len(deg_u), dtype=np.int64), deg_u)
    stubs_v = np.repeat(np.arange(len(deg_v), dtype=np.int64), deg_v)
    rng.shuffle(stubs_v)
    for _ in range(REPAIR_ROUNDS):
        key = stubs_u * n + stubs_v
        order = np.argsort(key, kind="stable")
        dup_sorted = np.concatenate([[False], key[order][1:] == key[order][:-1]])
        if not dup_sorted.any():
            break
        duplicates = order[dup_sorted]
        partners = rng.integers(0, len(stubs_v), size=len(duplicates))
        for a, b in zip(duplicates, partners):
            stubs_v[a], stubs_v[b] = stubs_v[b], stubs_v[a]
    return np.unique(np.stack([stubs_u, stubs_v], axis=1), axis=0)


def generate_bipartite(spec: SyntheticSpec) -> tuple[BipartiteGraph, GenerationReport]:
    """Generate, clean, and report a synthetic bipartite graph.

    The returned graph is connected (the giant component of the raw
    pairing).  When cleaning dropped vertices, a
    :class:`DisconnectedAfterCleaningWarning` is emitted because the
    output is then smaller than the requested sizes.
    """
    rng = np.random.default_rng(spec.seed)
    target_edges = int(round(spec.mean_degree * (spec.m + spec.n) / 2))
    # every vertex keeps degree >= 1 and the graph stays simple
    target_edges = min(max(target_edges, spec.m, spec.n, 1), spec.m * spec.n)
    deg_u = sample_powerlaw_degrees(rng, spec.m, spec.gamma, spec.n, target_edges)
    deg_v = sample_powerlaw_degrees(rng, spec.n, spec.gamma, spec.m, target_edges)
    pairs = _pair_stubs(rng, deg_u, deg_v, spec.n)

    entries = [(int(u), int(v), None) for u, v in pairs]
    graph, clean = clean_edge_list(EdgeList(entries), spec.m, spec.n)
    if clean.retained_fraction < 1.0:
        warnings.warn(
            f"raw pairing was disconnected; kept the largest component "
            f"({clean.kept_component_vertices} of {spec.m + spec.n} vertices)",
            DisconnectedAfterCleaningWarning,
            stacklevel=2,
        )

    degrees = graph.degrees()
    report = GenerationReport(
        kept_m=graph.m,
        kept_n=graph.n,
        nnz=graph.nnz,
        realized_mean_degree=2.0 * graph.nnz / graph.num_vertices,
        realized_gamma=fit_powerlaw_exponent(degrees),
        retained_fraction=clean.retained_fraction,
    )
    return graph, report
