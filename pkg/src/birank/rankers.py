"""Power-method driver and the three complete ranking algorithms.

Each algorithm iterates a matrix-free step operator until the L1 distance
between successive iterates drops below ``params.tol``, and returns the
stationary distribution together with per-iteration diagnostics.  Failure
to converge within ``max_iter`` is reported in the result, not raised, so
parameter sweeps can record partial outcomes.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DisconnectedInputWarning
from .graph import BipartiteGraph, component_labels
from .operators import (
    NcdTeleport,
    Partition,
    RankParams,
    RankVector,
    bipartiterank_step,
    build_ncd_teleport,
    ncdaware_step,
    pagerank_step,
    side_partition,
)

__all__ = [
    "ConvergenceReport",
    "RankingResult",
    "power_method",
    "bipartite_rank",
    "page_rank",
    "ncdaware_rank",
]

RATE_WINDOW = 10  # residual ratios averaged for the rate estimate


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-run convergence diagnostics.

    ``residuals[k]`` is the L1 difference between iterates ``k`` and
    ``k + 1``; ``rate_estimate`` is the geometric mean of the last
    ``RATE_WINDOW`` residual ratios, which tracks the magnitude of the
    subdominant eigenvalue once the iteration reaches its asymptotic
    regime.
    """

    iterations: int
    converged: bool
    residuals: tuple
    rate_estimate: float
    runtime_s: float


@dataclass(frozen=True)
class RankingResult:
    pi: RankVector
    report: ConvergenceReport
    algorithm: str
    params: RankParams
    warnings: tuple = field(default_factory=tuple)

    def scores(self) -> np.ndarray:
        return self.pi.values


def _rate_estimate(residuals) -> float:
    ratios = [
        residuals[i + 1] / residuals[i]
        for i in range(max(0, len(residuals) - 1 - RATE_WINDOW), len(residuals) - 1)
        if residuals[i] > 0.0
    ]
    if not ratios:
        return 0.0
    return float(np.exp(np.mean(np.log(ratios))))


def power_method(
    step,
    size: int,
    tol: float = 1e-8,
    max_iter: int = 100_000,
    init=None,
    algorithm: str = "custom",
    params: RankParams | None = None,
    extra_warnings=(),
) -> RankingResult:
    """Iterate ``pi <- step(pi)`` until the L1 change drops to ``tol``.

    ``init`` defaults to the uniform distribution and must be a valid
    probability vector otherwise.  Each iterate is renormalized to unit
    sum to stop floating-point drift from accumulating.  The result's
    ``converged`` flag is False when ``max_iter`` was exhausted.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if init is None:
        pi = np.full(size, 1.0 / size)
    else:
        pi = RankVector(np.asarray(init, dtype=float)).values.copy()
        if len(pi) != size:
            raise DimensionMismatch(f"init has length {len(pi)}, expected {size}")

    residuals = []
    converged = False
    start = time.perf_counter()
    for _ in range(max_iter):
        new = np.asarray(step(pi), dtype=float)
        new = new / new.sum()
        residual = float(np.abs(new - pi).sum())
        residuals.append(residual)
        pi = new
        if residual <= tol:
            converged = True
            break
    runtime = time.perf_counter() - start

    report = ConvergenceReport(
        iterations=len(residuals),
        converged=converged,
        residuals=tuple(residuals),
        rate_estimate=_rate_estimate(residuals),
        runtime_s=runtime,
    )
    return RankingResult(
        pi=RankVector(pi),
        report=report,
        algorithm=algorithm,
        params=params if params is not None else RankParams(tol=tol, max_iter=max_iter),
        warnings=tuple(extra_warnings),
    )


def _connectivity_warnings(g: BipartiteGraph) -> tuple:
    _, sizes = component_labels(g)
    if len(sizes) == 1:
        return ()
    message = (
        f"input graph has {len(sizes)} components; the stationary "
        "distribution is only unique on the largest one"
    )
    warnings.warn(message, DisconnectedInputWarning, stacklevel=3)
    return (message,)


def bipartite_rank(
    g: BipartiteGraph, params: RankParams | None = None, init=None
) -> RankingResult:
    """Stationary distribution of the side-teleporting bipartite chain.

    On a connected graph the chain is ergodic, so the result does not
    depend on ``init`` beyond the tolerance; a disconnected input is
    accepted but recorded as a warning on the result.
    """
    params = params or RankParams()
    notes = _connectivity_warnings(g)
    sides = side_partition(g)
    return power_method(
        lambda x: bipartiterank_step(g, sides, x, params),
        g.num_vertices,
        tol=params.tol,
        max_iter=params.max_iter,
        init=init,
        algorithm="bipartite",
        params=params,
        extra_warnings=notes,
    )


def page_rank(graph, params: RankParams | None = None, init=None) -> RankingResult:
    """Stationary distribution of the uniformly teleporting chain.

    Accepts a bipartite graph (edges bidirectional) or a square directed
    adjacency.
    """
    params = params or RankParams()
    notes = _connectivity_warnings(graph) if isinstance(graph, BipartiteGraph) else ()
    size = graph.num_vertices if isinstance(graph, BipartiteGraph) else graph.n_rows
    return power_method(
        lambda x: pagerank_step(graph, x, params),
        size,
        tol=params.tol,
        max_iter=params.max_iter,
        init=init,
        algorithm="pagerank",
        params=params,
        extra_warnings=notes,
    )


def ncdaware_rank(
    graph,
    partition: Partition,
    params: RankParams | None = None,
    init=None,
    teleport: NcdTeleport | None = None,
) -> RankingResult:
    """Stationary distribution of the NCD-aware chain for an arbitrary
    block partition.  A precomputed ``teleport`` may be passed to amortize
    the block-set construction across runs."""
    params = params or RankParams()
    notes = _connectivity_warnings(graph) if isinstance(graph, BipartiteGraph) else ()
    if teleport is None:
        teleport = build_ncd_teleport(graph, partition)
    size = partition.num_vertices
    return power_method(
        lambda x: ncdaware_step(graph, teleport, x, params),
        size,
        tol=params.tol,
        max_iter=params.max_iter,
        init=init,
        algorithm="ncdaware",
        params=params,
        extra_warnings=notes,
    )
