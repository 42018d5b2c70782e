"""Graph characterization metrics: degree stats, density, mean clustering.

Exact clustering walks every neighbor pair, so it is quadratic in degree;
the trial-based estimator keeps dataset pipelines fast (2000 trials gives
roughly +-0.02 absolute error, small against the 0.2 bin width used for
dataset balancing).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .graph import EmptyGraphError, Graph


class DensityUndefinedError(ValueError):
    pass


@dataclass(frozen=True)
class GraphMetrics:
    """Feature record for one graph; clustering_mode is 'exact' or 'approx(trials=..,seed=..)'."""

    n: int
    m: int
    density: float
    max_degree: int
    min_degree: int
    mean_degree: float
    clustering: float
    clustering_mode: str


def degree_stats(g: Graph) -> tuple[int, int, float]:
    """(max_degree, min_degree, mean_degree) with mean = 2m/n."""
    if g.node_count == 0:
        raise EmptyGraphError("degree stats of empty graph")
    deg = g.degrees
    return int(deg.max()), int(deg.min()), 2.0 * g.edge_count / g.node_count


def density(g: Graph) -> float:
    """2m / (n(n-1)); undefined below two nodes."""
    n = g.node_count
    if n < 2:
        raise DensityUndefinedError(f"density undefined for n={n}")
    return 2.0 * g.edge_count / (n * (n - 1))


def clustering_exact(g: Graph) -> float:
    """Mean over all nodes of the closed-neighbor-pair fraction.

    Nodes with degree < 2 contribute 0 (the pair count is empty there).
    """
    if g.node_count == 0:
        raise EmptyGraphError("clustering of empty graph")
    total = 0.0
    for v in range(g.node_count):
        nbrs = g.neighbors(v)
        k = len(nbrs)
        if k < 2:
            continue
        closed = 0
        # pair enumeration chunked per anchor neighbor: O(k) memory, not O(k^2)
        for i in range(k - 1):
            rest = nbrs[i + 1:]
            closed += int(g.has_edges_batch(np.full(len(rest), nbrs[i]), rest).sum())
        total += closed / (k * (k - 1) / 2.0)
    return total / g.node_count


def clustering_approx(g: Graph, trials: int, seed: int) -> float:
    """Wedge-sampling estimate of the mean clustering coefficient.

    Per trial: pick a node uniformly among those with degree >= 2, pick two
    distinct neighbors uniformly, test adjacency. The closed fraction is
    scaled by the share of degree->=2 nodes so the estimator is unbiased for
    clustering_exact under the degree<2 => 0 convention.
    """
    if g.node_count == 0:
        raise EmptyGraphError("clustering of empty graph")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    deg = g.degrees
    eligible = np.flatnonzero(deg >= 2)
    if len(eligible) == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    vs = eligible[rng.integers(0, len(eligible), size=trials)]
    ks = deg[vs]
    first = rng.integers(0, ks)
    second = rng.integers(0, ks - 1)
    second = second + (second >= first)
    starts = g._indptr[vs]
    us = g._indices[starts + first]
    ws = g._indices[starts + second]
    closed = int(g.has_edges_batch(us, ws).sum())
    return (closed / trials) * (len(eligible) / g.node_count)


def compute_metrics(g: Graph, mode: str = "approx", trials: int = 2000,
                    seed: int = 0) -> GraphMetrics:
    """Aggregate all metrics for one graph; mode is 'exact' or 'approx'."""
    mx, mn, mean = degree_stats(g)
    d = density(g) if g.node_count >= 2 else 0.0
    if mode == "exact":
        c = clustering_exact(g)
        mode_str = "exact"
    elif mode == "approx":
        c = clustering_approx(g, trials, seed)
        mode_str = f"approx(trials={trials},seed={seed})"
    else:
        raise ValueError(f"unknown clustering mode {mode!r}")
    return GraphMetrics(n=g.node_count, m=g.edge_count, density=d,
                        max_degree=mx, min_degree=mn, mean_degree=mean,
                        clustering=c, clustering_mode=mode_str)


METRICS_HEADER = ["graph_id", "n", "m", "density", "max_degree", "min_degree",
                  "mean_degree", "clustering", "clustering_mode"]


def write_metrics_csv(rows: Iterable[tuple[str, GraphMetrics]], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(METRICS_HEADER)
    for graph_id, met in rows:
        w.writerow([graph_id, met.n, met.m, f"{met.density:.12g}",
                    met.max_degree, met.min_degree, f"{met.mean_degree:.12g}",
                    f"{met.clustering:.12g}", met.clustering_mode])


def read_metrics_csv(stream: IO[str]) -> list[tuple[str, GraphMetrics]]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != METRICS_HEADER:
        raise ValueError(f"unexpected metrics header: {header}")
    out = []
    for row in reader:
        if not row:
            continue
        gid, n, m, d, mx, mn, mean, c, mode = row
        out.append((gid, GraphMetrics(n=int(n), m=int(m), density=float(d),
                                      max_degree=int(mx), min_degree=int(mn),
                                      mean_degree=float(mean), clustering=float(c),
                                      clustering_mode=mode)))
    return out
