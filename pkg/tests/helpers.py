"""Shared test utilities: independent brute-force metric oracles and
synthetic metric-record samplers for oracle-data experiments."""

import math

import numpy as np

from gnnperf.graph import Graph
from gnnperf.measurement import (GnnModelKind, OracleParams, Representation,
                                 TimingRecord, oracle_time)
from gnnperf.metrics import GraphMetrics


def random_graph(n: int, edge_prob: float, seed: int) -> Graph:
    """Erdos-Renyi-style graph; node ids dense, isolated nodes possible."""
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, 1)
    mask = rng.random(len(iu)) < edge_prob
    return Graph(n, np.column_stack([iu[mask], iv[mask]]))


def brute_force_metrics(node_count: int, edge_pairs) -> dict:
    """Dense-matrix recomputation, independent of the package's adjacency code.

    Degrees by row sums, density by the definition, clustering via diag(A^3).
    """
    A = np.zeros((node_count, node_count))
    for u, v in edge_pairs:
        A[u, v] = A[v, u] = 1.0
    deg = A.sum(axis=1)
    m = A.sum() / 2.0
    out = {
        "max_degree": int(deg.max()),
        "min_degree": int(deg.min()),
        "mean_degree": 2.0 * m / node_count,
        "density": 2.0 * m / (node_count * (node_count - 1))
        if node_count >= 2 else 0.0,
    }
    triangles = np.diag(A @ A @ A) / 2.0
    pairs = deg * (deg - 1) / 2.0
    local = np.divide(triangles, pairs, out=np.zeros(node_count),
                      where=pairs > 0)
    out["clustering"] = float(local.mean())
    return out


def min_nodes_for_edges(m: int) -> int:
    """Smallest n with n(n-1)/2 >= m (density <= 1)."""
    return math.ceil((1.0 + math.sqrt(1.0 + 8.0 * m)) / 2.0)


def sample_metric_records(count: int, seed: int,
                          m_range=(1e3, 1e6), ratio_range=(1.0, 32.0),
                          h_factor_range=(2.0, 30.0)) -> list:
    """Plausible (realizable) metric records spanning the pipeline's range.

    Edge count log-uniform, node count from a log-uniform edge/node ratio
    (clamped so density stays <= 1), max degree log-uniform in a window
    proportional to the mean degree.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(count):
        m = int(round(np.exp(rng.uniform(np.log(m_range[0]), np.log(m_range[1])))))
        ratio = np.exp(rng.uniform(*np.log(ratio_range)))
        n = max(min_nodes_for_edges(m), int(round(m / ratio)))
        mean_deg = 2.0 * m / n
        h_lo = h_factor_range[0] * mean_deg
        h_hi = max(h_lo * 1.01, min(n - 1.0, h_factor_range[1] * mean_deg))
        h = int(round(np.exp(rng.uniform(np.log(h_lo), np.log(h_hi)))))
        h = min(max(h, int(math.ceil(mean_deg))), n - 1)
        rows.append((f"g{i:05d}",
                     GraphMetrics(n=n, m=m, density=2.0 * m / (n * (n - 1)),
                                  max_degree=h, min_degree=1,
                                  mean_degree=mean_deg,
                                  clustering=float(rng.uniform(0, 0.6)),
                                  clustering_mode="approx(trials=2000,seed=0)")))
    return rows


def sample_selection_records(count: int, seed: int) -> list:
    """Metric records emphasizing the design crossover: edge counts above the
    oracle's floor region and hub degrees spanning both sides of the
    SPARSE/EDGE_LIST break-even surface."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(count):
        m = int(round(np.exp(rng.uniform(np.log(5e4), np.log(1e6)))))
        ratio = np.exp(rng.uniform(np.log(1.0), np.log(32.0)))
        n = max(min_nodes_for_edges(m), int(round(m / ratio)))
        mean_deg = 2.0 * m / n
        h_lo = 1.5 * mean_deg
        h_hi = max(h_lo * 1.5, min(n - 1.0, 3000.0))
        h = int(round(np.exp(rng.uniform(np.log(h_lo), np.log(h_hi)))))
        h = min(max(h, int(math.ceil(mean_deg))), n - 1)
        rows.append((f"g{i:05d}",
                     GraphMetrics(n=n, m=m, density=2.0 * m / (n * (n - 1)),
                                  max_degree=h, min_degree=1,
                                  mean_degree=mean_deg,
                                  clustering=float(rng.uniform(0, 0.6)),
                                  clustering_mode="approx(trials=2000,seed=0)")))
    return rows


def oracle_records(rows, params: OracleParams, seed: int,
                   models=tuple(GnnModelKind)) -> list[TimingRecord]:
    return [TimingRecord(gid, kind, rep,
                         oracle_time(met, kind, rep, params, seed, graph_id=gid))
            for gid, met in rows for kind in models for rep in Representation]
