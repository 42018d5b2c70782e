"""Balanced synthetic dataset construction and the manifest that records it.

Naively sampled RMAT corpora pile up in the low-clustering bins; the balanced
mode counters that selection bias with stratified acceptance over a
(log10 edge-count x clustering) grid: a candidate is kept only while its bin
is below quota. The manifest records every accepted seed and parameter set,
so the exact corpus can be regenerated bit-identically.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import Graph, parse_edge_list, write_edge_list
from .metrics import GraphMetrics, compute_metrics
from .rmat import (DegenerateParamsError, ParamDistribution, RmatParams,
                   generate_rmat, sample_params)

log = logging.getLogger(__name__)

MANIFEST_VERSION = 1


@dataclass(frozen=True)
class GridSpec:
    """Bin edges for the balancing grid (log10 edges x mean clustering)."""

    log_edge_bin_edges: tuple[float, ...]
    clustering_bin_edges: tuple[float, ...]

    def __post_init__(self):
        for edges in (self.log_edge_bin_edges, self.clustering_bin_edges):
            if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
                raise ValueError("bin edges must be strictly increasing, >= 2 values")

    @classmethod
    def for_distribution(cls, dist: ParamDistribution, log_edge_bins: int = 6,
                         clustering_bins: int = 5) -> "GridSpec":
        lo = math.log10(dist.edge_range[0])
        hi = math.log10(dist.edge_range[1])
        return cls(tuple(np.linspace(lo, hi, log_edge_bins + 1)),
                   tuple(np.linspace(0.0, 1.0, clustering_bins + 1)))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.log_edge_bin_edges) - 1, len(self.clustering_bin_edges) - 1)

    @property
    def bin_total(self) -> int:
        return self.shape[0] * self.shape[1]

    def bin_of(self, edge_count: int, clustering: float) -> tuple[int, int]:
        """Grid cell for one graph; out-of-range values clamp into edge bins."""

        def locate(edges, x):
            i = int(np.searchsorted(edges, x, side="right")) - 1
            return min(max(i, 0), len(edges) - 2)

        return (locate(self.log_edge_bin_edges, math.log10(max(edge_count, 1))),
                locate(self.clustering_bin_edges, clustering))


@dataclass
class ManifestEntry:
    graph_id: str
    path: str  # relative to the manifest's directory
    seed: int
    params: RmatParams
    metrics: GraphMetrics | None = None

    def to_dict(self) -> dict:
        d = {"graph_id": self.graph_id, "path": self.path, "seed": self.seed,
             "params": {"n_target": self.params.n_target,
                        "e_target": self.params.e_target,
                        "r": list(self.params.r)}}
        if self.metrics is not None:
            d["metrics"] = vars(self.metrics)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ManifestEntry":
        met = d.get("metrics")
        return cls(graph_id=d["graph_id"], path=d["path"], seed=d["seed"],
                   params=RmatParams(n_target=d["params"]["n_target"],
                                     e_target=d["params"]["e_target"],
                                     r=tuple(d["params"]["r"])),
                   metrics=GraphMetrics(**met) if met else None)


@dataclass
class DatasetManifest:
    seed: int
    balance: bool
    requested_count: int
    distribution: ParamDistribution
    grid: GridSpec
    entries: list[ManifestEntry] = field(default_factory=list)
    unfilled_bins: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        ids = [e.graph_id for e in self.entries]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate graph_id in manifest")

    @property
    def shortfall(self) -> int:
        return self.requested_count - len(self.entries)

    def to_dict(self) -> dict:
        return {
            "version": MANIFEST_VERSION,
            "seed": self.seed,
            "balance": self.balance,
            "requested_count": self.requested_count,
            "distribution": {"edge_range": list(self.distribution.edge_range),
                             "ratio_range": list(self.distribution.ratio_range),
                             "skew_range": list(self.distribution.skew_range)},
            "grid": {"log_edge_bin_edges": list(self.grid.log_edge_bin_edges),
                     "clustering_bin_edges": list(self.grid.clustering_bin_edges)},
            "unfilled_bins": [list(b) for b in self.unfilled_bins],
            "entries": [e.to_dict() for e in self.entries],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetManifest":
        if d.get("version") != MANIFEST_VERSION:
            raise ValueError(f"unsupported manifest version {d.get('version')!r}")
        dist = ParamDistribution(edge_range=tuple(d["distribution"]["edge_range"]),
                                 ratio_range=tuple(d["distribution"]["ratio_range"]),
                                 skew_range=tuple(d["distribution"]["skew_range"]))
        grid = GridSpec(tuple(d["grid"]["log_edge_bin_edges"]),
                        tuple(d["grid"]["clustering_bin_edges"]))
        return cls(seed=d["seed"], balance=d["balance"],
                   requested_count=d["requested_count"], distribution=dist,
                   grid=grid,
                   entries=[ManifestEntry.from_dict(e) for e in d["entries"]],
                   unfilled_bins=[tuple(b) for b in d["unfilled_bins"]])

    def save(self, path: str | Path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | Path) -> "DatasetManifest":
        return cls.from_dict(json.loads(Path(path).read_text()))


def load_entry_graph(manifest_dir: str | Path, entry: ManifestEntry) -> Graph:
    with open(Path(manifest_dir) / entry.path) as f:
        return parse_edge_list(f)


def regenerate_entry(entry: ManifestEntry) -> Graph:
    """Rebuild the graph from its recorded seed and params (bit-identical)."""
    return generate_rmat(entry.params, entry.seed)


def build_balanced_dataset(count: int, dist: ParamDistribution, grid: GridSpec,
                           seed: int, balance: bool, out_dir: str | Path,
                           clustering_trials: int = 2000,
                           attempt_budget: int | None = None) -> DatasetManifest:
    """Generate `count` graphs under `dist`, writing edge lists into out_dir.

    With balance on, a candidate is accepted only while its
    (log-edges, clustering) bin holds fewer than ceil(count / bin_total)
    graphs; with balance off the first `count` successful generations are
    kept. Runs until `count` accepted or the attempt budget (default
    50 * count) is exhausted, in which case the manifest comes back short
    with the unfilled bins listed. Single-threaded by design: bin-quota
    acceptance is the one serialized decision point.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    out_dir = Path(out_dir)
    (out_dir / "graphs").mkdir(parents=True, exist_ok=True)
    budget = 50 * count if attempt_budget is None else attempt_budget
    quota = math.ceil(count / grid.bin_total)
    occupancy = np.zeros(grid.shape, dtype=np.int64)
    master = np.random.default_rng(seed)
    manifest = DatasetManifest(seed=seed, balance=balance, requested_count=count,
                               distribution=dist, grid=grid)

    attempts = 0
    while len(manifest.entries) < count and attempts < budget:
        attempts += 1
        cand_seed = int(master.integers(0, 2**63))
        params = sample_params(dist, cand_seed)
        try:
            g = generate_rmat(params, cand_seed)
        except DegenerateParamsError:
            continue
        if g.edge_count == 0:
            continue
        met = compute_metrics(g, mode="approx", trials=clustering_trials,
                              seed=cand_seed)
        if balance:
            b = grid.bin_of(met.m, met.clustering)
            if occupancy[b] >= quota:
                continue
            occupancy[b] += 1
        graph_id = f"g{len(manifest.entries):05d}"
        rel = f"graphs/{graph_id}.txt"
        with open(out_dir / rel, "w") as f:
            write_edge_list(g, f)
        manifest.entries.append(ManifestEntry(graph_id=graph_id, path=rel,
                                              seed=cand_seed, params=params,
                                              metrics=met))

    if len(manifest.entries) < count:
        if balance:
            manifest.unfilled_bins = [tuple(b) for b in
                                      np.argwhere(occupancy < quota).tolist()]
        log.warning("dataset shortfall: %d of %d accepted after %d attempts; "
                    "%d unfilled bins",
                    len(manifest.entries), count, attempts,
                    len(manifest.unfilled_bins))
    return manifest


def bin_occupancy(manifest: DatasetManifest) -> np.ndarray:
    """Grid occupancy counts from the manifest's recorded metrics."""
    counts = np.zeros(manifest.grid.shape, dtype=np.int64)
    for e in manifest.entries:
        if e.metrics is None:
            raise ValueError(f"entry {e.graph_id} has no metrics")
        counts[manifest.grid.bin_of(e.metrics.m, e.metrics.clustering)] += 1
    return counts


def occupancy_cv(counts: np.ndarray) -> float:
    """Coefficient of variation of bin occupancy (population std / mean)."""
    mean = counts.mean()
    if mean == 0:
        return 0.0
    return float(counts.std() / mean)
