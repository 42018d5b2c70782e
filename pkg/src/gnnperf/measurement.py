"""Per-epoch training-time observations: synthetic oracle and CSV ingestion.

The oracle stands in for GPU measurement so the pipeline is testable
anywhere: a floored linear cost in (edges, nodes, max degree) per
representation, a per-model multiplier, and deterministic log-normal noise.
The floor mimics the flat small-graph region real hardware shows; the
default constants put the SPARSE/EDGE_LIST crossover inside the generated
metric range so design selection is non-trivial.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, Sequence

import numpy as np

from .dataset import DatasetManifest, load_entry_graph
from .metrics import GraphMetrics, compute_metrics


class GnnModelKind(Enum):
    GCN = "GCN"
    GIN = "GIN"
    GAT = "GAT"
    SAGE = "SAGE"


class Representation(Enum):
    SPARSE = "SPARSE"
    EDGE_LIST = "EDGE_LIST"


class TimingFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class TimingRecord:
    graph_id: str
    model: GnnModelKind
    repr: Representation
    epoch_time_ms: float

    def __post_init__(self):
        if not (math.isfinite(self.epoch_time_ms) and self.epoch_time_ms > 0):
            raise ValueError(f"epoch_time_ms must be positive and finite, "
                             f"got {self.epoch_time_ms}")


@dataclass(frozen=True)
class CostCoefficients:
    """Linear per-epoch cost in ms: intercept + per-edge + per-node + per-max-degree."""

    beta0: float
    beta_edge: float
    beta_node: float
    beta_hub: float

    def __post_init__(self):
        if min(self.beta0, self.beta_edge, self.beta_node, self.beta_hub) < 0:
            raise ValueError("cost coefficients must be non-negative")


DEFAULT_COSTS = {
    Representation.SPARSE: CostCoefficients(0.8, 4.0e-5, 1.0e-5, 2.0e-4),
    Representation.EDGE_LIST: CostCoefficients(0.5, 2.5e-5, 0.5e-5, 2.0e-3),
}
DEFAULT_MULTIPLIERS = {
    GnnModelKind.GCN: 1.0,
    GnnModelKind.GIN: 1.1,
    GnnModelKind.GAT: 1.5,
    GnnModelKind.SAGE: 1.2,
}


@dataclass(frozen=True)
class OracleParams:
    """Synthetic cost model constants (plumbing defaults, not measured truth)."""

    costs: dict[Representation, CostCoefficients] = field(
        default_factory=lambda: dict(DEFAULT_COSTS))
    multipliers: dict[GnnModelKind, float] = field(
        default_factory=lambda: dict(DEFAULT_MULTIPLIERS))
    t_min: float = 2.0
    sigma: float = 0.03

    def __post_init__(self):
        if self.t_min <= 0:
            raise ValueError("t_min must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")


def _noise_factor(seed: int, graph_id: str, model: GnnModelKind,
                  repr: Representation, sigma: float) -> float:
    if sigma == 0:
        return 1.0
    key = f"{seed}|{graph_id}|{model.value}|{repr.value}".encode()
    sub = int.from_bytes(hashlib.sha256(key).digest()[:8], "big")
    eps = np.random.default_rng(sub).normal(0.0, sigma)
    return float(np.exp(eps))


def oracle_time(met: GraphMetrics, model: GnnModelKind, repr: Representation,
                p: OracleParams, seed: int, graph_id: str = "") -> float:
    """Synthetic per-epoch time in ms, deterministic per (seed, graph_id, model, repr)."""
    c = p.costs[repr]
    linear = (c.beta0 + c.beta_edge * met.m + c.beta_node * met.n
              + c.beta_hub * met.max_degree)
    t = max(p.t_min, linear) * p.multipliers[model]
    return t * _noise_factor(seed, graph_id, model, repr, p.sigma)


def measure_manifest(manifest: DatasetManifest, models: Iterable[GnnModelKind],
                     p: OracleParams, seed: int,
                     manifest_dir: str | None = None) -> list[TimingRecord]:
    """One oracle record per (entry, model, representation).

    Uses the manifest's stored metrics; entries without metrics require
    manifest_dir so the graph file can be loaded and measured.
    """
    kinds = sorted(set(models), key=lambda k: k.value)
    records = []
    for entry in manifest.entries:
        met = entry.metrics
        if met is None:
            if manifest_dir is None:
                raise ValueError(f"entry {entry.graph_id} lacks metrics and no "
                                 "manifest_dir was given")
            met = compute_metrics(load_entry_graph(manifest_dir, entry),
                                  seed=entry.seed)
        for kind in kinds:
            for rep in Representation:
                records.append(TimingRecord(
                    graph_id=entry.graph_id, model=kind, repr=rep,
                    epoch_time_ms=oracle_time(met, kind, rep, p, seed,
                                              graph_id=entry.graph_id)))
    return records


TIMINGS_HEADER = ["graph_id", "model", "representation", "epoch_time_ms"]


def emit_timings(records: Sequence[TimingRecord], stream: IO[str]) -> None:
    """Write the timing CSV; times at fixed 6-decimal precision."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(TIMINGS_HEADER)
    for r in records:
        w.writerow([r.graph_id, r.model.value, r.repr.value,
                    f"{r.epoch_time_ms:.6f}"])


def ingest_timings(stream: IO[str]) -> list[TimingRecord]:
    """Parse and validate a timing CSV (header: graph_id,model,representation,epoch_time_ms).

    Model and representation names match case-insensitively. Raises
    TimingFormatError with the offending line for unknown names, bad or
    non-positive times, and duplicate (graph, model, repr) keys.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or [h.strip().lower() for h in header] != TIMINGS_HEADER:
        raise TimingFormatError(f"bad or missing header {header!r}", 1)
    model_names = {k.value.lower(): k for k in GnnModelKind}
    repr_names = {r.value.lower(): r for r in Representation}
    records: list[TimingRecord] = []
    seen: set[tuple[str, GnnModelKind, Representation]] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise TimingFormatError(f"expected 4 fields, got {len(row)}", lineno)
        gid, model_s, repr_s, time_s = (x.strip() for x in row)
        model = model_names.get(model_s.lower())
        if model is None:
            raise TimingFormatError(f"unknown model {model_s!r}", lineno)
        rep = repr_names.get(repr_s.lower())
        if rep is None:
            raise TimingFormatError(f"unknown representation {repr_s!r}", lineno)
        try:
            t = float(time_s)
        except ValueError:
            raise TimingFormatError(f"bad time {time_s!r}", lineno) from None
        if not (math.isfinite(t) and t > 0):
            raise TimingFormatError(f"non-positive or non-finite time {time_s!r}",
                                    lineno)
        key = (gid, model, rep)
        if key in seen:
            raise TimingFormatError(f"duplicate record for {gid}/{model.value}/"
                                    f"{rep.value}", lineno)
        seen.add(key)
        records.append(TimingRecord(gid, model, rep, t))
    return records
