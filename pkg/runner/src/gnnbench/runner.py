"""Benchmark loop: train each model on each graph under both aggregation
backends and record the mean per-epoch wall time (warmup epochs excluded).

Random node features (size 32) and random binary labels are attached per
graph from the run seed, so reruns are comparable; a 10% labeled split
drives the semi-supervised node-classification loss. The emitted CSV rows
follow the toolkit's timing contract exactly:
graph_id,model,representation,epoch_time_ms.
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import time
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np
import torch

from .graphio import LoadedGraph
from .models import EDGE_LIST, MODEL_KINDS, SPARSE, GnnModel, GraphTensors

log = logging.getLogger("gnnbench")

TIMINGS_HEADER = ["graph_id", "model", "representation", "epoch_time_ms"]


@dataclass
class RunConfig:
    models: tuple[str, ...] = MODEL_KINDS
    feature_size: int = 32
    hidden_size: int = 32
    num_layers: int = 3
    num_classes: int = 2
    epochs: int = 20
    warmup_epochs: int = 3
    label_fraction: float = 0.1
    learning_rate: float = 0.01
    device: str = "cpu"
    dtype: str = "float32"
    seed: int = 0
    torch_threads: int | None = 1  # pin for timing stability; None leaves as-is

    def __post_init__(self):
        if not (self.epochs > self.warmup_epochs >= 0):
            raise ValueError("need epochs > warmup_epochs >= 0")
        if min(self.feature_size, self.hidden_size, self.num_layers,
               self.num_classes) < 1:
            raise ValueError("sizes must be positive")
        unknown = set(self.models) - set(MODEL_KINDS)
        if unknown:
            raise ValueError(f"unknown model kinds {sorted(unknown)}")

    @property
    def torch_dtype(self) -> torch.dtype:
        return {"float32": torch.float32, "float64": torch.float64}[self.dtype]


@dataclass
class TrainResult:
    graph_id: str
    model: str
    representation: str
    epoch_time_ms: float
    losses: list[float] = field(default_factory=list)


def _stable_seed(*parts) -> int:
    key = "|".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def graph_inputs(g: LoadedGraph, cfg: RunConfig):
    """Node features, labels, and the labeled mask; fixed per (seed, graph)."""
    rng = np.random.default_rng(_stable_seed(cfg.seed, g.graph_id, "inputs"))
    feats = rng.standard_normal((g.node_count, cfg.feature_size))
    labels = rng.integers(0, cfg.num_classes, size=g.node_count)
    k = max(1, round(cfg.label_fraction * g.node_count))
    mask = rng.choice(g.node_count, size=k, replace=False)
    device = torch.device(cfg.device)
    return (torch.as_tensor(feats, dtype=cfg.torch_dtype, device=device),
            torch.as_tensor(labels, dtype=torch.long, device=device),
            torch.as_tensor(mask, dtype=torch.long, device=device))


def train_once(g: LoadedGraph, kind: str, mode: str, cfg: RunConfig,
               gt: GraphTensors | None = None) -> TrainResult:
    """One full training run; returns per-epoch losses and the timing mean."""
    if gt is None:
        gt = GraphTensors(g.node_count, g.edges, device=cfg.device,
                          dtype=cfg.torch_dtype)
    feats, labels, mask = graph_inputs(g, cfg)
    # identical init for both representations of the same (graph, model)
    torch.manual_seed(_stable_seed(cfg.seed, g.graph_id, kind))
    model = GnnModel(kind, cfg.feature_size, cfg.hidden_size, cfg.num_layers,
                     cfg.num_classes).to(device=torch.device(cfg.device),
                                         dtype=cfg.torch_dtype)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    loss_fn = torch.nn.CrossEntropyLoss()
    losses, times = [], []
    for _ in range(cfg.epochs):
        t0 = time.perf_counter()
        opt.zero_grad()
        out = model(feats, gt, mode)
        loss = loss_fn(out.index_select(0, mask), labels.index_select(0, mask))
        loss.backward()
        opt.step()
        times.append((time.perf_counter() - t0) * 1000.0)
        losses.append(float(loss.item()))
    mean_ms = float(np.mean(times[cfg.warmup_epochs:]))
    return TrainResult(graph_id=g.graph_id, model=kind, representation=mode,
                       epoch_time_ms=max(mean_ms, 1e-6), losses=losses)


@dataclass
class BenchmarkOutput:
    results: list[TrainResult] = field(default_factory=list)
    errors: list[tuple[str, str, str, str]] = field(default_factory=list)

    def write_csv(self, stream: IO[str]) -> None:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(TIMINGS_HEADER)
        for r in self.results:
            w.writerow([r.graph_id, r.model, r.representation,
                        f"{r.epoch_time_ms:.6f}"])

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def write_errors_csv(self, stream: IO[str]) -> None:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(["graph_id", "model", "representation", "reason"])
        for row in self.errors:
            w.writerow(row)


def run_benchmark(graphs: Sequence[LoadedGraph], cfg: RunConfig) -> BenchmarkOutput:
    """Train every (graph, model, representation); one graph at a time.

    Out-of-memory failures skip the row, log the reason, and land in the
    errors sidecar; the timing CSV itself never carries a malformed row.
    """
    if cfg.torch_threads is not None and cfg.device == "cpu":
        torch.set_num_threads(cfg.torch_threads)
    out = BenchmarkOutput()
    for g in graphs:
        try:
            gt = GraphTensors(g.node_count, g.edges, device=cfg.device,
                              dtype=cfg.torch_dtype)
        except (RuntimeError, torch.cuda.OutOfMemoryError) as exc:
            for kind in cfg.models:
                for mode in (SPARSE, EDGE_LIST):
                    out.errors.append((g.graph_id, kind, mode, str(exc)))
            log.warning("skipping %s entirely: %s", g.graph_id, exc)
            continue
        for kind in cfg.models:
            for mode in (SPARSE, EDGE_LIST):
                try:
                    out.results.append(train_once(g, kind, mode, cfg, gt=gt))
                except (RuntimeError, torch.cuda.OutOfMemoryError) as exc:
                    if "out of memory" not in str(exc).lower():
                        raise
                    out.errors.append((g.graph_id, kind, mode, str(exc)))
                    log.warning("skipping %s/%s/%s: %s", g.graph_id, kind,
                                mode, exc)
    return out
