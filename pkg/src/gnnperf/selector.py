"""Representation selection from per-design predictions, and its evaluation.

The decision rule is a plain argmin over the two predicted times. Evaluation
aggregates totals as time sums (wall-clock saved over a corpus); the mean of
per-graph ratios is reported alongside since either aggregation is a
reasonable reading of a corpus-level speedup.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .measurement import GnnModelKind, Representation, TimingRecord
from .metrics import GraphMetrics
from .regression import CompoundModel, features_from_metrics


class IncompletePairError(ValueError):
    def __init__(self, graph_id: str, model: GnnModelKind):
        super().__init__(f"graph {graph_id!r} lacks both representations for "
                         f"{model.value}")
        self.graph_id = graph_id


def choose_repr(pred_sparse_ms: float, pred_edge_ms: float) -> Representation:
    """Argmin of predicted time; exact ties go to SPARSE."""
    if not (np.isfinite(pred_sparse_ms) and np.isfinite(pred_edge_ms)):
        raise ValueError("predictions must be finite")
    return (Representation.SPARSE if pred_sparse_ms <= pred_edge_ms
            else Representation.EDGE_LIST)


@dataclass(frozen=True)
class Decision:
    graph_id: str
    model: GnnModelKind
    chosen: Representation
    pred_sparse_ms: float
    pred_edge_ms: float


def make_decisions(metric_rows: Sequence[tuple[str, GraphMetrics]],
                   models: dict[tuple[GnnModelKind, Representation], CompoundModel],
                   ) -> list[Decision]:
    """One decision per (graph, model kind) for kinds with both design models."""
    kinds = sorted({k for k, _ in models}, key=lambda k: k.value)
    decisions = []
    for kind in kinds:
        ms = models.get((kind, Representation.SPARSE))
        me = models.get((kind, Representation.EDGE_LIST))
        if ms is None or me is None:
            raise ValueError(f"need both representation models for {kind.value}")
        feats = np.array([features_from_metrics(met, ms.feature_names)
                          for _, met in metric_rows])
        ps = ms.predict_features(feats)
        pe = me.predict_features(feats)
        for (gid, _), s, e in zip(metric_rows, ps, pe):
            decisions.append(Decision(graph_id=gid, model=kind,
                                      chosen=choose_repr(float(s), float(e)),
                                      pred_sparse_ms=float(s),
                                      pred_edge_ms=float(e)))
    return decisions


@dataclass(frozen=True)
class GraphOutcome:
    graph_id: str
    chosen: Representation
    pred_sparse_ms: float
    pred_edge_ms: float
    actual_sparse_ms: float
    actual_edge_ms: float
    correct: bool

    @property
    def chosen_ms(self) -> float:
        return (self.actual_sparse_ms if self.chosen is Representation.SPARSE
                else self.actual_edge_ms)

    @property
    def best_ms(self) -> float:
        return min(self.actual_sparse_ms, self.actual_edge_ms)

    @property
    def worst_ms(self) -> float:
        return max(self.actual_sparse_ms, self.actual_edge_ms)


@dataclass
class ModelSelectionReport:
    model: GnnModelKind
    accuracy: float
    speedup_vs_random: float
    speedup_vs_worst: float
    regret_vs_best: float
    speedup_vs_random_mean_ratio: float
    median_rel_loss_misclassified: float | None
    median_rel_gap_correct: float | None
    strategy_totals_ms: dict[str, float]
    outcomes: list[GraphOutcome] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "accuracy": self.accuracy,
            "speedup_vs_random": self.speedup_vs_random,
            "speedup_vs_worst": self.speedup_vs_worst,
            "regret_vs_best": self.regret_vs_best,
            "speedup_vs_random_mean_ratio": self.speedup_vs_random_mean_ratio,
            "median_rel_loss_misclassified": self.median_rel_loss_misclassified,
            "median_rel_gap_correct": self.median_rel_gap_correct,
            "strategy_totals_ms": self.strategy_totals_ms,
            "decisions": [{
                "graph_id": o.graph_id, "chosen": o.chosen.value,
                "pred_sparse_ms": o.pred_sparse_ms,
                "pred_edge_ms": o.pred_edge_ms,
                "actual_sparse_ms": o.actual_sparse_ms,
                "actual_edge_ms": o.actual_edge_ms, "correct": o.correct,
            } for o in self.outcomes],
        }


@dataclass
class SelectionReport:
    per_model: dict[GnnModelKind, ModelSelectionReport]

    def to_dict(self) -> dict:
        return {"version": 1,
                "per_model": {k.value: r.to_dict()
                              for k, r in sorted(self.per_model.items(),
                                                 key=lambda kv: kv[0].value)}}

    def save(self, path: str | Path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        os.replace(tmp, path)


def evaluate_selection(timings: Iterable[TimingRecord],
                       decisions: Iterable[Decision]) -> SelectionReport:
    """Score decisions against actual times, per model kind.

    accuracy counts a graph correct when the chosen design's actual time is
    weakly smaller; speedups compare time totals of the random-expectation
    baseline ((sparse+edge)/2 per graph), the worst choice, and the best
    choice against the selected total.
    """
    actual: dict[tuple[str, GnnModelKind], dict[Representation, float]] = {}
    for rec in timings:
        actual.setdefault((rec.graph_id, rec.model), {})[rec.repr] = rec.epoch_time_ms

    by_model: dict[GnnModelKind, list[Decision]] = {}
    for d in decisions:
        by_model.setdefault(d.model, []).append(d)

    reports: dict[GnnModelKind, ModelSelectionReport] = {}
    for kind, decs in sorted(by_model.items(), key=lambda kv: kv[0].value):
        outcomes = []
        for d in decs:
            pair = actual.get((d.graph_id, kind), {})
            if (Representation.SPARSE not in pair
                    or Representation.EDGE_LIST not in pair):
                raise IncompletePairError(d.graph_id, kind)
            ts = pair[Representation.SPARSE]
            te = pair[Representation.EDGE_LIST]
            chosen_ms = ts if d.chosen is Representation.SPARSE else te
            outcomes.append(GraphOutcome(
                graph_id=d.graph_id, chosen=d.chosen,
                pred_sparse_ms=d.pred_sparse_ms, pred_edge_ms=d.pred_edge_ms,
                actual_sparse_ms=ts, actual_edge_ms=te,
                correct=chosen_ms <= min(ts, te)))
        sum_chosen = sum(o.chosen_ms for o in outcomes)
        sum_best = sum(o.best_ms for o in outcomes)
        sum_worst = sum(o.worst_ms for o in outcomes)
        sum_random = sum(0.5 * (o.actual_sparse_ms + o.actual_edge_ms)
                         for o in outcomes)
        sum_sparse = sum(o.actual_sparse_ms for o in outcomes)
        sum_edge = sum(o.actual_edge_ms for o in outcomes)
        mean_ratio = float(np.mean([
            0.5 * (o.actual_sparse_ms + o.actual_edge_ms) / o.chosen_ms
            for o in outcomes]))
        rel_loss = [(o.chosen_ms - o.best_ms) / o.best_ms
                    for o in outcomes if not o.correct]
        rel_gap = [(o.worst_ms - o.best_ms) / o.best_ms
                   for o in outcomes if o.correct]
        reports[kind] = ModelSelectionReport(
            model=kind,
            accuracy=float(np.mean([o.correct for o in outcomes])),
            speedup_vs_random=sum_random / sum_chosen,
            speedup_vs_worst=sum_worst / sum_chosen,
            regret_vs_best=sum_best / sum_chosen,
            speedup_vs_random_mean_ratio=mean_ratio,
            median_rel_loss_misclassified=(float(np.median(rel_loss))
                                           if rel_loss else None),
            median_rel_gap_correct=(float(np.median(rel_gap))
                                    if rel_gap else None),
            strategy_totals_ms={"always_sparse": sum_sparse,
                                "always_edge": sum_edge,
                                "selected": sum_chosen,
                                "best": sum_best,
                                "random": sum_random},
            outcomes=outcomes)
    return SelectionReport(per_model=reports)
