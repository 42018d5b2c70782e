"""Predict per-epoch GNN training time from graph metrics and select the
faster of two aggregation designs (sparse-matrix vs edge-list)."""

from .graph import Graph, largest_component, parse_edge_list, write_edge_list
from .measurement import (GnnModelKind, OracleParams, Representation,
                          TimingRecord, ingest_timings, oracle_time)
from .metrics import GraphMetrics, compute_metrics
from .regression import CompoundModel, Scores, fit_compound, score
from .rmat import ParamDistribution, RmatParams, generate_rmat, sample_params
from .selector import choose_repr, evaluate_selection

__version__ = "0.1.0"

__all__ = [
    "Graph", "parse_edge_list", "write_edge_list", "largest_component",
    "RmatParams", "ParamDistribution", "generate_rmat", "sample_params",
    "GraphMetrics", "compute_metrics",
    "GnnModelKind", "Representation", "TimingRecord", "OracleParams",
    "oracle_time", "ingest_timings",
    "CompoundModel", "fit_compound", "Scores", "score",
    "choose_repr", "evaluate_selection",
    "__version__",
]
