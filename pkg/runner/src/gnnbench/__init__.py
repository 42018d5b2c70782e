"""Training-time measurement harness: four GNN models under sparse-matmul
vs gather/scatter aggregation, emitting the toolkit's timing CSV."""

from .graphio import LoadedGraph, read_edge_list, read_manifest_graphs
from .models import EDGE_LIST, MODEL_KINDS, SPARSE, GnnModel, GraphTensors
from .runner import BenchmarkOutput, RunConfig, run_benchmark, train_once

__version__ = "0.1.0"

__all__ = [
    "LoadedGraph", "read_edge_list", "read_manifest_graphs",
    "GnnModel", "GraphTensors", "MODEL_KINDS", "SPARSE", "EDGE_LIST",
    "RunConfig", "run_benchmark", "train_once", "BenchmarkOutput",
    "__version__",
]
