"""Read the toolkit's file contracts: edge-list graphs and dataset manifests.

The formats (not the producing package) are the interface: whitespace-
separated integer pairs with '#' comments, and the JSON manifest whose
entries carry graph_id + a path relative to the manifest file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class LoadedGraph:
    graph_id: str
    node_count: int
    edges: np.ndarray  # (m, 2) int64, u < v, no loops, no duplicates


def read_edge_list(path: str | Path, graph_id: str | None = None) -> LoadedGraph:
    """Parse an edge-list file; tolerates loops/duplicates/sparse ids."""
    pairs = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            tokens = s.split()
            if len(tokens) != 2:
                raise ValueError(f"{path}:{lineno}: expected two tokens")
            pairs.append((int(tokens[0]), int(tokens[1])))
    if not pairs:
        raise ValueError(f"{path}: no edges")
    arr = np.asarray(pairs, dtype=np.int64)
    uniq = np.unique(arr)
    dense = np.searchsorted(uniq, arr)
    dense = dense[dense[:, 0] != dense[:, 1]]
    lo = np.minimum(dense[:, 0], dense[:, 1])
    hi = np.maximum(dense[:, 0], dense[:, 1])
    n = len(uniq)
    keys = np.unique(lo * np.int64(n) + hi)
    edges = np.column_stack([keys // n, keys % n])
    return LoadedGraph(graph_id=graph_id or Path(path).stem,
                       node_count=n, edges=edges)


def read_manifest_graphs(manifest_path: str | Path) -> list[LoadedGraph]:
    manifest_path = Path(manifest_path)
    doc = json.loads(manifest_path.read_text())
    out = []
    for entry in doc["entries"]:
        out.append(read_edge_list(manifest_path.parent / entry["path"],
                                  graph_id=entry["graph_id"]))
    return out
