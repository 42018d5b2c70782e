"""Canonical undirected graph representation, normalization, and edge-list I/O.

Every other module treats this Graph as the unit of processing: dense node
ids in [0, node_count), no self-loops, no duplicate edges, immutable after
construction. Adjacency is stored CSR-style (per-node sorted neighbor
arrays), so membership tests are O(log degree).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import IO, Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class EdgeListParseError(ValueError):
    """Malformed edge-list input; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyGraphError(ValueError):
    pass


@dataclass(frozen=True)
class NormalizationReport:
    """What normalization changed: dropped loops, merged duplicates, relabeling."""

    self_loops_dropped: int
    duplicates_merged: int
    ids_relabeled: bool


class Graph:
    """Immutable undirected graph.

    ``edges`` is an (m, 2) int64 array with u < v per row, rows sorted.
    Construction validates the invariants; use :func:`normalize_edges` for
    raw input that may contain loops, duplicates, or sparse ids.
    """

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]] | np.ndarray):
        if node_count < 0:
            raise ValueError("node_count must be non-negative")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be pairs")
        if arr.size and (arr.min() < 0 or arr.max() >= node_count):
            raise ValueError("edge endpoint out of [0, node_count)")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise ValueError("self-loop in edge list (normalize first)")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        canon = np.column_stack([lo, hi])
        canon = canon[np.lexsort((canon[:, 1], canon[:, 0]))]
        if len(canon) > 1 and np.any(np.all(canon[1:] == canon[:-1], axis=1)):
            raise ValueError("duplicate edge in edge list (normalize first)")
        canon.setflags(write=False)
        self.node_count = int(node_count)
        self.edges = canon
        self._build_adjacency()

    @classmethod
    def _from_canonical(cls, node_count: int, edges: np.ndarray) -> "Graph":
        """Trusted constructor: edges already deduped, u < v, lexsorted."""
        g = cls.__new__(cls)
        edges = np.ascontiguousarray(edges, dtype=np.int64).reshape(-1, 2)
        edges.setflags(write=False)
        g.node_count = int(node_count)
        g.edges = edges
        g._build_adjacency()
        return g

    def _build_adjacency(self) -> None:
        n, e = self.node_count, self.edges
        if len(e):
            src = np.concatenate([e[:, 0], e[:, 1]])
            dst = np.concatenate([e[:, 1], e[:, 0]])
            order = np.argsort(src * np.int64(n) + dst)
            self._indices = dst[order]
            counts = np.bincount(src, minlength=n)
        else:
            self._indices = np.empty(0, dtype=np.int64)
            counts = np.zeros(n, dtype=np.int64)
        self._indptr = np.concatenate([[0], np.cumsum(counts)])
        self._indices.setflags(write=False)
        self._indptr.setflags(write=False)

    # -- basic accessors ----------------------------------------------------

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self._indptr)

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor ids of v (read-only view)."""
        return self._indices[self._indptr[v]:self._indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self._indices[self._indptr[u]:self._indptr[u + 1]]
        i = np.searchsorted(row, v)
        return bool(i < len(row) and row[i] == v)

    @cached_property
    def _edge_keys(self) -> np.ndarray:
        # flat sorted key per directed slot: row * n + col; enables batch lookups
        rows = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees)
        return rows * self.node_count + self._indices

    def has_edges_batch(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        """Vectorized membership test for many (u, v) queries at once."""
        keys = self._edge_keys
        q = us.astype(np.int64) * self.node_count + vs.astype(np.int64)
        pos = np.searchsorted(keys, q)
        pos = np.minimum(pos, max(len(keys) - 1, 0))
        if len(keys) == 0:
            return np.zeros(len(q), dtype=bool)
        return keys[pos] == q

    def edge_pairs(self) -> list[tuple[int, int]]:
        return [tuple(row) for row in self.edges.tolist()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.node_count == other.node_count
                and self.edges.shape == other.edges.shape
                and bool(np.all(self.edges == other.edges)))

    def __hash__(self):
        return hash((self.node_count, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.edge_count})"


def normalize_edges(raw_pairs: np.ndarray | Iterable[tuple[int, int]]) -> tuple[Graph, NormalizationReport]:
    """Build a normalized Graph from raw (possibly messy) integer pairs.

    Drops self-loops, merges duplicate/reversed-duplicate edges, and relabels
    ids densely in ascending raw-id order. Ids that appear only in dropped
    self-loops still count toward node_count (they become isolated nodes,
    removed later by largest_component).
    """
    arr = np.asarray(list(raw_pairs) if not isinstance(raw_pairs, np.ndarray) else raw_pairs,
                     dtype=np.int64)
    if arr.size == 0:
        raise EmptyGraphError("no edges")
    arr = arr.reshape(-1, 2)
    uniq = np.unique(arr)
    relabeled = not (len(uniq) == uniq[-1] + 1 and uniq[0] == 0)
    dense = np.searchsorted(uniq, arr)
    loops = dense[:, 0] == dense[:, 1]
    n_loops = int(loops.sum())
    dense = dense[~loops]
    lo = np.minimum(dense[:, 0], dense[:, 1])
    hi = np.maximum(dense[:, 0], dense[:, 1])
    n = len(uniq)
    keys = lo * np.int64(n) + hi
    distinct = np.unique(keys)  # sorted keys == lexsorted (u, v) pairs
    dup = len(keys) - len(distinct)
    edges = np.column_stack([distinct // n, distinct % n])
    g = Graph._from_canonical(n, edges)
    return g, NormalizationReport(self_loops_dropped=n_loops,
                                  duplicates_merged=int(dup),
                                  ids_relabeled=relabeled)


def parse_edge_list(source: str | IO[str]) -> Graph:
    """Parse whitespace-separated integer pairs ('#' lines are comments).

    Returns a normalized Graph; raises EdgeListParseError with the offending
    line number on malformed tokens and EmptyGraphError when no edge lines
    are present.
    """
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = source.read().splitlines()
    pairs: list[tuple[int, int]] = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise EdgeListParseError(
                f"expected two integer tokens, got {len(tokens)}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListParseError(
                f"non-integer token in {tokens!r}", lineno) from None
        pairs.append((u, v))
    if not pairs:
        raise EmptyGraphError("no edges in input")
    g, _ = normalize_edges(np.asarray(pairs, dtype=np.int64))
    return g


def write_edge_list(g: Graph, stream: IO[str] | None = None) -> str:
    """Render one 'u v' line per edge (u < v), pairs in ascending order.

    parse_edge_list(write_edge_list(g)) == g for any normalized graph with
    no isolated nodes (the text format cannot represent them).
    """
    text = "".join(f"{u} {v}\n" for u, v in g.edges.tolist())
    if stream is not None:
        stream.write(text)
    return text


def component_labels(g: Graph) -> np.ndarray:
    """Connected-component label per node."""
    n = g.node_count
    if n == 0:
        return np.empty(0, dtype=np.int64)
    data = np.ones(len(g._indices), dtype=np.int8)
    mat = csr_matrix((data, g._indices, g._indptr), shape=(n, n))
    _, labels = connected_components(mat, directed=False)
    return labels


def is_connected(g: Graph) -> bool:
    if g.node_count <= 1:
        return True
    return len(np.unique(component_labels(g))) == 1


def largest_component(g: Graph) -> Graph:
    """Induced subgraph on the largest connected component, relabeled densely.

    Ties between equal-size components go to the one containing the smallest
    node id. Result is connected; every node has degree >= 1 unless the
    component is a single node.
    """
    if g.node_count == 0:
        raise EmptyGraphError("empty graph")
    labels = component_labels(g)
    sizes = np.bincount(labels)
    best = sizes.max()
    candidates = np.flatnonzero(sizes == best)
    # first node (smallest id) whose component is among the largest wins
    winner = labels[np.flatnonzero(np.isin(labels, candidates))[0]]
    keep = np.flatnonzero(labels == winner)
    if len(keep) == g.node_count:
        return g
    remap = np.full(g.node_count, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    mask = labels[g.edges[:, 0]] == winner
    # monotone remap preserves the canonical lexsorted order
    return Graph._from_canonical(len(keep), remap[g.edges[mask]])
