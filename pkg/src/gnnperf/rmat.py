"""RMAT synthetic graph generation.

Edges are placed by recursive quadrant descent over a power-of-two adjacency
matrix with probability vector r = [a, b, c, d] (b = c for undirected use).
Self-loops and duplicates are redrawn until the target distinct edge count is
reached or the attempt budget runs out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, largest_component, normalize_edges


class DegenerateParamsError(RuntimeError):
    """Parameters concentrate probability so hard that the edge target is unreachable."""


@dataclass(frozen=True)
class RmatParams:
    n_target: int
    e_target: int
    r: tuple[float, float, float, float]

    def __post_init__(self):
        a, b, c, d = self.r
        if min(a, b, c, d) < 0:
            raise ValueError("r components must be non-negative")
        if abs(a + b + c + d - 1.0) > 1e-9:
            raise ValueError("r must sum to 1")
        if abs(b - c) > 1e-9:
            raise ValueError("r must be symmetric (b = c)")
        if self.e_target < 1:
            raise ValueError("e_target must be >= 1")
        if self.n_target < 2:
            raise ValueError("n_target must be >= 2")


@dataclass(frozen=True)
class ParamDistribution:
    """Sampling ranges for generator parameters.

    edge_range is log-uniform; ratio_range is the log-uniform edge/node ratio
    (ratio 1..32 means mean degree 2..64); skew_range controls the spread
    between the largest and smallest component of r (the a-d axis).
    """

    edge_range: tuple[float, float] = (1e3, 1e6)
    ratio_range: tuple[float, float] = (1.0, 32.0)
    skew_range: tuple[float, float] = (0.0, 0.9)

    def __post_init__(self):
        for lo, hi in (self.edge_range, self.ratio_range, self.skew_range):
            if not (lo <= hi):
                raise ValueError("range bounds must satisfy lo <= hi")
        if self.edge_range[0] < 1 or self.ratio_range[0] <= 0:
            raise ValueError("edge and ratio ranges must be positive")
        if not (0.0 <= self.skew_range[0] and self.skew_range[1] < 1.0):
            raise ValueError("skew must lie in [0, 1)")


def r_from_skew(skew: float) -> tuple[float, float, float, float]:
    """Symmetric probability vector with max-min component spread = skew.

    skew 0 gives the uniform [0.25] * 4 vector; skew -> 1 pushes all mass
    into the a quadrant.
    """
    if not (0.0 <= skew < 1.0):
        raise ValueError("skew must lie in [0, 1)")
    a = (1.0 + 3.0 * skew) / 4.0
    rest = (1.0 - skew) / 4.0
    return (a, rest, rest, rest)


def sample_params(dist: ParamDistribution, seed: int) -> RmatParams:
    """Draw one parameter set: log-uniform edges, log-uniform edge/node ratio,
    skew-parameterized r. Deterministic per seed."""
    rng = np.random.default_rng(seed)
    e = float(np.exp(rng.uniform(math.log(dist.edge_range[0]),
                                 math.log(dist.edge_range[1]))))
    ratio = float(np.exp(rng.uniform(math.log(dist.ratio_range[0]),
                                     math.log(dist.ratio_range[1]))))
    skew = float(rng.uniform(dist.skew_range[0], dist.skew_range[1]))
    e_target = max(1, round(e))
    n_target = max(2, round(e_target / ratio))
    return RmatParams(n_target=n_target, e_target=e_target, r=r_from_skew(skew))


@dataclass
class RmatDrawStats:
    """Bookkeeping from the raw edge draw: attempts spent and distinct edges kept."""

    attempts: int = 0
    distinct_edges: int = 0
    budget: int = 0
    exhausted: bool = field(default=False)


def sample_rmat_edges(p: RmatParams, seed: int,
                      attempt_budget: int | None = None,
                      stats: RmatDrawStats | None = None) -> np.ndarray:
    """Draw distinct non-loop cell pairs by recursive quadrant descent.

    Equivalent to drawing one edge at a time and redrawing every self-loop
    or duplicate: keeps the first e_target distinct edges in draw order,
    stopping early when the attempt budget (default 50 * e_target) runs out.
    Raises DegenerateParamsError when fewer than max(1, 0.5 * e_target)
    distinct edges came out of the full budget.
    """
    levels = max(1, (p.n_target - 1).bit_length())
    side = np.int64(1) << levels
    budget = 50 * p.e_target if attempt_budget is None else attempt_budget
    c0, c1, c2 = np.cumsum(p.r[:3])
    rng = np.random.default_rng(seed)
    # float matmul is BLAS-backed and exact for side <= 2^52
    weights = (2.0 ** np.arange(levels - 1, -1, -1)).astype(np.float64)

    seen = np.empty(0, dtype=np.int64)       # sorted distinct keys
    kept: list[np.ndarray] = []              # distinct keys in draw order
    kept_count = 0
    attempts = 0
    last_needed_attempt = 0
    accept_rate = 0.8  # refined after each batch from the observed yield
    max_batch = max(65536, 8_000_000 // levels)  # bound the draw matrix size
    while kept_count < p.e_target and attempts < budget:
        need = p.e_target - kept_count
        batch = min(budget - attempts, max_batch,
                    max(1024, int(1.25 * need / max(accept_rate, 0.02))))
        x = rng.random((batch, levels))
        quad = (x >= c0).view(np.int8) + (x >= c1) + (x >= c2)
        us = ((quad >> 1) @ weights).astype(np.int64)
        vs = ((quad & 1) @ weights).astype(np.int64)
        nonloop = us != vs
        lo = np.minimum(us, vs)
        hi = np.maximum(us, vs)
        keys = lo * side + hi
        # first occurrence within this batch, in draw order
        uniq, first_idx = np.unique(keys[nonloop], return_index=True)
        draw_idx = np.flatnonzero(nonloop)[first_idx]
        if len(seen):
            pos = np.searchsorted(seen, uniq)
            pos = np.minimum(pos, len(seen) - 1)
            fresh = seen[pos] != uniq
            uniq, draw_idx = uniq[fresh], draw_idx[fresh]
        order = np.argsort(draw_idx, kind="stable")
        uniq_ordered = uniq[order]
        draw_ordered = draw_idx[order]
        take = min(len(uniq_ordered), p.e_target - kept_count)
        if take:
            kept.append(uniq_ordered[:take])
            kept_count += take
            last_needed_attempt = attempts + int(draw_ordered[take - 1]) + 1
        if kept_count >= p.e_target:
            attempts = last_needed_attempt
            break
        attempts += batch
        seen = np.union1d(seen, uniq)
        accept_rate = max(len(uniq) / batch, 1e-3)
    distinct = np.concatenate(kept) if kept else np.empty(0, dtype=np.int64)
    if stats is not None:
        stats.attempts = attempts
        stats.distinct_edges = len(distinct)
        stats.budget = budget
        stats.exhausted = len(distinct) < p.e_target
    if len(distinct) < max(1, 0.5 * p.e_target):
        raise DegenerateParamsError(
            f"only {len(distinct)} distinct edges after {attempts} attempts "
            f"(target {p.e_target}, r={p.r})")
    return np.column_stack([distinct // side, distinct % side])


def generate_rmat(p: RmatParams, seed: int,
                  attempt_budget: int | None = None) -> Graph:
    """Full generator: draw edges, normalize ids, keep the largest component.

    Deterministic per (params, seed).
    """
    raw = sample_rmat_edges(p, seed, attempt_budget=attempt_budget)
    g, _ = normalize_edges(raw)
    return largest_component(g)
