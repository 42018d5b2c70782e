"""Four GNN layer stacks with two interchangeable aggregation backends.

SPARSE computes neighborhood aggregation with sparse-matrix multiplication;
EDGE_LIST gathers source features per edge and scatter-adds into the
destination. Both backends evaluate the same mathematical layer, so with
identical weights the outputs agree to floating-point precision; only the
execution strategy (and hence the runtime) differs.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

SPARSE = "SPARSE"
EDGE_LIST = "EDGE_LIST"

MODEL_KINDS = ("GCN", "GIN", "GAT", "SAGE")


class GraphTensors:
    """Per-graph index and weight structures shared by both backends."""

    def __init__(self, node_count: int, edges: np.ndarray,
                 device: str = "cpu", dtype: torch.dtype = torch.float32):
        self.n = node_count
        self.device = torch.device(device)
        self.dtype = dtype
        n = node_count

        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.argsort(dst * np.int64(n) + src)  # row-major for coalesced coo
        src, dst = src[order], dst[order]
        self.src = torch.as_tensor(src, device=self.device)
        self.dst = torch.as_tensor(dst, device=self.device)

        loops = np.arange(n, dtype=np.int64)
        src_sl = np.concatenate([src, loops])
        dst_sl = np.concatenate([dst, loops])
        order = np.argsort(dst_sl * np.int64(n) + src_sl)
        src_sl, dst_sl = src_sl[order], dst_sl[order]
        self.src_sl = torch.as_tensor(src_sl, device=self.device)
        self.dst_sl = torch.as_tensor(dst_sl, device=self.device)

        deg = np.bincount(dst, minlength=n).astype(np.float64) + 1.0
        gcn_w = 1.0 / np.sqrt(deg[src_sl] * deg[dst_sl])
        self.gcn_w = torch.as_tensor(gcn_w, device=self.device, dtype=dtype)

        idx = torch.stack([self.dst, self.src])
        ones = torch.ones(len(src), device=self.device, dtype=dtype)
        self.adj_plain = torch.sparse_coo_tensor(idx, ones, (n, n),
                                                 is_coalesced=True,
                                                 check_invariants=False)
        self.idx_sl = torch.stack([self.dst_sl, self.src_sl])
        self.adj_gcn = torch.sparse_coo_tensor(self.idx_sl, self.gcn_w, (n, n),
                                               is_coalesced=True,
                                               check_invariants=False)
        # transpose permutation for the attention backward (src-major order)
        perm = np.argsort(src_sl * np.int64(n) + dst_sl)
        self.sl_perm = torch.as_tensor(perm, device=self.device)
        self.idx_sl_t = torch.stack([self.src_sl.index_select(0, self.sl_perm),
                                     self.dst_sl.index_select(0, self.sl_perm)])

    # -- aggregation primitives ----------------------------------------------

    def neighbor_sum(self, h: torch.Tensor, mode: str) -> torch.Tensor:
        if mode == SPARSE:
            return torch.sparse.mm(self.adj_plain, h)
        out = torch.zeros_like(h)
        out.index_add_(0, self.dst, h.index_select(0, self.src))
        return out

    def gcn_aggregate(self, h: torch.Tensor, mode: str) -> torch.Tensor:
        if mode == SPARSE:
            return torch.sparse.mm(self.adj_gcn, h)
        out = torch.zeros_like(h)
        msgs = h.index_select(0, self.src_sl) * self.gcn_w.unsqueeze(1)
        out.index_add_(0, self.dst_sl, msgs)
        return out

    def attention_aggregate(self, z: torch.Tensor, logits: torch.Tensor,
                            mode: str) -> torch.Tensor:
        """Softmax the per-edge logits over each destination's incoming edges
        (self-loop pattern), then weight-sum the source features."""
        if mode == SPARSE:
            att = torch.sparse_coo_tensor(self.idx_sl, logits, (self.n, self.n),
                                          is_coalesced=True,
                                          check_invariants=False)
            att = torch.sparse.softmax(att, dim=1)
            return _AttentionSpmm.apply(att.values(), z, self.idx_sl,
                                        self.idx_sl_t, self.sl_perm, self.n)
        mx = torch.zeros(self.n, device=z.device, dtype=z.dtype)
        mx = mx.scatter_reduce(0, self.dst_sl, logits, "amax",
                               include_self=False)
        ex = torch.exp(logits - mx.index_select(0, self.dst_sl))
        denom = torch.zeros(self.n, device=z.device, dtype=z.dtype)
        denom.index_add_(0, self.dst_sl, ex)
        alpha = ex / denom.index_select(0, self.dst_sl)
        out = torch.zeros_like(z)
        out.index_add_(0, self.dst_sl,
                       z.index_select(0, self.src_sl) * alpha.unsqueeze(1))
        return out


class _AttentionSpmm(torch.autograd.Function):
    """sparse(att) @ dense(z) with an edge-proportional backward.

    torch's stock value-gradient for sparse mm materializes a dense n x n
    product; this keeps both gradient paths O(edges * feature_dim).
    """

    @staticmethod
    def forward(ctx, values, z, idx, idx_t, perm, n):
        A = torch.sparse_coo_tensor(idx, values, (n, n), is_coalesced=True,
                                    check_invariants=False)
        ctx.save_for_backward(values, z, idx, idx_t, perm)
        ctx.n = n
        return torch.sparse.mm(A, z)

    @staticmethod
    def backward(ctx, grad_out):
        values, z, idx, idx_t, perm = ctx.saved_tensors
        dst, src = idx[0], idx[1]
        grad_values = (grad_out.index_select(0, dst)
                       * z.index_select(0, src)).sum(dim=1)
        At = torch.sparse_coo_tensor(idx_t, values.index_select(0, perm),
                                     (ctx.n, ctx.n), is_coalesced=True,
                                     check_invariants=False)
        grad_z = torch.sparse.mm(At, grad_out)
        return grad_values, grad_z, None, None, None, None


class GcnLayer(nn.Module):
    def __init__(self, d_in, d_out):
        super().__init__()
        self.lin = nn.Linear(d_in, d_out)

    def forward(self, h, gt: GraphTensors, mode: str):
        return gt.gcn_aggregate(self.lin(h), mode)


class GinLayer(nn.Module):
    def __init__(self, d_in, d_out, eps: float = 0.0):
        super().__init__()
        self.eps = eps
        self.mlp = nn.Sequential(nn.Linear(d_in, d_out), nn.ReLU(),
                                 nn.Linear(d_out, d_out))

    def forward(self, h, gt: GraphTensors, mode: str):
        return self.mlp((1.0 + self.eps) * h + gt.neighbor_sum(h, mode))


class GatLayer(nn.Module):
    def __init__(self, d_in, d_out, negative_slope: float = 0.2):
        super().__init__()
        self.lin = nn.Linear(d_in, d_out, bias=False)
        self.att_src = nn.Parameter(torch.empty(d_out))
        self.att_dst = nn.Parameter(torch.empty(d_out))
        nn.init.normal_(self.att_src, std=d_out ** -0.5)
        nn.init.normal_(self.att_dst, std=d_out ** -0.5)
        self.negative_slope = negative_slope

    def forward(self, h, gt: GraphTensors, mode: str):
        z = self.lin(h)
        s_src = z @ self.att_src
        s_dst = z @ self.att_dst
        logits = torch.nn.functional.leaky_relu(
            s_src.index_select(0, gt.src_sl) + s_dst.index_select(0, gt.dst_sl),
            self.negative_slope)
        return gt.attention_aggregate(z, logits, mode)


class SageLayer(nn.Module):
    def __init__(self, d_in, d_out):
        super().__init__()
        self.lin_self = nn.Linear(d_in, d_out)
        self.lin_neigh = nn.Linear(d_in, d_out, bias=False)

    def forward(self, h, gt: GraphTensors, mode: str):
        return self.lin_self(h) + self.lin_neigh(gt.neighbor_sum(h, mode))


_LAYERS = {"GCN": GcnLayer, "GIN": GinLayer, "GAT": GatLayer, "SAGE": SageLayer}


class GnnModel(nn.Module):
    """Stack of identical-kind layers; ReLU between layers, logits at the end."""

    def __init__(self, kind: str, feature_size: int = 32, hidden_size: int = 32,
                 num_layers: int = 3, num_classes: int = 2):
        super().__init__()
        if kind not in _LAYERS:
            raise ValueError(f"unknown model kind {kind!r}")
        if num_layers < 1:
            raise ValueError("need at least one layer")
        self.kind = kind
        dims = [feature_size] + [hidden_size] * (num_layers - 1) + [num_classes]
        self.layers = nn.ModuleList(
            _LAYERS[kind](dims[i], dims[i + 1]) for i in range(num_layers))

    def forward(self, x, gt: GraphTensors, mode: str):
        h = x
        for i, layer in enumerate(self.layers):
            h = layer(h, gt, mode)
            if i < len(self.layers) - 1:
                h = torch.relu(h)
        return h
