"""CLI for the measurement harness: point it at a manifest or edge-list
files and get the timing CSV (plus an errors sidecar when rows are skipped)."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .graphio import read_edge_list, read_manifest_graphs
from .models import MODEL_KINDS
from .runner import RunConfig, run_benchmark


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gnnbench", description=__doc__)
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--manifest", help="dataset manifest JSON")
    src.add_argument("--graphs", nargs="+", help="edge-list files")
    ap.add_argument("--models", default=",".join(MODEL_KINDS),
                    help="comma-separated subset of GCN,GIN,GAT,SAGE")
    ap.add_argument("--epochs", type=int, default=20)
    ap.add_argument("--warmup", type=int, default=3)
    ap.add_argument("--feature-size", type=int, default=32)
    ap.add_argument("--hidden-size", type=int, default=32)
    ap.add_argument("--layers", type=int, default=3)
    ap.add_argument("--classes", type=int, default=2)
    ap.add_argument("--device", default="cpu")
    ap.add_argument("--dtype", choices=["float32", "float64"],
                    default="float32")
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--out", default="timings.csv")
    ap.add_argument("--errors-out", default=None,
                    help="sidecar CSV for skipped rows (default <out>.errors.csv)")
    return ap


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(models=tuple(args.models.split(",")),
                        feature_size=args.feature_size,
                        hidden_size=args.hidden_size, num_layers=args.layers,
                        num_classes=args.classes, epochs=args.epochs,
                        warmup_epochs=args.warmup, device=args.device,
                        dtype=args.dtype, seed=args.seed)
        if args.manifest:
            graphs = read_manifest_graphs(args.manifest)
        else:
            graphs = [read_edge_list(p) for p in args.graphs]
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = run_benchmark(graphs, cfg)
    out_path = Path(args.out)
    with open(out_path, "w") as f:
        out.write_csv(f)
    print(f"wrote {len(out.results)} rows to {out_path}")
    if out.errors:
        err_path = Path(args.errors_out
                        or out_path.with_suffix(out_path.suffix + ".errors.csv"))
        with open(err_path, "w") as f:
            out.write_errors_csv(f)
        print(f"{len(out.errors)} rows skipped; reasons in {err_path}",
              file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
