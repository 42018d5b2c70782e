"""Command-line pipeline: generate -> metrics -> measure -> fit -> evaluate.

Every subcommand is a thin wrapper over one module operation, reads one JSON
config, and writes plain CSV/JSON artifacts atomically (temp then rename).
All randomness flows from the single config seed, so rerunning any
subcommand with identical inputs reproduces identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import DatasetManifest, GridSpec, build_balanced_dataset
from .graph import parse_edge_list
from .measurement import (CostCoefficients, GnnModelKind, OracleParams,
                          Representation, TimingFormatError, emit_timings,
                          ingest_timings, measure_manifest)
from .metrics import (GraphMetrics, compute_metrics, read_metrics_csv,
                      write_metrics_csv)
from .rmat import ParamDistribution
from .regression import (DEFAULT_FEATURES, CompoundModel, InsufficientDataError,
                         SvrHyper, features_from_metrics, fit_compound)
from .selector import evaluate_selection, make_decisions

log = logging.getLogger("gnnperf")


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    seed: int
    out_dir: str = "run"
    count: int = 200
    edge_range: tuple[float, float] = (1e3, 1e6)
    ratio_range: tuple[float, float] = (1.0, 32.0)
    skew_range: tuple[float, float] = (0.0, 0.9)
    balance: bool = True
    log_edge_bins: int = 6
    clustering_bins: int = 5
    attempt_budget_factor: int = 50
    clustering_trials: int = 2000
    oracle: OracleParams = field(default_factory=OracleParams)
    ridge_lambda: float = 1e-3
    svr: SvrHyper = field(default_factory=SvrHyper)
    include_clustering: bool = False
    models: tuple[GnnModelKind, ...] = tuple(GnnModelKind)

    @property
    def distribution(self) -> ParamDistribution:
        return ParamDistribution(edge_range=self.edge_range,
                                 ratio_range=self.ratio_range,
                                 skew_range=self.skew_range)

    @property
    def grid(self) -> GridSpec:
        return GridSpec.for_distribution(self.distribution,
                                         log_edge_bins=self.log_edge_bins,
                                         clustering_bins=self.clustering_bins)

    @property
    def feature_names(self) -> tuple[str, ...]:
        if self.include_clustering:
            return DEFAULT_FEATURES + ("clustering",)
        return DEFAULT_FEATURES

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if "seed" not in raw:
            raise ConfigError("config must set an explicit 'seed' "
                              "(no wall-clock default)")
        ds = raw.get("dataset", {})
        reg = raw.get("regression", {})
        orc = raw.get("oracle", {})
        costs = dict(OracleParams().costs)
        for name, vals in orc.get("costs", {}).items():
            costs[Representation[name]] = CostCoefficients(*vals)
        mults = dict(OracleParams().multipliers)
        for name, m in orc.get("multipliers", {}).items():
            mults[GnnModelKind[name]] = float(m)
        return cls(
            seed=int(raw["seed"]),
            out_dir=raw.get("out_dir", "run"),
            count=int(ds.get("count", 200)),
            edge_range=tuple(ds.get("edge_range", (1e3, 1e6))),
            ratio_range=tuple(ds.get("ratio_range", (1.0, 32.0))),
            skew_range=tuple(ds.get("skew_range", (0.0, 0.9))),
            balance=bool(ds.get("balance", True)),
            log_edge_bins=int(ds.get("log_edge_bins", 6)),
            clustering_bins=int(ds.get("clustering_bins", 5)),
            attempt_budget_factor=int(ds.get("attempt_budget_factor", 50)),
            clustering_trials=int(raw.get("clustering", {}).get("trials", 2000)),
            oracle=OracleParams(costs=costs, multipliers=mults,
                                t_min=float(orc.get("t_min", 2.0)),
                                sigma=float(orc.get("sigma", 0.03))),
            ridge_lambda=float(reg.get("lambda", 1e-3)),
            svr=SvrHyper(C=float(reg.get("C", 10.0)),
                         epsilon_factor=float(reg.get("epsilon_factor", 0.1)),
                         gamma=reg.get("gamma"),
                         tol=float(reg.get("tol", 1e-3)),
                         method=reg.get("method", "smo")),
            include_clustering=bool(reg.get("include_clustering", False)),
            models=tuple(GnnModelKind[m] for m in
                         raw.get("models", [k.value for k in GnnModelKind])),
        )


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def model_filename(kind: GnnModelKind, rep: Representation) -> str:
    return f"model_{kind.value}_{rep.value}.json"


# -- subcommands -------------------------------------------------------------

def cmd_generate(cfg: PipelineConfig, out_dir: Path, balance: bool | None,
                 workers: int) -> int:
    if workers > 1:
        log.info("generation runs single-worker: bin acceptance is serialized")
    balance_on = cfg.balance if balance is None else balance
    manifest = build_balanced_dataset(
        count=cfg.count, dist=cfg.distribution, grid=cfg.grid, seed=cfg.seed,
        balance=balance_on, out_dir=out_dir,
        clustering_trials=cfg.clustering_trials,
        attempt_budget=cfg.attempt_budget_factor * cfg.count)
    manifest.save(out_dir / "manifest.json")
    if manifest.shortfall > 0:
        print(f"shortfall: accepted {len(manifest.entries)} of "
              f"{manifest.requested_count}; unfilled bins: "
              f"{manifest.unfilled_bins}", file=sys.stderr)
        return 3
    print(f"wrote {len(manifest.entries)} graphs + manifest to {out_dir}")
    return 0


def _metrics_one(args: tuple) -> tuple[str, GraphMetrics]:
    manifest_dir, entry_path, graph_id, seed, trials = args
    with open(Path(manifest_dir) / entry_path) as f:
        g = parse_edge_list(f)
    return graph_id, compute_metrics(g, mode="approx", trials=trials, seed=seed)


def cmd_metrics(cfg: PipelineConfig, manifest_path: Path, out_path: Path,
                workers: int) -> int:
    manifest = DatasetManifest.load(manifest_path)
    manifest_dir = manifest_path.parent
    jobs = [(str(manifest_dir), e.path, e.graph_id, e.seed, cfg.clustering_trials)
            for e in manifest.entries]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_metrics_one, jobs, chunksize=8))
    else:
        rows = [_metrics_one(j) for j in jobs]
    buf = io.StringIO()
    write_metrics_csv(rows, buf)
    _atomic_write(out_path, buf.getvalue())
    print(f"wrote metrics for {len(rows)} graphs to {out_path}")
    return 0


def cmd_measure(cfg: PipelineConfig, manifest_path: Path,
                metrics_path: Path | None, timings_in: Path | None,
                out_path: Path) -> int:
    manifest = DatasetManifest.load(manifest_path)
    if timings_in is not None:
        with open(timings_in) as f:
            records = ingest_timings(f)
    else:
        if metrics_path is not None:
            by_id = dict(read_metrics_csv(open(metrics_path)))
            for e in manifest.entries:
                if e.graph_id in by_id:
                    e.metrics = by_id[e.graph_id]
        records = measure_manifest(manifest, cfg.models, cfg.oracle, cfg.seed,
                                   manifest_dir=str(manifest_path.parent))
    buf = io.StringIO()
    emit_timings(records, buf)
    _atomic_write(out_path, buf.getvalue())
    print(f"wrote {len(records)} timing records to {out_path}")
    return 0


def _join_rows(metric_rows, records, kind, rep, feature_names):
    times = {r.graph_id: r.epoch_time_ms for r in records
             if r.model is kind and r.repr is rep}
    X, y = [], []
    for gid, met in metric_rows:
        if gid in times:
            X.append(features_from_metrics(met, feature_names))
            y.append(times[gid])
    return np.array(X), np.array(y)


def cmd_fit(cfg: PipelineConfig, metrics_path: Path, timings_path: Path,
            kind: GnnModelKind, rep: Representation, out_path: Path) -> int:
    metric_rows = read_metrics_csv(open(metrics_path))
    with open(timings_path) as f:
        records = ingest_timings(f)
    X, y = _join_rows(metric_rows, records, kind, rep, cfg.feature_names)
    if len(y) < 5:
        print(f"insufficient data: {len(y)} joined rows for "
              f"{kind.value}/{rep.value}, need >= 5", file=sys.stderr)
        return 2
    model = fit_compound(X, y, lam=cfg.ridge_lambda, hyper=cfg.svr,
                         model_kind=kind.value, representation=rep.value,
                         feature_names=cfg.feature_names)
    model.save(out_path)
    print(f"fit {kind.value}/{rep.value} on {len(y)} rows -> {out_path}")
    return 0


def cmd_evaluate(cfg: PipelineConfig, metrics_path: Path, timings_path: Path,
                 models_dir: Path, out_dir: Path) -> int:
    metric_rows = read_metrics_csv(open(metrics_path))
    with open(timings_path) as f:
        records = ingest_timings(f)
    models = {}
    for kind in cfg.models:
        for rep in Representation:
            p = models_dir / model_filename(kind, rep)
            if p.exists():
                models[(kind, rep)] = CompoundModel.load(p)
    if not models:
        print(f"no model files found under {models_dir}", file=sys.stderr)
        return 2
    kinds = sorted({k for k, _ in models}, key=lambda k: k.value)
    pairs = {k for k in kinds
             if (k, Representation.SPARSE) in models
             and (k, Representation.EDGE_LIST) in models}
    decisions = make_decisions(metric_rows,
                               {kr: m for kr, m in models.items()
                                if kr[0] in pairs})
    report = evaluate_selection(records, decisions)
    out_dir.mkdir(parents=True, exist_ok=True)
    report.save(out_dir / "report.json")

    # scatter data (actual sparse vs actual edge vs predicted label), per kind
    for kind, rep in sorted(report.per_model.items(), key=lambda kv: kv[0].value):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["graph_id", "actual_sparse_ms", "actual_edge_ms",
                    "predicted_repr"])
        for o in rep.outcomes:
            w.writerow([o.graph_id, f"{o.actual_sparse_ms:.6f}",
                        f"{o.actual_edge_ms:.6f}", o.chosen.value])
        _atomic_write(out_dir / f"scatter_{kind.value}.csv", buf.getvalue())

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "strategy", "total_ms"])
    for kind, rep in sorted(report.per_model.items(), key=lambda kv: kv[0].value):
        for strategy in ("always_edge", "always_sparse", "selected", "best",
                         "random"):
            w.writerow([kind.value, strategy,
                        f"{rep.strategy_totals_ms[strategy]:.6f}"])
    _atomic_write(out_dir / "strategy_totals.csv", buf.getvalue())
    print(f"wrote report + scatter/strategy CSVs to {out_dir}")
    return 0


def cmd_predict(model_path: Path, graph_path: Path | None,
                values: dict[str, float | None], trials: int, seed: int) -> int:
    model = CompoundModel.load(model_path)
    if graph_path is not None:
        with open(graph_path) as f:
            g = parse_edge_list(f)
        met = compute_metrics(g, mode="approx", trials=trials, seed=seed)
    else:
        missing = [k for k in model.feature_names if values.get(k) is None]
        if missing:
            print(f"missing feature values: {missing}", file=sys.stderr)
            return 2
        met = GraphMetrics(n=int(values["n"]), m=int(values["m"]),
                           density=0.0, max_degree=int(values["max_degree"]),
                           min_degree=0, mean_degree=float(values["mean_degree"]),
                           clustering=float(values.get("clustering") or 0.0),
                           clustering_mode="approx(n/a)")
    pred = model.predict(met)
    print(f"{pred:.6f}")
    return 0


# -- argument wiring ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gnnperf",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="pipeline config JSON")
            p.add_argument("--seed", type=int, default=None,
                           help="override the config seed")
        p.add_argument("--out", default=None, help="output path")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("generate", help="build the synthetic dataset")
    add_common(p)
    p.add_argument("--balance", choices=["on", "off"], default=None)

    p = sub.add_parser("metrics", help="compute metrics for a manifest")
    add_common(p)
    p.add_argument("--manifest", required=True)

    p = sub.add_parser("measure", help="oracle-measure a manifest or ingest a CSV")
    add_common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--metrics", default=None, help="metrics CSV (optional)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--oracle", action="store_true", default=True,
                   help="use the synthetic cost oracle (default)")
    g.add_argument("--timings", default=None,
                   help="ingest an externally measured timing CSV instead")

    p = sub.add_parser("fit", help="fit one compound model")
    add_common(p)
    p.add_argument("--metrics", required=True)
    p.add_argument("--timings", required=True)
    p.add_argument("--model-kind", required=True,
                   choices=[k.value for k in GnnModelKind])
    p.add_argument("--repr", required=True, dest="representation",
                   choices=[r.value for r in Representation])

    p = sub.add_parser("evaluate", help="evaluate selection quality")
    add_common(p)
    p.add_argument("--metrics", required=True)
    p.add_argument("--timings", required=True)
    p.add_argument("--models", required=True, help="directory with model JSONs")

    p = sub.add_parser("predict", help="query a saved model for one graph")
    p.add_argument("--model", required=True)
    p.add_argument("--graph", default=None, help="edge-list file")
    for name in ("n", "m", "max-degree", "mean-degree", "clustering"):
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--clustering-trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    return ap


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "predict":
            return cmd_predict(
                Path(args.model),
                Path(args.graph) if args.graph else None,
                {"n": args.n, "m": args.m, "max_degree": args.max_degree,
                 "mean_degree": args.mean_degree, "clustering": args.clustering},
                args.clustering_trials, args.seed)

        cfg = PipelineConfig.from_file(args.config)
        if args.seed is not None:
            cfg.seed = args.seed

        if args.command == "generate":
            out = Path(args.out or cfg.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            balance = None if args.balance is None else (args.balance == "on")
            return cmd_generate(cfg, out, balance, args.workers)
        if args.command == "metrics":
            out = Path(args.out or (Path(args.manifest).parent / "metrics.csv"))
            return cmd_metrics(cfg, Path(args.manifest), out, args.workers)
        if args.command == "measure":
            out = Path(args.out or (Path(args.manifest).parent / "timings.csv"))
            return cmd_measure(cfg, Path(args.manifest),
                               Path(args.metrics) if args.metrics else None,
                               Path(args.timings) if args.timings else None, out)
        if args.command == "fit":
            kind = GnnModelKind[args.model_kind]
            rep = Representation[args.representation]
            out = Path(args.out or model_filename(kind, rep))
            return cmd_fit(cfg, Path(args.metrics), Path(args.timings),
                           kind, rep, out)
        if args.command == "evaluate":
            out = Path(args.out or "evaluation")
            return cmd_evaluate(cfg, Path(args.metrics), Path(args.timings),
                                Path(args.models), out)
        raise AssertionError(f"unhandled command {args.command}")
    except (ConfigError, TimingFormatError, InsufficientDataError,
            FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
