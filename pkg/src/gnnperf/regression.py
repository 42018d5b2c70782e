"""Compound per-epoch-time predictor: ridge linear part + RBF residual part.

The linear part captures the large-graph regime where cost scales with
edge/node counts; the RBF regressor is fit to the ridge residuals and mops
up the non-linear small-graph region. Features are standardized once and
both parts operate in that space; predictions come back in milliseconds.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .metrics import GraphMetrics
from .svr import RbfSvrModel, fit_kernel_ridge, fit_svr

MODEL_FILE_VERSION = 1

DEFAULT_FEATURES = ("n", "m", "max_degree", "mean_degree")


class InsufficientDataError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


class MapeUndefinedError(ValueError):
    pass


def features_from_metrics(met: GraphMetrics,
                          feature_names: tuple[str, ...] = DEFAULT_FEATURES) -> np.ndarray:
    return np.array([float(getattr(met, name)) for name in feature_names])


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.std

    def inverse(self, Xs: np.ndarray) -> np.ndarray:
        return np.asarray(Xs, dtype=float) * self.std + self.mean


def fit_standardizer(X: np.ndarray) -> Standardizer:
    """Column means and population stds; zero-variance columns get std 1."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or len(X) < 2:
        raise InsufficientDataError("standardizer needs at least 2 rows")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return Standardizer(mean=mean, std=std)


@dataclass(frozen=True)
class RidgeModel:
    coef: np.ndarray
    intercept: float
    lam: float
    feature_names: tuple[str, ...] = DEFAULT_FEATURES

    def __post_init__(self):
        if len(self.coef) != len(self.feature_names):
            raise ValueError("coefficient count must match feature count")

    def predict(self, Xs: np.ndarray) -> np.ndarray:
        return np.asarray(Xs, dtype=float) @ self.coef + self.intercept


def fit_ridge(Xs: np.ndarray, y: np.ndarray, lam: float,
              feature_names: tuple[str, ...] = DEFAULT_FEATURES) -> RidgeModel:
    """Closed-form ridge with an unpenalized intercept (centered normal equations)."""
    Xs = np.asarray(Xs, dtype=float)
    y = np.asarray(y, dtype=float)
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    n, d = Xs.shape
    if n < d:
        raise InsufficientDataError(f"need at least {d} rows, got {n}")
    xm = Xs.mean(axis=0)
    ym = y.mean()
    Xc = Xs - xm
    yc = y - ym
    gram = Xc.T @ Xc + lam * np.eye(d)
    try:
        coef = np.linalg.solve(gram, Xc.T @ yc)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"normal equations singular at lambda={lam}") from exc
    if lam == 0 and np.linalg.cond(gram) > 1e12:
        raise SingularMatrixError("normal equations numerically singular at lambda=0")
    return RidgeModel(coef=coef, intercept=float(ym - xm @ coef), lam=lam,
                      feature_names=tuple(feature_names))


@dataclass(frozen=True)
class Scores:
    r2: float
    mse: float
    mape: float


def score(y_true: np.ndarray, y_pred: np.ndarray) -> Scores:
    """R^2 (1 - SSres/SStot), MSE, and MAPE = mean(|err| / |true|)."""
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.shape != y_pred.shape or y_true.ndim != 1 or len(y_true) == 0:
        raise ValueError("y_true and y_pred must be equal-length non-empty vectors")
    if np.any(y_true == 0):
        raise MapeUndefinedError("MAPE undefined: zero true value present")
    err = y_pred - y_true
    ss_res = float(err @ err)
    centered = y_true - y_true.mean()
    ss_tot = float(centered @ centered)
    if ss_res == 0.0:
        r2 = 1.0
    elif ss_tot == 0.0:
        raise ValueError("R^2 undefined: constant targets with nonzero error")
    else:
        r2 = 1.0 - ss_res / ss_tot
    mse = ss_res / len(y_true)
    mape = float(np.mean(np.abs(err) / np.abs(y_true)))
    return Scores(r2=r2, mse=mse, mape=mape)


def impact_factors(coef_raw: np.ndarray, feature_stds: np.ndarray) -> np.ndarray:
    """|raw-space coefficient| x feature std, per feature."""
    return np.abs(np.asarray(coef_raw, dtype=float)) * np.asarray(feature_stds, dtype=float)


@dataclass(frozen=True)
class SvrHyper:
    C: float = 10.0
    epsilon_factor: float = 0.1        # epsilon = factor * std(residuals)
    gamma: float | None = None         # None -> 1 / (4 * mean column variance)
    tol: float = 1e-3
    max_iter: int | None = None
    method: str = "smo"                # "smo" | "kernel_ridge"


@dataclass(frozen=True)
class CompoundModel:
    """standardize -> ridge + RBF residual -> ms; immutable once fitted."""

    standardizer: Standardizer
    ridge: RidgeModel
    rbf: RbfSvrModel
    model_kind: str = ""
    representation: str = ""
    target_units: str = "ms"

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.ridge.feature_names

    def predict_features(self, X_raw: np.ndarray) -> np.ndarray:
        X_raw = np.atleast_2d(np.asarray(X_raw, dtype=float))
        Xs = self.standardizer.transform(X_raw)
        pred = self.ridge.predict(Xs) + self.rbf.predict(Xs)
        return np.clip(np.nan_to_num(pred, nan=0.0), 0.0, None)

    def predict(self, met: GraphMetrics) -> float:
        return float(self.predict_features(
            features_from_metrics(met, self.feature_names))[0])

    def impact_factors(self) -> dict[str, float]:
        # ridge lives in standardized space: |standardized coef| is already
        # |raw coef| * raw std
        return {name: float(abs(c))
                for name, c in zip(self.feature_names, self.ridge.coef)}

    def to_dict(self) -> dict:
        c = self.rbf.C
        return {
            "version": MODEL_FILE_VERSION,
            "model_kind": self.model_kind,
            "representation": self.representation,
            "target_units": self.target_units,
            "feature_names": list(self.feature_names),
            "standardizer": {"mean": self.standardizer.mean.tolist(),
                             "std": self.standardizer.std.tolist()},
            "ridge": {"coef": self.ridge.coef.tolist(),
                      "intercept": self.ridge.intercept, "lam": self.ridge.lam},
            "rbf": {"support_x": self.rbf.support_x.tolist(),
                    "weights": self.rbf.weights.tolist(), "bias": self.rbf.bias,
                    "gamma": self.rbf.gamma, "epsilon": self.rbf.epsilon,
                    "C": None if math.isinf(c) else c},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CompoundModel":
        if d.get("version") != MODEL_FILE_VERSION:
            raise ValueError(f"unsupported model file version {d.get('version')!r}")
        names = tuple(d["feature_names"])
        std = Standardizer(mean=np.asarray(d["standardizer"]["mean"]),
                           std=np.asarray(d["standardizer"]["std"]))
        ridge = RidgeModel(coef=np.asarray(d["ridge"]["coef"]),
                           intercept=d["ridge"]["intercept"],
                           lam=d["ridge"]["lam"], feature_names=names)
        rb = d["rbf"]
        rbf = RbfSvrModel(support_x=np.asarray(rb["support_x"], dtype=float
                                               ).reshape(-1, len(names)),
                          weights=np.asarray(rb["weights"], dtype=float),
                          bias=rb["bias"], gamma=rb["gamma"],
                          epsilon=rb["epsilon"],
                          C=math.inf if rb["C"] is None else rb["C"])
        return cls(standardizer=std, ridge=ridge, rbf=rbf,
                   model_kind=d["model_kind"], representation=d["representation"],
                   target_units=d["target_units"])

    def save(self, path: str | Path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | Path) -> "CompoundModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def fit_rbf_residual(Xs: np.ndarray, residuals: np.ndarray,
                     hyper: SvrHyper = SvrHyper()) -> RbfSvrModel:
    """Fit the residual regressor on standardized features.

    epsilon defaults to 0.1 * std(residuals) and gamma to the scale
    heuristic 1 / (4 * mean column variance).
    """
    Xs = np.asarray(Xs, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    gamma = hyper.gamma
    if gamma is None:
        mean_var = float(Xs.var(axis=0).mean())
        gamma = 1.0 / (4.0 * mean_var) if mean_var > 0 else 0.25
    epsilon = hyper.epsilon_factor * float(residuals.std())
    if hyper.method == "kernel_ridge":
        return fit_kernel_ridge(Xs, residuals, gamma=gamma)
    if hyper.method != "smo":
        raise ValueError(f"unknown rbf fit method {hyper.method!r}")
    return fit_svr(Xs, residuals, C=hyper.C, epsilon=epsilon, gamma=gamma,
                   tol=hyper.tol, max_iter=hyper.max_iter)


def fit_compound(X_raw: np.ndarray, y: np.ndarray, lam: float = 1e-3,
                 hyper: SvrHyper = SvrHyper(), model_kind: str = "",
                 representation: str = "",
                 feature_names: tuple[str, ...] = DEFAULT_FEATURES) -> CompoundModel:
    """Standardize, fit ridge, then fit the RBF layer on the ridge residuals."""
    X_raw = np.asarray(X_raw, dtype=float)
    y = np.asarray(y, dtype=float)
    std = fit_standardizer(X_raw)
    Xs = std.transform(X_raw)
    ridge = fit_ridge(Xs, y, lam, feature_names=feature_names)
    residuals = y - ridge.predict(Xs)
    rbf = fit_rbf_residual(Xs, residuals, hyper)
    return CompoundModel(standardizer=std, ridge=ridge, rbf=rbf,
                         model_kind=model_kind, representation=representation)
