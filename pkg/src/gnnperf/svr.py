"""Epsilon-insensitive RBF-kernel support vector regression, fit by SMO.

The dual is solved over beta_i = alpha_i - alpha_i^* (box |beta_i| <= C,
sum beta = 0): minimize 0.5 b'Kb - y'b + eps*||b||_1. Each step picks the
maximal-violating pair with a second-order gain heuristic and solves the
one-dimensional subproblem exactly (piecewise quadratic, kinks where a
beta crosses zero), so the objective decreases monotonically and the run
is deterministic for a fixed iteration order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SvrConvergenceError(RuntimeError):
    def __init__(self, violation: float, iterations: int):
        super().__init__(f"SMO did not converge: KKT violation {violation:.3e} "
                         f"after {iterations} iterations")
        self.violation = violation
        self.iterations = iterations


def rbf_kernel(X: np.ndarray, Y: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * ||x - y||^2) for all pairs."""
    sq = (np.sum(X * X, axis=1)[:, None] + np.sum(Y * Y, axis=1)[None, :]
          - 2.0 * X @ Y.T)
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


@dataclass(frozen=True)
class RbfSvrModel:
    """Fitted regressor: prediction = sum_i w_i exp(-gamma ||x - x_i||^2) + bias."""

    support_x: np.ndarray
    weights: np.ndarray
    bias: float
    gamma: float
    epsilon: float
    C: float
    n_iter: int = 0
    kkt_violation: float = 0.0

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if len(self.weights) == 0:
            return np.full(len(X), self.bias)
        return rbf_kernel(X, self.support_x, self.gamma) @ self.weights + self.bias


def dual_objective(K: np.ndarray, y: np.ndarray, epsilon: float,
                   beta: np.ndarray) -> float:
    return float(0.5 * beta @ K @ beta - y @ beta + epsilon * np.abs(beta).sum())


def _solve_pair(beta_i: float, beta_j: float, eta: float, delta: float,
                epsilon: float, C: float) -> float:
    """Exact minimizer t of the pair subproblem beta_i += t, beta_j -= t.

    phi(t) = 0.5*eta*t^2 + delta*t + eps*(|beta_i + t| + |beta_j - t|),
    t constrained to the box; kinks at t = -beta_i and t = beta_j.
    """
    lo = max(-C - beta_i, beta_j - C)
    hi = min(C - beta_i, beta_j + C)
    if hi <= lo:
        return 0.0
    points = {lo, hi}
    for kink in (-beta_i, beta_j):
        if lo < kink < hi:
            points.add(kink)
    bounds = sorted(points)
    candidates = list(bounds)
    if eta > 1e-14:
        for a, b in zip(bounds, bounds[1:]):
            mid = 0.5 * (a + b)
            s1 = 1.0 if beta_i + mid >= 0 else -1.0
            s2 = 1.0 if beta_j - mid >= 0 else -1.0
            t_star = -(delta + epsilon * (s1 - s2)) / eta
            if a < t_star < b:
                candidates.append(t_star)
    ts = np.asarray(candidates)
    phi = (0.5 * eta * ts * ts + delta * ts
           + epsilon * (np.abs(beta_i + ts) + np.abs(beta_j - ts)))
    return float(ts[np.argmin(phi)])


def fit_svr(X: np.ndarray, y: np.ndarray, C: float, epsilon: float,
            gamma: float, tol: float = 1e-3,
            max_iter: int | None = None) -> RbfSvrModel:
    """Fit epsilon-SVR by SMO; raises SvrConvergenceError past the budget."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if X.ndim != 2 or len(X) != n or n == 0:
        raise ValueError("X must be (n, d) matching y")
    if C <= 0 or gamma <= 0 or epsilon < 0:
        raise ValueError("require C > 0, gamma > 0, epsilon >= 0")
    if max_iter is None:
        max_iter = max(20_000, 100 * n)

    K = rbf_kernel(X, X, gamma)
    diag = np.diag(K).copy()
    beta = np.zeros(n)
    resid = -y.copy()  # K beta - y
    box_eps = 1e-12 * max(C, 1.0)

    it = 0
    violation = np.inf
    for it in range(1, max_iter + 1):
        sign_up = np.where(beta >= 0, 1.0, -1.0)
        sign_dn = np.where(beta <= 0, -1.0, 1.0)
        up = resid + epsilon * sign_up
        down = resid + epsilon * sign_dn
        can_up = beta < C - box_eps
        can_dn = beta > -C + box_eps
        up_masked = np.where(can_up, up, np.inf)
        dn_masked = np.where(can_dn, down, -np.inf)
        i = int(np.argmin(up_masked))
        min_up = up_masked[i]
        max_dn = dn_masked.max()
        violation = max_dn - min_up
        if violation <= tol:
            break
        # second-order choice of j among violators of pair (i, .)
        Ki = K[i]
        viable = can_dn & (down > min_up)
        eta = np.maximum(diag[i] + diag - 2.0 * Ki, 1e-12)
        gain = np.where(viable, (down - min_up) ** 2 / (2.0 * eta), -np.inf)
        j = int(np.argmax(gain))
        t = _solve_pair(beta[i], beta[j], float(diag[i] + diag[j] - 2.0 * Ki[j]),
                        float(resid[i] - resid[j]), epsilon, C)
        if abs(t) < 1e-14:
            break
        beta[i] = min(max(beta[i] + t, -C), C)
        beta[j] = min(max(beta[j] - t, -C), C)
        resid += t * (Ki - K[j])
    else:
        raise SvrConvergenceError(float(violation), it)
    if violation > tol:
        raise SvrConvergenceError(float(violation), it)

    bias = -0.5 * (float(min_up) + float(max_dn)) if np.isfinite(min_up) \
        and np.isfinite(max_dn) else -float(resid.mean())
    support = np.abs(beta) > 1e-10
    return RbfSvrModel(support_x=X[support].copy(), weights=beta[support].copy(),
                       bias=float(bias), gamma=gamma, epsilon=epsilon, C=C,
                       n_iter=it, kkt_violation=float(max(violation, 0.0)))


def fit_kernel_ridge(X: np.ndarray, y: np.ndarray, gamma: float,
                     lam: float = 1e-3) -> RbfSvrModel:
    """Closed-form fallback satisfying the same prediction contract."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    K = rbf_kernel(X, X, gamma)
    w = np.linalg.solve(K + lam * np.eye(len(y)), y)
    return RbfSvrModel(support_x=X.copy(), weights=w, bias=0.0, gamma=gamma,
                       epsilon=0.0, C=np.inf)
