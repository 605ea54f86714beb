"""One-vs-rest RBF support vector classifier solved by SMO.

The dual of each binary problem,

    min_a  0.5 a^T Q a - 1^T a,   Q_ij = y_i y_j K_ij,   0 <= a_i <= C,   y^T a = 0,

is solved with sequential minimal optimization using second-order working
set selection. All one-vs-rest problems share one precomputed kernel matrix
held in float32 to fit desk-sized memory.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

TAU = 1e-12


@dataclass(frozen=True)
class SvcParams:
    C: float = 1.0
    gamma: float | None = None      # None: 1 / (n_features * X.var())
    kernel: str = "rbf"             # "rbf" or "linear"
    tol: float = 1e-3
    max_iter: int = 10_000_000


@dataclass
class SvcModel:
    support: np.ndarray             # (n_sv, n_features) support vectors
    dual_coef: np.ndarray           # (n_sv, n_classes) alpha_i * y_i per class
    intercept: np.ndarray           # (n_classes,)
    gamma: float
    params: SvcParams = field(default_factory=SvcParams)
    support_index: np.ndarray | None = None
    kkt_gap: np.ndarray | None = None
    n_iter: np.ndarray | None = None

    @property
    def n_classes(self) -> int:
        return self.dual_coef.shape[1]


def kernel_matrix(A: np.ndarray, B: np.ndarray, gamma: float, kind: str = "rbf",
                  dtype=np.float64, block: int = 2048) -> np.ndarray:
    """K[i, j] = exp(-gamma |a_i - b_j|^2) (or a_i . b_j for the linear kernel)."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    out = np.empty((A.shape[0], B.shape[0]), dtype=dtype)
    bb = np.einsum("ij,ij->i", B, B)
    for s in range(0, A.shape[0], block):
        a = A[s:s + block]
        g = a @ B.T
        if kind == "linear":
            out[s:s + block] = g
            continue
        if kind != "rbf":
            raise ValueError(f"unknown kernel {kind!r}")
        d = np.einsum("ij,ij->i", a, a)[:, None] + bb[None, :] - 2.0 * g
        np.maximum(d, 0.0, out=d)
        out[s:s + block] = np.exp(-gamma * d)
    return out


def rbf(a: np.ndarray, b: np.ndarray, gamma: float) -> float:
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    return float(np.exp(-gamma * d @ d))


@numba.njit(cache=True)
def smo_solve(K, y, C, tol, max_iter):
    """Binary SMO (WSS2). Returns (alpha, b, iterations, final gap m - M)."""
    n = y.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    it = 0
    gap = np.inf
    while it < max_iter:
        # i: maximal violating index in I_up
        gmax = -np.inf
        i = -1
        for t in range(n):
            if (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0):
                v = -y[t] * grad[t]
                if v > gmax:
                    gmax = v
                    i = t
        gmin = np.inf
        j = -1
        obj_min = np.inf
        for t in range(n):
            if (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < C):
                v = -y[t] * grad[t]
                if v < gmin:
                    gmin = v
                if i >= 0:
                    b = gmax - v
                    if b > 0:
                        a = K[i, i] + K[t, t] - 2.0 * K[i, t]
                        if a <= 0:
                            a = TAU
                        o = -(b * b) / a
                        if o < obj_min:
                            obj_min = o
                            j = t
        gap = gmax - gmin
        if gap < tol or i < 0 or j < 0:
            break
        it += 1

        a = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if a <= 0:
            a = TAU
        # Move along y_i d_i = -y_j d_j, clipped to the box.
        b = -y[i] * grad[i] + y[j] * grad[j]
        old_i = alpha[i]
        old_j = alpha[j]
        ai = old_i + y[i] * b / a
        aj = old_j - y[j] * b / a
        s = y[i] * old_i + y[j] * old_j
        ai = min(max(ai, 0.0), C)
        aj = y[j] * (s - y[i] * ai)
        aj = min(max(aj, 0.0), C)
        ai = y[i] * (s - y[j] * aj)
        alpha[i] = ai
        alpha[j] = aj
        di = ai - old_i
        dj = aj - old_j
        for t in range(n):
            grad[t] += y[t] * (y[i] * K[t, i] * di + y[j] * K[t, j] * dj)

    # Intercept from free vectors, else midpoint of the feasible interval.
    acc = 0.0
    nfree = 0
    ub = np.inf
    lb = -np.inf
    for t in range(n):
        yg = y[t] * grad[t]
        if 0 < alpha[t] < C:
            acc += yg
            nfree += 1
        elif (alpha[t] >= C and y[t] < 0) or (alpha[t] <= 0 and y[t] > 0):
            ub = min(ub, yg)
        else:
            lb = max(lb, yg)
    rho = acc / nfree if nfree > 0 else 0.5 * (ub + lb)
    return alpha, -rho, it, gap


def default_gamma(X: np.ndarray) -> float:
    var = float(np.asarray(X, dtype=np.float64).var())
    return 1.0 / (X.shape[1] * var) if var > 0 else 1.0


def svc_train(X: np.ndarray, y: np.ndarray, n_classes: int, params: SvcParams = SvcParams()) -> SvcModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    gamma = default_gamma(X) if params.gamma is None else float(params.gamma)
    K = kernel_matrix(X, X, gamma, params.kernel, dtype=np.float32)
    n = X.shape[0]
    coef = np.zeros((n, n_classes))
    bias = np.zeros(n_classes)
    gaps = np.zeros(n_classes)
    iters = np.zeros(n_classes, dtype=np.int64)
    for c in range(n_classes):
        t = np.where(y == c, 1.0, -1.0)
        if np.all(t < 0):
            bias[c] = -1.0  # class absent from training data
            continue
        if np.all(t > 0):
            bias[c] = 1.0
            continue
        alpha, b, it, gap = smo_solve(K, t, float(params.C), float(params.tol), int(params.max_iter))
        if gap >= params.tol:
            warnings.warn(f"SMO for class {c} stopped after {it} iterations with KKT gap {gap:.3g}",
                          RuntimeWarning)
        coef[:, c] = alpha * t
        bias[c] = b
        gaps[c] = gap
        iters[c] = it
    del K
    sv = np.flatnonzero(np.any(coef != 0, axis=1))
    return SvcModel(X[sv].copy(), coef[sv], bias, gamma, params, sv, gaps, iters)


def svc_decision(model: SvcModel, X: np.ndarray) -> np.ndarray:
    """sum_i alpha_i y_i K(x_i, x) + b per class, shape (n, n_classes)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if model.support.shape[0] and X.shape[1] != model.support.shape[1]:
        raise ValueError("feature length mismatch")
    if model.support.shape[0] == 0:
        return np.broadcast_to(model.intercept, (X.shape[0], model.n_classes)).copy()
    K = kernel_matrix(X, model.support, model.gamma, model.params.kernel)
    return K @ model.dual_coef + model.intercept


def svc_predict(model: SvcModel, X: np.ndarray) -> np.ndarray:
    return np.argmax(svc_decision(model, X), axis=1)
