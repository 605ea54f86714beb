"""One-vs-rest L2-regularized logistic regression trained with L-BFGS."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .lbfgs import lbfgs_minimize


@dataclass(frozen=True)
class LogRegParams:
    C: float = 1.0
    max_iter: int = 100
    gtol: float = 1e-4
    memory: int = 10


@dataclass
class LogRegModel:
    theta: np.ndarray               # (n_classes, n_features + 1), bias last
    params: LogRegParams = field(default_factory=LogRegParams)
    n_iter: np.ndarray | None = None
    fallback_steps: int = 0

    @property
    def n_classes(self) -> int:
        return self.theta.shape[0]


def _log1pexp(z):
    return np.logaddexp(0.0, z)


def sigmoid(z):
    # Split by sign to avoid overflow in exp.
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def binary_loss_grad(theta: np.ndarray, Xb: np.ndarray, t: np.ndarray, C: float):
    """C * sum log(1 + exp(-t * Xb theta)) + 0.5 |w|^2, bias unpenalized.

    ``Xb`` carries a trailing column of ones, ``t`` is in {-1, +1}.
    """
    z = Xb @ theta
    m = t * z
    loss = C * np.sum(_log1pexp(-m)) + 0.5 * theta[:-1] @ theta[:-1]
    coef = -C * t * sigmoid(-m)
    grad = Xb.T @ coef
    grad[:-1] += theta[:-1]
    return float(loss), grad


def _with_bias(X):
    X = np.asarray(X, dtype=np.float64)
    return np.hstack([X, np.ones((X.shape[0], 1))])


def logreg_train(X: np.ndarray, y: np.ndarray, n_classes: int, params: LogRegParams = LogRegParams()) -> LogRegModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    Xb = _with_bias(X)
    theta = np.zeros((n_classes, Xb.shape[1]))
    iters = np.zeros(n_classes, dtype=np.int64)
    fallbacks = 0
    for c in range(n_classes):
        t = np.where(y == c, 1.0, -1.0)
        res = lbfgs_minimize(
            lambda th: binary_loss_grad(th, Xb, t, params.C),
            np.zeros(Xb.shape[1]),
            memory=params.memory,
            max_iter=params.max_iter,
            gtol=params.gtol,
        )
        theta[c] = res.x
        iters[c] = res.n_iter
        fallbacks += res.fallback_steps
    if fallbacks:
        warnings.warn(f"logistic regression: {fallbacks} line-search fallback steps", RuntimeWarning)
    return LogRegModel(theta, params, iters, fallbacks)


def logreg_scores(model: LogRegModel, X: np.ndarray) -> np.ndarray:
    """Per-class sigmoid hypotheses h_theta(x), shape (n, n_classes)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.theta.shape[1] - 1:
        raise ValueError("feature length mismatch")
    return sigmoid(_with_bias(X) @ model.theta.T)


def logreg_predict(model: LogRegModel, X: np.ndarray) -> np.ndarray:
    # The sigmoid is monotone, so argmax over the linear scores is the same
    # decision without saturation ties.
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.theta.shape[1] - 1:
        raise ValueError("feature length mismatch")
    return np.argmax(_with_bias(X) @ model.theta.T, axis=1)
