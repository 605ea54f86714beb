"""Multilayer perceptron (ReLU hidden layers, softmax output) trained with Adam."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class MlpParams:
    hidden: tuple[int, ...] = (100, 100)
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    alpha: float = 1e-4          # L2 penalty
    batch_size: int = 200
    epochs: int = 200
    tol: float = 1e-4
    n_iter_no_change: int = 10
    seed: int = 0


@dataclass
class MlpModel:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    params: MlpParams = field(default_factory=MlpParams)
    loss_curve: list[float] = field(default_factory=list)

    @property
    def n_features(self) -> int:
        return self.weights[0].shape[0]

    @property
    def n_classes(self) -> int:
        return self.weights[-1].shape[1]


def init_model(n_features: int, n_classes: int, params: MlpParams, rng: np.random.Generator) -> MlpModel:
    sizes = (n_features, *params.hidden, n_classes)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, (fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, fan_out))
    return MlpModel(weights, biases, params)


def forward(model: MlpModel, X: np.ndarray) -> list[np.ndarray]:
    """Activations of every layer; the last entry is the output pre-activation."""
    acts = [X]
    for W, b in zip(model.weights[:-1], model.biases[:-1]):
        acts.append(np.maximum(acts[-1] @ W + b, 0.0))
    acts.append(acts[-1] @ model.weights[-1] + model.biases[-1])
    return acts


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def loss_and_grads(model: MlpModel, X: np.ndarray, y: np.ndarray, alpha: float):
    """Mean cross-entropy plus (alpha / 2n) sum |W|^2, and its gradients."""
    n = X.shape[0]
    acts = forward(model, X)
    logits = acts[-1]
    z = logits - logits.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    loss = -np.mean(logp[np.arange(n), y])
    loss += 0.5 * alpha * sum(np.sum(W * W) for W in model.weights) / n

    delta = np.exp(logp)
    delta[np.arange(n), y] -= 1.0
    delta /= n
    gw, gb = [None] * len(model.weights), [None] * len(model.weights)
    for layer in range(len(model.weights) - 1, -1, -1):
        gw[layer] = acts[layer].T @ delta + alpha * model.weights[layer] / n
        gb[layer] = delta.sum(axis=0)
        if layer:
            delta = (delta @ model.weights[layer].T) * (acts[layer] > 0)
    return float(loss), gw, gb


def mlp_train(X: np.ndarray, y: np.ndarray, n_classes: int, params: MlpParams = MlpParams()) -> MlpModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    rng = np.random.default_rng(params.seed)
    model = init_model(X.shape[1], n_classes, params, rng)
    state = [np.zeros_like(p) for p in (*model.weights, *model.biases)]
    m_state, v_state = state, [np.zeros_like(p) for p in state]
    step = 0
    n = X.shape[0]
    bs = min(params.batch_size, n)
    best, stall = np.inf, 0
    for epoch in range(params.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, bs):
            idx = order[start:start + bs]
            loss, gw, gb = loss_and_grads(model, X[idx], y[idx], params.alpha)
            if not np.isfinite(loss):
                raise FloatingPointError(
                    f"MLP loss became {loss} at epoch {epoch}, step {step}; "
                    f"max |W| = {max(np.abs(W).max() for W in model.weights):.3g}"
                )
            total += loss * idx.size
            step += 1
            lr_t = params.lr * np.sqrt(1 - params.beta2 ** step) / (1 - params.beta1 ** step)
            for p, g, m, v in zip((*model.weights, *model.biases), (*gw, *gb), m_state, v_state):
                m *= params.beta1
                m += (1 - params.beta1) * g
                v *= params.beta2
                v += (1 - params.beta2) * g * g
                p -= lr_t * m / (np.sqrt(v) + params.eps)
        epoch_loss = total / n
        model.loss_curve.append(epoch_loss)
        if epoch_loss > best - params.tol:
            stall += 1
            if stall >= params.n_iter_no_change:
                break
        else:
            stall = 0
        best = min(best, epoch_loss)
    return model


def _check(model: MlpModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {X.shape[1]}")
    return X


def mlp_scores(model: MlpModel, X: np.ndarray) -> np.ndarray:
    """Softmax class scores, shape (n, n_classes)."""
    return softmax(forward(model, _check(model, X))[-1])


def mlp_predict(model: MlpModel, X: np.ndarray) -> np.ndarray:
    """Index of the largest output neuron (pre-activation), ties to the lowest."""
    return np.argmax(forward(model, _check(model, X))[-1], axis=1)
