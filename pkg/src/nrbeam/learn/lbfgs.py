"""Limited-memory BFGS with two-loop recursion and Armijo backtracking."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable

import numpy as np

FunGrad = Callable[[np.ndarray], tuple[float, np.ndarray]]


@dataclass
class LbfgsResult:
    x: np.ndarray
    f: float
    grad_norm: float
    n_iter: int
    converged: bool
    fallback_steps: int


def _two_loop(g: np.ndarray, pairs: deque) -> np.ndarray:
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * (s @ q)
        q -= a * y
        alphas.append(a)
    if pairs:
        s, y, _ = pairs[-1]
        q *= (s @ y) / (y @ y)
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * (y @ q)
        q += (a - b) * s
    return -q


def _backtrack(fun_grad: FunGrad, x, f, g, d, step, c1, shrink, max_ls):
    slope = g @ d
    for _ in range(max_ls):
        x_new = x + step * d
        f_new, g_new = fun_grad(x_new)
        if np.isfinite(f_new) and f_new <= f + c1 * step * slope:
            return x_new, f_new, g_new
        step *= shrink
    return None


def lbfgs_minimize(
    fun_grad: FunGrad,
    x0: np.ndarray,
    *,
    memory: int = 10,
    max_iter: int = 200,
    gtol: float = 1e-5,
    c1: float = 1e-4,
    shrink: float = 0.5,
    max_ls: int = 40,
) -> LbfgsResult:
    """Minimize a smooth function given ``fun_grad(x) -> (f, grad)``.

    Converges when the infinity norm of the gradient drops below ``gtol``.
    If the quasi-Newton direction is not a descent direction or its line
    search fails, a plain gradient step is tried and counted in
    ``fallback_steps``; the memory is reset in that case.
    """
    x = np.array(x0, dtype=np.float64)
    f, g = fun_grad(x)
    pairs: deque = deque(maxlen=memory)
    fallbacks = 0
    gnorm = float(np.max(np.abs(g))) if g.size else 0.0
    it = 0
    while gnorm > gtol and it < max_iter:
        it += 1
        d = _two_loop(g, pairs)
        step = 1.0 if pairs else 1.0 / max(np.linalg.norm(g), 1e-12)
        res = None
        if g @ d < 0:
            res = _backtrack(fun_grad, x, f, g, d, step, c1, shrink, max_ls)
        if res is None:
            fallbacks += 1
            pairs.clear()
            res = _backtrack(fun_grad, x, f, g, -g, 1.0 / max(np.linalg.norm(g), 1e-12), c1, shrink, max_ls)
            if res is None:
                break
        x_new, f_new, g_new = res
        s, y = x_new - x, g_new - g
        sy = s @ y
        if sy > 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
            pairs.append((s, y, 1.0 / sy))
        x, f, g = x_new, f_new, g_new
        gnorm = float(np.max(np.abs(g)))
    return LbfgsResult(x, float(f), gnorm, it, gnorm <= gtol, fallbacks)
