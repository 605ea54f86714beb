from __future__ import annotations

import math

import numpy as np


def wilson(failures: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (95% by default)."""
    if n <= 0:
        return 0.0, 1.0
    p = failures / n
    z2 = z * z
    centre = (p + z2 / (2 * n)) / (1 + z2 / n)
    half = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n)
    return max(0.0, centre - half), min(1.0, centre + half)


def macro_fail_rate(true: np.ndarray, detected: np.ndarray, lmax: int) -> float:
    """Fail probability averaged over the beam indices present."""
    true = np.asarray(true)
    wrong = np.asarray(detected) != true
    rates = [wrong[true == c].mean() for c in range(lmax) if np.any(true == c)]
    return float(np.mean(rates)) if rates else float("nan")
