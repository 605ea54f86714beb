"""Correlation-based blind SSB index detection."""

from __future__ import annotations

import numpy as np

from ..sequences import CellIdentity, dmrs_bank
from .features import DmrsFeatureVector, to_complex


def correlation_scores(X: np.ndarray, cell: CellIdentity, lmax: int = 8) -> np.ndarray:
    """Re sum_k rF_h[k] conj(s_i[k]) for every hypothesis; X is (..., 288)."""
    z = to_complex(X)
    return (z @ np.conj(dmrs_bank(cell, lmax)).T).real


def correlate_detect(vec, cell: CellIdentity, lmax: int = 8) -> tuple[int, np.ndarray]:
    """Return (issb, scores). Ties resolve to the lowest index."""
    x = vec.x if isinstance(vec, DmrsFeatureVector) else np.asarray(vec)
    scores = correlation_scores(x, cell, lmax)
    return int(np.argmax(scores)), scores


def correlate_batch(X: np.ndarray, cell: CellIdentity, lmax: int = 8) -> np.ndarray:
    return np.argmax(correlation_scores(X, cell, lmax), axis=-1)
