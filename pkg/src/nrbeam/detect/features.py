"""DMRS feature vectors and power normalization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..phy.grid import extract_dmrs
from ..sequences import DMRS_LEN

N_FEATURES = 2 * DMRS_LEN


@dataclass(frozen=True)
class DmrsFeatureVector:
    x: np.ndarray
    label: int | None = None
    snr_db: float | None = None
    source: Literal["sim", "capture"] = "sim"

    def __post_init__(self):
        x = np.array(self.x, dtype=np.float64)
        if x.shape != (N_FEATURES,):
            raise ValueError(f"feature vector must have {N_FEATURES} entries, got {x.shape}")
        if self.source not in ("sim", "capture"):
            raise ValueError(f"unknown source {self.source!r}")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @property
    def dmrs(self) -> np.ndarray:
        return to_complex(self.x)


def interleave(z: np.ndarray) -> np.ndarray:
    """Complex (..., 144) -> real (..., 288) as re0, im0, re1, im1, ..."""
    z = np.asarray(z)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],), dtype=np.float64)
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def to_complex(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return x[..., 0::2] + 1j * x[..., 1::2]


def features_from_rf(rf: np.ndarray, v: int) -> np.ndarray:
    """Raw 288-feature arrays for PBCH rows of shape (..., 3, 240)."""
    return interleave(extract_dmrs(np.asarray(rf), v))


def dmrs_extract(rf: np.ndarray, v: int, **meta) -> DmrsFeatureVector:
    return DmrsFeatureVector(features_from_rf(rf, v), **meta)


@dataclass
class NormalizationState:
    """Running mean N_p of per-vector mean feature power."""

    np_factor: float = 0.0
    count: int = 0

    def update(self, X: np.ndarray) -> None:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        p = np.mean(X ** 2, axis=1)
        # Chunked running mean: equal to the batch mean regardless of chunking.
        total = self.count + p.size
        self.np_factor += (p.sum() - p.size * self.np_factor) / total
        self.count = total

    def to_dict(self) -> dict:
        return {"np_factor": self.np_factor, "count": self.count}


def normalize(vec, state: NormalizationState, update: bool = False):
    """Divide features by sqrt(N_p), optionally folding them into N_p first.

    Accepts a :class:`DmrsFeatureVector`, a single 288 array, or an (n, 288)
    batch; the return type follows the input.
    """
    x = vec.x if isinstance(vec, DmrsFeatureVector) else np.asarray(vec, dtype=np.float64)
    if x.shape[-1] != N_FEATURES:
        raise ValueError(f"expected {N_FEATURES} features")
    if update:
        state.update(x)
    if state.count == 0 or state.np_factor <= 0:
        raise ValueError("normalization state has no accumulated power")
    out = x / np.sqrt(state.np_factor)
    if isinstance(vec, DmrsFeatureVector):
        return DmrsFeatureVector(out, vec.label, vec.snr_db, vec.source)
    return out
