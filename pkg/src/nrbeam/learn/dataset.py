"""Labeled feature datasets and the stratified train/test split."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from ..detect.features import N_FEATURES


@dataclass
class Dataset:
    X: np.ndarray                  # (n, 288) raw features
    y: np.ndarray                  # (n,) labels; -1 marks unlabeled
    lmax: int = 8
    snr_db: float = float("nan")
    source: str = "sim"
    crc_mask: np.ndarray | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2 or self.X.shape[1] != N_FEATURES:
            raise ValueError(f"features must be (n, {N_FEATURES})")
        if self.y.shape != (self.X.shape[0],):
            raise ValueError("one label per vector required")
        if np.any((self.y < -1) | (self.y >= self.lmax)):
            raise ValueError("labels must lie in [0, lmax) or be -1")
        if self.crc_mask is None:
            self.crc_mask = np.zeros(len(self.y), dtype=np.uint8)

    def __len__(self):
        return self.y.size

    @property
    def labeled(self) -> np.ndarray:
        return self.y >= 0

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(self.X[idx], self.y[idx], self.lmax, self.snr_db, self.source,
                       self.crc_mask[idx], dict(self.provenance))

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.X.astype(np.float32)).tobytes())
        h.update(self.y.astype(np.int16).tobytes())
        return h.hexdigest()[:16]


def stratified_split(y: np.ndarray, train_frac: float = 0.7, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Per-class shuffled split; each class contributes round(train_frac * n_c) to training."""
    if not 0 < train_frac < 1:
        raise ValueError("train_frac must lie in (0, 1)")
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        rng.shuffle(idx)
        k = int(np.floor(train_frac * idx.size + 0.5))
        train.append(idx[:k])
        test.append(idx[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def stratified_take(y: np.ndarray, size: int, seed: int = 0) -> np.ndarray:
    """A class-balanced subset of ``size`` indices (earlier classes get the remainder)."""
    y = np.asarray(y)
    classes = np.unique(y)
    if size > y.size:
        raise ValueError(f"requested {size} samples from a pool of {y.size}")
    rng = np.random.default_rng(seed)
    base, extra = divmod(size, classes.size)
    picks = []
    for i, c in enumerate(classes):
        idx = np.flatnonzero(y == c)
        want = base + (1 if i < extra else 0)
        if want > idx.size:
            raise ValueError(f"class {c} has only {idx.size} samples, need {want}")
        picks.append(rng.permutation(idx)[:want])
    return np.sort(np.concatenate(picks))
