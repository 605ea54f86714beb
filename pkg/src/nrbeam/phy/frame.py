from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Literal

import numpy as np

CASE_B_POSITIONS = (4, 8, 16, 20, 32, 36, 44, 48)
SSB_SYMBOLS = 4
SSB_SUBCARRIERS = 240


@dataclass(frozen=True)
class FrameConfig:
    """Numerology and buffering parameters for one receive chain.

    ``cp_len`` is applied uniformly to every symbol; the slightly longer
    first-symbol CP of each half-subframe is not modelled.
    """

    sample_rate: float = 30_720_000.0
    scs: float = 30_000.0
    fft_size: int = 1024
    cp_len: int = 72
    lmax: int = 8
    ssb_period_ms: float = 20.0
    burst_positions: tuple[int, ...] = CASE_B_POSITIONS
    buffer_duration: float = 0.020

    def __post_init__(self):
        object.__setattr__(self, "burst_positions", tuple(int(p) for p in self.burst_positions))
        ratio = self.sample_rate / self.scs
        if ratio != int(ratio) or int(ratio) != self.fft_size:
            raise ValueError(
                f"fft_size must equal sample_rate/scs exactly ({self.sample_rate}/{self.scs})"
            )
        if self.fft_size < SSB_SUBCARRIERS:
            raise ValueError("fft_size must hold the 240 SSB subcarriers")
        if not 0 <= self.cp_len < self.fft_size:
            raise ValueError("cp_len must be in [0, fft_size)")
        if len(self.burst_positions) != self.lmax:
            raise ValueError("burst_positions must have exactly lmax entries")
        pos = np.asarray(self.burst_positions)
        if pos.min() < 0 or np.any(np.diff(pos) < SSB_SYMBOLS):
            raise ValueError("burst_positions must be increasing and at least 4 symbols apart")
        if self.buffer_samples < self.period_samples:
            raise ValueError("buffer must cover at least one SSB period")
        if (pos.max() + SSB_SYMBOLS) * self.symbol_len > self.buffer_samples:
            raise ValueError("SSB burst does not fit in the buffer")

    @property
    def symbol_len(self) -> int:
        return self.fft_size + self.cp_len

    @property
    def ssb_len(self) -> int:
        return SSB_SYMBOLS * self.symbol_len

    @property
    def period_samples(self) -> int:
        return int(round(self.sample_rate * self.ssb_period_ms / 1000.0))

    @property
    def buffer_samples(self) -> int:
        return int(round(self.sample_rate * self.buffer_duration))

    def ssb_start(self, issb: int) -> int:
        """Sample index of the first sample (CP start) of SSB ``issb`` in the burst."""
        return self.burst_positions[issb] * self.symbol_len

    def to_dict(self) -> dict:
        d = asdict(self)
        d["burst_positions"] = list(self.burst_positions)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FrameConfig":
        d = dict(d)
        if "burst_positions" in d:
            d["burst_positions"] = tuple(d["burst_positions"])
        return cls(**d)


@dataclass(frozen=True)
class IqBuffer:
    samples: np.ndarray
    sample_rate: float
    origin: Literal["simulated", "file"] = "simulated"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        s = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if s.ndim != 1 or s.size == 0:
            raise ValueError("IqBuffer needs a non-empty 1-D sample array")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.origin not in ("simulated", "file"):
            raise ValueError(f"unknown origin {self.origin!r}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def __len__(self):
        return self.samples.size
