"""OFDM modulation of SSB grids into sample streams and demodulation back to REs.

Scaling convention: the demodulator divides the FFT by ``fft_size`` so a
unit-amplitude RE round-trips to unit amplitude.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .frame import SSB_SUBCARRIERS, SSB_SYMBOLS, FrameConfig, IqBuffer
from .grid import SsbGrid


def ssb_bins(fft_size: int) -> np.ndarray:
    """FFT bin of each of the 240 SSB subcarriers (subcarrier 120 sits on DC)."""
    return (np.arange(SSB_SUBCARRIERS) - SSB_SUBCARRIERS // 2) % fft_size


def modulate_symbols(rows: np.ndarray, cfg: FrameConfig) -> np.ndarray:
    """Modulate (..., n_sym, 240) RE rows into (..., n_sym * symbol_len) samples with CP."""
    rows = np.asarray(rows)
    n = cfg.fft_size
    spec = np.zeros((*rows.shape[:-1], n), dtype=np.complex128)
    spec[..., ssb_bins(n)] = rows
    body = np.fft.ifft(spec, axis=-1) * n
    sym = np.concatenate([body[..., n - cfg.cp_len:], body], axis=-1)
    return sym.reshape(*rows.shape[:-2], -1)


def modulate_ssb(grid: SsbGrid, cfg: FrameConfig) -> np.ndarray:
    """Time-domain samples of one SSB (4 symbols with CP)."""
    return modulate_symbols(grid.re, cfg)


def ofdm_modulate(grids: Iterable[tuple[SsbGrid, int]], cfg: FrameConfig) -> IqBuffer:
    """Place each (grid, symbol position) into a zero buffer of ``cfg.buffer_samples``.

    The position is an OFDM symbol index counted from the buffer start, e.g.
    ``cfg.burst_positions[issb]``.
    """
    out = np.zeros(cfg.buffer_samples, dtype=np.complex128)
    spans = []
    for grid, pos in grids:
        start = int(pos) * cfg.symbol_len
        stop = start + cfg.ssb_len
        if start < 0 or stop > out.size:
            raise ValueError(f"SSB at symbol {pos} does not fit in the buffer")
        for a, b in spans:
            if start < b and a < stop:
                raise ValueError(f"SSB at symbol {pos} overlaps another SSB")
        spans.append((start, stop))
        out[start:stop] = modulate_ssb(grid, cfg)
    return IqBuffer(out, cfg.sample_rate, "simulated")


def demodulate_symbols(samples: np.ndarray, start: int, cfg: FrameConfig, symbols: Iterable[int]) -> np.ndarray:
    """FFT the listed SSB symbols of the SSB whose CP starts at ``start``.

    Returns shape (len(symbols), 240).
    """
    n, step = cfg.fft_size, cfg.symbol_len
    idx = [start + cfg.cp_len + step * s for s in symbols]
    blocks = np.stack([samples[i:i + n] for i in idx])
    return (np.fft.fft(blocks, axis=-1) / n)[:, ssb_bins(n)]


def ofdm_demodulate(buf: IqBuffer, n_ssb: int, cfg: FrameConfig) -> np.ndarray:
    """The three PBCH symbol rows (SSB symbols 1..3), shape (3, 240)."""
    n_ssb = int(n_ssb)
    if n_ssb < 0 or n_ssb + cfg.ssb_len > len(buf):
        raise ValueError(f"n_ssb {n_ssb} leaves no room for a full SSB in the buffer")
    return demodulate_symbols(buf.samples, n_ssb, cfg, (1, 2, 3))


def demodulate_ssb(samples: np.ndarray, n_ssb: int, cfg: FrameConfig) -> np.ndarray:
    """All four SSB symbol rows, shape (4, 240)."""
    if n_ssb < 0 or n_ssb + cfg.ssb_len > len(samples):
        raise ValueError(f"n_ssb {n_ssb} leaves no room for a full SSB")
    return demodulate_symbols(samples, n_ssb, cfg, range(SSB_SYMBOLS))
