"""Cell search: PSS timing/N_ID2 acquisition, coherent SSS detection and phase reference."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..phy.frame import FrameConfig, IqBuffer
from ..phy.grid import SYNC_SC
from ..phy.ofdm import demodulate_symbols, ssb_bins
from ..sequences import CellIdentity, pss_sequence, sss_bank, sss_sequence

# Detection floor as a multiple of the median normalized correlation.
PSS_FLOOR_FACTOR = 6.0
_ENERGY_EPS = 1e-12


class NoCellFound(RuntimeError):
    """PSS correlation peak did not clear the detection floor."""


@dataclass(frozen=True)
class SearchResult:
    n_ssb: int
    cell: CellIdentity
    pss_metric: float
    sss_metric: float


@lru_cache(maxsize=8)
def _pss_replicas(fft_size: int) -> np.ndarray:
    spec = np.zeros((3, fft_size), dtype=np.complex128)
    bins = ssb_bins(fft_size)[SYNC_SC]
    for nid2 in range(3):
        spec[nid2, bins] = pss_sequence(nid2)
    body = np.fft.ifft(spec, axis=1) * fft_size
    body.setflags(write=False)
    return body


def pss_replicas(cfg: FrameConfig) -> np.ndarray:
    """Time-domain useful parts (no CP) of the three PSS symbols, shape (3, fft_size)."""
    return _pss_replicas(cfg.fft_size)


def pss_correlation(samples: np.ndarray, cfg: FrameConfig) -> np.ndarray:
    """Normalized cross-correlation |<r[l:l+N], p>| / (|p| |r[l:l+N]|), shape (3, n_lags)."""
    x = np.asarray(samples, dtype=np.complex128)
    n = cfg.fft_size
    if x.size < n:
        raise ValueError("buffer shorter than one OFDM symbol")
    reps = pss_replicas(cfg)
    lags = x.size - n + 1
    nfft = 1 << int(np.ceil(np.log2(x.size + n)))
    xf = np.fft.fft(x, nfft)
    pf = np.fft.fft(reps, nfft, axis=1)
    corr = np.fft.ifft(xf[None, :] * np.conj(pf), axis=1)[:, :lags]

    power = np.abs(x) ** 2
    csum = np.concatenate([[0.0], np.cumsum(power)])
    energy = csum[n:] - csum[:-n]
    live = energy > _ENERGY_EPS * max(energy.max(), 1e-300)
    pnorm = np.linalg.norm(reps[0])
    metric = np.zeros((3, lags))
    metric[:, live] = np.abs(corr[:, live]) / (pnorm * np.sqrt(energy[live]))
    return np.minimum(metric, 1.0)


def pss_search(buf: IqBuffer | np.ndarray, cfg: FrameConfig) -> tuple[int, int, float]:
    """Locate the strongest PSS. Returns (n_ssb, nid2, normalized peak metric).

    ``n_ssb`` is the first sample (CP start) of the SSB, i.e. the correlation
    peak minus ``cp_len``. Raises :class:`NoCellFound` when the peak does not
    exceed ``PSS_FLOOR_FACTOR`` times the median metric over all lags.
    """
    x = buf.samples if isinstance(buf, IqBuffer) else np.asarray(buf)
    if x.size < cfg.ssb_len:
        raise ValueError("buffer shorter than one SSB")
    metric = pss_correlation(x, cfg)
    nid2, lag = np.unravel_index(int(np.argmax(metric)), metric.shape)
    peak = float(metric[nid2, lag])
    floor = PSS_FLOOR_FACTOR * float(np.median(metric[nid2]))
    if peak <= 0.0 or peak <= floor:
        raise NoCellFound(f"PSS peak {peak:.4f} below floor {floor:.4f}")
    n_ssb = int(lag) - cfg.cp_len
    if n_ssb < 0 or n_ssb + cfg.ssb_len > x.size:
        raise NoCellFound(f"PSS peak at {lag} leaves no complete SSB in the buffer")
    return n_ssb, int(nid2), peak


def _sync_rows(samples: np.ndarray, n_ssb: int, cfg: FrameConfig) -> tuple[np.ndarray, np.ndarray]:
    rows = demodulate_symbols(samples, n_ssb, cfg, (0, 2))
    return rows[0, SYNC_SC], rows[1, SYNC_SC]


def sss_detect(buf: IqBuffer | np.ndarray, n_ssb: int, nid2: int, cfg: FrameConfig) -> tuple[int, float]:
    """Detect N_ID1 by coherent matched filtering of the SSS.

    The PSS symbol provides a per-subcarrier channel estimate; the score of
    candidate c is Re sum Y_sss * conj(H_pss) * d_c. Returns (nid1, metric)
    with the metric normalized to [0, 1].
    """
    x = buf.samples if isinstance(buf, IqBuffer) else np.asarray(buf)
    y_pss, y_sss = _sync_rows(x, n_ssb, cfg)
    h = y_pss * pss_sequence(nid2)
    z = y_sss * np.conj(h)
    scores = sss_bank(nid2) @ z.real
    nid1 = int(np.argmax(scores))
    hn, yn = np.linalg.norm(h), np.linalg.norm(y_sss)
    if yn <= _ENERGY_EPS * hn or hn == 0:
        return nid1, 0.0
    metric = max(float(scores[nid1]), 0.0) / (yn * hn)
    return nid1, min(metric, 1.0)


def common_phase(sss_row: np.ndarray, cell: CellIdentity) -> float:
    """Phase of the SSS correlation, used as the receiver's phase reference.

    ``sss_row`` holds the 127 SSS REs (subcarriers 56..182 of SSB symbol 2).
    """
    acc = np.sum(np.asarray(sss_row) * sss_sequence(cell.nid1, cell.nid2))
    return float(np.angle(acc)) if acc != 0 else 0.0


def cell_search(buf: IqBuffer | np.ndarray, cfg: FrameConfig) -> SearchResult:
    x = buf.samples if isinstance(buf, IqBuffer) else np.asarray(buf)
    n_ssb, nid2, pss_metric = pss_search(x, cfg)
    nid1, sss_metric = sss_detect(x, n_ssb, nid2, cfg)
    return SearchResult(n_ssb, CellIdentity(nid1, nid2), pss_metric, sss_metric)


def find_ssbs(buf: IqBuffer | np.ndarray, cfg: FrameConfig, max_count: int | None = None) -> list[tuple[int, int, float]]:
    """All PSS peaks above the detection floor, strongest first, as (n_ssb, nid2, metric).

    Peaks closer than one SSB length to a stronger accepted peak are
    suppressed, as are peaks without a complete SSB inside the buffer.
    """
    x = buf.samples if isinstance(buf, IqBuffer) else np.asarray(buf)
    if x.size < cfg.ssb_len:
        raise ValueError("buffer shorter than one SSB")
    metric = pss_correlation(x, cfg)
    best = metric.max(axis=0)
    nid2s = metric.argmax(axis=0)
    floor = PSS_FLOOR_FACTOR * float(np.median(best))
    found: list[tuple[int, int, float]] = []
    for lag in np.argsort(-best, kind="stable"):
        peak = float(best[lag])
        if peak <= floor or peak <= 0.0 or (max_count is not None and len(found) >= max_count):
            break
        n_ssb = int(lag) - cfg.cp_len
        if n_ssb < 0 or n_ssb + cfg.ssb_len > x.size:
            continue
        if any(abs(n_ssb - f[0]) < cfg.ssb_len for f in found):
            continue
        found.append((n_ssb, int(nid2s[lag]), peak))
    return found
