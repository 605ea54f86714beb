"""Reproducible channel impairments for simulated SSB bursts.

Two modes exist. ``awgn_only`` leaves the waveform untouched apart from
delay, frequency offset and noise. ``beam_signature`` additionally filters
every SSB with a static frequency response tied to its beam index; the
responses come from ``taps`` complex Gaussian time-domain taps per beam and
are the knob that gives learned detectors something to learn.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np

from .phy.frame import SSB_SUBCARRIERS, SSB_SYMBOLS, FrameConfig, IqBuffer
from .phy.grid import SsbGrid, extract_dmrs
from .phy.ofdm import ssb_bins

Mode = Literal["awgn_only", "beam_signature"]
MODES = ("awgn_only", "beam_signature")


@dataclass(frozen=True)
class ChannelScenario:
    seed: int
    lmax: int
    mode: Mode
    snr_db: float
    taps: int = 4
    timing_offset: int = 0
    cfo_hz: float = 0.0
    fft_size: int = 1024
    signatures: np.ndarray = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "lmax": self.lmax,
            "mode": self.mode,
            "snr_db": _snr_to_json(self.snr_db),
            "taps": self.taps,
            "timing_offset": self.timing_offset,
            "cfo_hz": self.cfo_hz,
            "fft_size": self.fft_size,
        }

    def with_snr(self, snr_db: float) -> "ChannelScenario":
        return scenario_build(
            self.seed, self.lmax, self.mode, snr_db, self.taps,
            timing_offset=self.timing_offset, cfo_hz=self.cfo_hz, fft_size=self.fft_size,
        )


def _snr_to_json(snr):
    return "inf" if np.isinf(snr) and snr > 0 else float(snr)


def scenario_from_dict(d: dict, cp_len: int = 72) -> ChannelScenario:
    snr = d.get("snr_db", "inf")
    snr = float("inf") if snr in ("inf", None) else float(snr)
    return scenario_build(
        int(d.get("seed", 0)), int(d.get("lmax", 8)), d.get("mode", "awgn_only"), snr,
        int(d.get("taps", 4)), timing_offset=int(d.get("timing_offset", 0)),
        cfo_hz=float(d.get("cfo_hz", 0.0)), fft_size=int(d.get("fft_size", 1024)), cp_len=cp_len,
    )


def scenario_build(
    seed: int,
    lmax: int,
    mode: Mode,
    snr_db: float,
    taps: int = 4,
    *,
    timing_offset: int = 0,
    cfo_hz: float = 0.0,
    fft_size: int = 1024,
    cp_len: int = 72,
) -> ChannelScenario:
    if mode not in MODES:
        raise ValueError(f"unknown channel mode {mode!r}")
    if taps < 1:
        raise ValueError("taps must be >= 1")
    if taps > cp_len:
        raise ValueError(f"taps ({taps}) longer than the cyclic prefix ({cp_len})")
    if timing_offset < 0:
        raise ValueError("timing_offset must be non-negative")
    if mode == "awgn_only":
        sig = np.ones((lmax, SSB_SUBCARRIERS), dtype=np.complex128)
    else:
        rng = np.random.default_rng([int(seed), 0x5EED])
        h = (rng.standard_normal((lmax, taps)) + 1j * rng.standard_normal((lmax, taps))) / np.sqrt(2)
        k = np.arange(SSB_SUBCARRIERS) - SSB_SUBCARRIERS // 2
        t = np.arange(taps)
        sig = h @ np.exp(-2j * np.pi * np.outer(t, k) / fft_size)
        sig /= np.sqrt(np.mean(np.abs(sig) ** 2, axis=1, keepdims=True))
    sig.setflags(write=False)
    return ChannelScenario(
        int(seed), int(lmax), mode, float(snr_db), int(taps),
        int(timing_offset), float(cfo_hz), int(fft_size), sig,
    )


def trial_rng(scenario: ChannelScenario, trial: int) -> np.random.Generator:
    return np.random.default_rng([scenario.seed, int(trial)])


def dmrs_signal_power(scenario: ChannelScenario, issb: int, v: int | None) -> float:
    """Mean post-channel power on the DMRS REs of beam ``issb`` (unit-power pilots)."""
    resp = scenario.signatures[issb]
    if v is None:
        return float(np.mean(np.abs(resp) ** 2))
    return float(np.mean(np.abs(extract_dmrs(np.broadcast_to(resp, (3, SSB_SUBCARRIERS)), v)) ** 2))


def apply(
    buf: IqBuffer,
    scenario: ChannelScenario,
    schedule: Iterable[tuple[int, int]],
    cfg: FrameConfig,
    *,
    trial: int = 0,
    dmrs_shift: int | None = None,
) -> IqBuffer:
    """Pass ``buf`` through the scenario's channel.

    ``schedule`` lists (start sample, issb) for every SSB in the buffer. The
    noise variance is chosen so the average DMRS-RE SNR of the scheduled SSBs
    equals ``scenario.snr_db``; ``dmrs_shift`` (the cell's v) makes that power
    exact, otherwise the mean over all 240 subcarriers is used.
    """
    x = np.array(buf.samples, dtype=np.complex128)
    schedule = [(int(s), int(i)) for s, i in schedule]
    for start, issb in schedule:
        if start < 0 or start + cfg.ssb_len > x.size:
            raise ValueError(f"scheduled SSB at sample {start} lies outside the buffer")
        if not 0 <= issb < scenario.lmax:
            raise ValueError(f"scheduled issb {issb} outside [0, {scenario.lmax})")

    if scenario.mode == "beam_signature":
        for start, issb in schedule:
            x[start:start + cfg.ssb_len] = _filter_ssb(x[start:start + cfg.ssb_len], scenario.signatures[issb], cfg)

    k = scenario.timing_offset
    if k:
        x = np.concatenate([np.zeros(min(k, x.size), dtype=x.dtype), x[:max(x.size - k, 0)]])
    if scenario.cfo_hz:
        x *= np.exp(2j * np.pi * scenario.cfo_hz * np.arange(x.size) / cfg.sample_rate)

    if np.isfinite(scenario.snr_db):
        if schedule:
            p_sig = np.mean([dmrs_signal_power(scenario, i, dmrs_shift) for _, i in schedule])
        else:
            p_sig = 1.0
        var_re = p_sig / 10 ** (scenario.snr_db / 10)
        # Per-RE variance after the 1/N-scaled FFT is (time-domain variance)/N.
        sigma = np.sqrt(var_re * cfg.fft_size / 2)
        rng = trial_rng(scenario, trial)
        x += sigma * (rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size))
    return IqBuffer(x, buf.sample_rate, buf.origin, dict(buf.meta))


def _filter_ssb(seg: np.ndarray, response: np.ndarray, cfg: FrameConfig) -> np.ndarray:
    n, cp = cfg.fft_size, cfg.cp_len
    sym = seg.reshape(SSB_SYMBOLS, cfg.symbol_len)
    spec = np.fft.fft(sym[:, cp:], axis=1)
    spec[:, ssb_bins(n)] *= response
    body = np.fft.ifft(spec, axis=1)
    return np.concatenate([body[:, n - cp:], body], axis=1).ravel()


def snr_measure(
    tx: SsbGrid | Sequence[SsbGrid],
    rx_rf: np.ndarray,
    response: np.ndarray | None = None,
) -> float:
    """DMRS-RE SNR in dB of received PBCH rows against the transmitted grid(s).

    The signal reference is the transmitted DMRS, optionally shaped by the
    per-beam ``response`` (240 bins, or one row per SSB). A single complex gain
    is fitted by least squares; everything else counts as noise. Returns
    ``inf`` for a noiseless reception.
    """
    grids = [tx] if isinstance(tx, SsbGrid) else list(tx)
    rx = np.asarray(rx_rf).reshape(len(grids), 3, SSB_SUBCARRIERS)
    if response is None:
        resp = np.ones((len(grids), SSB_SUBCARRIERS))
    else:
        resp = np.broadcast_to(np.asarray(response), (len(grids), SSB_SUBCARRIERS))
    ref, y = [], []
    for g, r, h in zip(grids, rx, resp):
        v = g.cell.v
        ref.append(extract_dmrs(g.re[1:] * h, v))
        y.append(extract_dmrs(r, v))
    ref, y = np.concatenate(ref), np.concatenate(y)
    gain = np.vdot(ref, y) / np.vdot(ref, ref)
    sig = np.abs(gain) ** 2 * np.mean(np.abs(ref) ** 2)
    noise = np.mean(np.abs(y - gain * ref) ** 2)
    if noise <= 1e-20 * sig:
        return float("inf")
    return float(10 * np.log10(sig / noise))


__all__ = [
    "ChannelScenario",
    "MODES",
    "apply",
    "dmrs_signal_power",
    "scenario_build",
    "scenario_from_dict",
    "snr_measure",
    "trial_rng",
]
