"""PBCH stand-in payload, DMRS channel estimation and one-tap equalization.

The broadcast payload is 168 random bits plus a CRC-24A. The 192 bits are
extended to 432 coded bits by cyclic repetition, mapped to 216 QPSK symbols,
and every symbol is sent on two adjacent PBCH data REs (432 REs in total).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..sequences import CellIdentity, dmrs_sequence, qpsk_from_bits
from .grid import dmrs_subcarriers, extract_dmrs, extract_pbch_data, pbch_data_subcarriers

PAYLOAD_BITS = 168
CRC_BITS = 24
INFO_BITS = PAYLOAD_BITS + CRC_BITS
CODED_BITS = 432
CRC24A_POLY = 0x1864CFB
MIN_CHANNEL_MAG = 1e-30


class EqualizationError(ArithmeticError):
    """Channel magnitude too small to invert."""


def _crc_bitwise(bits: np.ndarray) -> np.ndarray:
    reg = 0
    for b in bits:
        top = (reg >> 23) & 1
        reg = (reg << 1) & 0xFFFFFF
        if top ^ int(b):
            reg ^= CRC24A_POLY & 0xFFFFFF
    return np.array([(reg >> (23 - i)) & 1 for i in range(CRC_BITS)], dtype=np.uint8)


@lru_cache(maxsize=8)
def _crc_matrix(n: int) -> np.ndarray:
    # Zero-init CRC is linear over GF(2): column j is the CRC of unit vector e_j.
    eye = np.eye(n, dtype=np.uint8)
    return np.stack([_crc_bitwise(e) for e in eye], axis=1)


def crc24a(bits: np.ndarray) -> np.ndarray:
    """CRC-24A parity bits of ``bits`` (shape (..., n)), MSB first."""
    bits = np.asarray(bits, dtype=np.uint8)
    g = _crc_matrix(bits.shape[-1])
    return ((bits.astype(np.int64) @ g.T.astype(np.int64)) & 1).astype(np.uint8)


@dataclass(frozen=True)
class PbchPayload:
    bits: np.ndarray
    crc_ok: bool | None = None

    def __post_init__(self):
        b = np.array(self.bits, dtype=np.uint8)
        if b.shape != (INFO_BITS,):
            raise ValueError(f"payload must carry {INFO_BITS} bits")
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @property
    def data(self) -> np.ndarray:
        return self.bits[:PAYLOAD_BITS]

    @classmethod
    def from_data(cls, data: np.ndarray) -> "PbchPayload":
        data = np.asarray(data, dtype=np.uint8)
        if data.shape != (PAYLOAD_BITS,):
            raise ValueError(f"need {PAYLOAD_BITS} data bits")
        return cls(np.concatenate([data, crc24a(data)]))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "PbchPayload":
        return cls.from_data(rng.integers(0, 2, PAYLOAD_BITS, dtype=np.uint8))


_CODED_INDEX = np.arange(CODED_BITS) % INFO_BITS


def pbch_symbols(payload: PbchPayload) -> np.ndarray:
    """The 432 PBCH data-RE values for ``payload``."""
    sym = qpsk_from_bits(payload.bits[_CODED_INDEX])
    return np.repeat(sym, 2)


def channel_estimate(rx_dmrs: np.ndarray, ref_dmrs: np.ndarray) -> np.ndarray:
    """Zero-forcing estimate conj(X_p) * Y_p at the DMRS REs."""
    rx_dmrs = np.asarray(rx_dmrs)
    ref_dmrs = np.asarray(ref_dmrs)
    if rx_dmrs.shape[-1] != ref_dmrs.shape[-1]:
        raise ValueError("received and reference DMRS lengths differ")
    return np.conj(ref_dmrs) * rx_dmrs


def equalize(yd, h):
    """One-tap equalization yd * conj(h) / |h|^2 (scalar or array)."""
    h = np.asarray(h)
    mag2 = np.abs(h) ** 2
    if np.any(np.abs(h) < MIN_CHANNEL_MAG):
        raise EqualizationError("channel magnitude below 1e-30")
    out = np.asarray(yd) * np.conj(h) / mag2
    return out[()] if out.ndim == 0 else out


@lru_cache(maxsize=4)
def _nearest_dmrs_index(v: int) -> np.ndarray:
    """For each PBCH data RE, the index (0..143) of the nearest DMRS RE in the same symbol.

    Ties go to the lower subcarrier.
    """
    idx = []
    base = 0
    for k_dm, k_dat in zip(dmrs_subcarriers(v), pbch_data_subcarriers(v)):
        dist = np.abs(k_dat[:, None] - k_dm[None, :])
        idx.append(base + np.argmin(dist, axis=1))
        base += k_dm.size
    out = np.concatenate(idx)
    out.setflags(write=False)
    return out


def pbch_recover(rf: np.ndarray, issb: int, cell: CellIdentity, lmax: int = 8) -> PbchPayload:
    """Recover the PBCH payload from SSB symbols 1..3 under DMRS hypothesis ``issb``."""
    rf = np.asarray(rf)
    v = cell.v
    h = channel_estimate(extract_dmrs(rf, v), dmrs_sequence(issb, cell, lmax))
    h_data = h[_nearest_dmrs_index(v)]
    try:
        eq = equalize(extract_pbch_data(rf, v), h_data)
    except EqualizationError:
        return PbchPayload(np.zeros(INFO_BITS, dtype=np.uint8), crc_ok=False)
    # Weight each equalized RE by |h|^2 before combining copies (maximum-ratio
    # combining); unweighted sums let REs with near-zero estimates dominate.
    bits = _soft_decide(eq * np.abs(h_data) ** 2)
    ok = bool(np.array_equal(crc24a(bits[:PAYLOAD_BITS]), bits[PAYLOAD_BITS:]))
    return PbchPayload(bits, crc_ok=ok)


def _soft_decide(eq: np.ndarray) -> np.ndarray:
    # Sum the two REs of each symbol, then the repeated copies of each bit.
    sym = eq.reshape(-1, 2).sum(axis=1)
    soft = np.empty(CODED_BITS)
    soft[0::2] = sym.real
    soft[1::2] = sym.imag
    acc = np.bincount(_CODED_INDEX, weights=soft, minlength=INFO_BITS)
    return (acc < 0).astype(np.uint8)


def crc_mask(rf: np.ndarray, cell: CellIdentity, lmax: int = 8) -> int:
    """Bitmask with bit i set when the PBCH CRC passes under DMRS hypothesis i."""
    mask = 0
    for i in range(lmax):
        if pbch_recover(rf, i, cell, lmax).crc_ok:
            mask |= 1 << i
    return mask
