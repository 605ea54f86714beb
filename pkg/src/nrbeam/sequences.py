"""NR sequence generators: cell identity, length-31 Gold sequence, PSS, SSS and PBCH DMRS."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

NC = 1600
N_ID1_MAX = 335
N_ID2_MAX = 2
DMRS_LEN = 144
SYNC_LEN = 127


@dataclass(frozen=True)
class CellIdentity:
    nid1: int
    nid2: int

    def __post_init__(self):
        if not 0 <= self.nid1 <= N_ID1_MAX:
            raise ValueError(f"nid1 must be in [0, {N_ID1_MAX}], got {self.nid1}")
        if not 0 <= self.nid2 <= N_ID2_MAX:
            raise ValueError(f"nid2 must be in [0, {N_ID2_MAX}], got {self.nid2}")

    @property
    def nid_cell(self) -> int:
        return self.nid2 + 3 * self.nid1

    @property
    def v(self) -> int:
        """DMRS subcarrier shift."""
        return self.nid_cell % 4

    @classmethod
    def from_pci(cls, nid_cell: int) -> "CellIdentity":
        if not 0 <= nid_cell <= 3 * N_ID1_MAX + N_ID2_MAX:
            raise ValueError(f"nid_cell must be in [0, 1007], got {nid_cell}")
        return cls(nid_cell // 3, nid_cell % 3)


def pci_compose(nid1: int, nid2: int) -> CellIdentity:
    return CellIdentity(int(nid1), int(nid2))


def _lfsr31(init: np.ndarray, taps: tuple[int, ...], total: int) -> np.ndarray:
    # Every tap is <= 3, so 28 new bits depend only on bits already generated.
    x = np.zeros(total + 31, dtype=np.uint8)
    x[:31] = init
    for n in range(0, total, 28):
        m = min(28, total - n)
        acc = x[n + taps[0]:n + taps[0] + m].copy()
        for t in taps[1:]:
            acc ^= x[n + t:n + t + m]
        x[n + 31:n + 31 + m] = acc
    return x


def gold_c(c_init: int, length: int) -> np.ndarray:
    """Pseudo-random bit sequence c[0..length-1] seeded by ``c_init``.

    Returns a uint8 array of 0/1 values.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    c_init = int(c_init)
    if c_init < 0 or c_init >= 1 << 32:
        raise ValueError("c_init must be an unsigned 32-bit value")
    x1_init = np.zeros(31, dtype=np.uint8)
    x1_init[0] = 1
    x2_init = np.array([(c_init >> i) & 1 for i in range(31)], dtype=np.uint8)
    total = length + NC
    x1 = _lfsr31(x1_init, (3, 0), total)
    x2 = _lfsr31(x2_init, (3, 2, 1, 0), total)
    return x1[NC:NC + length] ^ x2[NC:NC + length]


def dmrs_cinit(issb: int, nid_cell: int, lmax: int = 8) -> int:
    issb, nid_cell, lmax = int(issb), int(nid_cell), int(lmax)
    if issb < 0 or nid_cell < 0 or lmax < 1:
        raise ValueError("issb, nid_cell and lmax must be non-negative (lmax >= 1)")
    if issb >= lmax:
        raise ValueError(f"issb {issb} out of range for lmax {lmax}")
    i = (issb & 7) + 1
    return (1 << 11) * i * (nid_cell // 4 + 1) + (1 << 6) * i + nid_cell % 4


def qpsk_from_bits(bits: np.ndarray) -> np.ndarray:
    b = np.asarray(bits, dtype=np.float64).reshape(-1, 2)
    return ((1 - 2 * b[:, 0]) + 1j * (1 - 2 * b[:, 1])) / np.sqrt(2)


@lru_cache(maxsize=4096)
def _dmrs_cached(issb: int, nid_cell: int, lmax: int) -> np.ndarray:
    c = gold_c(dmrs_cinit(issb, nid_cell, lmax), 2 * DMRS_LEN)
    out = qpsk_from_bits(c)
    out.setflags(write=False)
    return out


def dmrs_sequence(issb: int, cell: CellIdentity, lmax: int = 8) -> np.ndarray:
    """The 144 PBCH DMRS symbols for beam ``issb`` of ``cell`` (read-only array)."""
    return _dmrs_cached(int(issb), cell.nid_cell, int(lmax))


def dmrs_bank(cell: CellIdentity, lmax: int = 8) -> np.ndarray:
    """All candidate DMRS sequences stacked as an (lmax, 144) array."""
    return np.stack([dmrs_sequence(i, cell, lmax) for i in range(lmax)])


def _m_sequence(init: list[int], taps: tuple[int, int]) -> np.ndarray:
    # init is [x(0), ..., x(6)]; x(i+7) = x(i+taps[0]) + x(i+taps[1]) mod 2
    x = np.zeros(SYNC_LEN, dtype=np.int64)
    x[:7] = init
    for i in range(SYNC_LEN - 7):
        x[i + 7] = (x[i + taps[0]] + x[i + taps[1]]) % 2
    return x


_PSS_X = _m_sequence([0, 1, 1, 0, 1, 1, 1], (4, 0))
_SSS_X0 = _m_sequence([1, 0, 0, 0, 0, 0, 0], (4, 0))
_SSS_X1 = _m_sequence([1, 0, 0, 0, 0, 0, 0], (1, 0))
_N = np.arange(SYNC_LEN)


def pss_sequence(nid2: int) -> np.ndarray:
    if not 0 <= nid2 <= N_ID2_MAX:
        raise ValueError(f"nid2 must be in [0, {N_ID2_MAX}], got {nid2}")
    return (1 - 2 * _PSS_X[(_N + 43 * nid2) % SYNC_LEN]).astype(np.float64)


def sss_sequence(nid1: int, nid2: int) -> np.ndarray:
    if not 0 <= nid1 <= N_ID1_MAX:
        raise ValueError(f"nid1 must be in [0, {N_ID1_MAX}], got {nid1}")
    if not 0 <= nid2 <= N_ID2_MAX:
        raise ValueError(f"nid2 must be in [0, {N_ID2_MAX}], got {nid2}")
    m0 = 15 * (nid1 // 112) + 5 * nid2
    m1 = nid1 % 112
    d = (1 - 2 * _SSS_X0[(_N + m0) % SYNC_LEN]) * (1 - 2 * _SSS_X1[(_N + m1) % SYNC_LEN])
    return d.astype(np.float64)


@lru_cache(maxsize=3)
def sss_bank(nid2: int) -> np.ndarray:
    """All 336 SSS candidates for one ``nid2``, shape (336, 127)."""
    bank = np.stack([sss_sequence(n1, nid2) for n1 in range(N_ID1_MAX + 1)])
    bank.setflags(write=False)
    return bank
