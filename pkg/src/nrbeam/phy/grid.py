"""SSB resource-element layout and grid assembly."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

import numpy as np

from ..sequences import CellIdentity, dmrs_sequence, pss_sequence, sss_sequence
from .frame import SSB_SUBCARRIERS, SSB_SYMBOLS

SYNC_SC = np.arange(56, 183)
# DMRS region offsets into the 144-symbol DMRS vector, for SSB symbols 1, 2, 3.
M_OFFSET = (0, 60, 84)


class Region(IntEnum):
    ZERO = 0
    PSS = 1
    SSS = 2
    PBCH = 3
    DMRS = 4


def _pbch_subcarriers(symbol: int) -> np.ndarray:
    if symbol in (1, 3):
        return np.arange(SSB_SUBCARRIERS)
    if symbol == 2:
        return np.r_[0:48, 192:240]
    raise ValueError("PBCH occupies symbols 1..3 only")


@lru_cache(maxsize=4)
def dmrs_subcarriers(v: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """DMRS subcarrier indices in SSB symbols 1, 2 and 3 for shift ``v``."""
    if not 0 <= v <= 3:
        raise ValueError("v must be in [0, 3]")
    out = []
    for sym in (1, 2, 3):
        sc = _pbch_subcarriers(sym)
        k = sc[(sc % 4) == v]
        k.setflags(write=False)
        out.append(k)
    return tuple(out)


@lru_cache(maxsize=4)
def pbch_data_subcarriers(v: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """PBCH data (non-DMRS) subcarriers in SSB symbols 1, 2 and 3."""
    out = []
    for sym, dm in zip((1, 2, 3), dmrs_subcarriers(v)):
        k = np.setdiff1d(_pbch_subcarriers(sym), dm)
        k.setflags(write=False)
        out.append(k)
    return tuple(out)


@lru_cache(maxsize=4)
def region_map(v: int) -> np.ndarray:
    """4x240 map assigning every RE to exactly one :class:`Region`."""
    m = np.full((SSB_SYMBOLS, SSB_SUBCARRIERS), Region.ZERO, dtype=np.int8)
    m[0, SYNC_SC] = Region.PSS
    m[2, SYNC_SC] = Region.SSS
    for sym, k in zip((1, 2, 3), pbch_data_subcarriers(v)):
        m[sym, k] = Region.PBCH
    for sym, k in zip((1, 2, 3), dmrs_subcarriers(v)):
        m[sym, k] = Region.DMRS
    m.setflags(write=False)
    return m


def extract_dmrs(rf: np.ndarray, v: int) -> np.ndarray:
    """Gather the 144 DMRS REs from the three PBCH symbol rows, in DMRS order.

    ``rf`` has shape (..., 3, 240) holding SSB symbols 1..3.
    """
    rows = [rf[..., i, k] for i, k in enumerate(dmrs_subcarriers(v))]
    return np.concatenate(rows, axis=-1)


def extract_pbch_data(rf: np.ndarray, v: int) -> np.ndarray:
    rows = [rf[..., i, k] for i, k in enumerate(pbch_data_subcarriers(v))]
    return np.concatenate(rows, axis=-1)


@dataclass(frozen=True)
class SsbGrid:
    re: np.ndarray
    issb: int
    cell: CellIdentity

    def __post_init__(self):
        re = np.array(self.re, dtype=np.complex128)
        if re.shape != (SSB_SYMBOLS, SSB_SUBCARRIERS):
            raise ValueError(f"grid must be 4x240, got {re.shape}")
        re.setflags(write=False)
        object.__setattr__(self, "re", re)

    @property
    def pbch_rows(self) -> np.ndarray:
        return self.re[1:]


def grid_assemble(issb: int, cell: CellIdentity, payload, lmax: int = 8) -> SsbGrid:
    """Build the SSB grid for beam ``issb`` carrying ``payload``.

    ``payload`` is a :class:`~nrbeam.phy.pbch.PbchPayload` or a raw array of
    432 PBCH data-RE symbols.
    """
    from .pbch import PbchPayload, pbch_symbols

    if not 0 <= issb < lmax:
        raise ValueError(f"issb {issb} out of range for lmax {lmax}")
    data = pbch_symbols(payload) if isinstance(payload, PbchPayload) else np.asarray(payload)
    if data.shape != (432,):
        raise ValueError("PBCH needs exactly 432 data symbols")
    v = cell.v
    re = np.zeros((SSB_SYMBOLS, SSB_SUBCARRIERS), dtype=np.complex128)
    re[0, SYNC_SC] = pss_sequence(cell.nid2)
    re[2, SYNC_SC] = sss_sequence(cell.nid1, cell.nid2)
    dmrs = dmrs_sequence(issb, cell, lmax)
    d0 = 0
    for sym, k_dm, k_dat, m0 in zip((1, 2, 3), dmrs_subcarriers(v), pbch_data_subcarriers(v), M_OFFSET):
        re[sym, k_dm] = dmrs[m0:m0 + k_dm.size]
        re[sym, k_dat] = data[d0:d0 + k_dat.size]
        d0 += k_dat.size
    return SsbGrid(re, int(issb), cell)
