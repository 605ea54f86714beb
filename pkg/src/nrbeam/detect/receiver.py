"""The receive chain from samples to a raw DMRS feature vector and correlator decision."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..phy.frame import FrameConfig, IqBuffer
from ..phy.grid import SYNC_SC
from ..phy.ofdm import demodulate_ssb
from ..phy.pbch import PbchPayload, pbch_recover
from ..sequences import CellIdentity
from .correlator import correlation_scores
from .features import features_from_rf
from .search import SearchResult, common_phase, pss_search, sss_detect


@dataclass(frozen=True)
class Reception:
    search: SearchResult
    rf: np.ndarray            # (3, 240) PBCH rows after phase correction
    features: np.ndarray      # raw 288 features
    corr_issb: int
    scores: np.ndarray
    lmax: int

    @property
    def cell(self) -> CellIdentity:
        return self.search.cell

    def pbch(self, issb: int | None = None) -> PbchPayload:
        """PBCH decode under hypothesis ``issb`` (default: the correlator's)."""
        return pbch_recover(self.rf, self.corr_issb if issb is None else issb, self.cell, self.lmax)


def receive(
    buf: IqBuffer | np.ndarray,
    cfg: FrameConfig,
    *,
    n_ssb: int | None = None,
    cell: CellIdentity | None = None,
    lmax: int | None = None,
) -> Reception:
    """Run cell search (unless timing/identity are given) and extract features.

    The PBCH rows are derotated by the SSS phase so decisions do not depend
    on a common complex gain of the buffer.
    """
    x = buf.samples if isinstance(buf, IqBuffer) else np.asarray(buf)
    lmax = cfg.lmax if lmax is None else lmax
    pss_metric = sss_metric = float("nan")
    nid2 = cell.nid2 if cell is not None else None
    if n_ssb is None:
        n_ssb, found_nid2, pss_metric = pss_search(x, cfg)
        nid2 = found_nid2 if nid2 is None else nid2
    if cell is None:
        nid1, sss_metric = sss_detect(x, n_ssb, nid2, cfg)
        cell = CellIdentity(nid1, nid2)
    rows = demodulate_ssb(x, n_ssb, cfg)
    phi = common_phase(rows[2, SYNC_SC], cell)
    rf = rows[1:] * np.exp(-1j * phi)
    feats = features_from_rf(rf, cell.v)
    scores = correlation_scores(feats, cell, lmax)
    search = SearchResult(int(n_ssb), cell, pss_metric, sss_metric)
    return Reception(search, rf, feats, int(np.argmax(scores)), scores, lmax)
