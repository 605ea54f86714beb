"""Offline processing of recorded IQ: SSB search, feature extraction, CRC-verified labels."""

from __future__ import annotations

import numpy as np

from ..detect.features import N_FEATURES
from ..detect.receiver import receive
from ..detect.search import find_ssbs, sss_detect
from ..learn.dataset import Dataset
from ..phy.frame import FrameConfig, IqBuffer
from ..phy.pbch import crc_mask
from ..sequences import CellIdentity
from .iq import IqFormatError

DETECTION_COLUMNS = ("n_ssb", "pci", "pss_metric", "sss_metric", "corr_issb", "crc_ok", "crc_mask")


def process_capture(buf: IqBuffer, frame: FrameConfig, *, max_ssbs: int | None = None) -> tuple[Dataset, list[tuple]]:
    """Receive every SSB found in ``buf``.

    Each vector is labeled with the correlator's index when the PBCH CRC
    under that index passes and left unlabeled otherwise. Returns the
    dataset (in time order) and one detection row per SSB.
    """
    if abs(buf.sample_rate - frame.sample_rate) > 1e-6 * frame.sample_rate:
        raise IqFormatError(f"sample rate {buf.sample_rate} Hz does not match the frame's {frame.sample_rate} Hz")
    peaks = sorted(find_ssbs(buf, frame, max_ssbs))
    X = np.zeros((len(peaks), N_FEATURES))
    y = np.full(len(peaks), -1, dtype=np.int64)
    masks = np.zeros(len(peaks), dtype=np.uint8)
    rows = []
    for k, (n_ssb, nid2, pss_metric) in enumerate(peaks):
        nid1, sss_metric = sss_detect(buf, n_ssb, nid2, frame)
        cell = CellIdentity(nid1, nid2)
        rec = receive(buf, frame, n_ssb=n_ssb, cell=cell)
        mask = crc_mask(rec.rf, cell, frame.lmax)
        ok = bool((mask >> rec.corr_issb) & 1)
        X[k], masks[k] = rec.features, mask
        if ok:
            y[k] = rec.corr_issb
        rows.append((n_ssb, cell.nid_cell, round(pss_metric, 6), round(sss_metric, 6), rec.corr_issb, int(ok), mask))
    prov = {"origin": buf.origin, "sample_rate": buf.sample_rate, "n_samples": len(buf),
            "meta": {k: v for k, v in buf.meta.items() if isinstance(v, (str, int, float, type(None)))}}
    return Dataset(X, y, frame.lmax, float("nan"), "capture", masks, prov), rows
