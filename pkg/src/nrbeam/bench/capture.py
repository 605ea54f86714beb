"""Simulated DMRS feature capture: SSB generation, channel, receive chain, labeling."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..chansim import ChannelScenario, apply
from ..detect.receiver import Reception, receive
from ..detect.search import NoCellFound
from ..learn.dataset import Dataset
from ..phy.frame import FrameConfig, IqBuffer
from ..phy.grid import grid_assemble
from ..phy.ofdm import modulate_ssb
from ..phy.pbch import PbchPayload, crc_mask
from ..sequences import CellIdentity
from .config import ExperimentConfig

log = logging.getLogger(__name__)

MARGIN = 64
UNLABELED = -1


@dataclass(frozen=True)
class Trial:
    index: int
    issb: int
    reception: Reception | None
    crc_mask: int


def _payload_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, 0xDA7A, trial])


def simulate_trial(
    frame: FrameConfig,
    scenario: ChannelScenario,
    cell: CellIdentity,
    trial: int,
    *,
    seed: int,
    power_scale: float = 1.0,
    timing: str = "genie",
    with_crc: bool = True,
) -> Trial:
    """One SSB through the channel and the receiver.

    Only a window of one SSB plus margins is simulated. With ``genie``
    timing the receiver is handed the true SSB start and cell; with
    ``search`` it runs PSS/SSS acquisition on the window.
    """
    issb = trial % frame.lmax
    grid = grid_assemble(issb, cell, PbchPayload.random(_payload_rng(seed, trial)), frame.lmax)
    tail = MARGIN + scenario.timing_offset
    x = np.zeros(MARGIN + frame.ssb_len + tail, dtype=np.complex128)
    x[MARGIN:MARGIN + frame.ssb_len] = modulate_ssb(grid, frame)
    out = apply(IqBuffer(x, frame.sample_rate), scenario, [(MARGIN, issb)], frame,
                trial=trial, dmrs_shift=cell.v)
    samples = out.samples * np.sqrt(power_scale) if power_scale != 1.0 else out.samples
    try:
        if timing == "genie":
            rec = receive(samples, frame, n_ssb=MARGIN + scenario.timing_offset, cell=cell, lmax=frame.lmax)
        else:
            rec = receive(samples, frame, lmax=frame.lmax)
    except NoCellFound:
        return Trial(trial, issb, None, 0)
    mask = crc_mask(rec.rf, rec.cell, frame.lmax) if with_crc else 0
    return Trial(trial, issb, rec, mask)


def capture_dataset(
    cfg: ExperimentConfig,
    snr_db: float,
    n_vectors: int,
    *,
    first_trial: int = 0,
    with_crc: bool = True,
) -> Dataset:
    """Generate ``n_vectors`` labeled feature vectors, balanced over SSB indices.

    Labels are the true index (``labeling == "truth"``) or, in capture mode,
    the correlator's index when the PBCH CRC under it passes (else -1).
    Power scales, if several are configured, cycle across trials in blocks
    of ``lmax`` so every scale sees every beam.
    """
    frame = cfg.frame
    scenario = cfg.scenario.build(frame, snr_db)
    cell = cfg.cell
    scales = cfg.power_scales
    need_crc = with_crc or cfg.labeling == "crc"
    X = np.zeros((n_vectors, 288))
    y = np.full(n_vectors, UNLABELED, dtype=np.int64)
    truth = np.zeros(n_vectors, dtype=np.int64)
    masks = np.zeros(n_vectors, dtype=np.uint8)
    lost = 0
    for k in range(n_vectors):
        t = first_trial + k
        scale = scales[(t // frame.lmax) % len(scales)]
        tr = simulate_trial(frame, scenario, cell, t, seed=cfg.seed, power_scale=scale,
                            timing=cfg.timing, with_crc=need_crc)
        truth[k] = tr.issb
        masks[k] = tr.crc_mask
        if tr.reception is None:
            lost += 1
            continue
        X[k] = tr.reception.features
        if cfg.labeling == "truth":
            y[k] = tr.issb
        elif (tr.crc_mask >> tr.reception.corr_issb) & 1:
            y[k] = tr.reception.corr_issb
    if cfg.labeling == "crc":
        rate = float(np.mean(y >= 0)) if n_vectors else 0.0
        if rate < 0.5:
            log.warning("only %.1f%% of captured vectors carry CRC-verified labels", 100 * rate)
    if lost:
        log.warning("%d of %d trials found no cell", lost, n_vectors)
    prov = {
        "snr_db": snr_db,
        "first_trial": first_trial,
        "scenario": scenario.to_dict(),
        "pci": cfg.pci,
        "seed": cfg.seed,
        "labeling": cfg.labeling,
        "timing": cfg.timing,
        "power_scales": list(scales),
        "truth": truth.tolist() if cfg.labeling == "crc" else None,
    }
    return Dataset(X, y, frame.lmax, snr_db, "sim" if cfg.labeling == "truth" else "capture", masks, prov)
