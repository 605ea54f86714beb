"""SNR x training-size sweeps producing per-trial and summary reports."""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..detect.correlator import correlate_batch
from ..learn.dataset import Dataset, stratified_split, stratified_take
from ..learn.models import train_model
from .capture import capture_dataset
from .config import ConfigError, ExperimentConfig, dump_config
from .stats import macro_fail_rate, wilson

log = logging.getLogger(__name__)

TRIAL_COLUMNS = ("snr_db", "model", "training_size", "trial", "true_issb", "detected_issb",
                 "correct", "crc_ok", "timestamp_ms")
SUMMARY_COLUMNS = ("snr_db", "model", "training_size", "trials", "failures", "fail_prob",
                   "fail_prob_macro", "wilson_lo", "wilson_hi")
TRAIN_FRACTION = 0.7
POINT_STRIDE = 10_000_000   # trial-index offset between SNR points


@dataclass
class SweepResult:
    summary: list[dict]
    timings: dict = field(default_factory=dict)

    def row(self, snr_db: float, model: str, training_size: int = 0) -> dict:
        for r in self.summary:
            if r["snr_db"] == snr_db and r["model"] == model and r["training_size"] == training_size:
                return r
        raise KeyError((snr_db, model, training_size))


def points_needed(cfg: ExperimentConfig) -> int:
    learned = [m for m in cfg.models if m != "corr"]
    n = math.ceil(cfg.trials_per_point / (1 - TRAIN_FRACTION))
    if learned:
        n = max(n, math.ceil(max(cfg.training_sizes) / TRAIN_FRACTION))
    return n


def _truth(ds: Dataset) -> np.ndarray:
    t = ds.provenance.get("truth")
    return np.asarray(t, dtype=np.int64) if t is not None else ds.y


def run_sweep(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> SweepResult:
    """Fail probability of every configured model at every SNR point.

    Per point, one dataset is captured and split 70/30 by class. The first
    ``trials_per_point`` test vectors are evaluated; learned models train on
    class-balanced subsets of the training part, one per training size.
    Trial CSVs carry simulated SSB arrival times so they are reproducible
    byte for byte; wall-clock timings go to ``summary.json`` only.
    """
    n_total = points_needed(cfg)
    lmax = cfg.frame.lmax
    trial_rows, summary, timings = [], [], {}
    for p, snr in enumerate(cfg.sweep):
        t0 = time.perf_counter()
        ds = capture_dataset(cfg, snr, n_total, first_trial=p * POINT_STRIDE)
        timings[f"capture@{snr}"] = time.perf_counter() - t0
        truth = _truth(ds)
        train_idx, test_idx = stratified_split(truth, TRAIN_FRACTION, cfg.seed)
        test_idx = test_idx[:cfg.trials_per_point]
        X_test, y_test = ds.X[test_idx], truth[test_idx]
        trial_ids = np.asarray(test_idx) + p * POINT_STRIDE
        # Training draws only on vectors that carry a label.
        pool = train_idx[ds.y[train_idx] >= 0]

        def record(model, size, detected, elapsed):
            correct = detected == y_test
            crc_ok = (ds.crc_mask[test_idx] >> detected.astype(np.uint8)) & 1
            for k in range(y_test.size):
                trial_rows.append((snr, model, size, int(trial_ids[k]), int(y_test[k]), int(detected[k]),
                                   int(correct[k]), int(crc_ok[k]),
                                   f"{trial_ids[k] * cfg.frame.ssb_period_ms:.1f}"))
            fails = int(np.sum(~correct))
            lo, hi = wilson(fails, y_test.size)
            summary.append({
                "snr_db": snr, "model": model, "training_size": size, "trials": int(y_test.size),
                "failures": fails, "fail_prob": fails / y_test.size,
                "fail_prob_macro": macro_fail_rate(y_test, detected, lmax),
                "wilson_lo": lo, "wilson_hi": hi,
            })
            timings[f"{model}/{size}@{snr}"] = elapsed

        for model in cfg.models:
            if model == "corr":
                t0 = time.perf_counter()
                record("corr", 0, correlate_batch(X_test, cfg.cell, lmax), time.perf_counter() - t0)
                continue
            for size in cfg.training_sizes:
                if size > pool.size:
                    raise ConfigError(f"training size {size} exceeds the {pool.size} labeled training vectors")
                sub = pool[stratified_take(ds.y[pool], size, cfg.seed)]
                t0 = time.perf_counter()
                det = train_model(model, ds.X[sub], ds.y[sub], lmax, normalized=cfg.normalized,
                                  seed=cfg.seed, hyperparams=cfg.hyperparams,
                                  provenance={"snr_db": snr, "dataset": ds.digest()})
                pred = det.predict(X_test)
                record(model, size, pred, time.perf_counter() - t0)
                log.info("snr %.2f %s/%d: fail %.4f", snr, model, size, summary[-1]["fail_prob"])

    result = SweepResult(summary, timings)
    if out_dir is not None:
        write_reports(cfg, result, trial_rows, Path(out_dir))
    return result


def _fmt(v):
    if isinstance(v, float):
        return repr(round(v, 10))
    return str(v)


def write_reports(cfg: ExperimentConfig, result: SweepResult, trial_rows: list, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    dump_config(cfg, out / "config.json")
    with open(out / "trials.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIAL_COLUMNS)
        w.writerows([[_fmt(v) for v in row] for row in trial_rows])
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for r in result.summary:
            w.writerow([_fmt(r[c]) for c in SUMMARY_COLUMNS])
    (out / "summary.json").write_text(json.dumps(
        {"summary": result.summary, "wall_clock_s": result.timings}, indent=2, sort_keys=True) + "\n")
