"""Time-series simulation of the detection selector over a stream of SSBs."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..detect.selector import SelectorState, selector_step
from ..learn.models import DetectorModel, train_model
from .capture import capture_dataset, simulate_trial
from .config import ExperimentConfig, dump_config

STEP_COLUMNS = ("step", "timestamp_ms", "true_issb", "corr_issb", "learner_issb", "chosen_issb",
                "active", "feedback", "window_rate", "correct", "cumulative_detection")
STREAM_OFFSET = 50_000_000   # trial indices of the test stream, disjoint from training captures
ARRIVAL_PERIOD_MS = 20.0     # one DMRS vector per 20 ms, as in the over-the-air capture


@dataclass
class SelectorRun:
    train_snr: float | None
    test_snr: float
    switch_step: int | None          # 1-based SSB count at which the learner took over
    steps: list[tuple] = field(default_factory=list)

    @property
    def detection_probability(self) -> float:
        return self.steps[-1][-1] if self.steps else float("nan")


def train_selector_model(cfg: ExperimentConfig, train_snr: float) -> DetectorModel:
    ds = capture_dataset(cfg, train_snr, cfg.selector_training_size, with_crc=False)
    keep = ds.y >= 0
    return train_model(cfg.selector_model, ds.X[keep], ds.y[keep], cfg.frame.lmax,
                       normalized=cfg.normalized, seed=cfg.seed, hyperparams=cfg.hyperparams,
                       provenance={"snr_db": train_snr, "dataset": ds.digest()})


def run_selector_sim(cfg: ExperimentConfig, test_snr: float, model: DetectorModel | None = None,
                     train_snr: float | None = None) -> SelectorRun:
    """Stream ``selector_steps`` SSBs at ``test_snr`` through correlator, learner and selector.

    One SSB arrives per 20 ms of simulated time. Learner feedback is ground truth or the
    shadow PBCH CRC under the learner's index (``selector_feedback``).
    Without a model the learner output is absent throughout.
    """
    frame = cfg.frame
    scenario = cfg.scenario.build(frame, test_snr)
    state = SelectorState(cfg.selector_window, cfg.selector_threshold, cfg.selector_hysteresis)
    run = SelectorRun(train_snr, test_snr, None)
    hits = 0
    for step in range(1, cfg.selector_steps + 1):
        tr = simulate_trial(frame, scenario, cfg.cell, STREAM_OFFSET + step, seed=cfg.seed,
                            timing=cfg.timing, with_crc=False)
        rec = tr.reception
        corr = rec.corr_issb if rec is not None else 0
        learner = None
        feedback = None
        if model is not None and rec is not None:
            learner = int(model.predict(rec.features)[0])
            if cfg.selector_feedback == "truth":
                feedback = learner == tr.issb
            else:
                feedback = rec.pbch(learner).crc_ok
        before = state.active
        chosen = selector_step(state, corr, learner, feedback)
        if run.switch_step is None and before == "correlation" and state.active == "learner":
            run.switch_step = step
        hits += chosen == tr.issb
        run.steps.append((step, f"{step * ARRIVAL_PERIOD_MS:.1f}", tr.issb, corr,
                          "" if learner is None else learner, chosen, before,
                          "" if feedback is None else int(feedback), round(state.rate, 6),
                          int(chosen == tr.issb), round(hits / step, 6)))
    return run


def run_selector_envs(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> list[SelectorRun]:
    """Run every (train SNR, test SNR) environment in ``cfg.selector_envs``."""
    runs = []
    for train_snr, test_snr in cfg.selector_envs:
        model = train_selector_model(cfg, train_snr)
        runs.append(run_selector_sim(cfg, test_snr, model, train_snr))
    if out_dir is not None:
        write_selector_reports(cfg, runs, Path(out_dir))
    return runs


def write_selector_reports(cfg: ExperimentConfig, runs: list[SelectorRun], out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    dump_config(cfg, out / "config.json")
    summary = []
    for run in runs:
        tag = f"train{run.train_snr}_test{run.test_snr}"
        with open(out / f"selector_{tag}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(STEP_COLUMNS)
            w.writerows(run.steps)
        summary.append({"train_snr": run.train_snr, "test_snr": run.test_snr,
                        "switch_step": run.switch_step,
                        "detection_probability": run.detection_probability})
    (out / "selector_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
