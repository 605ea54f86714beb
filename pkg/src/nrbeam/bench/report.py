"""Plain-text tables from sweep and selector reports."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .dataset_io import DatasetFormatError


def _read_summary(path: Path) -> list[dict]:
    try:
        with open(path, newline="") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise DatasetFormatError(f"cannot read {path}: {exc}") from exc


def format_sweep(rows: list[dict]) -> str:
    head = f"{'snr_db':>7} {'model':<7} {'train':>6} {'trials':>6} {'fail':>8} {'macro':>8}  wilson95"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(f"{float(r['snr_db']):>7.2f} {r['model']:<7} {int(r['training_size']):>6} "
                     f"{int(r['trials']):>6} {float(r['fail_prob']):>8.4f} {float(r['fail_prob_macro']):>8.4f}  "
                     f"[{float(r['wilson_lo']):.4f}, {float(r['wilson_hi']):.4f}]")
    return "\n".join(lines)


def format_selector(summary: list[dict]) -> str:
    head = f"{'train_snr':>9} {'test_snr':>8} {'switch_step':>11} {'p_detect':>8}"
    lines = [head, "-" * len(head)]
    for r in summary:
        step = "never" if r["switch_step"] is None else str(r["switch_step"])
        lines.append(f"{r['train_snr']:>9.2f} {r['test_snr']:>8.2f} {step:>11} {r['detection_probability']:>8.4f}")
    return "\n".join(lines)


def render_report(path: str | Path) -> str:
    """Tables for a sweep or selector output directory (or a summary file inside one)."""
    path = Path(path)
    if path.is_dir():
        parts = []
        if (path / "summary.csv").exists():
            parts.append(format_sweep(_read_summary(path / "summary.csv")))
        if (path / "selector_summary.json").exists():
            parts.append(render_report(path / "selector_summary.json"))
        if not parts:
            raise DatasetFormatError(f"{path}: no summary.csv or selector_summary.json")
        return "\n\n".join(parts)
    if path.suffix == ".json":
        try:
            return format_selector(json.loads(path.read_text()))
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise DatasetFormatError(f"{path}: not a selector summary ({exc})") from exc
    try:
        return format_sweep(_read_summary(path))
    except (KeyError, ValueError) as exc:
        raise DatasetFormatError(f"{path}: not a sweep summary ({exc})") from exc
