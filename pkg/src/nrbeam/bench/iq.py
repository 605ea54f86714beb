"""Raw IQ files: interleaved complex float32 little-endian plus a JSON sidecar.

The sidecar lives at ``<path>.json`` and holds ``sample_rate`` (Hz, required
unless given on the command line), ``center_freq`` (Hz, optional) and
``notes`` (free text, optional). Explicit arguments override sidecar values.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..phy.frame import IqBuffer


class IqFormatError(ValueError):
    pass


def sidecar_path(path: str | Path) -> Path:
    return Path(str(path) + ".json")


def write_iq(buf: IqBuffer | np.ndarray, path: str | Path, *, sample_rate: float | None = None,
             center_freq: float | None = None, notes: str = "") -> None:
    samples = buf.samples if isinstance(buf, IqBuffer) else np.asarray(buf)
    rate = sample_rate if sample_rate is not None else getattr(buf, "sample_rate", None)
    if rate is None:
        raise ValueError("sample_rate is required")
    inter = np.empty(2 * samples.size, dtype="<f4")
    inter[0::2] = samples.real
    inter[1::2] = samples.imag
    Path(path).write_bytes(inter.tobytes())
    meta = {"sample_rate": float(rate), "center_freq": center_freq, "notes": notes, "format": "cf32_le"}
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def ingest_iq(path: str | Path, *, sample_rate: float | None = None,
              center_freq: float | None = None) -> IqBuffer:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IqFormatError(f"cannot read {path}: {exc}") from exc
    if len(raw) == 0 or len(raw) % 8:
        raise IqFormatError(f"{path}: length {len(raw)} is not a positive multiple of 8 bytes")
    meta = {}
    side = sidecar_path(path)
    if side.exists():
        try:
            meta = json.loads(side.read_text())
        except json.JSONDecodeError as exc:
            raise IqFormatError(f"{side}: malformed sidecar ({exc})") from exc
        if not isinstance(meta, dict):
            raise IqFormatError(f"{side}: sidecar must be a JSON object")
    elif sample_rate is None:
        raise IqFormatError(f"{path}: no sidecar and no sample rate given")
    if sample_rate is not None:
        meta["sample_rate"] = sample_rate
    if center_freq is not None:
        meta["center_freq"] = center_freq
    try:
        rate = float(meta["sample_rate"])
    except (KeyError, TypeError, ValueError) as exc:
        raise IqFormatError(f"{side}: missing or invalid sample_rate") from exc
    data = np.frombuffer(raw, dtype="<f4")
    samples = data[0::2].astype(np.float64) + 1j * data[1::2].astype(np.float64)
    try:
        return IqBuffer(samples, rate, "file", meta)
    except ValueError as exc:
        raise IqFormatError(str(exc)) from exc
