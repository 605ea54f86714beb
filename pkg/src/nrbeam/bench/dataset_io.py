"""Binary dataset files of DMRS feature vectors.

Layout (all little-endian):

    offset  size  field
    0       8     magic b"DMRSFEAT"
    8       2     version (uint16, currently 1)
    10      2     feature count (uint16, 288)
    12      2     lmax (uint16)
    14      1     source (uint8: 0 = sim, 1 = capture)
    15      1     reserved (0)
    16      8     snr_db (float64, NaN when unknown)
    24      8     record count (uint64)
    32      4     provenance length P (uint32)
    36      P     provenance, UTF-8 JSON
    36+P    ...   records

Each record is 288 float32 features, a uint8 label (255 = unlabeled) and a
uint8 flags byte holding the PBCH CRC pass mask over the lmax hypotheses
(bit i set when the CRC passes under index i).
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..detect.features import N_FEATURES
from ..learn.dataset import Dataset

MAGIC = b"DMRSFEAT"
VERSION = 1
_HEADER = struct.Struct("<8sHHHBBdQI")
_SOURCES = ("sim", "capture")
UNLABELED_BYTE = 255

RECORD = np.dtype([("x", "<f4", (N_FEATURES,)), ("label", "u1"), ("flags", "u1")])


class DatasetFormatError(ValueError):
    pass


def write_dataset(ds: Dataset, path: str | Path) -> None:
    if ds.lmax > 8:
        raise DatasetFormatError("the flags byte holds CRC masks for at most 8 hypotheses")
    rec = np.zeros(len(ds), dtype=RECORD)
    rec["x"] = ds.X.astype(np.float32)
    rec["label"] = np.where(ds.y >= 0, ds.y, UNLABELED_BYTE).astype(np.uint8)
    rec["flags"] = ds.crc_mask.astype(np.uint8)
    prov = json.dumps(ds.provenance, sort_keys=True).encode()
    header = _HEADER.pack(MAGIC, VERSION, N_FEATURES, ds.lmax, _SOURCES.index(ds.source), 0,
                          float(ds.snr_db), len(ds), len(prov))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(prov)
        fh.write(rec.tobytes())


def read_dataset(path: str | Path) -> Dataset:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DatasetFormatError(f"cannot read {path}: {exc}") from exc
    if len(raw) < _HEADER.size:
        raise DatasetFormatError(f"{path}: truncated header")
    magic, version, nfeat, lmax, source, _, snr, count, plen = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DatasetFormatError(f"{path}: not a dataset file")
    if version != VERSION:
        raise DatasetFormatError(f"{path}: unsupported version {version}")
    if nfeat != N_FEATURES:
        raise DatasetFormatError(f"{path}: expected {N_FEATURES} features, file has {nfeat}")
    if source >= len(_SOURCES) or not 1 <= lmax <= 8:
        raise DatasetFormatError(f"{path}: invalid source or lmax in header")
    start = _HEADER.size + plen
    if len(raw) != start + count * RECORD.itemsize:
        raise DatasetFormatError(f"{path}: size does not match {count} records")
    try:
        prov = json.loads(raw[_HEADER.size:start].decode()) if plen else {}
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DatasetFormatError(f"{path}: corrupt provenance block") from exc
    rec = np.frombuffer(raw, dtype=RECORD, count=count, offset=start)
    labels = rec["label"].astype(np.int64)
    if np.any((labels >= lmax) & (labels != UNLABELED_BYTE)):
        raise DatasetFormatError(f"{path}: label outside [0, {lmax})")
    y = np.where(labels == UNLABELED_BYTE, -1, labels)
    return Dataset(rec["x"].astype(np.float64), y, int(lmax), float(snr), _SOURCES[source],
                   rec["flags"].copy(), prov)
