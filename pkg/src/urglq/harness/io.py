"""CSV export of Monte Carlo results and the BFSN recorded-snapshot format.

BFSN layout, all little-endian::

    offset 0   4 bytes  magic b"BFSN"
    offset 4   u16      format version (1)
    offset 6   u16      M, number of sensors
    offset 8   u32      K, number of snapshots
    offset 12  u32      reserved, written as 0
    offset 16  K*M complex samples, float64 (real, imag) pairs,
               snapshot by snapshot with the M sensors of a snapshot adjacent
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path
from typing import Iterable, List

import numpy as np

from ..errors import FormatError
from .runner import Aggregate, TrialResult

RESULT_HEADER = ("method", "snr_db", "snapshots", "trial", "sinr_db", "deviation_db", "seed")
AGGREGATE_HEADER = ("method", "snr_db", "snapshots", "mean_sinr_db", "std_sinr_db")

MAGIC = b"BFSN"
VERSION = 1
_HEADER = struct.Struct("<4sHHII")
HEADER_SIZE = _HEADER.size  # 16
SAMPLE_SIZE = 16


def _num(x) -> str:
    # repr round-trips floats exactly; integers stay integers
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def export_csv(rows: Iterable, path) -> None:
    """Write trial results, or aggregates, as CSV.

    The header follows the row type. An empty sequence gives a header-only
    results file.
    """
    rows = list(rows)
    if rows and isinstance(rows[0], Aggregate):
        export_aggregate_csv(rows, path)
        return
    _write_rows(path, RESULT_HEADER, (
        (r.method, _num(r.snr_db), _num(r.snapshots), _num(r.trial), _num(r.sinr_db),
         _num(r.deviation_db), _num(r.seed))
        for r in rows
    ))


def export_aggregate_csv(rows: Iterable[Aggregate], path) -> None:
    _write_rows(path, AGGREGATE_HEADER, (
        (a.method, _num(a.snr_db), _num(a.snapshots), _num(a.mean_sinr_db), _num(a.std_sinr_db))
        for a in rows
    ))


def _read(path, header):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if tuple(got or ()) != header:
            raise FormatError(f"{path}: expected header {','.join(header)}, found {got!r}")
        return list(reader)


def read_results_csv(path) -> List[TrialResult]:
    return [
        TrialResult(m, float(snr), int(k), int(t), float(s), float(d), int(seed))
        for m, snr, k, t, s, d, seed in _read(path, RESULT_HEADER)
    ]


def read_aggregate_csv(path) -> List[Aggregate]:
    """Aggregates back from CSV (the trial count is not stored and comes back as -1)."""
    return [
        Aggregate(m, float(snr), int(k), float(mean), float(std), -1)
        for m, snr, k, mean, std in _read(path, AGGREGATE_HEADER)
    ]


def write_recorded_snapshots(path, snapshots) -> None:
    """Store an ``M x K`` complex snapshot matrix as BFSN."""
    x = np.asarray(snapshots, dtype=complex)
    if x.ndim != 2:
        raise FormatError(f"snapshots must be an M x K matrix, got shape {x.shape}")
    M, K = x.shape
    if not 1 <= M <= 0xFFFF or not 1 <= K <= 0xFFFFFFFF:
        raise FormatError(f"M={M}, K={K} do not fit the BFSN header")
    body = np.ascontiguousarray(x.T, dtype="<c16").tobytes()
    Path(path).write_bytes(_HEADER.pack(MAGIC, VERSION, M, K, 0) + body)


def load_recorded_snapshots(path, expected_sensors: int | None = None) -> np.ndarray:
    """Read a BFSN file into an ``M x K`` complex matrix.

    Every layout problem raises :class:`FormatError` carrying the byte offset
    where the file stops matching the format.
    """
    data = Path(path).read_bytes()
    if len(data) < HEADER_SIZE:
        raise FormatError(
            f"{path}: header needs {HEADER_SIZE} bytes, file has {len(data)}", offset=len(data)
        )
    magic, version, M, K, _reserved = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}", offset=0)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported format version {version}", offset=4)
    if M < 1:
        raise FormatError(f"{path}: sensor count must be positive", offset=6)
    if K < 1:
        raise FormatError(f"{path}: snapshot count must be positive", offset=8)
    if expected_sensors is not None and M != expected_sensors:
        raise FormatError(f"{path}: file has M={M} sensors, array has {expected_sensors}", offset=6)
    expected = HEADER_SIZE + M * K * SAMPLE_SIZE
    if len(data) < expected:
        raise FormatError(
            f"{path}: truncated body, expected {expected} bytes for M={M}, K={K}, file has {len(data)}",
            offset=len(data),
        )
    if len(data) > expected:
        raise FormatError(
            f"{path}: {len(data) - expected} trailing bytes, expected {expected} bytes for M={M}, K={K}, "
            f"file has {len(data)}",
            offset=expected,
        )
    body = np.frombuffer(data, dtype="<c16", count=M * K, offset=HEADER_SIZE)
    return body.reshape(K, M).T.astype(complex)
