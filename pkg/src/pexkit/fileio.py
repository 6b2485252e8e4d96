"""File formats: system JSON, signal CSV, rank-trace CSV, atomic writes.

Systems travel as JSON objects ``{"domain", "A", "B", "C"?, "D"?, "class"?}``
with matrices as row-major nested arrays; unknown keys are rejected so typos
fail loudly.  Signals travel as CSV with a mandatory header row, a first
column of time stamps, and one column per channel; values are written with 17
significant digits so a write/read round trip is exact.  All writes go
through a write-temp-then-rename helper, so readers never observe a partial
file.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from typing import Optional

import numpy as np

from .excitation import RankTrace
from .lti import LtiSystem
from .signals import DiscreteSignal, SampledSignal

__all__ = [
    "SignalFormatError",
    "SystemFormatError",
    "atomic_write_text",
    "load_system",
    "save_system",
    "load_signal_csv",
    "save_signal_csv",
    "write_rank_trace_csv",
    "write_json",
]


class SignalFormatError(ValueError):
    """Malformed signal CSV; carries the offending row/column when known."""


class SystemFormatError(ValueError):
    """Malformed system JSON."""


def atomic_write_text(path, text: str) -> None:
    """Write whole-file atomically: temp file in the target directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


_SYSTEM_KEYS = {"domain", "A", "B", "C", "D", "class"}


def load_system(path) -> tuple[LtiSystem, Optional[str]]:
    """Parse a system JSON file; returns the system and its optional class tag."""
    with open(path) as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise SystemFormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise SystemFormatError(f"{path}: top level must be a JSON object")
    unknown = set(doc) - _SYSTEM_KEYS
    if unknown:
        raise SystemFormatError(f"{path}: unknown keys {sorted(unknown)}")
    for key in ("domain", "A", "B"):
        if key not in doc:
            raise SystemFormatError(f"{path}: missing required key '{key}'")
    if doc["domain"] not in ("dt", "ct"):
        raise SystemFormatError(f"{path}: domain must be 'dt' or 'ct'")
    tag = doc.get("class")
    if tag is not None and tag not in ("x", "xu"):
        raise SystemFormatError(f"{path}: class must be 'x' or 'xu'")
    try:
        A = np.array(doc["A"], dtype=float)
        B = np.array(doc["B"], dtype=float)
        C = np.array(doc["C"], dtype=float) if "C" in doc else None
        D = np.array(doc["D"], dtype=float) if "D" in doc else None
        sys = LtiSystem(doc["domain"], A, B, C, D)
    except (ValueError, TypeError) as exc:
        raise SystemFormatError(f"{path}: {exc}") from exc
    return sys, tag


def save_system(path, sys: LtiSystem, tag: Optional[str] = None) -> None:
    doc = {
        "domain": sys.domain,
        "A": sys.A.tolist(),
        "B": sys.B.tolist(),
        "C": sys.C.tolist(),
        "D": sys.D.tolist(),
    }
    if tag is not None:
        doc["class"] = tag
    atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _parse_float(text: str, row: int, col: int, path) -> float:
    try:
        value = float(text)
    except ValueError:
        raise SignalFormatError(
            f"{path}: row {row}, column {col}: cannot parse '{text}' as a number") from None
    if not np.isfinite(value):
        raise SignalFormatError(f"{path}: row {row}, column {col}: non-finite value")
    return value


def load_signal_csv(path, domain: str = "dt"):
    """Read a signal CSV (header row; time column then channel columns).

    Returns a :class:`DiscreteSignal` for ``domain='dt'`` or a
    :class:`SampledSignal` (with the step inferred from the time column) for
    ``domain='ct'``.  The time column must be uniformly spaced.
    """
    if domain not in ("dt", "ct"):
        raise ValueError("domain must be 'dt' or 'ct'")
    times: list[float] = []
    rows: list[list[float]] = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise SignalFormatError(f"{path}: need a header row with a time column "
                                    "and at least one channel column")
        width = len(header)
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != width:
                raise SignalFormatError(
                    f"{path}: row {lineno}: expected {width} fields, got {len(record)}")
            values = [_parse_float(cell, lineno, c + 1, path) for c, cell in enumerate(record)]
            times.append(values[0])
            rows.append(values[1:])
    if not rows:
        raise SignalFormatError(f"{path}: no data rows")
    data = np.array(rows, dtype=float).T
    t = np.array(times)
    if len(t) > 1:
        steps = np.diff(t)
        if steps.min() <= 0 or np.ptp(steps) > 1e-9 * max(abs(t[-1]), 1.0):
            raise SignalFormatError(f"{path}: time column must be uniformly increasing")
    if domain == "dt":
        return DiscreteSignal(data, t0=int(round(t[0])))
    step = float(t[1] - t[0]) if len(t) > 1 else 1.0
    return SampledSignal(data, step=step, t0=float(t[0]))


def _format_value(x: float) -> str:
    return format(float(x), ".17g")


def save_signal_csv(path, signal) -> None:
    """Write a signal CSV with 17-significant-digit values (lossless round trip)."""
    if isinstance(signal, DiscreteSignal):
        times = signal.t0 + np.arange(signal.length)
        time_fmt = str
    elif isinstance(signal, SampledSignal):
        times = signal.times
        time_fmt = _format_value
    else:
        raise TypeError("save_signal_csv expects a DiscreteSignal or SampledSignal")
    lines = ["t," + ",".join(f"ch{i}" for i in range(signal.dim))]
    for k in range(signal.length):
        cells = [time_fmt(times[k])] + [_format_value(v) for v in signal.data[:, k]]
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_rank_trace_csv(path, trace: RankTrace) -> None:
    """Write one rank-trace CSV: header ``T,rank``, one row per prefix length."""
    lines = ["T,rank"]
    for T, r in enumerate(trace.ranks):
        lines.append(f"{T},{int(r)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_json(path, payload) -> None:
    """Write a JSON document deterministically (sorted keys, stable float repr)."""
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
