"""CSV matrices, JSON results and run manifests."""

from __future__ import annotations

import csv
import json
import math
import platform
import sys
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import BadDims

TIMING_KEY = "timing"


def write_matrix_csv(path, a) -> None:
    """First line ``m,n`` then one row per line; vectors are written as m x 1."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(a.shape)
        for row in a:
            w.writerow([repr(float(v)) for v in row])


def read_matrix_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise BadDims(f"{path}: empty file")
    try:
        m, n = (int(v) for v in rows[0])
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise BadDims(f"{path}: {exc}") from None
    if data.shape != (m, n):
        raise BadDims(f"{path}: header says {m}x{n} but found {data.shape[0]}x{data.shape[1] if data.ndim == 2 else 0}")
    return data


def read_vector_csv(path) -> np.ndarray:
    a = read_matrix_csv(path)
    if a.shape[1] != 1:
        raise BadDims(f"{path}: expected an m x 1 vector, got {a.shape}")
    return a[:, 0]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return None
        return v
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=1) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path):
    return json.loads(Path(path).read_text())


def strip_timing(obj):
    """Copy of ``obj`` without any ``timing`` entries (for reproducibility checks)."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != TIMING_KEY}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


@dataclass
class RunManifest:
    command: str
    algorithm: str | None = None
    scenario: dict | None = None
    seeds: list = field(default_factory=list)
    stopping_rule: dict | None = None
    version: str = ""
    python: str = field(default_factory=lambda: platform.python_version())
    numpy: str = field(default_factory=lambda: np.__version__)
    timing: dict = field(default_factory=dict)  # seconds per phase

    def __post_init__(self):
        if not self.version:
            from . import __version__

            self.version = __version__

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timing[name] = self.timing.get(name, 0.0) + time.perf_counter() - t0

    def to_dict(self) -> dict:
        return asdict(self)


_ARGV: list | None = None


def set_command_line(argv) -> None:
    """Record the arguments of the current invocation (``None`` falls back to sys.argv)."""
    global _ARGV
    _ARGV = None if argv is None else [str(a) for a in argv]


def command_line() -> str:
    args = sys.argv[1:] if _ARGV is None else _ARGV
    return " ".join(["l0path"] + args)
