"""CSV writing and worker-pool plumbing shared by result types and the command line."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def worker_count() -> int:
    """Worker cap from TFP_THREADS; defaults to the CPU count, at most 8."""
    raw = os.environ.get("TFP_THREADS", "")
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"TFP_THREADS must be a positive integer, got {raw!r}") from None
        if n < 1:
            raise ValueError(f"TFP_THREADS must be a positive integer, got {raw!r}")
        return n
    return min(os.cpu_count() or 1, 8)


def parallel_map(fn, items):
    """Order-preserving map over items, threaded when more than one worker is allowed."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def format_float(v: float) -> str:
    # 17 significant digits, enough to round-trip a double exactly
    return f"{v:.16e}"


def write_csv(path, header, columns) -> None:
    """Write columns (equal-length 1d arrays) under a comma-separated header."""
    columns = [np.asarray(c, dtype=float) for c in columns]
    n = columns[0].size
    if len(header) != len(columns):
        raise ValueError(f"{len(header)} header fields for {len(columns)} columns")
    for c in columns:
        if c.size != n:
            raise ValueError("columns must all have the same length")
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(format_float(c[i]) for c in columns))
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        f.write("\n".join(lines) + "\n")
    os.replace(tmp, path)
