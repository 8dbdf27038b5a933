"""Small shared helpers: deterministic parallel map and CSV formatting."""
from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    """Worker count from the PENCIL_THREADS environment variable (default 1)."""
    raw = os.environ.get("PENCIL_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def pmap(fn, items):
    """Order-preserving map, parallel when PENCIL_THREADS > 1.

    Results arrive in input order regardless of worker scheduling, so callers
    stay deterministic under any thread count.
    """
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def fmt(x: float) -> str:
    """Format a float with 17 significant digits (exact round trip)."""
    return format(float(x), ".17g")


def write_csv(path, header, rows) -> None:
    """Write rows of floats/ints/strings; floats rendered via fmt()."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(
                [fmt(v) if isinstance(v, float) else str(v) for v in row]
            )


def read_csv(path):
    """Read a CSV written by write_csv; returns (header, list-of-row-lists)."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [row for row in r]
