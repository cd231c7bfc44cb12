"""Deterministic chunk scheduling for Monte Carlo work.

Replicates are partitioned into fixed-size chunks (a pure function of the
experiment config, never of the thread count); each chunk draws from its
own substream.  Threads only decide which worker executes a chunk, and
results are reduced in chunk order, so outputs are byte-identical for any
``threads`` setting.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["resolve_threads", "chunk_runner"]


def resolve_threads(threads) -> int:
    if threads in (None, "auto"):
        return os.cpu_count() or 1
    t = int(threads)
    if t < 1:
        raise ValueError(f"threads must be >= 1 or 'auto', got {threads!r}")
    return t


def chunk_runner(threads) -> "callable | None":
    """A ``map_chunks(fn, ranges)`` callable, or None for the serial path."""
    t = resolve_threads(threads)
    if t <= 1:
        return None

    def run(fn, ranges):
        with ThreadPoolExecutor(max_workers=t) as pool:
            futures = [pool.submit(fn, c, m) for c, m in ranges]
            return [f.result() for f in futures]

    return run
