"""Deterministic block-parallel execution.

Work is cut into blocks whose boundaries depend only on the problem size,
never on the thread count.  Each block gets its own generator spawned from
``(seed, block_index)``, and callers reduce block results with order-free
operations (integer sums, min, max), so output is bit-identical under any
schedule.
"""

from concurrent.futures import ThreadPoolExecutor
import os

import numpy as np

THREADS_ENV = "REACHPROBE_THREADS"
BLOCK_SIZE = 16384


def thread_count():
    raw = os.environ.get(THREADS_ENV, "")
    if raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def block_rng(seed, block_index):
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(block_index),)))


def blocks(total, block_size=BLOCK_SIZE):
    return [(i, start, min(start + block_size, total))
            for i, start in enumerate(range(0, total, block_size))]


def run_blocks(func, total, block_size=BLOCK_SIZE, threads=None):
    """Call ``func(block_index, start, stop)`` for every block; results in block order."""
    jobs = blocks(total, block_size)
    threads = thread_count() if threads is None else max(1, int(threads))
    if threads == 1 or len(jobs) == 1:
        return [func(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: func(*job), jobs))
