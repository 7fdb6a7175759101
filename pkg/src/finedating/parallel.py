"""Order-preserving map with optional process workers.

Generation work is split into jobs keyed by deterministic RNG
substreams, so results are identical for any worker count.  Workers are
forked: the job function is published through a module global that the
children inherit, which keeps closures (curves, seeds) off the pickle
path.  Falls back to serial execution where fork is unavailable.
"""

from __future__ import annotations

import multiprocessing

_ACTIVE_FN = None


def _invoke(job):
    return _ACTIVE_FN(job)


def ordered_map(fn, jobs, workers: int | None = 1) -> list:
    jobs = list(jobs)
    if workers is None or workers <= 1 or len(jobs) < 2:
        return [fn(job) for job in jobs]
    try:
        ctx = multiprocessing.get_context("fork")
    except ValueError:
        return [fn(job) for job in jobs]
    from concurrent.futures import ProcessPoolExecutor

    global _ACTIVE_FN
    _ACTIVE_FN = fn
    try:
        chunk = max(1, len(jobs) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            return list(pool.map(_invoke, jobs, chunksize=chunk))
    finally:
        _ACTIVE_FN = None
