"""Deterministic fan-out of work units over a forked process pool.

Units are contiguous chunks whose boundaries depend only on the input list,
never on the worker count, and results come back in unit order; any
merge downstream therefore sees the same stream no matter how many
processes ran.
"""

from __future__ import annotations

import multiprocessing


def make_units(items, target_units=256, max_unit=None):
    """Split items into chunks: at most target_units of them, sizes equal."""
    items = list(items)
    n = len(items)
    if n == 0:
        return []
    size = max(1, -(-n // target_units))
    if max_unit is not None:
        size = min(size, max_unit)
    return [items[i : i + size] for i in range(0, n, size)]


def map_units(fn, unit_args, workers=1):
    """Yield fn(arg) per unit, in unit order; workers > 1 forks a pool."""
    unit_args = list(unit_args)
    if workers <= 1 or len(unit_args) <= 1:
        for a in unit_args:
            yield fn(a)
        return
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(processes=workers) as pool:
        yield from pool.imap(fn, unit_args, chunksize=1)
