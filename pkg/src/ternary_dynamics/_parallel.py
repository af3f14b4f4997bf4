"""Deterministic ordered mapping with an optional thread pool.

Work items are pure functions of their inputs, so results are identical
for every worker count; only wall-clock time changes.  The pool size is
capped by the ``TERNARY_DYNAMICS_MAX_WORKERS`` environment variable and
defaults to serial execution.
"""

import os
from concurrent.futures import ThreadPoolExecutor

ENV_MAX_WORKERS = "TERNARY_DYNAMICS_MAX_WORKERS"


def resolve_workers(max_workers=None):
    if max_workers is None:
        try:
            max_workers = int(os.environ.get(ENV_MAX_WORKERS, "1"))
        except ValueError:
            max_workers = 1
    return max(1, max_workers)


def ordered_map(fn, items, max_workers=None):
    """Map ``fn`` over ``items`` preserving input order in the result."""
    items = list(items)
    workers = resolve_workers(max_workers)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
