"""Seeded random streams.

Every trial gets its own Philox (counter-based) stream keyed by
``(seed, trial)``, so results do not depend on execution order or on how
trials are split across workers.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def trial_rng(seed, trial=None):
    """Generator for ``seed`` or for the substream ``(seed, trial)``.

    ``seed`` may itself be a tuple, which is treated as a nested spawn key.
    """
    if isinstance(seed, tuple):
        root, *keys = seed
    else:
        root, keys = seed, []
    if trial is not None:
        keys.append(trial)
    ss = np.random.SeedSequence(int(root) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def map_trials(fn, trials, workers=1, chunk=256):
    """Evaluate ``fn(indices)`` over chunks of trial indices and concatenate in order.

    ``fn`` must return a sequence (or array) aligned with its indices.
    """
    chunks = [np.arange(i, min(i + chunk, trials)) for i in range(0, trials, chunk)]
    if workers <= 1 or len(chunks) <= 1:
        parts = [fn(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, chunks))
    if parts and isinstance(parts[0], np.ndarray):
        return np.concatenate(parts)
    return [x for part in parts for x in part]
