"""Deterministic substream derivation for reproducible Monte Carlo work.

All randomness in the library flows through counter-based Philox streams
keyed by ``(seed, *key)``. A substream is fully determined by its key, so
work partitioned across any number of workers reproduces the serial result
as long as each unit of work owns a distinct key.
"""

from __future__ import annotations

import numpy as np

__all__ = ["substream", "child_seed"]


def substream(seed: int, *key: int) -> np.random.Generator:
    """Return an independent generator for the substream ``(seed, *key)``.

    Streams with different keys are statistically independent, and the same
    ``(seed, key)`` pair always yields an identical stream regardless of how
    many other streams were created before it.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *key: int) -> int:
    """Derive a deterministic scalar seed for the substream ``(seed, *key)``.

    Used where an API takes a plain integer seed (e.g. per-cell Monte Carlo
    roots in experiment sweeps) rather than a generator.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])
