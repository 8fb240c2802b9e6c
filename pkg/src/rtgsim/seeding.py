"""Deterministic seed splitting.

Every random draw in a play comes from a stream keyed by
``(seed, *key)``, so days, purposes and plays can be reproduced in
isolation. The mixing is numpy's ``SeedSequence`` hash, which is stable
across platforms and numpy releases.
"""
from __future__ import annotations

import numpy as np

# purpose tags for per-day streams
INSTRUCTIONS = 0
VICTIM = 1
EXPLORATION = 2


def substream(seed: int, *key: int) -> np.random.Generator:
    """Return an independent generator for ``seed`` and the integer path ``key``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *key: int) -> int:
    """Fold ``key`` into ``seed`` and return a fresh 64-bit seed."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
