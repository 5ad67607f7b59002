"""Reproducible random streams.

All sampling in the package goes through Philox, a counter-based generator.
Substreams are derived from an integer seed plus a path of stream ids, so
batches can fan out over workers and still produce identical draws
independent of execution order.
"""

from __future__ import annotations

import numpy as np

__all__ = ["substream", "as_generator"]


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return the Philox generator for (seed, *path).

    Distinct paths give statistically independent streams; the same
    (seed, path) always gives bitwise-identical draws.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(seed) -> np.random.Generator:
    """Coerce an int seed or an existing Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return substream(int(seed))
