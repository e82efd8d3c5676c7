"""Deterministic random streams.

Every random draw in the package comes from a ``numpy.random.Generator``
built on the counter-based Philox bit generator.  Streams are addressed by
a master seed plus an integer path, so a block of work always sees the same
numbers no matter which thread (or in which order) it runs.
"""

from __future__ import annotations

import zlib

import numpy as np

BLOCK_SIZE = 4096


def _coerce(part) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("stream path components must be non-negative")
        return int(part)
    # crc32 is stable across interpreter runs, unlike hash()
    return zlib.crc32(str(part).encode("utf-8"))


def stream(seed: int, *path) -> np.random.Generator:
    """Independent generator for ``(seed, *path)``.

    Path components may be ints or short strings (tags such as a solver id).
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_coerce(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def block_slices(total: int, block: int = BLOCK_SIZE) -> list[slice]:
    return [slice(i, min(i + block, total)) for i in range(0, total, block)]
