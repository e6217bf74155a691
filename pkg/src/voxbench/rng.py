"""Seeded random-stream fan-out.

One global seed fans out into named substreams so pipeline stages (evolve,
genqa, eval) and per-design fitness searches can be rerun independently yet
reproducibly. Streams are numpy PCG64 generators derived via SeedSequence,
which is stable across platforms and numpy versions.
"""
from __future__ import annotations

import zlib

import numpy as np


def _label_entropy(label: int | str) -> int:
    if isinstance(label, int):
        return label & 0xFFFFFFFF
    return zlib.crc32(label.encode("utf-8"))


def substream(seed: int, *labels: int | str) -> np.random.Generator:
    """Derive an independent generator from a root seed and a label path.

    The same (seed, labels) always yields the same stream; distinct label
    paths yield statistically independent streams.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_label_entropy(v) for v in labels]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def fitness_stream(seed: int, design_hash: int) -> np.random.Generator:
    """Stream for one design's controller search.

    Keyed by the design hash (not by evaluation order) so the same
    (design, env, budget, seed) reproduces the same fitness no matter where
    the design appears in a run. The generation-pipeline identity depends
    on this.
    """
    return substream(seed, "fitness", design_hash & 0xFFFFFFFF, (design_hash >> 32) & 0xFFFFFFFF)
