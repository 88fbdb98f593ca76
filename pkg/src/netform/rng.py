"""Named, versioned random streams.

Every consumer derives its generator from ``(master seed, stream name)``, so a
new stage can be inserted without shifting the draws of existing ones.
"""

from __future__ import annotations

import hashlib

import numpy as np

# bump when the derivation below changes; recorded in artifacts
RNG_VERSION = "pcg64-sha256-v1"


def _name_key(name: str) -> list[int]:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]


def stream(seed: int, *names: str | int) -> np.random.Generator:
    """Generator for the stream ``names`` under master ``seed``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    key: list[int] = []
    for name in names:
        key.extend(_name_key(str(name)))
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(key))
    return np.random.Generator(np.random.PCG64(ss))


def as_generator(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return stream(int(seed_or_rng), "default")


def child_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63 - 1))
