"""Deterministic per-item seeds derived from a master seed."""

import hashlib
from typing import Union
import numpy as np

SeedKey = Union[int, str]


def _key_to_int(key: SeedKey) -> int:
    if isinstance(key, str):
        # Stable across runs, unlike hash()
        digest = hashlib.blake2b(key.encode('utf-8'), digest_size=8).digest()
        return int.from_bytes(digest, 'little')
    return int(key)


def derive_seed(master_seed: int, *keys: SeedKey) -> int:
    """Derive a 64-bit seed from a master seed and a path of keys.

    Args:
        master_seed: Experiment-level seed
        *keys: Stream identifiers (stage name, class bits, item index, ...)

    Returns:
        Unsigned 64-bit integer seed
    """
    entropy = [int(master_seed) & 0xFFFFFFFFFFFFFFFF] + [_key_to_int(k) for k in keys]
    seq = np.random.SeedSequence(entropy)
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def derive_rng(master_seed: int, *keys: SeedKey) -> np.random.Generator:
    """Random generator for one (master seed, keys) stream."""
    return np.random.default_rng(derive_seed(master_seed, *keys))
