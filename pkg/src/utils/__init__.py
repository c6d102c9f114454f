"""Utility helpers."""

from .parallel import ordered_map
from .seeding import derive_rng, derive_seed

__all__ = ['derive_rng', 'derive_seed', 'ordered_map']
