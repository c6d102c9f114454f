"""Multi-hot mixture label and the seven mixture classes.

Bit order follows config.SUBSTANCE_ORDER:
    bit 0 = Oleic acid
    bit 1 = Palmitic acid
    bit 2 = Retinyl palmitate

A label prints as a bit string, e.g. '101' = Oleic acid + Retinyl palmitate.
Generated samples always carry at least one bit; predictions may be empty.
"""

from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

import config

SUBSTANCE_DISPLAY_NAMES: Dict[str, str] = {
    'oleic_acid': 'Oleic acid',
    'palmitic_acid': 'Palmitic acid',
    'retinyl_palmitate': 'Retinyl Palmitate',
}


@dataclass(frozen=True)
class MixtureLabel:
    """Set of substances present in a sample.

    Attributes:
        bits: One boolean per substance, ordered as config.SUBSTANCE_ORDER
    """
    bits: Tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, 'bits', tuple(bool(b) for b in self.bits))
        if len(self.bits) == 0:
            raise ValueError("MixtureLabel needs at least one bit position")

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"MixtureLabel('{self.to_string()}')"

    @property
    def n_labels(self) -> int:
        return len(self.bits)

    @property
    def is_empty(self) -> bool:
        return not any(self.bits)

    @property
    def indices(self) -> List[int]:
        """Indices of the substances present."""
        return [i for i, b in enumerate(self.bits) if b]

    def to_string(self) -> str:
        return ''.join('1' if b else '0' for b in self.bits)

    def to_array(self) -> np.ndarray:
        """Multi-hot float vector (targets for the network)."""
        return np.array(self.bits, dtype=float)

    def union(self, other: 'MixtureLabel') -> 'MixtureLabel':
        if other.n_labels != self.n_labels:
            raise ValueError(f"Cannot combine labels of width {self.n_labels} and {other.n_labels}")
        return MixtureLabel(tuple(a or b for a, b in zip(self.bits, other.bits)))

    def display_name(self, substance_order: Sequence[str] = config.SUBSTANCE_ORDER) -> str:
        """Human-readable name, e.g. 'Oleic acid + Retinyl Palmitate'."""
        if self.is_empty:
            return '(none)'
        names = [SUBSTANCE_DISPLAY_NAMES.get(substance_order[i], substance_order[i])
                 for i in self.indices]
        return ' + '.join(names)

    @classmethod
    def from_string(cls, text: str) -> 'MixtureLabel':
        text = text.strip()
        if not text or any(c not in '01' for c in text):
            raise ValueError(f"Label bits must be a string of 0/1 characters, got '{text}'")
        return cls(tuple(c == '1' for c in text))

    @classmethod
    def from_indices(cls, indices: Iterable[int], n_labels: int = 3) -> 'MixtureLabel':
        present = set(indices)
        for i in present:
            if not 0 <= i < n_labels:
                raise ValueError(f"Label index {i} out of range for {n_labels} labels")
        return cls(tuple(i in present for i in range(n_labels)))


def all_mixture_classes(n_labels: int = 3) -> List[MixtureLabel]:
    """Every non-empty subset, ordered as in the dataset statistics table.

    Singles first, then pairs, then larger mixtures; within a size, the order
    follows config.RAW_COUNTS when the width matches, else lexicographic.
    """
    labels = [MixtureLabel(bits) for bits in product([False, True], repeat=n_labels)]
    labels = [lab for lab in labels if not lab.is_empty]
    if n_labels == len(config.SUBSTANCE_ORDER):
        table_order = list(config.RAW_COUNTS.keys())
        return sorted(labels, key=lambda lab: table_order.index(lab.to_string()))
    return sorted(labels, key=lambda lab: (len(lab.indices), [-b for b in lab.bits]))


# The seven classes of the three-substance experiment
MIXTURE_CLASSES: List[MixtureLabel] = all_mixture_classes(len(config.SUBSTANCE_ORDER))
