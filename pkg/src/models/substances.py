"""Built-in substance library loaded from a peak-table file."""

import json
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import config
from src.errors import ProfileError
from src.models.spectrum import Peak, SubstanceProfile


def load_substance_library(
    path: Optional[Union[str, Path]] = None,
    substance_order: Sequence[str] = config.SUBSTANCE_ORDER
) -> Dict[str, SubstanceProfile]:
    """Load substance peak tables.

    Args:
        path: JSON file mapping substance name -> {"peaks": [{center, height, fwhm}, ...]}
              (default: config.SUBSTANCE_LIBRARY_PATH)
        substance_order: Names in label-bit order; each must exist in the file

    Returns:
        Dictionary name -> SubstanceProfile, label indices set from substance_order
    """
    if path is None:
        path = config.SUBSTANCE_LIBRARY_PATH
    path = Path(path)

    if not path.exists():
        raise FileNotFoundError(f"Substance library not found: {path}")

    with open(path, 'r') as f:
        raw = json.load(f)

    return profiles_from_dict(raw, substance_order)


def profiles_from_dict(
    raw: Dict[str, dict],
    substance_order: Sequence[str] = config.SUBSTANCE_ORDER
) -> Dict[str, SubstanceProfile]:
    """Build SubstanceProfiles from an already-parsed peak table mapping."""
    missing = [name for name in substance_order if name not in raw]
    if missing:
        raise ProfileError(f"Substance library is missing {missing}; available: {sorted(raw)}")

    library = {}
    for index, name in enumerate(substance_order):
        entry = raw[name]
        try:
            peaks = [Peak(float(p['center']), float(p['height']), float(p['fwhm']))
                     for p in entry.get('peaks', [])]
        except KeyError as e:
            raise ProfileError(f"Substance '{name}' peak is missing field {e}") from e
        library[name] = SubstanceProfile(
            name=name,
            peaks=tuple(peaks),
            label_index=index,
            n_labels=len(substance_order)
        )

    return library
