"""Labelled image datasets: container, stratified split and directory persistence.

A saved dataset is a directory holding manifest.csv plus one tensor file per
image:

    filename,label_bits,provenance,source_kind
    000000.mdnt,100,raw:100:0,cwt_magnitude
"""

from collections import Counter
from pathlib import Path
from typing import Dict, Iterator, List, NamedTuple, Sequence, Tuple, Union

import numpy as np
import pandas as pd

import config
from src.data.formats import atomic_write_csv, read_tensor, write_tensor
from src.errors import DatasetError, InvalidRangeError, ShapeMismatchError, TensorFormatError
from src.models.label import MixtureLabel
from src.transforms.maps import ScaleImage
from src.utils.seeding import derive_rng

MANIFEST_NAME = 'manifest.csv'
MANIFEST_COLUMNS = ['filename', 'label_bits', 'provenance', 'source_kind']


class DatasetItem(NamedTuple):
    image: ScaleImage
    label: MixtureLabel
    provenance: str


class LabeledDataset:
    """Ordered (image, label) pairs sharing one image size."""

    def __init__(self, items: Sequence[DatasetItem] = ()):
        self.items: List[DatasetItem] = list(items)

        shapes = {item.image.shape for item in self.items}
        if len(shapes) > 1:
            raise ShapeMismatchError(f"Dataset images must share one size, got {sorted(shapes)}")
        for item in self.items:
            if item.image.label != item.label:
                raise DatasetError(
                    f"Item '{item.provenance}' carries label {item.label} but its image says {item.image.label}"
                )

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[DatasetItem]:
        return iter(self.items)

    def __getitem__(self, index: int) -> DatasetItem:
        return self.items[index]

    @property
    def class_counts(self) -> Dict[str, int]:
        """Items per label bit string, in order of first appearance."""
        return dict(Counter(item.label.to_string() for item in self.items))

    @property
    def image_shape(self) -> Tuple[int, int]:
        if not self.items:
            raise DatasetError("Empty dataset has no image shape")
        return self.items[0].image.shape

    @property
    def n_labels(self) -> int:
        if not self.items:
            raise DatasetError("Empty dataset has no label width")
        return self.items[0].label.n_labels

    def indices_by_class(self) -> Dict[str, List[int]]:
        groups: Dict[str, List[int]] = {}
        for index, item in enumerate(self.items):
            groups.setdefault(item.label.to_string(), []).append(index)
        return groups

    def subset(self, indices: Sequence[int]) -> 'LabeledDataset':
        return LabeledDataset([self.items[i] for i in indices])

    def images_array(self) -> np.ndarray:
        """Images stacked as an (N, 1, H, W) float64 batch."""
        if not self.items:
            return np.zeros((0, 1, 0, 0))
        return np.stack([item.image.pixels for item in self.items])[:, None, :, :]

    def labels_array(self) -> np.ndarray:
        """Multi-hot targets as an (N, L) float64 matrix."""
        if not self.items:
            return np.zeros((0, 0))
        return np.stack([item.label.to_array() for item in self.items])


def _rounded_share(n: int, fraction: float) -> int:
    return min(max(int(np.floor(fraction * n + 0.5)), 1), n - 1)


def shuffle_split(
    dataset: LabeledDataset,
    train_frac: float = config.TRAIN_FRACTION,
    seed: int = config.RANDOM_SEED
) -> Tuple[LabeledDataset, LabeledDataset]:
    """Stratified shuffled split into training and validation sets.

    Each class contributes round(train_frac * n) items to training (at least
    one item to each side); both halves are then shuffled as a whole.

    Args:
        dataset: Source dataset (every class needs >= 2 items)
        train_frac: Training share, strictly between 0 and 1
        seed: Permutation seed

    Returns:
        Tuple of (train, val)
    """
    if not 0.0 < train_frac < 1.0:
        raise InvalidRangeError(f"train_frac must lie strictly between 0 and 1, got {train_frac}")

    rng = derive_rng(seed, 'split')
    train_idx: List[int] = []
    val_idx: List[int] = []

    for bits, indices in dataset.indices_by_class().items():
        if len(indices) < 2:
            raise DatasetError(f"Class {bits} has {len(indices)} item(s); a split needs at least 2")
        shuffled = rng.permutation(indices)
        n_train = _rounded_share(len(indices), train_frac)
        train_idx.extend(int(i) for i in shuffled[:n_train])
        val_idx.extend(int(i) for i in shuffled[n_train:])

    train_order = rng.permutation(len(train_idx))
    val_order = rng.permutation(len(val_idx))
    return (dataset.subset([train_idx[i] for i in train_order]),
            dataset.subset([val_idx[i] for i in val_order]))


def save_dataset(dataset: LabeledDataset, directory: Union[str, Path]) -> Path:
    """Write tensors then the manifest; the manifest appears only once complete.

    Tensor files left in the directory by an earlier, larger dataset are removed.

    Returns:
        Path to the written manifest
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    rows = []
    for index, item in enumerate(dataset):
        filename = f"{index:06d}.mdnt"
        write_tensor(directory / filename, item.image.pixels)
        rows.append({
            'filename': filename,
            'label_bits': item.label.to_string(),
            'provenance': item.provenance,
            'source_kind': item.image.source_kind,
        })

    manifest = directory / MANIFEST_NAME
    atomic_write_csv(pd.DataFrame(rows, columns=MANIFEST_COLUMNS), manifest)

    listed = {row['filename'] for row in rows}
    for stale in directory.glob('*.mdnt'):
        if stale.name not in listed:
            stale.unlink()
    return manifest


def load_dataset(directory: Union[str, Path]) -> LabeledDataset:
    """Read a dataset written by save_dataset."""
    directory = Path(directory)
    manifest = directory / MANIFEST_NAME
    if not manifest.exists():
        raise DatasetError(f"No {MANIFEST_NAME} in {directory}")

    df = pd.read_csv(manifest, dtype={'label_bits': str, 'provenance': str, 'source_kind': str},
                     keep_default_na=False)
    missing = [c for c in MANIFEST_COLUMNS if c not in df.columns]
    if missing:
        raise DatasetError(f"{manifest} is missing columns {missing}")

    items = []
    for row in df.itertuples(index=False):
        path = directory / row.filename
        if not path.exists():
            raise DatasetError(f"Manifest lists {row.filename} but {path} does not exist")
        pixels = read_tensor(path)
        if pixels.ndim != 2:
            raise TensorFormatError(f"{path} holds a rank-{pixels.ndim} tensor, expected an image")
        label = MixtureLabel.from_string(row.label_bits)
        items.append(DatasetItem(ScaleImage(pixels, row.source_kind, label), label, row.provenance))

    return LabeledDataset(items)
