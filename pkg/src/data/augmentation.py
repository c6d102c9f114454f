"""Class balancing and augmentation.

Two stages:
    1. Spectrum space: minority classes are oversampled by re-noising raw
       spectra at an SNR drawn from a range (30-60 dB by default).
    2. Image space: synthesized scale images get random integer shifts,
       90 degree rotation, horizontal flip and shear, each applied with an
       independent probability.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

import config
from src.data.dataset import DatasetItem, LabeledDataset
from src.data.simulator import add_noise_snr
from src.errors import DatasetError, InvalidRangeError, ShapeMismatchError
from src.models.label import MIXTURE_CLASSES, MixtureLabel
from src.models.spectrum import NoiseSpec, RamanSpectrum
from src.transforms import TransformSettings, spectrum_to_image
from src.transforms.maps import ScaleImage
from src.utils.parallel import ordered_map
from src.utils.seeding import derive_rng, derive_seed

SHIFT_LIMIT = 0.1


@dataclass(frozen=True)
class AugmentPolicy:
    """Augmentation settings.

    Attributes:
        max_shift_frac: Largest shift as a fraction of H and W, in [0, 0.1]
        allow_rot90: Allow 90 degree rotation (square images only)
        allow_hflip: Allow horizontal flip
        max_shear_frac: Largest horizontal shear factor
        noise_snr_range_db: (low, high) SNR for re-noised copies
        probability: Chance of applying each geometric operation
        seed: Master seed for synthesized items
    """
    max_shift_frac: float = config.MAX_SHIFT_FRAC
    allow_rot90: bool = config.ALLOW_ROT90
    allow_hflip: bool = config.ALLOW_HFLIP
    max_shear_frac: float = config.MAX_SHEAR_FRAC
    noise_snr_range_db: Tuple[float, float] = config.AUGMENT_SNR_RANGE_DB
    probability: float = config.AUGMENT_PROBABILITY
    seed: int = config.RANDOM_SEED

    def __post_init__(self):
        if not 0.0 <= self.max_shift_frac <= SHIFT_LIMIT:
            raise InvalidRangeError(f"max_shift_frac must lie in [0, {SHIFT_LIMIT}], got {self.max_shift_frac}")
        if self.max_shear_frac < 0:
            raise InvalidRangeError(f"max_shear_frac must be >= 0, got {self.max_shear_frac}")
        low, high = self.noise_snr_range_db
        if low > high:
            raise InvalidRangeError(f"Noise SNR range low {low} exceeds high {high}")
        if not 0.0 <= self.probability <= 1.0:
            raise InvalidRangeError(f"probability must lie in [0, 1], got {self.probability}")

    @classmethod
    def geometry_off(cls, **overrides) -> 'AugmentPolicy':
        """Policy with every geometric operation disabled."""
        fields = dict(max_shift_frac=0.0, allow_rot90=False, allow_hflip=False, max_shear_frac=0.0)
        fields.update(overrides)
        return cls(**fields)


@dataclass(frozen=True)
class GeometricOps:
    """Concrete geometric operations for one image, applied in field order."""
    shift: Tuple[int, int] = (0, 0)
    rot90: bool = False
    hflip: bool = False
    shear: float = 0.0

    @property
    def is_identity(self) -> bool:
        return self.shift == (0, 0) and not self.rot90 and not self.hflip and self.shear == 0.0


def shift_image(pixels: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """Integer translation by (dy, dx) with zero fill."""
    height, width = pixels.shape
    out = np.zeros_like(pixels)
    if abs(dy) >= height or abs(dx) >= width:
        return out
    src_rows = slice(max(0, -dy), height - max(0, dy))
    dst_rows = slice(max(0, dy), height - max(0, -dy))
    src_cols = slice(max(0, -dx), width - max(0, dx))
    dst_cols = slice(max(0, dx), width - max(0, -dx))
    out[dst_rows, dst_cols] = pixels[src_rows, src_cols]
    return out


def shear_image(pixels: np.ndarray, factor: float) -> np.ndarray:
    """Horizontal shear about the image centre, bilinear with zero fill."""
    matrix = np.array([[1.0, 0.0], [factor, 1.0]])
    center = (np.array(pixels.shape, dtype=float) - 1.0) / 2.0
    offset = center - matrix @ center
    return ndimage.affine_transform(pixels, matrix, offset=offset, order=1,
                                    mode='constant', cval=0.0)


def apply_geometric(pixels: np.ndarray, ops: GeometricOps) -> np.ndarray:
    """Apply shift, rotation, flip and shear in that order; result clipped to [0, 1]."""
    out = np.asarray(pixels, dtype=float)
    if ops.shift != (0, 0):
        out = shift_image(out, *ops.shift)
    if ops.rot90:
        if out.shape[0] != out.shape[1]:
            raise ShapeMismatchError(f"90 degree rotation needs a square image, got {out.shape}")
        out = np.rot90(out)
    if ops.hflip:
        out = out[:, ::-1]
    if ops.shear != 0.0:
        out = shear_image(out, ops.shear)
    return np.clip(out, 0.0, 1.0)


def draw_geometric_ops(policy: AugmentPolicy, shape: Tuple[int, int],
                       rng: np.random.Generator) -> GeometricOps:
    """Draw one image's operations; every draw is made even when disabled."""
    height, width = shape
    coins = rng.random(4) < policy.probability
    max_dy = int(np.floor(policy.max_shift_frac * height))
    max_dx = int(np.floor(policy.max_shift_frac * width))
    dy = int(rng.integers(-max_dy, max_dy + 1))
    dx = int(rng.integers(-max_dx, max_dx + 1))
    shear = float(rng.uniform(-policy.max_shear_frac, policy.max_shear_frac))

    return GeometricOps(
        shift=(dy, dx) if coins[0] else (0, 0),
        rot90=bool(coins[1] and policy.allow_rot90 and height == width),
        hflip=bool(coins[2] and policy.allow_hflip),
        shear=shear if coins[3] and policy.max_shear_frac > 0 else 0.0
    )


def augment_image(image: ScaleImage, policy: AugmentPolicy, sample_seed: int) -> ScaleImage:
    """Randomly transformed copy of an image; the label is untouched.

    Args:
        image: Source image
        policy: Allowed operations and their bounds
        sample_seed: Seed for this image's draws

    Returns:
        New ScaleImage, deterministic for a fixed seed
    """
    rng = np.random.default_rng(sample_seed)
    ops = draw_geometric_ops(policy, image.shape, rng)
    if ops.is_identity:
        return image.with_pixels(image.pixels.copy())
    return image.with_pixels(apply_geometric(image.pixels, ops))


def group_by_class(spectra: Sequence[RamanSpectrum]) -> Dict[str, List[RamanSpectrum]]:
    groups: Dict[str, List[RamanSpectrum]] = {}
    for spectrum in spectra:
        groups.setdefault(spectrum.label.to_string(), []).append(spectrum)
    return groups


def renoise(spectrum: RamanSpectrum, bits: str, index: int,
            policy: AugmentPolicy) -> Tuple[RamanSpectrum, float]:
    """Copy of a raw spectrum with extra white noise at a random SNR in the policy range."""
    rng = derive_rng(policy.seed, 'synth', bits, index)
    low, high = policy.noise_snr_range_db
    snr_db = float(rng.uniform(low, high))
    seed = int(rng.integers(0, 2 ** 63 - 1))
    return add_noise_snr(spectrum, NoiseSpec(snr_db, seed)), snr_db


def oversample_to(
    raw_spectra: Sequence[RamanSpectrum],
    target_per_class: int = config.TARGET_PER_CLASS,
    policy: AugmentPolicy = AugmentPolicy(),
    transform: TransformSettings = TransformSettings(),
    classes: Optional[Sequence[MixtureLabel]] = None,
    n_workers: int = config.N_WORKERS,
    verbose: int = config.VERBOSITY
) -> LabeledDataset:
    """Balance every class to exactly target_per_class images.

    Originals are kept (transformed, not augmented). Synthesized item j of a
    class re-noises raw spectrum j mod n_raw, transforms it, then applies
    random geometric augmentation.

    Args:
        raw_spectra: Raw acquisitions
        target_per_class: Items per class afterwards (>= largest raw class)
        policy: Augmentation policy
        transform: Spectrum-to-image settings
        classes: Classes that must be present (default: the seven mixture classes)
        n_workers: Worker threads
        verbose: Verbosity level (0=silent, 1=progress, 2=debug)

    Returns:
        LabeledDataset grouped by class, originals first within each class
    """
    groups = group_by_class(raw_spectra)
    required = [c.to_string() for c in (MIXTURE_CLASSES if classes is None else classes)]
    for bits in required:
        if not groups.get(bits):
            raise DatasetError(f"Class {bits} has no raw spectra to oversample")

    largest = max(len(members) for members in groups.values())
    if target_per_class < largest:
        raise InvalidRangeError(
            f"target_per_class {target_per_class} is below the largest raw class ({largest})"
        )

    order = required + [bits for bits in groups if bits not in required]
    jobs = []
    for bits in order:
        members = groups[bits]
        jobs.extend(('raw', bits, i, members[i]) for i in range(len(members)))
        jobs.extend(('synth', bits, j, members[j % len(members)])
                    for j in range(target_per_class - len(members)))

    if verbose >= 1:
        n_synth = sum(1 for job in jobs if job[0] == 'synth')
        print(f"Oversampling {len(raw_spectra)} raw spectra to {target_per_class}/class "
              f"({n_synth} synthesized, transform={transform.kind})...")

    def build(job) -> DatasetItem:
        origin, bits, index, spectrum = job
        if origin == 'raw':
            image = spectrum_to_image(spectrum, transform)
            return DatasetItem(image, spectrum.label, f"raw:{bits}:{index}")

        noisy, snr_db = renoise(spectrum, bits, index, policy)
        image = augment_image(spectrum_to_image(noisy, transform), policy,
                              derive_seed(policy.seed, 'geometry', bits, index))
        return DatasetItem(image, spectrum.label, f"synth:{bits}:{index}:snr={snr_db:.2f}")

    items = ordered_map(build, jobs, n_workers, verbose)

    if verbose >= 2:
        for bits, count in LabeledDataset(items).class_counts.items():
            print(f"  {bits}: {len(groups[bits])} raw -> {count}")

    return LabeledDataset(items)
