"""Experiment configuration: one strict JSON document for the whole pipeline.

Every section is optional and defaults to config.py. Unknown keys and invalid
values raise ConfigError naming the dotted field path, e.g.

    {"augment": {"max_shift_frac": 0.3}}
    -> ConfigError: augment.max_shift_frac: max_shift_frac must lie in [0, 0.1], got 0.3
"""

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import config
from src.data.augmentation import AugmentPolicy
from src.data.simulator import AcquisitionSettings
from src.errors import ConfigError
from src.models.label import MixtureLabel
from src.models.spectrum import SpectrumAxis, SubstanceProfile
from src.models.substances import load_substance_library, profiles_from_dict
from src.network.model import ModelConfig
from src.network.training import TrainConfig
from src.transforms import TransformSettings


@dataclass(frozen=True)
class AxisConfig:
    start_cm1: float = config.AXIS_START_CM1
    end_cm1: float = config.AXIS_END_CM1
    n_points: int = config.AXIS_N_POINTS

    def __post_init__(self):
        self.to_axis()

    def to_axis(self) -> SpectrumAxis:
        return SpectrumAxis(float(self.start_cm1), float(self.end_cm1), self.n_points)


@dataclass(frozen=True)
class SubstanceConfig:
    """Substance library and the per-class raw acquisition counts.

    Attributes:
        library_path: Peak-table JSON (None = built-in data/substances.json)
        profiles: Inline peak tables, used instead of library_path when given
        order: Substance names in label-bit order
        mixing_ratio: Weight per substance when present
        raw_counts: Label bits -> raw spectra to simulate
    """
    library_path: Optional[str] = None
    profiles: Optional[Dict[str, Any]] = None
    order: List[str] = field(default_factory=lambda: list(config.SUBSTANCE_ORDER))
    mixing_ratio: Dict[str, float] = field(default_factory=lambda: dict(config.MIXING_RATIO))
    raw_counts: Dict[str, int] = field(default_factory=lambda: dict(config.RAW_COUNTS))

    def __post_init__(self):
        if not self.order:
            raise ValueError("order must name at least one substance")
        unknown = [name for name in self.mixing_ratio if name not in self.order]
        if unknown:
            raise ValueError(f"mixing_ratio references unknown substances {unknown}")
        for bits, count in self.raw_counts.items():
            label = MixtureLabel.from_string(bits)
            if label.n_labels != len(self.order):
                raise ValueError(f"raw_counts key '{bits}' must have {len(self.order)} bits")
            if label.is_empty:
                raise ValueError("raw_counts cannot include the empty class")
            if int(count) != count or count < 1:
                raise ValueError(f"raw_counts['{bits}'] must be a positive integer, got {count}")

    def load_library(self) -> Dict[str, SubstanceProfile]:
        if self.profiles is not None:
            return profiles_from_dict(self.profiles, self.order)
        return load_substance_library(self.library_path, self.order)


@dataclass(frozen=True)
class AcquisitionConfig:
    weight_jitter: float = config.WEIGHT_JITTER
    fluorescence_amplitude_range: Tuple[float, float] = config.FLUORESCENCE_AMPLITUDE_RANGE
    fluorescence_width_frac_range: Tuple[float, float] = config.FLUORESCENCE_WIDTH_FRAC_RANGE
    snr_db: float = config.ACQUISITION_SNR_DB

    def __post_init__(self):
        if not 0 <= self.weight_jitter < 1:
            raise ValueError(f"weight_jitter must lie in [0, 1), got {self.weight_jitter}")
        lo, hi = self.fluorescence_amplitude_range
        if not 0 <= lo <= hi:
            raise ValueError(f"fluorescence_amplitude_range must satisfy 0 <= low <= high, got ({lo}, {hi})")
        lo, hi = self.fluorescence_width_frac_range
        if not 0.25 < lo <= hi:
            raise ValueError(f"fluorescence_width_frac_range must satisfy 0.25 < low <= high, got ({lo}, {hi})")
        if not math.isfinite(self.snr_db):
            raise ValueError(f"snr_db must be finite, got {self.snr_db}")


@dataclass(frozen=True)
class EvalConfig:
    threshold: float = config.DEFAULT_THRESHOLD
    test_set_size: int = config.TEST_SET_SIZE
    test_snr_range_db: Tuple[float, float] = config.TEST_SNR_RANGE_DB

    def __post_init__(self):
        if not math.isfinite(self.threshold):
            raise ValueError(f"threshold must be finite, got {self.threshold}")
        if self.test_set_size < 1:
            raise ValueError(f"test_set_size must be >= 1, got {self.test_set_size}")
        if self.test_snr_range_db[0] > self.test_snr_range_db[1]:
            raise ValueError(f"test_snr_range_db low exceeds high: {self.test_snr_range_db}")


@dataclass(frozen=True)
class BenchConfig:
    n_spectra: int = config.BENCH_N_SPECTRA
    snr_range_db: Tuple[float, float] = config.BENCH_SNR_RANGE_DB
    warmup: int = config.BENCH_WARMUP

    def __post_init__(self):
        if self.n_spectra < 1:
            raise ValueError(f"n_spectra must be >= 1, got {self.n_spectra}")
        if self.snr_range_db[0] > self.snr_range_db[1]:
            raise ValueError(f"snr_range_db low exceeds high: {self.snr_range_db}")
        if self.warmup < 0:
            raise ValueError(f"warmup must be >= 0, got {self.warmup}")


SECTIONS = {
    'axis': AxisConfig,
    'substances': SubstanceConfig,
    'acquisition': AcquisitionConfig,
    'transform': TransformSettings,
    'augment': AugmentPolicy,
    'model': ModelConfig,
    'train': TrainConfig,
    'eval': EvalConfig,
    'bench': BenchConfig,
}
TOP_LEVEL = ('seed', 'output_dir', 'n_workers', 'target_per_class', 'train_fraction')


@dataclass
class PipelineConfig:
    """Everything one experiment needs."""
    seed: int = config.RANDOM_SEED
    output_dir: str = config.OUTPUT_DIR
    n_workers: int = config.N_WORKERS
    target_per_class: int = config.TARGET_PER_CLASS
    train_fraction: float = config.TRAIN_FRACTION
    axis: AxisConfig = field(default_factory=AxisConfig)
    substances: SubstanceConfig = field(default_factory=SubstanceConfig)
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    transform: TransformSettings = field(default_factory=TransformSettings)
    augment: AugmentPolicy = field(default_factory=AugmentPolicy)
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    bench: BenchConfig = field(default_factory=BenchConfig)

    def __post_init__(self):
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(f"seed: must be a non-negative integer, got {self.seed}")
        if self.n_workers < 1:
            raise ConfigError(f"n_workers: must be >= 1, got {self.n_workers}")
        if self.target_per_class < 1:
            raise ConfigError(f"target_per_class: must be >= 1, got {self.target_per_class}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction: must lie strictly between 0 and 1, got {self.train_fraction}")
        largest = max(self.substances.raw_counts.values())
        if self.target_per_class < largest:
            raise ConfigError(
                f"target_per_class: {self.target_per_class} is below the largest raw class count ({largest})"
            )
        image_hw = (self.transform.image_height, self.transform.image_width)
        if tuple(self.model.input_hw) != image_hw:
            raise ConfigError(f"model.input_hw: {tuple(self.model.input_hw)} differs from transform image size {image_hw}")
        if self.model.n_labels != len(self.substances.order):
            raise ConfigError(
                f"model.n_labels: {self.model.n_labels} differs from the {len(self.substances.order)} substances"
            )

    @property
    def output_path(self) -> Path:
        return Path(self.output_dir)

    def acquisition_settings(self) -> AcquisitionSettings:
        ratios = tuple((name, float(self.substances.mixing_ratio.get(name, 1.0)))
                       for name in self.substances.order)
        return AcquisitionSettings(
            ratios=ratios,
            weight_jitter=self.acquisition.weight_jitter,
            fluorescence_amplitude_range=tuple(self.acquisition.fluorescence_amplitude_range),
            fluorescence_width_frac_range=tuple(self.acquisition.fluorescence_width_frac_range),
            snr_db=self.acquisition.snr_db
        )

    def load_library(self) -> Dict[str, SubstanceProfile]:
        """Load and check the substance library against the axis."""
        library = self.substances.load_library()
        axis = self.axis.to_axis()
        for profile in library.values():
            profile.check_axis(axis)
        return library

    def to_dict(self) -> Dict[str, Any]:
        data = {name: getattr(self, name) for name in TOP_LEVEL}
        for name in SECTIONS:
            data[name] = _jsonable(dataclasses.asdict(getattr(self, name)))
        return data

    def with_overrides(
        self,
        seed: Optional[int] = None,
        output_dir: Optional[str] = None,
        transform: Optional[str] = None,
        threshold: Optional[float] = None,
        n_workers: Optional[int] = None
    ) -> 'PipelineConfig':
        """Copy with CLI flags applied; a new seed also reseeds augmentation and training."""
        data = self.to_dict()
        if seed is not None:
            data['seed'] = seed
            data['augment']['seed'] = seed
            data['train']['seed'] = seed
        if output_dir is not None:
            data['output_dir'] = str(output_dir)
        if transform is not None:
            data['transform']['kind'] = transform
        if threshold is not None:
            data['eval']['threshold'] = threshold
        if n_workers is not None:
            data['n_workers'] = n_workers
        return pipeline_config_from_dict(data)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _tupled(cls, data: Dict[str, Any]) -> Dict[str, Any]:
    """Convert JSON lists to tuples for fields declared as tuples."""
    out = dict(data)
    for f in dataclasses.fields(cls):
        if f.name in out and isinstance(out[f.name], list) and 'Tuple' in str(f.type):
            out[f.name] = tuple(out[f.name])
    return out


def _build_section(name: str, cls, data: Any):
    if not isinstance(data, dict):
        raise ConfigError(f"{name}: expected an object, got {type(data).__name__}")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{name}.{unknown[0]}: unknown key (allowed: {sorted(known)})")
    try:
        return cls(**_tupled(cls, data))
    except (ValueError, TypeError) as e:
        if isinstance(e, ConfigError):
            raise
        culprit = next((key for key in sorted(data, key=len, reverse=True) if key in str(e)), None)
        path = f"{name}.{culprit}" if culprit else name
        raise ConfigError(f"{path}: {e}") from e


def pipeline_config_from_dict(data: Dict[str, Any]) -> PipelineConfig:
    """Build a PipelineConfig from parsed JSON, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigError(f"Configuration must be a JSON object, got {type(data).__name__}")

    unknown = sorted(set(data) - set(TOP_LEVEL) - set(SECTIONS))
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown key")

    kwargs: Dict[str, Any] = {key: data[key] for key in TOP_LEVEL if key in data}
    seed = kwargs.get('seed', config.RANDOM_SEED)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"seed: must be an integer, got {seed!r}")

    for name, cls in SECTIONS.items():
        section = dict(data.get(name, {})) if isinstance(data.get(name, {}), dict) else data[name]
        if isinstance(section, dict):
            if name in ('augment', 'train'):
                section.setdefault('seed', seed)
            if name == 'model' and 'input_hw' not in section:
                transform = data.get('transform', {})
                if isinstance(transform, dict):
                    section['input_hw'] = [transform.get('image_height', config.IMAGE_HEIGHT),
                                           transform.get('image_width', config.IMAGE_WIDTH)]
            if name == 'model' and 'n_labels' not in section:
                substances = data.get('substances', {})
                if isinstance(substances, dict) and 'order' in substances:
                    section['n_labels'] = len(substances['order'])
        kwargs[name] = _build_section(name, cls, section)

    try:
        return PipelineConfig(**kwargs)
    except TypeError as e:
        raise ConfigError(f"Top-level field has the wrong type: {e}") from e


def load_pipeline_config(path: Optional[Union[str, Path]] = None) -> PipelineConfig:
    """Read a JSON experiment file (defaults only if path is None)."""
    if path is None:
        return pipeline_config_from_dict({})
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Configuration file not found: {path}")
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    return pipeline_config_from_dict(data)


def save_pipeline_config(cfg: PipelineConfig, path: Union[str, Path]):
    with open(path, 'w') as f:
        json.dump(cfg.to_dict(), f, indent=2)
