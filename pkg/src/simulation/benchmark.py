"""Detection-time benchmark: spectrum -> scale image -> MDNN scores, wall clock."""

import os
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

import config
from src.data.simulator import generate_spectra_at_snr
from src.models.spectrum import RamanSpectrum
from src.network.checkpoint import load_checkpoint
from src.network.inference import predict_scores
from src.network.model import MDNN
from src.simulation.commands import CHECKPOINT_NAME, config_classes
from src.simulation.pipeline_config import PipelineConfig
from src.transforms import TransformSettings, spectrum_to_image
from src.utils.parallel import ordered_map


@dataclass
class BenchResult:
    """Timing of one benchmark run.

    Attributes:
        n_spectra: Spectra detected
        wall_time_s: Transform + inference wall time
        per_spectrum_ms: 1000 * wall_time_s / n_spectra
        model_file_bytes: Checkpoint size on disk
    """
    n_spectra: int
    wall_time_s: float
    per_spectrum_ms: float
    model_file_bytes: int

    @classmethod
    def from_timing(cls, n_spectra: int, wall_time_s: float, model_file_bytes: int) -> 'BenchResult':
        if n_spectra < 1:
            raise ValueError(f"n_spectra must be >= 1, got {n_spectra}")
        return cls(n_spectra, wall_time_s, 1000.0 * wall_time_s / n_spectra, model_file_bytes)

    def to_dict(self) -> Dict:
        return asdict(self)


def detect(
    model: MDNN,
    spectra: Sequence[RamanSpectrum],
    transform: TransformSettings = TransformSettings(),
    n_workers: int = config.N_WORKERS
) -> np.ndarray:
    """Transform spectra to images and score them; the path the benchmark times."""
    images = ordered_map(lambda s: spectrum_to_image(s, transform).pixels, list(spectra), n_workers)
    return predict_scores(model, np.stack(images))


def time_detection(
    model: MDNN,
    spectra: Sequence[RamanSpectrum],
    transform: TransformSettings = TransformSettings(),
    warmup: int = config.BENCH_WARMUP,
    n_workers: int = config.N_WORKERS
) -> float:
    """Wall-clock seconds to detect every spectrum, after untimed warm-up runs."""
    for i in range(min(warmup, len(spectra))):
        detect(model, [spectra[i]], transform, 1)

    start = time.perf_counter()
    detect(model, spectra, transform, n_workers)
    return time.perf_counter() - start


def cmd_bench(
    cfg: PipelineConfig,
    checkpoint: Optional[Union[str, Path]] = None,
    n_spectra: Optional[int] = None,
    snr_range_db: Optional[Tuple[float, float]] = None,
    verbose: int = 1
) -> BenchResult:
    """Generate noisy spectra and time their detection with a checkpoint.

    Args:
        cfg: Experiment configuration
        checkpoint: Model file (default: <output_dir>/model.mdnn)
        n_spectra: Spectra to detect (default: cfg.bench.n_spectra)
        snr_range_db: SNR range (default: cfg.bench.snr_range_db)
        verbose: Verbosity level

    Returns:
        BenchResult
    """
    checkpoint = Path(checkpoint) if checkpoint else cfg.output_path / CHECKPOINT_NAME
    n_spectra = cfg.bench.n_spectra if n_spectra is None else n_spectra
    snr_range_db = cfg.bench.snr_range_db if snr_range_db is None else snr_range_db
    if n_spectra < 1:
        raise ValueError(f"n_spectra must be >= 1, got {n_spectra}")

    model = load_checkpoint(checkpoint)
    spectra = generate_spectra_at_snr(
        cfg.load_library(), n_spectra, cfg.axis.to_axis(), snr_range_db, cfg.seed,
        stream='bench', settings=cfg.acquisition_settings(), classes=config_classes(cfg),
        n_workers=cfg.n_workers
    )

    if verbose >= 1:
        lo, hi = snr_range_db
        print(f"Timing detection of {n_spectra} spectra at {lo:.0f}-{hi:.0f} dB "
              f"({cfg.bench.warmup} warm-up runs)...")

    wall = time_detection(model, spectra, cfg.transform, cfg.bench.warmup, cfg.n_workers)
    result = BenchResult.from_timing(n_spectra, wall, os.path.getsize(checkpoint))

    if verbose >= 1:
        print_bench_result(result)
    return result


def print_bench_result(result: BenchResult):
    print("=" * 60)
    print("DETECTION BENCHMARK")
    print("=" * 60)
    print(f"  Spectra:           {result.n_spectra}")
    print(f"  Wall time:         {result.wall_time_s:.4f} s")
    print(f"  Per spectrum:      {result.per_spectrum_ms:.3f} ms")
    print(f"  Model file:        {result.model_file_bytes / 1e6:.3f} MB")
    print("-" * 60)
    print(f"  Full-scale reference: {config.REFERENCE_DETECTION_TIME_S} s, "
          f"{config.REFERENCE_MODEL_SIZE_MB} MB")
