# ============================================================================
# config.py
# ============================================================================
"""Configuration constants and parameters for Raman mixture identification."""

from pathlib import Path
from typing import Dict, List, Tuple

PROJECT_ROOT = Path(__file__).resolve().parent

# Reproducibility
RANDOM_SEED = 42

# Output configuration
VERBOSITY = 1  # 0=silent, 1=progress, 2=debug
OUTPUT_DIR = 'runs/default'
N_WORKERS = 1  # Threads for generation/inference fan-out (results stay ordered)

# ============================================================================
# Spectrum simulation
# ============================================================================

# Raman-shift axis (cm^-1)
AXIS_START_CM1 = 400.0
AXIS_END_CM1 = 1800.0
AXIS_N_POINTS = 1024

# Built-in substance library (peak tables live in a data file, not in code)
SUBSTANCE_LIBRARY_PATH = PROJECT_ROOT / 'data' / 'substances.json'
SUBSTANCE_ORDER = ['oleic_acid', 'palmitic_acid', 'retinyl_palmitate']

# Mixing ratio per substance when it is present (2:1:1 oleic:palmitic:retinyl)
MIXING_RATIO: Dict[str, float] = {
    'oleic_acid': 2.0,
    'palmitic_acid': 1.0,
    'retinyl_palmitate': 1.0,
}
WEIGHT_JITTER = 0.10  # Relative per-sample jitter on mixture weights

# Raw counts per class, label bits ordered as SUBSTANCE_ORDER
RAW_COUNTS: Dict[str, int] = {
    '100': 35,  # Oleic acid
    '010': 36,  # Palmitic acid
    '001': 28,  # Retinyl palmitate
    '110': 42,  # Oleic + Palmitic
    '011': 28,  # Palmitic + Retinyl
    '101': 28,  # Oleic + Retinyl
    '111': 28,  # All three
}

# Fluorescence baseline (amplitude relative to the strongest Raman peak)
FLUORESCENCE_AMPLITUDE_RANGE = (0.5, 3.0)
FLUORESCENCE_WIDTH_FRAC_RANGE = (0.35, 1.0)  # Fraction of axis span, must stay > 0.25

# Acquisition noise: channel SNR 600:1 read as an amplitude ratio -> 20*log10(600)
ACQUISITION_SNR_DB = 55.6

# ============================================================================
# Time-frequency transforms
# ============================================================================

DEFAULT_TRANSFORM = 'cwt'  # Options: 'stft', 'wvd', 'cwt'
TRANSFORM_KINDS = ('stft', 'wvd', 'cwt')

# STFT
STFT_WINDOW_LEN = 64
STFT_HOP = 16
STFT_WINDOW = 'hann'  # Options: 'hann', 'rect'

# CWT
WAVELET_FAMILY = 'morlet'  # Options: 'morlet', 'mexican_hat'
MORLET_OMEGA0 = 6.0
N_SCALES = 64
MIN_PERIOD_SAMPLES = 4.0
MAX_PERIOD_DIVISOR = 4.0  # Longest period = signal_length / MAX_PERIOD_DIVISOR
WAVELET_SUPPORT = 5.0  # Kernel truncated at |t/a| <= WAVELET_SUPPORT

# Scale images
IMAGE_HEIGHT = 64
IMAGE_WIDTH = 64

# ============================================================================
# Augmentation
# ============================================================================

TARGET_PER_CLASS = 360
AUGMENT_SNR_RANGE_DB = (30.0, 60.0)
MAX_SHIFT_FRAC = 0.1
MAX_SHEAR_FRAC = 0.1
ALLOW_ROT90 = True
ALLOW_HFLIP = True
AUGMENT_PROBABILITY = 0.5  # Independent probability per geometric operation
TRAIN_FRACTION = 0.8

# ============================================================================
# MDNN network
# ============================================================================

CONVS_PER_MODULE: List[int] = [2, 2, 3, 3, 4]
FILTERS_PER_MODULE: List[int] = [8, 16, 32, 32, 64]
DENSE_UNITS: List[int] = [32]
KERNEL_SIZE = 3  # Fixed
POOL_SIZE = 2  # Fixed

# Training
LEARNING_RATE = 0.01
MOMENTUM = 0.9
BATCH_SIZE = 32
MAX_EPOCHS = 30
PATIENCE_EPOCHS = 2
LOSS_TOLERANCE = 1e-4
BCE_EPSILON = 1e-7
MAX_RANK = 8  # Tensor file rank limit

# ============================================================================
# Evaluation and benchmark
# ============================================================================

DEFAULT_THRESHOLD = 0.5
TEST_SET_SIZE = 700
TEST_SNR_RANGE_DB = (20.0, 30.0)
BENCH_N_SPECTRA = 700
BENCH_SNR_RANGE_DB: Tuple[float, float] = (20.0, 30.0)
BENCH_WARMUP = 3

# Desk-scale targets for a trained model on the test set
TARGET_HAMMING_LOSS = 0.05
TARGET_AVERAGE_PRECISION = 0.95

# Full-scale reference figures, printed next to bench results for comparison only
REFERENCE_DETECTION_TIME_S = 5.3132
REFERENCE_MODEL_SIZE_MB = 74.5
