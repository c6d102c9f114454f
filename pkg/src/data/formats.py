"""File formats: tensor files, PGM images and spectrum CSVs.

Tensor file layout (all little-endian):
    magic    4 bytes   b'MDNT'
    version  u8        1
    rank     u8        number of dimensions (<= config.MAX_RANK)
    dims     u32 x rank
    payload  f32 x product(dims), row-major
"""

import os
import struct
from pathlib import Path
from typing import Tuple, Union

import numpy as np
import pandas as pd

import config
from src.errors import (
    BadMagicError,
    TensorDimsError,
    TensorFormatError,
    TruncatedTensorError,
    UnsupportedVersionError,
)
from src.models.label import MixtureLabel
from src.models.spectrum import RamanSpectrum, SpectrumAxis

TENSOR_MAGIC = b'MDNT'
TENSOR_VERSION = 1
MAX_TENSOR_ELEMENTS = 2 ** 31 - 1

PathLike = Union[str, Path]


# ============================================================================
# Tensor files
# ============================================================================

def encode_tensor(array: np.ndarray) -> bytes:
    """Serialize an array to tensor-file bytes (values stored as float32)."""
    array = np.asarray(array)
    if array.ndim > config.MAX_RANK:
        raise TensorDimsError(f"Rank {array.ndim} exceeds limit {config.MAX_RANK}")
    if any(d > 0xFFFFFFFF for d in array.shape):
        raise TensorDimsError(f"Dimension exceeds u32 range: {array.shape}")

    header = TENSOR_MAGIC + struct.pack('<BB', TENSOR_VERSION, array.ndim)
    header += struct.pack(f'<{array.ndim}I', *array.shape)
    payload = np.ascontiguousarray(array, dtype='<f4').tobytes()
    return header + payload


def decode_tensor(buffer: bytes, offset: int = 0) -> Tuple[np.ndarray, int]:
    """Decode one tensor starting at offset.

    Args:
        buffer: Bytes containing one or more tensors
        offset: Start position

    Returns:
        Tuple of (float32 array, offset just past the tensor)
    """
    if len(buffer) - offset < 6:
        if buffer[offset:offset + 4] != TENSOR_MAGIC[:len(buffer) - offset]:
            raise BadMagicError(f"Bad tensor magic {bytes(buffer[offset:offset + 4])!r}")
        raise TruncatedTensorError(f"Tensor header truncated at byte {offset}")

    magic = bytes(buffer[offset:offset + 4])
    if magic != TENSOR_MAGIC:
        raise BadMagicError(f"Bad tensor magic {magic!r}, expected {TENSOR_MAGIC!r}")

    version, rank = struct.unpack_from('<BB', buffer, offset + 4)
    if version != TENSOR_VERSION:
        raise UnsupportedVersionError(f"Tensor format version {version} not supported")
    if rank > config.MAX_RANK:
        raise TensorDimsError(f"Tensor rank {rank} exceeds limit {config.MAX_RANK}")

    pos = offset + 6
    if len(buffer) - pos < 4 * rank:
        raise TruncatedTensorError(f"Tensor dims truncated: need {4 * rank} bytes at {pos}")
    dims = struct.unpack_from(f'<{rank}I', buffer, pos)
    pos += 4 * rank

    n_elements = 1
    for d in dims:
        n_elements *= d
        if n_elements > MAX_TENSOR_ELEMENTS:
            raise TensorDimsError(f"Tensor dims {dims} exceed {MAX_TENSOR_ELEMENTS} elements")

    n_bytes = 4 * n_elements
    if len(buffer) - pos < n_bytes:
        raise TruncatedTensorError(
            f"Tensor payload truncated: need {n_bytes} bytes, have {len(buffer) - pos}"
        )

    data = np.frombuffer(buffer, dtype='<f4', count=n_elements, offset=pos).reshape(dims)
    return data.astype(np.float32), pos + n_bytes


def write_tensor(path: PathLike, array: np.ndarray):
    """Write one array as a tensor file."""
    with open(path, 'wb') as f:
        f.write(encode_tensor(array))


def read_tensor(path: PathLike) -> np.ndarray:
    """Read a single-tensor file; trailing bytes are a format error."""
    with open(path, 'rb') as f:
        buffer = f.read()
    array, end = decode_tensor(buffer)
    if end != len(buffer):
        raise TensorFormatError(f"{len(buffer) - end} unexpected trailing bytes in {path}")
    return array


# ============================================================================
# PGM export
# ============================================================================

def export_pgm(pixels: np.ndarray) -> bytes:
    """Encode a [0, 1] image as binary PGM (P5, maxval 255).

    Args:
        pixels: H x W array of values in [0, 1]

    Returns:
        PGM byte stream; pixel byte = round(value * 255), halves rounded up
    """
    pixels = np.asarray(pixels, dtype=float)
    if pixels.ndim != 2:
        raise ValueError(f"PGM export needs a 2-D image, got shape {pixels.shape}")
    height, width = pixels.shape
    data = np.floor(np.clip(pixels, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    header = f"P5\n{width} {height}\n255\n".encode('ascii')
    return header + data.tobytes()


def write_pgm(path: PathLike, pixels: np.ndarray):
    with open(path, 'wb') as f:
        f.write(export_pgm(pixels))


# ============================================================================
# Spectrum CSV
# ============================================================================

def spectrum_to_frame(spectrum: RamanSpectrum) -> pd.DataFrame:
    """Columns wavenumber, intensity, label_bits (bits repeated on every row)."""
    return pd.DataFrame({
        'wavenumber': spectrum.axis.values,
        'intensity': spectrum.intensity,
        'label_bits': spectrum.label.to_string(),
    })


def write_spectrum_csv(path: PathLike, spectrum: RamanSpectrum):
    spectrum_to_frame(spectrum).to_csv(path, index=False, float_format='%.12g')


def read_spectrum_csv(path: PathLike) -> RamanSpectrum:
    """Read a spectrum CSV written by write_spectrum_csv.

    The wavenumber column must be a uniform grid; the axis is rebuilt from its
    first and last values.
    """
    df = pd.read_csv(path, dtype={'label_bits': str})
    expected = ['wavenumber', 'intensity', 'label_bits']
    if list(df.columns) != expected:
        raise ValueError(f"Spectrum CSV {path} must have columns {expected}, got {list(df.columns)}")
    if len(df) < 2:
        raise ValueError(f"Spectrum CSV {path} has fewer than 2 rows")

    labels = df['label_bits'].unique()
    if len(labels) != 1:
        raise ValueError(f"Spectrum CSV {path} mixes labels {list(labels)}")

    wavenumber = df['wavenumber'].to_numpy(dtype=float)
    axis = SpectrumAxis(float(wavenumber[0]), float(wavenumber[-1]), len(wavenumber))
    if not np.allclose(wavenumber, axis.values, rtol=0, atol=1e-3 * axis.spacing):
        raise ValueError(f"Spectrum CSV {path} wavenumbers are not uniformly spaced")

    return RamanSpectrum(axis, df['intensity'].to_numpy(dtype=float),
                         MixtureLabel.from_string(str(labels[0])))


def atomic_write_csv(df: pd.DataFrame, path: PathLike, **kwargs):
    """Write a CSV through a temporary file and rename it into place."""
    path = Path(path)
    tmp = path.with_name(path.name + '.tmp')
    df.to_csv(tmp, index=False, **kwargs)
    os.replace(tmp, path)