"""Model checkpoint files.

Layout (little-endian):
    magic       4 bytes   b'MDNN'
    version     u8        1
    seed        u64       initialization seed of the saved model
    config_len  u32       length of the JSON ModelConfig that follows
    config      UTF-8 JSON
    n_tensors   u32
    tensors     n_tensors tensor-file records (see src.data.formats), in layer order
"""

import json
import struct
from pathlib import Path
from typing import Union

from src.data.formats import decode_tensor, encode_tensor
from src.errors import CheckpointError, TensorFormatError, UnsupportedVersionError
from src.network.model import MDNN, ModelConfig, build_model

CHECKPOINT_MAGIC = b'MDNN'
CHECKPOINT_VERSION = 1
HEADER_SIZE = 4 + struct.calcsize('<BQI')


def encode_checkpoint(model: MDNN) -> bytes:
    config_bytes = json.dumps(model.config.to_dict(), sort_keys=True).encode('utf-8')
    tensors = [array for _, _, array in model.parameters()]

    parts = [
        CHECKPOINT_MAGIC,
        struct.pack('<BQI', CHECKPOINT_VERSION, model.seed, len(config_bytes)),
        config_bytes,
        struct.pack('<I', len(tensors)),
    ]
    parts.extend(encode_tensor(array) for array in tensors)
    return b''.join(parts)


def save_checkpoint(model: MDNN, path: Union[str, Path]) -> int:
    """Write a checkpoint; returns its size in bytes."""
    data = encode_checkpoint(model)
    with open(path, 'wb') as f:
        f.write(data)
    return len(data)


def decode_checkpoint(buffer: bytes) -> MDNN:
    """Rebuild a model from checkpoint bytes, validating every tensor shape."""
    if buffer[:4] != CHECKPOINT_MAGIC:
        raise CheckpointError(f"Bad checkpoint magic {bytes(buffer[:4])!r}, expected {CHECKPOINT_MAGIC!r}")
    if len(buffer) < HEADER_SIZE:
        raise CheckpointError("Checkpoint header truncated")

    version, seed, config_len = struct.unpack_from('<BQI', buffer, 4)
    if version != CHECKPOINT_VERSION:
        raise UnsupportedVersionError(f"Checkpoint version {version} not supported")

    pos = HEADER_SIZE
    if len(buffer) < pos + config_len + 4:
        raise CheckpointError("Checkpoint configuration block truncated")
    try:
        model_config = ModelConfig.from_dict(json.loads(buffer[pos:pos + config_len].decode('utf-8')))
    except (TypeError, ValueError) as e:
        raise CheckpointError(f"Checkpoint configuration unreadable: {e}") from e
    pos += config_len

    (n_tensors,) = struct.unpack_from('<I', buffer, pos)
    pos += 4

    model = build_model(model_config, seed=seed)
    expected = list(model.parameters())
    if n_tensors != len(expected):
        raise CheckpointError(
            f"Checkpoint holds {n_tensors} tensors but the configuration needs {len(expected)}"
        )

    arrays = []
    for index, name, current in expected:
        try:
            array, pos = decode_tensor(buffer, pos)
        except TensorFormatError as e:
            raise CheckpointError(f"Layer {index} {name}: {e}") from e
        if array.shape != current.shape:
            raise CheckpointError(
                f"Layer {index} {name}: stored shape {array.shape}, configuration needs {current.shape}"
            )
        arrays.append(array.astype(float))

    if pos != len(buffer):
        raise CheckpointError(f"{len(buffer) - pos} unexpected trailing bytes in checkpoint")

    model.set_parameters(arrays)
    return model


def load_checkpoint(path: Union[str, Path]) -> MDNN:
    with open(path, 'rb') as f:
        return decode_checkpoint(f.read())
