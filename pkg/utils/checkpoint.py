"""
HOCK v1 model checkpoints.

Layout: ``HOCK``, u8 version, u32-LE length of a UTF-8 JSON description
(sorted keys), the JSON, then every stored array of the model as float64 LE
in declaration order (per layer: parameters, then running statistics). The
JSON carries the layer list and an ``arrays`` manifest of names and shapes.
"""
import json
import struct
from typing import Any, Dict, Optional, Tuple

import numpy as np

from core.errors import FormatError
from network.model import Model

MAGIC = b"HOCK"
VERSION = 1
_HEADER = struct.Struct("<4sBI")


def encode_checkpoint(model: Model, metadata: Optional[Dict[str, Any]] = None) -> bytes:
    arrays = model.state_arrays()
    description = model.describe()
    description["arrays"] = [[name, list(value.shape)] for name, value in arrays]
    description["metadata"] = metadata or {}
    payload = json.dumps(description, sort_keys=True, separators=(",", ":")).encode("utf-8")
    body = b"".join(np.ascontiguousarray(value, dtype="<f8").tobytes() for _, value in arrays)
    return _HEADER.pack(MAGIC, VERSION, len(payload)) + payload + body


def decode_checkpoint(data: bytes) -> Tuple[Model, Dict[str, Any]]:
    """Rebuilt model (eval mode) and the metadata stored with it."""
    if len(data) < _HEADER.size:
        raise FormatError("HOCK data is shorter than its header")
    magic, version, length = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"Bad HOCK magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"Unsupported HOCK version {version}")
    start = _HEADER.size
    try:
        description = json.loads(data[start:start + length].decode("utf-8"))
        manifest = [(name, tuple(shape)) for name, shape in description["arrays"]]
        model = Model.from_description(description)
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise FormatError(f"Invalid HOCK description: {e}") from e

    arrays = model.state_arrays()
    if [(name, value.shape) for name, value in arrays] != manifest:
        raise FormatError("HOCK array manifest does not match the described layers")
    offset = start + length
    expected = offset + 8 * sum(int(np.prod(shape)) for _, shape in manifest)
    if len(data) != expected:
        raise FormatError(f"HOCK data has {len(data)} bytes, manifest implies {expected}")
    for _, value in arrays:
        count = value.size
        np.copyto(value, np.frombuffer(data, dtype="<f8", count=count, offset=offset).reshape(value.shape))
        offset += 8 * count
    model.eval()
    return model, description.get("metadata", {})
