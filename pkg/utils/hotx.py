"""
HOTX v1 dataset files.

Layout (little endian): ``HOTX``, u8 version, u32 image count, u16 height,
u16 width, u8 channels, one u8 label per image, then u8 pixels image-major
and row-major (channel-major within an image).
"""
import struct
from typing import Tuple

import numpy as np

from core.errors import FormatError, ShapeError

MAGIC = b"HOTX"
VERSION = 1
_HEADER = struct.Struct("<4sBIHHB")


def encode_hotx(images: np.ndarray, labels: np.ndarray) -> bytes:
    """``images`` is (N, H, W) or (N, C, H, W) with values in [0, 255]."""
    images = np.asarray(images)
    labels = np.asarray(labels)
    if images.ndim == 3:
        channels = 1
        count, height, width = images.shape
    elif images.ndim == 4:
        count, channels, height, width = images.shape
    else:
        raise ShapeError(f"Expected (N, H, W) or (N, C, H, W) images, got {images.shape}")
    if labels.shape != (count,):
        raise ShapeError(f"Expected {count} labels, got shape {labels.shape}")
    if max(height, width) > 0xFFFF or channels > 0xFF:
        raise ShapeError(f"Image shape {images.shape} does not fit the HOTX header")
    for values in (images, labels):
        if values.size and (values.min() < 0 or values.max() > 255):
            raise ShapeError("HOTX stores pixels and labels as unsigned bytes")
    header = _HEADER.pack(MAGIC, VERSION, count, height, width, channels)
    return header + labels.astype(np.uint8).tobytes() + images.astype(np.uint8).tobytes()


def decode_hotx(data: bytes) -> Tuple[np.ndarray, np.ndarray]:
    """(images, labels); single-channel files give (N, H, W) images."""
    if len(data) < _HEADER.size:
        raise FormatError("HOTX data is shorter than its header")
    magic, version, count, height, width, channels = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"Bad HOTX magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"Unsupported HOTX version {version}")
    pixels = count * channels * height * width
    expected = _HEADER.size + count + pixels
    if len(data) != expected:
        raise FormatError(f"HOTX data has {len(data)} bytes, header implies {expected}")
    labels = np.frombuffer(data, dtype=np.uint8, count=count, offset=_HEADER.size).copy()
    images = np.frombuffer(data, dtype=np.uint8, count=pixels, offset=_HEADER.size + count).copy()
    shape = (count, height, width) if channels == 1 else (count, channels, height, width)
    return images.reshape(shape), labels
