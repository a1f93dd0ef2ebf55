"""
Dense float64 tensors (1 to 4 axes, row-major, NCHW for images) and the few
operations the rest of the package builds on.
"""
from typing import Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from core.errors import ShapeError

Padding = Union[int, Tuple[int, int, int, int]]


def as_tensor(data, dtype=np.float64) -> np.ndarray:
    tensor = np.ascontiguousarray(data, dtype=dtype)
    if not 1 <= tensor.ndim <= 4:
        raise ShapeError(f"Tensors have 1 to 4 axes, got shape {tensor.shape}")
    return tensor


def _check_same_shape(a: np.ndarray, b: np.ndarray, op: str):
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} do not match")


def add(a, b) -> np.ndarray:
    a, b = as_tensor(a), as_tensor(b)
    _check_same_shape(a, b, "add")
    return a + b


def mul(a, b) -> np.ndarray:
    a, b = as_tensor(a), as_tensor(b)
    _check_same_shape(a, b, "mul")
    return a * b


def scale(a, factor: float) -> np.ndarray:
    return as_tensor(a) * float(factor)


def matmul(a, b) -> np.ndarray:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: cannot multiply {a.shape} by {b.shape}")
    return a @ b


def transpose(a, axes: Sequence[int] = None) -> np.ndarray:
    return np.ascontiguousarray(np.transpose(as_tensor(a), axes))


def reshape(a, shape: Sequence[int]) -> np.ndarray:
    a = as_tensor(a)
    shape = tuple(int(s) for s in shape)
    if int(np.prod(shape)) != a.size:
        raise ShapeError(f"reshape: cannot view {a.shape} as {shape}")
    return as_tensor(a.reshape(shape))


def normalize_padding(padding: Padding) -> Tuple[int, int, int, int]:
    """Padding as (top, bottom, left, right)."""
    if isinstance(padding, int):
        return padding, padding, padding, padding
    if len(padding) != 4 or any(p < 0 for p in padding):
        raise ShapeError(f"Padding must be an int or (top, bottom, left, right), got {padding}")
    return tuple(int(p) for p in padding)


def output_size(size: int, kernel: int, stride: int, pad_before: int = 0, pad_after: int = 0) -> int:
    span = size + pad_before + pad_after - kernel
    if span < 0:
        raise ShapeError(f"Kernel of size {kernel} does not fit input of size {size}")
    return span // stride + 1


def _as_nchw(image: np.ndarray) -> np.ndarray:
    if image.ndim == 2:
        return image[None, None]
    if image.ndim == 3:
        return image[None]
    return image


def patch_extract(image, kh: int, kw: int, stride: int = 1, padding: Padding = 0) -> np.ndarray:
    """
    Flatten every kh x kw window into a row.

    Each row holds the window channel-major, then row-major
    (index ``c * kh * kw + i * kw + j``). Rows follow output positions in
    row-major order. HW and CHW inputs give a (rows, cols) matrix, NCHW inputs
    a (N, rows, cols) stack.
    """
    image = as_tensor(image)
    x = _as_nchw(image)
    top, bottom, left, right = normalize_padding(padding)
    if stride < 1:
        raise ShapeError(f"Stride must be positive, got {stride}")
    n, c, h, w = x.shape
    out_h = output_size(h, kh, stride, top, bottom)
    out_w = output_size(w, kw, stride, left, right)
    if top or bottom or left or right:
        x = np.pad(x, ((0, 0), (0, 0), (top, bottom), (left, right)))
    windows = sliding_window_view(x, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride][:, :, :out_h, :out_w]
    patches = windows.transpose(0, 2, 3, 1, 4, 5).reshape(n, out_h * out_w, c * kh * kw)
    if image.ndim < 4:
        return np.ascontiguousarray(patches[0])
    return np.ascontiguousarray(patches)


def patch_scatter(patches, input_shape: Tuple[int, int, int, int], kh: int, kw: int, stride: int = 1,
                  padding: Padding = 0) -> np.ndarray:
    """Adjoint of ``patch_extract`` for NCHW inputs: sums each patch entry back onto its pixel."""
    n, c, h, w = input_shape
    top, bottom, left, right = normalize_padding(padding)
    out_h = output_size(h, kh, stride, top, bottom)
    out_w = output_size(w, kw, stride, left, right)
    patches = np.asarray(patches, dtype=np.float64)
    if patches.shape != (n, out_h * out_w, c * kh * kw):
        raise ShapeError(f"patch_scatter: patches {patches.shape} do not match input {input_shape}")
    cols = patches.reshape(n, out_h, out_w, c, kh, kw).transpose(0, 3, 4, 5, 1, 2)
    padded = np.zeros((n, c, h + top + bottom, w + left + right))
    for i in range(kh):
        for j in range(kw):
            padded[:, :, i:i + stride * out_h:stride, j:j + stride * out_w:stride] += cols[:, :, i, j]
    return padded[:, :, top:top + h, left:left + w]
