"""
Forward and backward passes of the higher-order convolution.

For every window x (a flattened patch) and output channel o::

    y = b[o] + sum_p s_p * sum_m w_p[o, m] * prod_{i in m} x_i

where m runs over the non-decreasing index tuples of ``enumerate_monomials``.
Each stored weight multiplies its monomial exactly once.
"""
from dataclasses import dataclass
from itertools import permutations
from typing import Dict

import numpy as np

from core.errors import ParameterError, ShapeError
from core.tensor import as_tensor, output_size, patch_extract, patch_scatter
from hoconv.kernel import HoConvLayer, HoKernel
from hoconv.monomials import enumerate_monomials, monomial_table, scatter_matrices

FULL_TENSOR_LIMIT = 10**6


@dataclass
class HoConvGradients:
    weights: Dict[int, np.ndarray]
    bias: np.ndarray
    input: np.ndarray


def monomial_features(patches: np.ndarray, order: int) -> np.ndarray:
    """(..., n) patches -> (..., C(n+p-1, p)) monomial values, built by extending each prefix with one factor."""
    table = monomial_table(patches.shape[-1], order)
    features = patches[..., table[:, 0]]
    for position in range(1, order):
        features = features * patches[..., table[:, position]]
    return features


def _partial_products(patches: np.ndarray, order: int, skip: int) -> np.ndarray:
    table = monomial_table(patches.shape[-1], order)
    result = np.ones(patches.shape[:-1] + (table.shape[0],))
    for position in range(order):
        if position != skip:
            result = result * patches[..., table[:, position]]
    return result


def _check_input(x: np.ndarray, layer: HoConvLayer) -> np.ndarray:
    x = as_tensor(x)
    if x.ndim != 4:
        raise ShapeError(f"HoConv expects NCHW input, got shape {x.shape}")
    if x.shape[1] != layer.in_channels:
        raise ShapeError(f"HoConv expects {layer.in_channels} input channels, got {x.shape[1]}")
    return x


def _output_hw(x: np.ndarray, layer: HoConvLayer):
    top, bottom, left, right = layer.padding
    kh, kw = layer.kernel_size
    return (output_size(x.shape[2], kh, layer.stride, top, bottom),
            output_size(x.shape[3], kw, layer.stride, left, right))


def extract_patches(x: np.ndarray, layer: HoConvLayer) -> np.ndarray:
    kh, kw = layer.kernel_size
    return patch_extract(x, kh, kw, layer.stride, layer.padding)


def forward_from_patches(patches: np.ndarray, layer: HoConvLayer) -> np.ndarray:
    """(N, L, n) patches -> (N, L, out_channels) responses."""
    total = np.zeros(patches.shape[:-1] + (layer.out_channels,))
    for order in layer.orders:
        total = total + layer.scale(order) * (monomial_features(patches, order) @ layer.weights[order].T)
    return total + layer.bias


def _to_nchw(responses: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    n, _, channels = responses.shape
    return np.ascontiguousarray(responses.transpose(0, 2, 1).reshape(n, channels, out_h, out_w))


def hoconv_forward(x, layer: HoConvLayer) -> np.ndarray:
    x = _check_input(x, layer)
    out_h, out_w = _output_hw(x, layer)
    return _to_nchw(forward_from_patches(extract_patches(x, layer), layer), out_h, out_w)


def hoconv_order_maps(x, layer: HoConvLayer) -> Dict[int, np.ndarray]:
    """Per-order feature maps ``s_p * sum_m w_p[m] prod x`` (bias excluded), NCHW each."""
    x = _check_input(x, layer)
    out_h, out_w = _output_hw(x, layer)
    patches = extract_patches(x, layer)
    return {
        order: _to_nchw(layer.scale(order) * (monomial_features(patches, order) @ layer.weights[order].T), out_h, out_w)
        for order in layer.orders
    }


def backward_from_patches(patches: np.ndarray, layer: HoConvLayer, grad_responses: np.ndarray):
    """Gradients w.r.t. weights, bias and patches, summed over batch and positions."""
    grad_bias = grad_responses.sum(axis=(0, 1))
    grad_weights = {}
    grad_patches = np.zeros_like(patches)
    for order in layer.orders:
        scale = layer.scale(order)
        features = monomial_features(patches, order)
        grad_weights[order] = scale * np.tensordot(grad_responses, features, axes=([0, 1], [0, 1]))
        grad_features = scale * (grad_responses @ layer.weights[order])
        for position, onehot in enumerate(scatter_matrices(patches.shape[-1], order)):
            grad_patches += (grad_features * _partial_products(patches, order, position)) @ onehot
    return grad_weights, grad_bias, grad_patches


def hoconv_backward(x, layer: HoConvLayer, grad_out) -> HoConvGradients:
    x = _check_input(x, layer)
    out_h, out_w = _output_hw(x, layer)
    grad_out = as_tensor(grad_out)
    expected = (x.shape[0], layer.out_channels, out_h, out_w)
    if grad_out.shape != expected:
        raise ShapeError(f"grad_out must have shape {expected}, got {grad_out.shape}")
    grad_responses = grad_out.reshape(x.shape[0], layer.out_channels, out_h * out_w).transpose(0, 2, 1)
    grad_weights, grad_bias, grad_patches = backward_from_patches(extract_patches(x, layer), layer, grad_responses)
    kh, kw = layer.kernel_size
    grad_input = patch_scatter(grad_patches, x.shape, kh, kw, layer.stride, layer.padding)
    return HoConvGradients(grad_weights, grad_bias, grad_input)


def evaluate_kernel(kernel: HoKernel, x) -> float:
    """Symmetric-form value ``sum_m w[m] prod_{i in m} x_i`` of one kernel on one flattened patch (no scale)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (kernel.n,):
        raise ShapeError(f"Patch must have {kernel.n} entries, got shape {x.shape}")
    return float(monomial_features(x, kernel.order) @ kernel.weights)


def expand_to_full_tensor(kernel: HoKernel) -> np.ndarray:
    """
    Dense n^p tensor T with T[i1..ip] = w[m] / multiplicity(m) for m = sorted(i1..ip),
    so contracting T with x p times equals ``evaluate_kernel``.
    """
    n, order = kernel.n, kernel.order
    if n**order > FULL_TENSOR_LIMIT:
        raise ParameterError(f"Full tensor of {n}^{order} entries exceeds the {FULL_TENSOR_LIMIT} limit")
    full = np.zeros((n,) * order)
    for monomial, weight in zip(enumerate_monomials(n, order), kernel.weights):
        share = weight / monomial.multiplicity
        for index in set(permutations(monomial.indices)):
            full[index] = share
    return full


def contract_full_tensor(full: np.ndarray, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    result = full
    for _ in range(full.ndim):
        result = result @ x
    return float(result)
