"""
Layers of the training engine.

Every layer exposes ``forward(x, training) -> (out, cache)`` and
``backward(cache, grad_out) -> (grad_in, grads)``; ``grads`` is keyed like
``params()``. Parameters are updated in place, so ``params()`` always returns
the live arrays.
"""
import math
from typing import Any, Dict, Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import erf, expit

from core.errors import ParameterError, ShapeError
from core.rng import RngState
from core.tensor import Padding, normalize_padding, output_size, patch_extract, patch_scatter
from hoconv.functional import backward_from_patches, extract_patches, forward_from_patches
from hoconv.kernel import HoConvLayer

Shape = Tuple[int, ...]


class Layer:
    kind: str = ""

    def params(self) -> Dict[str, np.ndarray]:
        return {}

    def buffers(self) -> Dict[str, np.ndarray]:
        return {}

    def describe(self) -> Dict[str, Any]:
        return {"type": self.kind}

    def output_shape(self, input_shape: Shape) -> Shape:
        return input_shape

    def forward(self, x: np.ndarray, training: bool):
        raise NotImplementedError

    def backward(self, cache, grad_out: np.ndarray):
        raise NotImplementedError


def _check_channels(input_shape: Shape, channels: int, kind: str):
    if len(input_shape) != 3 or input_shape[0] != channels:
        raise ShapeError(f"{kind} expects a {channels}-channel CHW input, got {input_shape}")


def _uniform(rng: Optional[RngState], bound: float, shape: Shape) -> np.ndarray:
    if rng is None:
        return np.zeros(shape)
    return rng.generator.uniform(-bound, bound, shape)


def _responses_to_nchw(responses: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    n, _, channels = responses.shape
    return np.ascontiguousarray(responses.transpose(0, 2, 1).reshape(n, channels, out_h, out_w))


def _nchw_to_responses(grad: np.ndarray) -> np.ndarray:
    n, channels, h, w = grad.shape
    return grad.reshape(n, channels, h * w).transpose(0, 2, 1)


class Conv2d(Layer):
    kind = "conv2d"

    def __init__(self, in_channels: int, out_channels: int, kernel_size: Tuple[int, int], stride: int = 1,
                 padding: Padding = 0, bias: bool = True, rng: Optional[RngState] = None):
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = tuple(int(k) for k in kernel_size)
        self.stride = stride
        self.padding = normalize_padding(padding)
        self.use_bias = bias
        kh, kw = self.kernel_size
        bound = 1.0 / math.sqrt(in_channels * kh * kw)
        self.weight = _uniform(rng, bound, (out_channels, in_channels, kh, kw))
        self.bias = _uniform(rng, bound, (out_channels,)) if bias else None

    def params(self):
        params = {"weight": self.weight}
        if self.use_bias:
            params["bias"] = self.bias
        return params

    def describe(self):
        return {"type": self.kind, "in_channels": self.in_channels, "out_channels": self.out_channels,
                "kernel_size": list(self.kernel_size), "stride": self.stride, "padding": list(self.padding),
                "bias": self.use_bias}

    def output_shape(self, input_shape):
        _check_channels(input_shape, self.in_channels, self.kind)
        top, bottom, left, right = self.padding
        kh, kw = self.kernel_size
        return (self.out_channels, output_size(input_shape[1], kh, self.stride, top, bottom),
                output_size(input_shape[2], kw, self.stride, left, right))

    def forward(self, x, training):
        _, out_h, out_w = self.output_shape(x.shape[1:])
        kh, kw = self.kernel_size
        patches = patch_extract(x, kh, kw, self.stride, self.padding)
        responses = patches @ self.weight.reshape(self.out_channels, -1).T
        if self.use_bias:
            responses = responses + self.bias
        return _responses_to_nchw(responses, out_h, out_w), (x.shape, patches)

    def backward(self, cache, grad_out):
        input_shape, patches = cache
        grad_responses = _nchw_to_responses(grad_out)
        weight = self.weight.reshape(self.out_channels, -1)
        grads = {"weight": np.tensordot(grad_responses, patches, axes=([0, 1], [0, 1])).reshape(self.weight.shape)}
        if self.use_bias:
            grads["bias"] = grad_responses.sum(axis=(0, 1))
        kh, kw = self.kernel_size
        grad_in = patch_scatter(grad_responses @ weight, input_shape, kh, kw, self.stride, self.padding)
        return grad_in, grads


class HoConv(Layer):
    """Layer wrapper around ``HoConvLayer``; parameters are named ``w1``..``w4`` and ``b``."""

    kind = "hoconv"

    def __init__(self, in_channels: int, out_channels: int, kernel_size: Tuple[int, int], max_order: int,
                 stride: int = 1, padding: Padding = 0, rng: Optional[RngState] = None,
                 layer: Optional[HoConvLayer] = None):
        if layer is None:
            if rng is None:
                layer = HoConvLayer(in_channels, out_channels, kernel_size, max_order, stride, padding)
            else:
                layer = HoConvLayer.initialize(in_channels, out_channels, kernel_size, max_order, rng, stride, padding)
        self.layer = layer

    def params(self):
        params = {f"w{order}": self.layer.weights[order] for order in self.layer.orders}
        params["b"] = self.layer.bias
        return params

    def describe(self):
        layer = self.layer
        return {"type": self.kind, "in_channels": layer.in_channels, "out_channels": layer.out_channels,
                "kernel_size": list(layer.kernel_size), "max_order": layer.max_order, "stride": layer.stride,
                "padding": list(layer.padding)}

    def output_shape(self, input_shape):
        _check_channels(input_shape, self.layer.in_channels, self.kind)
        top, bottom, left, right = self.layer.padding
        kh, kw = self.layer.kernel_size
        return (self.layer.out_channels, output_size(input_shape[1], kh, self.layer.stride, top, bottom),
                output_size(input_shape[2], kw, self.layer.stride, left, right))

    def forward(self, x, training):
        _, out_h, out_w = self.output_shape(x.shape[1:])
        patches = extract_patches(x, self.layer)
        return _responses_to_nchw(forward_from_patches(patches, self.layer), out_h, out_w), (x.shape, patches)

    def backward(self, cache, grad_out):
        input_shape, patches = cache
        grad_weights, grad_bias, grad_patches = backward_from_patches(patches, self.layer, _nchw_to_responses(grad_out))
        grads = {f"w{order}": grad for order, grad in grad_weights.items()}
        grads["b"] = grad_bias
        kh, kw = self.layer.kernel_size
        return patch_scatter(grad_patches, input_shape, kh, kw, self.layer.stride, self.layer.padding), grads


class BatchNorm2d(Layer):
    kind = "batchnorm2d"

    def __init__(self, channels: int, eps: float = 1e-5, momentum: float = 0.1, rng: Optional[RngState] = None):
        self.channels = channels
        self.eps = eps
        self.momentum = momentum
        self.gamma = np.ones(channels)
        self.beta = np.zeros(channels)
        self.running_mean = np.zeros(channels)
        self.running_var = np.ones(channels)

    def params(self):
        return {"gamma": self.gamma, "beta": self.beta}

    def buffers(self):
        return {"running_mean": self.running_mean, "running_var": self.running_var}

    def describe(self):
        return {"type": self.kind, "channels": self.channels, "eps": self.eps, "momentum": self.momentum}

    def output_shape(self, input_shape):
        _check_channels(input_shape, self.channels, self.kind)
        return input_shape

    def forward(self, x, training):
        shape = (1, self.channels, 1, 1)
        if training:
            mean = x.mean(axis=(0, 2, 3))
            var = x.var(axis=(0, 2, 3))
            count = x.size // self.channels
            unbiased = var * count / (count - 1) if count > 1 else var
            # in place: checkpoints and snapshots hold these arrays
            self.running_mean *= 1.0 - self.momentum
            self.running_mean += self.momentum * mean
            self.running_var *= 1.0 - self.momentum
            self.running_var += self.momentum * unbiased
        else:
            mean, var = self.running_mean, self.running_var
        inv_std = 1.0 / np.sqrt(var + self.eps)
        normalized = (x - mean.reshape(shape)) * inv_std.reshape(shape)
        return self.gamma.reshape(shape) * normalized + self.beta.reshape(shape), (normalized, inv_std, training)

    def backward(self, cache, grad_out):
        normalized, inv_std, training = cache
        shape = (1, self.channels, 1, 1)
        grads = {"gamma": (grad_out * normalized).sum(axis=(0, 2, 3)), "beta": grad_out.sum(axis=(0, 2, 3))}
        grad_normalized = grad_out * self.gamma.reshape(shape)
        if not training:
            return grad_normalized * inv_std.reshape(shape), grads
        count = grad_out.size // self.channels
        sum_grad = grad_normalized.sum(axis=(0, 2, 3)).reshape(shape)
        sum_grad_x = (grad_normalized * normalized).sum(axis=(0, 2, 3)).reshape(shape)
        grad_in = inv_std.reshape(shape) / count * (count * grad_normalized - sum_grad - normalized * sum_grad_x)
        return grad_in, grads


def _softplus(x):
    return np.logaddexp(0.0, x)


ACTIVATIONS = ("relu", "leaky_relu", "gelu", "sigmoid", "mish")
LEAKY_SLOPE = 0.01


class Activation(Layer):
    """Pointwise nonlinearity: relu, leaky_relu, gelu (erf form), sigmoid or mish."""

    kind = "activation"

    def __init__(self, name: str = "relu", rng: Optional[RngState] = None):
        if name not in ACTIVATIONS:
            raise ParameterError(f"Unknown activation '{name}', expected one of {ACTIVATIONS}")
        self.name = name

    def describe(self):
        return {"type": self.kind, "name": self.name}

    def forward(self, x, training):
        if self.name == "relu":
            out = np.maximum(x, 0.0)
        elif self.name == "leaky_relu":
            out = np.where(x > 0, x, LEAKY_SLOPE * x)
        elif self.name == "gelu":
            out = 0.5 * x * (1.0 + erf(x / math.sqrt(2.0)))
        elif self.name == "sigmoid":
            out = expit(x)
        else:
            out = x * np.tanh(_softplus(x))
        return out, (x, out)

    def backward(self, cache, grad_out):
        x, out = cache
        if self.name == "relu":
            slope = (x > 0).astype(np.float64)
        elif self.name == "leaky_relu":
            slope = np.where(x > 0, 1.0, LEAKY_SLOPE)
        elif self.name == "gelu":
            slope = 0.5 * (1.0 + erf(x / math.sqrt(2.0))) + x * np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        elif self.name == "sigmoid":
            slope = out * (1.0 - out)
        else:
            tanh_sp = np.tanh(_softplus(x))
            slope = tanh_sp + x * (1.0 - tanh_sp**2) * expit(x)
        return grad_out * slope, {}


class MaxPool2d(Layer):
    """Max pooling; padding is (top, bottom, left, right) and padded cells never win."""

    kind = "maxpool2d"

    def __init__(self, kernel_size: int, stride: Optional[int] = None, padding: Padding = 0, rng: Optional[RngState] = None):
        self.kernel_size = kernel_size
        self.stride = stride or kernel_size
        self.padding = normalize_padding(padding)

    def describe(self):
        return {"type": self.kind, "kernel_size": self.kernel_size, "stride": self.stride, "padding": list(self.padding)}

    def output_shape(self, input_shape):
        if len(input_shape) != 3:
            raise ShapeError(f"maxpool2d expects a CHW input, got {input_shape}")
        top, bottom, left, right = self.padding
        return (input_shape[0], output_size(input_shape[1], self.kernel_size, self.stride, top, bottom),
                output_size(input_shape[2], self.kernel_size, self.stride, left, right))

    def forward(self, x, training):
        _, out_h, out_w = self.output_shape(x.shape[1:])
        top, bottom, left, right = self.padding
        k, s = self.kernel_size, self.stride
        padded = np.pad(x, ((0, 0), (0, 0), (top, bottom), (left, right)), constant_values=-np.inf)
        windows = sliding_window_view(padded, (k, k), axis=(2, 3))[:, :, ::s, ::s][:, :, :out_h, :out_w]
        flat = windows.reshape(windows.shape[:4] + (k * k,))
        winners = flat.argmax(axis=-1)
        out = np.take_along_axis(flat, winners[..., None], axis=-1)[..., 0]
        return out, (x.shape, padded.shape, winners)

    def backward(self, cache, grad_out):
        input_shape, padded_shape, winners = cache
        n, c, out_h, out_w = winners.shape
        k, s = self.kernel_size, self.stride
        rows = np.arange(out_h).reshape(1, 1, -1, 1) * s + winners // k
        cols = np.arange(out_w).reshape(1, 1, 1, -1) * s + winners % k
        batch = np.arange(n).reshape(-1, 1, 1, 1)
        channel = np.arange(c).reshape(1, -1, 1, 1)
        grad_padded = np.zeros(padded_shape)
        np.add.at(grad_padded, (batch, channel, rows, cols), grad_out)
        top, _, left, _ = self.padding
        return grad_padded[:, :, top:top + input_shape[2], left:left + input_shape[3]], {}


class Flatten(Layer):
    kind = "flatten"

    def __init__(self, rng: Optional[RngState] = None):
        pass

    def output_shape(self, input_shape):
        return (int(np.prod(input_shape)),)

    def forward(self, x, training):
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, cache, grad_out):
        return grad_out.reshape(cache), {}


class Linear(Layer):
    kind = "linear"

    def __init__(self, in_features: int, out_features: int, bias: bool = True, rng: Optional[RngState] = None):
        self.in_features = in_features
        self.out_features = out_features
        self.use_bias = bias
        bound = 1.0 / math.sqrt(in_features)
        self.weight = _uniform(rng, bound, (out_features, in_features))
        self.bias = _uniform(rng, bound, (out_features,)) if bias else None

    def params(self):
        params = {"weight": self.weight}
        if self.use_bias:
            params["bias"] = self.bias
        return params

    def describe(self):
        return {"type": self.kind, "in_features": self.in_features, "out_features": self.out_features, "bias": self.use_bias}

    def output_shape(self, input_shape):
        if input_shape != (self.in_features,):
            raise ShapeError(f"linear expects ({self.in_features},) inputs, got {input_shape}")
        return (self.out_features,)

    def forward(self, x, training):
        out = x @ self.weight.T
        if self.use_bias:
            out = out + self.bias
        return out, x

    def backward(self, cache, grad_out):
        grads = {"weight": grad_out.T @ cache}
        if self.use_bias:
            grads["bias"] = grad_out.sum(axis=0)
        return grad_out @ self.weight, grads


class Dropout(Layer):
    """Inverted dropout: train-mode outputs are rescaled by 1/(1-p); eval mode is the identity."""

    kind = "dropout"

    def __init__(self, p: float = 0.5, rng: Optional[RngState] = None):
        if not 0.0 <= p < 1.0:
            raise ParameterError(f"Dropout probability must lie in [0, 1), got {p}")
        self.p = p
        self.rng = rng or RngState(0)

    def describe(self):
        return {"type": self.kind, "p": self.p}

    def forward(self, x, training):
        if not training or self.p == 0.0:
            return x, None
        mask = (self.rng.uniform(x.shape) >= self.p) / (1.0 - self.p)
        return x * mask, mask

    def backward(self, cache, grad_out):
        if cache is None:
            return grad_out, {}
        return grad_out * cache, {}


LAYER_TYPES = {cls.kind: cls for cls in (Conv2d, HoConv, BatchNorm2d, Activation, MaxPool2d, Flatten, Linear, Dropout)}


def build_layer(description: Dict[str, Any], rng: Optional[RngState] = None) -> Layer:
    description = dict(description)
    kind = description.pop("type", None)
    if kind not in LAYER_TYPES:
        raise ParameterError(f"Unknown layer type '{kind}'")
    for key in ("kernel_size", "padding"):
        if isinstance(description.get(key), list):
            description[key] = tuple(description[key])
    return LAYER_TYPES[kind](**description, rng=rng)


def layer_forward(layer: Layer, x: np.ndarray, mode: str = "train"):
    if mode not in ("train", "eval"):
        raise ParameterError(f"mode must be 'train' or 'eval', got '{mode}'")
    return layer.forward(x, mode == "train")


def layer_backward(layer: Layer, cache, grad_out: np.ndarray):
    if cache is None and layer.kind not in ("dropout",):
        raise ParameterError(f"{layer.kind}: backward called without a forward cache")
    return layer.backward(cache, grad_out)
