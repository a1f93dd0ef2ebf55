import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.errors import ParameterError, ShapeError
from core.rng import RngState
from core.tensor import Padding, normalize_padding
from hoconv.monomials import unique_count

MAX_LAYER_ORDER = 4


def order_scale(n: int, p: int) -> float:
    """1 for the linear term, 1/sqrt(C(n+p-1, p)) above it."""
    if p == 1:
        return 1.0
    return 1.0 / math.sqrt(unique_count(n, p))


@dataclass
class HoKernel:
    """Symmetric order-p weights of one output channel, aligned with ``enumerate_monomials(n, p)``."""

    order: int
    kh: int
    kw: int
    c_in: int
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        expected = unique_count(self.n, self.order)
        if self.weights.shape != (expected,):
            raise ShapeError(f"Order-{self.order} kernel over n={self.n} needs {expected} weights, got {self.weights.shape}")

    @property
    def n(self) -> int:
        return self.kh * self.kw * self.c_in

    @property
    def scale(self) -> float:
        return order_scale(self.n, self.order)


@dataclass
class HoConvLayer:
    """
    Higher-order convolution: ``out_channels`` filters, each with symmetric
    weights for every order 1..max_order over the flattened kh x kw x c_in patch.

    ``weights[p]`` has shape (out_channels, C(n+p-1, p)); row ``o`` is the
    order-p kernel of output channel ``o``.
    """

    in_channels: int
    out_channels: int
    kernel_size: Tuple[int, int]
    max_order: int
    stride: int = 1
    padding: Padding = 0
    weights: Dict[int, np.ndarray] = field(default_factory=dict)
    bias: Optional[np.ndarray] = None

    def __post_init__(self):
        if not 1 <= self.max_order <= MAX_LAYER_ORDER:
            raise ParameterError(f"max_order must lie in [1, {MAX_LAYER_ORDER}], got {self.max_order}")
        if self.in_channels < 1 or self.out_channels < 1 or self.stride < 1:
            raise ParameterError("Channels and stride must be positive")
        self.kernel_size = tuple(int(k) for k in self.kernel_size)
        self.padding = normalize_padding(self.padding)
        for order in self.orders:
            shape = (self.out_channels, unique_count(self.n, order))
            if order not in self.weights:
                self.weights[order] = np.zeros(shape)
            self.weights[order] = np.asarray(self.weights[order], dtype=np.float64)
            if self.weights[order].shape != shape:
                raise ShapeError(f"Order-{order} weights must have shape {shape}, got {self.weights[order].shape}")
        if set(self.weights) != set(self.orders):
            raise ShapeError(f"Weights given for orders {sorted(self.weights)}, layer has {self.orders}")
        self.bias = np.zeros(self.out_channels) if self.bias is None else np.asarray(self.bias, dtype=np.float64)
        if self.bias.shape != (self.out_channels,):
            raise ShapeError(f"Bias must have shape ({self.out_channels},), got {self.bias.shape}")

    @classmethod
    def initialize(cls, in_channels: int, out_channels: int, kernel_size: Tuple[int, int], max_order: int,
                   rng: RngState, stride: int = 1, padding: Padding = 0) -> "HoConvLayer":
        """Every order and the bias draw from uniform(-1/sqrt(n), 1/sqrt(n)); s tempers the higher orders."""
        n = kernel_size[0] * kernel_size[1] * in_channels
        bound = 1.0 / math.sqrt(n)
        weights = {
            order: rng.generator.uniform(-bound, bound, (out_channels, unique_count(n, order)))
            for order in range(1, max_order + 1)
        }
        bias = rng.generator.uniform(-bound, bound, out_channels)
        return cls(in_channels, out_channels, kernel_size, max_order, stride, padding, weights, bias)

    @property
    def orders(self) -> List[int]:
        return list(range(1, self.max_order + 1))

    @property
    def n(self) -> int:
        return self.kernel_size[0] * self.kernel_size[1] * self.in_channels

    def scale(self, order: int) -> float:
        return order_scale(self.n, order)

    def kernel(self, channel: int, order: int) -> HoKernel:
        kh, kw = self.kernel_size
        return HoKernel(order, kh, kw, self.in_channels, self.weights[order][channel])

    def kernels(self, channel: int) -> List[HoKernel]:
        return [self.kernel(channel, order) for order in self.orders]
