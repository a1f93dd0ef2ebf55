"""Parameter and FLOP bookkeeping for higher-order convolution layers."""
from dataclasses import dataclass
from typing import Dict, Sequence

from core.errors import ShapeError
from core.tensor import output_size
from hoconv.kernel import HoConvLayer
from hoconv.monomials import unique_count


@dataclass
class ParamCount:
    per_order: Dict[int, int]
    bias: int

    @property
    def total(self) -> int:
        return sum(self.per_order.values()) + self.bias


@dataclass
class FlopReport:
    per_order: Dict[int, int]
    positions: int

    @property
    def ratios(self) -> Dict[int, float]:
        baseline = self.per_order[1]
        return {order: flops / baseline for order, flops in self.per_order.items()}

    @property
    def total(self) -> int:
        return sum(self.per_order.values())


def param_count(layer: HoConvLayer) -> ParamCount:
    return ParamCount(
        per_order={order: layer.out_channels * unique_count(layer.n, order) for order in layer.orders},
        bias=layer.out_channels,
    )


def order_flops_per_position(n: int, order: int, out_channels: int) -> int:
    """
    FLOPs for one output position of one order.

    Monomials are evaluated incrementally in lexicographic order, so each
    degree-q monomial costs one multiply on top of its degree-(q-1) prefix;
    building degree-p terms therefore needs every degree 2..p. The products
    are shared by all output channels, which then spend one multiply and one
    add per unique weight.
    """
    products = sum(unique_count(n, q) for q in range(2, order + 1))
    return products + 2 * unique_count(n, order) * out_channels


def flop_count(layer: HoConvLayer, input_shape: Sequence[int]) -> FlopReport:
    if len(input_shape) == 3:
        input_shape = (1,) + tuple(input_shape)
    if len(input_shape) != 4:
        raise ShapeError(f"input_shape must be CHW or NCHW, got {input_shape}")
    batch, channels, height, width = input_shape
    if channels != layer.in_channels:
        raise ShapeError(f"Layer expects {layer.in_channels} channels, input has {channels}")
    top, bottom, left, right = layer.padding
    kh, kw = layer.kernel_size
    positions = batch * output_size(height, kh, layer.stride, top, bottom) * output_size(width, kw, layer.stride, left, right)
    per_order = {order: positions * order_flops_per_position(layer.n, order, layer.out_channels) for order in layer.orders}
    return FlopReport(per_order=per_order, positions=positions)
