"""
Texture-classification architectures.

Both share the same tail: block 1 keeps a 31x31 map per channel (valid 2x2
convolution on 32x32, then 2x2 stride-1 pooling padded by one row and one
column at the bottom/right); block 2 is a 2-kernel 8x2 convolution (24x30)
with 8x8 stride-8 pooling down to 2x3x3, flattened into an 18->10 classifier.
"""
import logging
from typing import Dict, Optional, Tuple

import logfire

from core.errors import ParameterError
from core.rng import RngState
from hoconv.kernel import MAX_LAYER_ORDER
from network.layers import Activation, BatchNorm2d, Conv2d, Dropout, Flatten, HoConv, Layer, Linear, MaxPool2d
from network.model import Model

logger = logging.getLogger(__name__)

INPUT_SHAPE = (1, 32, 32)
N_CLASSES = 10
FIRST_POOL_PADDING = (0, 1, 0, 1)
MODEL_KINDS = ("cnn", "cnn2", "hocnn2", "hocnn3", "hocnn4")

# Totals listed for the reference architectures; logged next to ours, never enforced.
REFERENCE_PARAM_TOTALS = {"cnn": 492, "hocnn2": 293, "hocnn3": 488, "hocnn4": 1259}


def _assemble(first: Layer, first_channels: int, rng: RngState, activation: str, dropout: float,
              input_shape: Tuple[int, int, int], name: str) -> Model:
    layers = [
        first,
        BatchNorm2d(first_channels),
        Activation(activation),
        MaxPool2d(2, stride=1, padding=FIRST_POOL_PADDING),
        Conv2d(first_channels, 2, (8, 2), rng=rng.substream(2)),
        BatchNorm2d(2),
        Activation(activation),
        MaxPool2d(8, stride=8),
        Flatten(),
    ]
    if dropout > 0:
        layers.append(Dropout(dropout))
    trunk = Model(layers, input_shape)
    layers.append(Linear(trunk.output_shape[0], N_CLASSES, rng=rng.substream(3)))
    tags = {"conv1": 0, "block1": 3, "block2": 7, "logits": len(layers) - 1}
    return Model(layers, input_shape, tags, name)


def build_texture_cnn(rng: Optional[RngState] = None, channels: int = 10, activation: str = "relu",
                      dropout: float = 0.0, input_shape: Tuple[int, int, int] = INPUT_SHAPE, name: str = "cnn") -> Model:
    """Conv(channels, 2x2) block, Conv(2, 8x2) block, Linear(->10)."""
    rng = rng or RngState(0)
    first = Conv2d(input_shape[0], channels, (2, 2), rng=rng.substream(1))
    return _assemble(first, channels, rng, activation, dropout, input_shape, name)


def build_texture_hocnn(max_order: int, rng: Optional[RngState] = None, channels: int = 2, activation: str = "relu",
                        dropout: float = 0.0, input_shape: Tuple[int, int, int] = INPUT_SHAPE) -> Model:
    """HoConv(channels, 2x2, orders 1..max_order) block, Conv(2, 8x2) block, Linear(->10)."""
    if not 1 <= max_order <= MAX_LAYER_ORDER:
        raise ParameterError(f"max_order must lie in [1, {MAX_LAYER_ORDER}], got {max_order}")
    rng = rng or RngState(0)
    first = HoConv(input_shape[0], channels, (2, 2), max_order, rng=rng.substream(1))
    return _assemble(first, channels, rng, activation, dropout, input_shape, f"hocnn{max_order}")


def build_model(kind: str, rng: Optional[RngState] = None, activation: str = "relu", dropout: float = 0.0) -> Model:
    if kind == "cnn":
        return build_texture_cnn(rng, activation=activation, dropout=dropout)
    if kind == "cnn2":
        return build_texture_cnn(rng, channels=2, activation=activation, dropout=dropout, name="cnn2")
    if kind.startswith("hocnn") and kind in MODEL_KINDS:
        return build_texture_hocnn(int(kind[len("hocnn"):]), rng, activation=activation, dropout=dropout)
    raise ParameterError(f"Unknown model kind '{kind}', expected one of {MODEL_KINDS}")


def report_param_totals(model: Model) -> Dict[str, Optional[int]]:
    """Logs the parameter totals of a built model next to the reference table entry for its kind."""
    totals = {
        "params": model.param_total(),
        "params_without_batchnorm": model.param_total(include_batchnorm=False),
        "reference_params": REFERENCE_PARAM_TOTALS.get(model.name),
    }
    logger.info(f"{model.name}: {totals['params']} parameters ({totals['params_without_batchnorm']} without batchnorm)"
                + (f", reference table lists {totals['reference_params']}" if totals["reference_params"] else ""))
    logfire.info("{model} parameter totals", model=model.name, **totals)
    return totals


def first_block(model: Model) -> Model:
    """The first Conv/HoConv + BN + activation + pool block as a standalone model sharing the same layers."""
    return Model(model.layers[:4], model.input_shape, {"block1": 3}, f"{model.name}-block1")
