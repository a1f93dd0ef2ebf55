from typing import Dict, Optional, Sequence

import numpy as np

from hoconv.accounting import flop_count
from network.model import Model


def model_flops(model: Model, input_shape: Optional[Sequence[int]] = None) -> Dict[str, int]:
    """
    Forward FLOPs for one sample, per layer (``"<index>.<kind>"``) plus ``"total"``.

    Convolution and linear layers count a multiply and an add per weight use;
    pooling counts one comparison per window cell; batchnorm two per element;
    activations one per element.
    """
    shape = tuple(input_shape or model.input_shape)
    if shape != model.input_shape:
        model = Model(model.layers, shape, model.tags, model.name)
    report = {}
    current = shape
    for index, (layer, out_shape) in enumerate(zip(model.layers, model.layer_shapes)):
        outputs = int(np.prod(out_shape))
        if layer.kind == "conv2d":
            fan_in = layer.in_channels * layer.kernel_size[0] * layer.kernel_size[1]
            flops = outputs * (2 * fan_in + (1 if layer.use_bias else 0))
        elif layer.kind == "hoconv":
            flops = flop_count(layer.layer, current).total + outputs
        elif layer.kind == "linear":
            flops = outputs * (2 * layer.in_features + (1 if layer.use_bias else 0))
        elif layer.kind == "maxpool2d":
            flops = outputs * layer.kernel_size * layer.kernel_size
        elif layer.kind == "batchnorm2d":
            flops = 2 * outputs
        elif layer.kind == "activation":
            flops = outputs
        else:
            flops = 0
        report[f"{index}.{layer.kind}"] = flops
        current = out_shape
    report["total"] = sum(report.values())
    return report
