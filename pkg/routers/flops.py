import logging
from typing import Dict

import pandas as pd

from core.rng import RngState
from hoconv.accounting import flop_count, param_count
from hoconv.kernel import HoConvLayer
from hoconv.monomials import unique_count
from models.experiments import FlopsConfig
from network.accounting import model_flops
from network.builders import build_model, report_param_totals
from utils.file_system import ArtifactStore

logger = logging.getLogger(__name__)


def cmd_flops(config: FlopsConfig) -> Dict:
    """
    Per-order FLOPs, ratios to order 1 and parameter counts of one HoConv
    layer configuration (``flops.csv``), plus whole-model totals for the texture
    architectures (``model_flops.csv``) and ``flops_summary.json``.
    """
    store = ArtifactStore(config.out_dir, config.config_hash())
    layer = HoConvLayer(config.in_channels, config.out_channels, config.kernel_size, config.max_order)
    input_shape = (config.in_channels,) + tuple(config.input_size)
    report = flop_count(layer, input_shape)
    params = param_count(layer)
    ratios = report.ratios
    layer_rows = [{
        "order": order,
        "unique_weights": unique_count(layer.n, order),
        "params": params.per_order[order],
        "flops": report.per_order[order],
        "ratio": ratios[order],
    } for order in layer.orders]
    store.write_csv("flops.csv", pd.DataFrame(layer_rows))

    model_rows = []
    for kind in config.model_kinds:
        model = build_model(kind, RngState(0))
        model_rows.append({"model": kind, **report_param_totals(model), "flops": model_flops(model)["total"]})
    store.write_csv("model_flops.csv", pd.DataFrame(model_rows))

    for row in layer_rows:
        logger.info(f"order {row['order']}: {row['flops']} FLOPs, {row['ratio']:.2f}x order 1, {row['params']} params")
    summary = {"layer": layer_rows, "bias_params": params.bias, "total_params": params.total, "models": model_rows}
    store.write_json("flops_summary.json", summary)
    return summary
