"""Activation readout for RSA: per block, per expansion order, averaged over model seeds."""
import logging
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from analysis.rdm import Rdm, average_rdms, compute_rdm, rdm_compare
from core.errors import ParameterError
from hoconv.functional import hoconv_order_maps
from network.layers import HoConv
from network.model import Model

logger = logging.getLogger(__name__)

Models = Union[Model, Sequence[Model]]


def _as_list(models: Models) -> List[Model]:
    return [models] if isinstance(models, Model) else list(models)


def _as_inputs(stimuli: np.ndarray) -> np.ndarray:
    stimuli = np.asarray(stimuli, dtype=np.float64)
    return stimuli[:, None] if stimuli.ndim == 3 else stimuli


def block_activations(model: Model, stimuli: np.ndarray, tags: Sequence[str]) -> Dict[str, np.ndarray]:
    """Eval-mode (stimuli, units) activations for each tag."""
    model.eval()
    return model.activations(_as_inputs(stimuli), tags)


def seed_averaged_rdms(models: Models, stimuli: np.ndarray, tags: Sequence[str], metric: str = "corr") -> Dict[str, Rdm]:
    models = _as_list(models)
    if not models:
        raise ParameterError("No models given")
    per_tag: Dict[str, List[Rdm]] = {tag: [] for tag in tags}
    for model in models:
        for tag, acts in block_activations(model, stimuli, tags).items():
            per_tag[tag].append(compute_rdm(acts, metric))
    return {tag: average_rdms(rdms) for tag, rdms in per_tag.items()}


def order_activations(model: Model, stimuli: np.ndarray) -> Dict[int, np.ndarray]:
    """Per-order feature maps of the model's first HoConv layer, flattened per stimulus."""
    layer = model.layers[0]
    if not isinstance(layer, HoConv):
        raise ParameterError(f"Model {model.name} does not start with a HoConv layer")
    maps = hoconv_order_maps(_as_inputs(stimuli), layer.layer)
    return {order: value.reshape(value.shape[0], -1) for order, value in maps.items()}


def order_rdms(models: Models, stimuli: np.ndarray, metric: str = "corr") -> Dict[int, Rdm]:
    """Seed-averaged RDM of each expansion order's contribution."""
    per_order: Dict[int, List[Rdm]] = {}
    for model in _as_list(models):
        for order, acts in order_activations(model, stimuli).items():
            per_order.setdefault(order, []).append(compute_rdm(acts, metric))
    return {order: average_rdms(rdms) for order, rdms in sorted(per_order.items())}


def cross_layer_rdm_correlation(models_a: Models, models_b: Models, stimuli: np.ndarray,
                                layer_pairs: Sequence[Tuple[str, str]], metric: str = "corr") -> List[Tuple[str, str, float]]:
    """Spearman correlation between seed-averaged RDMs of matching layers, in ``layer_pairs`` order."""
    tags_a = list(dict.fromkeys(a for a, _ in layer_pairs))
    tags_b = list(dict.fromkeys(b for _, b in layer_pairs))
    rdms_a = seed_averaged_rdms(models_a, stimuli, tags_a, metric)
    rdms_b = seed_averaged_rdms(models_b, stimuli, tags_b, metric)
    return [(a, b, rdm_compare(rdms_a[a], rdms_b[b], "spearman")) for a, b in layer_pairs]
