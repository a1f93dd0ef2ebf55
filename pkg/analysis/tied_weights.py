"""
Tied-weight experiment: how many principal components of first-block
activations, taken across random initializations on one fixed image, explain
a variance threshold. Independent weights across expansion orders need more.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from analysis.pca import pc_count_for_threshold, pca_explained_variance
from core.errors import ShapeError
from core.rng import RngState
from network.builders import build_model, first_block

logger = logging.getLogger(__name__)

# Counts listed for the reference 10,000-init runs (k at 95%, activation dim).
REFERENCE_PC_COUNTS = {"cnn": (87, 9610), "hocnn2": (102, 1922), "hocnn3": (159, 1922)}


@dataclass
class TiedWeightResult:
    model_kind: str
    activation: str
    n_inits: int
    dim: int
    pc_count: int
    threshold: float
    fractions: np.ndarray = field(repr=False)
    degenerate: bool = False

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.fractions)

    @property
    def pc_fraction(self) -> float:
        return self.pc_count / self.dim

    @property
    def underdetermined(self) -> bool:
        return self.n_inits < self.dim


def tied_weight_activations(model_kind: str, n_inits: int, fixed_input: np.ndarray, seed: int,
                            activation: str = "relu", same_init: bool = False) -> np.ndarray:
    """(n_inits, units) first-block outputs, train-mode batchnorm on the single image."""
    image = np.asarray(fixed_input, dtype=np.float64)
    if image.ndim != 2:
        raise ShapeError(f"Expected a single (H, W) image, got shape {image.shape}")
    root = RngState(seed)
    rows = []
    for k in range(n_inits):
        rng = RngState(seed) if same_init else root.substream(k)
        block = first_block(build_model(model_kind, rng, activation=activation)).train()
        rows.append(block.forward(image[None, None]).reshape(-1))
    return np.stack(rows)


def tied_weight_experiment(model_kind: str, n_inits: int, fixed_input: np.ndarray, seed: int, activation: str = "relu",
                           threshold: float = 0.95, same_init: bool = False,
                           activations: Optional[np.ndarray] = None) -> TiedWeightResult:
    if activations is None:
        activations = tied_weight_activations(model_kind, n_inits, fixed_input, seed, activation, same_init)
    dim = activations.shape[1]
    if n_inits < dim:
        logger.warning(f"{model_kind}: {n_inits} inits for {dim} activation units, PCA is rank-limited")
    explained = pca_explained_variance(activations)
    count = pc_count_for_threshold(explained.fractions, threshold)
    result = TiedWeightResult(model_kind, activation, n_inits, dim, count, threshold, explained.fractions, explained.degenerate)
    reference = REFERENCE_PC_COUNTS.get(model_kind)
    logger.info(f"{model_kind}/{activation}: {count} of {dim} PCs reach {threshold:.0%} ({result.pc_fraction:.2%})"
                + (f"; reference {reference[0]}/{reference[1]} ({reference[0] / reference[1]:.2%})" if reference else ""))
    return result
