import logging
from typing import Dict, List

import numpy as np
import pandas as pd

from analysis.tied_weights import REFERENCE_PC_COUNTS, tied_weight_experiment
from models.experiments import PcaTiedConfig
from textures.datasets import composite_image
from utils.file_system import ArtifactStore

logger = logging.getLogger(__name__)


def cmd_pca_tied(config: PcaTiedConfig) -> List[Dict]:
    """
    Tied-weight PCA for every (model kind, activation) pair.

    The fixed input is the composite class image of the first seed; the
    second seed (or the first, if only one is given) drives the random inits.
    Writes ``pca-<kind>-<activation>.csv`` (component, fraction, cumulative)
    and ``pca_summary.json``.
    """
    store = ArtifactStore(config.out_dir, config.config_hash())
    image_seed = config.seeds[0]
    init_seed = config.seeds[1] if len(config.seeds) > 1 else config.seeds[0]
    image = composite_image(image_seed, config.level)
    records = []
    for activation in config.activations:
        for kind in config.model_kinds:
            result = tied_weight_experiment(kind, config.n_inits, image, init_seed, activation, config.threshold,
                                            config.same_init)
            frame = pd.DataFrame({
                "component": np.arange(1, len(result.fractions) + 1),
                "fraction": result.fractions,
                "cumulative": result.cumulative,
            })
            store.write_csv(f"pca-{kind}-{activation}.csv", frame)
            reference = REFERENCE_PC_COUNTS.get(kind)
            records.append({
                "model_kind": kind,
                "activation": activation,
                "n_inits": result.n_inits,
                "dim": result.dim,
                "pc_count": result.pc_count,
                "pc_fraction": result.pc_fraction,
                "threshold": result.threshold,
                "degenerate": result.degenerate,
                "underdetermined": result.underdetermined,
                "reference_pc_count": reference[0] if reference else None,
                "reference_dim": reference[1] if reference else None,
            })
    store.write_json("pca_summary.json", {"image_seed": image_seed, "init_seed": init_seed, "results": records})
    return records
