import logging
from typing import Dict, List

import pandas as pd

from models.experiments import PerturbConfig
from network.evaluation import evaluate_arrays
from routers.common import check_compatible, load_checkpoints, load_split
from textures.gliders import GliderClass
from textures.perturbation import mix_perturbation, perturbation_textures
from utils.file_system import ArtifactStore
from utils.metrics_calculator import normalized_accuracy

logger = logging.getLogger(__name__)


def cmd_perturb(config: PerturbConfig) -> List[Dict]:
    """
    Accuracy of trained checkpoints on images mixed with glider textures.

    For every model label, intensity and perturbation class, the seed-mean
    accuracy is reported raw and relative to the unperturbed accuracy.
    Writes ``perturb.csv`` and ``perturb_summary.json``.
    """
    store = ArtifactStore(config.out_dir, config.config_hash())
    dataset = load_split(config.dataset_dir, config.split)
    images = dataset.images.astype(float)
    count, height, width = images.shape
    textures = {cls: perturbation_textures(cls, count, height, width, config.texture_seed, config.level) for cls in GliderClass}

    rows = []
    for label, directory in config.checkpoint_dirs.items():
        checkpoints = load_checkpoints(directory, config.seeds)
        for _, model, _ in checkpoints:
            check_compatible(model, images, f"{config.split} split")
        baseline = sum(evaluate_arrays(model, images, dataset.labels)[0] for _, model, _ in checkpoints) / len(checkpoints)
        for intensity in config.intensities:
            for cls in GliderClass:
                mixed = mix_perturbation(images, textures[cls], intensity)
                accuracy = sum(evaluate_arrays(model, mixed, dataset.labels)[0] for _, model, _ in checkpoints) / len(checkpoints)
                rows.append({
                    "model": label,
                    "intensity": intensity,
                    "perturbation": cls.value,
                    "accuracy": accuracy,
                    "normalized_accuracy": normalized_accuracy(accuracy, baseline),
                })
        logger.info(f"{label}: unperturbed accuracy {baseline:.4f} over {len(checkpoints)} seeds")

    frame = pd.DataFrame(rows, columns=["model", "intensity", "perturbation", "accuracy", "normalized_accuracy"])
    store.write_csv("perturb.csv", frame)
    means = frame.groupby(["model", "intensity"], sort=True)["accuracy"].mean()
    store.write_json("perturb_summary.json", {
        "mean_accuracy": {f"{model}@{intensity:g}": float(value) for (model, intensity), value in means.items()},
    })
    return rows
