import logging
from typing import Dict

import pandas as pd

from models.experiments import EvalConfig
from network.evaluation import evaluate
from routers.common import check_compatible, load_checkpoints, load_split
from textures.gliders import CLASS_NAMES
from utils.file_system import ArtifactStore
from utils.metrics_calculator import summarize_accuracies

logger = logging.getLogger(__name__)


def confusion_frame(matrix) -> pd.DataFrame:
    """Rows are true classes, columns predicted classes, both labelled by class name."""
    return pd.DataFrame(matrix, index=pd.Index(CLASS_NAMES, name="true"), columns=list(CLASS_NAMES))


def cmd_eval(config: EvalConfig) -> Dict:
    """
    Evaluate the checkpoints of ``config.seeds`` on one split.

    Writes ``confusion-seed-<n>.csv`` per seed and ``eval.json`` with the
    per-seed accuracies and their mean/std.
    """
    store = ArtifactStore(config.out_dir, config.config_hash())
    dataset = load_split(config.dataset_dir, config.split)
    accuracies = {}
    for seed, model, _ in load_checkpoints(config.checkpoint_dir, config.seeds):
        check_compatible(model, dataset.images, f"{config.split} split")
        accuracy, matrix = evaluate(model, dataset)
        store.write_csv(f"confusion-seed-{seed}.csv", confusion_frame(matrix), index=True)
        accuracies[str(seed)] = accuracy
        logger.info(f"Seed {seed}: {config.split} accuracy {accuracy:.4f}")
    record = {"split": config.split, "accuracy": accuracies, "summary": summarize_accuracies(list(accuracies.values()))}
    store.write_json("eval.json", record)
    return record
