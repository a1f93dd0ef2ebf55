import logging

from models.experiments import GenConfig
from models.results import DatasetManifest
from routers.common import split_file
from textures.datasets import generate_dataset
from utils.file_system import ArtifactStore
from utils.hotx import encode_hotx

logger = logging.getLogger(__name__)


def cmd_gen(config: GenConfig) -> DatasetManifest:
    """
    Generate the train/val/test texture splits.

    Writes ``<split>.hotx`` for every split and ``manifest.json`` (sizes,
    level, seed, per-class counts) into ``config.out_dir``; the first seed of
    the config is the dataset seed.
    """
    store = ArtifactStore(config.out_dir, config.config_hash())
    seed = config.seeds[0]
    splits = generate_dataset(config.sizes, config.height, config.width, config.level, seed)
    for dataset in splits:
        path = store.write_bytes(split_file(dataset.split), encode_hotx(dataset.images, dataset.labels))
        logger.info(f"Wrote {len(dataset)} {dataset.split} images to {path}")

    manifest = DatasetManifest(
        files={dataset.split: split_file(dataset.split) for dataset in splits},
        sizes={dataset.split: len(dataset) for dataset in splits},
        class_counts={dataset.split: dataset.class_counts() for dataset in splits},
        height=config.height,
        width=config.width,
        level=config.level,
        seed=seed,
    )
    store.write_json("manifest.json", manifest.model_dump())
    return manifest
