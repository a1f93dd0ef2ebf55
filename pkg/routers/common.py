"""Artifact loading shared by the command handlers."""
import logging
import os
from typing import Dict, List, Sequence, Tuple

import numpy as np

from core.errors import ConfigError
from network.model import Model
from textures.datasets import TextureDataset
from utils.checkpoint import decode_checkpoint
from utils.file_system import ArtifactStore
from utils.hotx import decode_hotx

logger = logging.getLogger(__name__)


def split_file(split: str) -> str:
    return f"{split}.hotx"


def checkpoint_file(seed: int) -> str:
    return f"seed-{seed}.hock"


def load_split(dataset_dir: str, split: str) -> TextureDataset:
    """
    Read one HOTX split from a dataset directory written by ``gen``.

    Raises:
        FileNotFoundError: if the split file is missing
        FormatError: if the file is not valid HOTX
    """
    images, labels = decode_hotx(ArtifactStore(dataset_dir).read_bytes(split_file(split)))
    if images.ndim != 3:
        raise ConfigError(f"{dataset_dir}/{split_file(split)} holds multi-channel images; textures are single-channel")
    return TextureDataset(images, labels, split)


def load_checkpoints(checkpoint_dir: str, seeds: Sequence[int]) -> List[Tuple[int, Model, Dict]]:
    """(seed, model, metadata) for every requested seed, in seed order."""
    store = ArtifactStore(checkpoint_dir)
    loaded = []
    for seed in seeds:
        model, metadata = decode_checkpoint(store.read_bytes(checkpoint_file(seed)))
        loaded.append((seed, model, metadata))
    logger.info(f"Loaded {len(loaded)} checkpoints from {os.path.abspath(checkpoint_dir)}")
    return loaded


def check_compatible(model: Model, images: np.ndarray, source: str):
    shape = images.shape[1:] if images.ndim == 4 else (1,) + images.shape[1:]
    if tuple(shape) != model.input_shape:
        raise ConfigError(f"Model {model.name} expects inputs {model.input_shape}, {source} holds {tuple(shape)}")
