import logging
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from core.errors import ParameterError, ShapeError
from core.rng import RngState
from textures.gliders import GliderClass
from textures.synthesis import generate_batch

logger = logging.getLogger(__name__)

SPLITS = ("train", "val", "test")
DEFAULT_SIZES = (2000, 1000, 2000)
N_CLASSES = len(GliderClass)

# Composite layout: 2 rows x 5 columns of class regions on a 32x32 canvas.
COMPOSITE_ROW_HEIGHTS = (16, 16)
COMPOSITE_COL_WIDTHS = (7, 7, 6, 6, 6)


@dataclass
class TextureDataset:
    images: np.ndarray
    labels: np.ndarray
    split: str = "train"

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.uint8)
        self.labels = np.asarray(self.labels, dtype=np.uint8)
        if self.images.ndim != 3 or self.labels.shape != (self.images.shape[0],):
            raise ShapeError(f"Expected (N, H, W) images with (N,) labels, got {self.images.shape} and {self.labels.shape}")
        if self.images.size and self.images.max() > 1:
            raise ParameterError("Texture pixels must be 0 or 1")
        if self.labels.size and self.labels.max() >= N_CLASSES:
            raise ParameterError(f"Labels must lie in [0, {N_CLASSES})")

    def __len__(self) -> int:
        return len(self.labels)

    def class_counts(self) -> Dict[str, int]:
        counts = np.bincount(self.labels, minlength=N_CLASSES)
        return {cls.value: int(counts[cls.index]) for cls in GliderClass}

    def subset(self, indices) -> "TextureDataset":
        return TextureDataset(self.images[indices], self.labels[indices], self.split)


def generate_split(split_index: int, size: int, h: int, w: int, level: float, base_seed: int, split: str) -> TextureDataset:
    """
    ``size`` images with labels interleaved (image i has class i % 10); image i
    draws from substream (split, class, i // 10) of ``base_seed``.
    """
    if size % N_CLASSES:
        raise ParameterError(f"Split size {size} is not divisible by {N_CLASSES}")
    root = RngState(base_seed)
    per_class = size // N_CLASSES
    images = np.empty((size, h, w), dtype=np.uint8)
    for cls in GliderClass:
        rngs = [root.substream(split_index, cls.index, k) for k in range(per_class)]
        images[cls.index::N_CLASSES] = generate_batch(cls, rngs, h, w, level)
    labels = np.arange(size) % N_CLASSES
    return TextureDataset(images, labels, split)


def generate_dataset(sizes: Sequence[int] = DEFAULT_SIZES, h: int = 32, w: int = 32, level: float = 1.0,
                     base_seed: int = 0) -> Tuple[TextureDataset, TextureDataset, TextureDataset]:
    if len(sizes) != len(SPLITS):
        raise ParameterError(f"Expected {len(SPLITS)} split sizes, got {len(sizes)}")
    for size in sizes:
        if size % N_CLASSES:
            raise ParameterError(f"Split size {size} is not divisible by {N_CLASSES}")
    splits = tuple(generate_split(k, size, h, w, level, base_seed, split) for k, (split, size) in enumerate(zip(SPLITS, sizes)))
    logger.info(f"Generated texture dataset: sizes={tuple(sizes)} level={level} seed={base_seed}")
    return splits


def composite_image(seed: int = 0, level: float = 1.0) -> np.ndarray:
    """32x32 image holding one region per class, classes in enum order row by row."""
    root = RngState(seed)
    image = np.empty((sum(COMPOSITE_ROW_HEIGHTS), sum(COMPOSITE_COL_WIDTHS)), dtype=np.uint8)
    classes = iter(GliderClass)
    top = 0
    for height in COMPOSITE_ROW_HEIGHTS:
        left = 0
        for width in COMPOSITE_COL_WIDTHS:
            cls = next(classes)
            image[top:top + height, left:left + width] = generate_batch(cls, [root.substream(cls.index)], height, width, level)[0]
            left += width
        top += height
    return image


def stimulus_set(dataset: TextureDataset, per_class: int = 10) -> TextureDataset:
    """First ``per_class`` images of every class, grouped by class."""
    indices = []
    for cls in GliderClass:
        members = np.flatnonzero(dataset.labels == cls.index)[:per_class]
        if len(members) < per_class:
            raise ParameterError(f"Class {cls.value} has only {len(members)} images, need {per_class}")
        indices.extend(members.tolist())
    return dataset.subset(np.asarray(indices))
