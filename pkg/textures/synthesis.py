"""
Maximum-entropy glider textures.

Pixels are filled in raster order. For a glider, the solved offset is its
last offset in raster order; pixel (i, j) is solved from the tile anchored at
(i, j) minus that offset whenever the whole tile lies inside the image, and is
an iid fair bit otherwise. A solved pixel makes the tile's parity equal the
class target with probability (1 + level) / 2.
"""
import logging
from typing import Sequence, Union

import numpy as np

from core.errors import ParameterError, ShapeError
from core.rng import RngState
from textures.gliders import GliderClass

logger = logging.getLogger(__name__)

MIN_SIZE = 4

Glider = Union[GliderClass, Sequence]


def _as_class(cls) -> GliderClass:
    try:
        return GliderClass(cls)
    except ValueError as e:
        raise ParameterError(f"Unknown glider class '{cls}'") from e


def _check_args(h: int, w: int, level: float):
    if h < MIN_SIZE or w < MIN_SIZE:
        raise ShapeError(f"Textures need at least {MIN_SIZE}x{MIN_SIZE} pixels, got {h}x{w}")
    if not 0.0 <= level <= 1.0:
        raise ParameterError(f"level must lie in [0, 1], got {level}")


def generate_batch(cls: GliderClass, rngs: Sequence[RngState], h: int, w: int, level: float = 1.0) -> np.ndarray:
    """
    One (h, w) binary image per rng, stacked as uint8 (N, h, w).

    Each image consumes only its own rng, so the result does not depend on
    which other images share the batch.
    """
    cls = _as_class(cls)
    _check_args(h, w, level)
    n = len(rngs)
    boundary = np.empty((n, h, w), dtype=np.int8)
    flips = np.empty((n, h, w), dtype=bool)
    for k, rng in enumerate(rngs):
        boundary[k] = 2 * rng.bernoulli(0.5, (h, w)) - 1
        flips[k] = rng.uniform((h, w)) >= (1.0 + level) / 2.0

    offsets = cls.offsets
    solved = max(offsets)
    others = [o for o in offsets if o != solved]
    target = np.where(flips, -cls.target, cls.target).astype(np.int8)
    sigma = np.empty((n, h, w), dtype=np.int8)
    for i in range(h):
        for j in range(w):
            ai, aj = i - solved[0], j - solved[1]
            inside = ai >= 0 and aj >= 0 and all(0 <= aj + c < w for _, c in others)
            if not inside:
                sigma[:, i, j] = boundary[:, i, j]
                continue
            value = target[:, i, j].copy()
            for r, c in others:
                value *= sigma[:, ai + r, aj + c]
            sigma[:, i, j] = value
    return ((sigma + 1) // 2).astype(np.uint8)


def generate_texture(cls: GliderClass, h: int, w: int, level: float, rng: RngState) -> np.ndarray:
    return generate_batch(cls, [rng], h, w, level)[0]


def glider_parity_statistic(image: np.ndarray, glider: Glider) -> Union[float, np.ndarray]:
    """
    Mean over tile placements of the product of +/-1 pixels under the glider.

    ``glider`` is a ``GliderClass`` or an offset list; (N, H, W) input gives
    one statistic per image.
    """
    offsets = GliderClass(glider).offsets if isinstance(glider, (str, GliderClass)) else tuple(map(tuple, glider))
    image = np.asarray(image)
    if image.ndim not in (2, 3):
        raise ShapeError(f"Expected an (H, W) or (N, H, W) image, got shape {image.shape}")
    if not np.isin(image, (0, 1)).all():
        raise ParameterError("Image must be binary")
    batch = image if image.ndim == 3 else image[None]
    height = max(r for r, _ in offsets) + 1
    width = max(c for _, c in offsets) + 1
    h, w = batch.shape[1:]
    if h < height or w < width:
        raise ShapeError(f"Image {h}x{w} is smaller than the glider tile {height}x{width}")
    sigma = 2 * batch.astype(np.int64) - 1
    product = np.ones((batch.shape[0], h - height + 1, w - width + 1), dtype=np.int64)
    for r, c in offsets:
        product *= sigma[:, r:r + h - height + 1, c:c + w - width + 1]
    statistic = product.mean(axis=(1, 2))
    return float(statistic[0]) if image.ndim == 2 else statistic
