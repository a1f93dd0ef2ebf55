import numpy as np

from core.errors import ParameterError, ShapeError
from core.rng import RngState
from textures.gliders import GliderClass
from textures.synthesis import generate_batch


def mix_perturbation(image: np.ndarray, texture: np.ndarray, intensity: float) -> np.ndarray:
    """
    (1 - I) * image + I * texture.

    ``image`` is HW, CHW or NCHW; a texture with fewer leading axes is broadcast
    across them (one binary texture shared by every channel).
    """
    if not 0.0 <= intensity <= 1.0:
        raise ParameterError(f"intensity must lie in [0, 1], got {intensity}")
    image = np.asarray(image, dtype=np.float64)
    texture = np.asarray(texture, dtype=np.float64)
    if texture.ndim > image.ndim or image.shape[image.ndim - texture.ndim:] != texture.shape:
        raise ShapeError(f"Texture shape {texture.shape} does not match image shape {image.shape}")
    return (1.0 - intensity) * image + intensity * texture


def perturbation_textures(cls: GliderClass, count: int, h: int, w: int, seed: int, level: float = 1.0) -> np.ndarray:
    """``count`` textures of one class for perturbing a stimulus set."""
    root = RngState(seed)
    return generate_batch(cls, [root.substream(GliderClass(cls).index, k) for k in range(count)], h, w, level)
