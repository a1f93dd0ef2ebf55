"""
The ten glider classes of the texture benchmark.

A glider is a set of pixel offsets (row, col) inside a 2x2 tile; its parity
statistic is the mean of the product of the +/-1 pixels it covers.
"""
from enum import Enum
from typing import Dict, Tuple

Offset = Tuple[int, int]

TILE = 2


class GliderClass(str, Enum):
    GAMMA = "gamma"
    BETA_H = "beta_h"
    BETA_V = "beta_v"
    BETA_DIAG_BACK = "beta_diag_back"
    BETA_DIAG_FWD = "beta_diag_fwd"
    THETA_BL = "theta_bl"
    THETA_TL = "theta_tl"
    THETA_TR = "theta_tr"
    THETA_BR = "theta_br"
    ALPHA = "alpha"

    @property
    def offsets(self) -> Tuple[Offset, ...]:
        return GLIDER_OFFSETS[self]

    @property
    def target(self) -> int:
        """Parity the class is driven to at full strength."""
        return 1

    @property
    def index(self) -> int:
        return list(GliderClass).index(self)

    @classmethod
    def from_index(cls, index: int) -> "GliderClass":
        return list(cls)[index]


GLIDER_OFFSETS: Dict[GliderClass, Tuple[Offset, ...]] = {
    GliderClass.GAMMA: ((0, 0),),
    GliderClass.BETA_H: ((0, 0), (0, 1)),
    GliderClass.BETA_V: ((0, 0), (1, 0)),
    GliderClass.BETA_DIAG_BACK: ((0, 0), (1, 1)),
    GliderClass.BETA_DIAG_FWD: ((0, 1), (1, 0)),
    GliderClass.THETA_BL: ((0, 0), (1, 0), (1, 1)),
    GliderClass.THETA_TL: ((0, 0), (0, 1), (1, 0)),
    GliderClass.THETA_TR: ((0, 0), (0, 1), (1, 1)),
    GliderClass.THETA_BR: ((0, 1), (1, 0), (1, 1)),
    GliderClass.ALPHA: ((0, 0), (0, 1), (1, 0), (1, 1)),
}

CLASS_NAMES = tuple(cls.value for cls in GliderClass)


def _tile_mask(offsets, shift: Offset = (0, 0)) -> int:
    mask = 0
    for r, c in offsets:
        mask |= 1 << ((r + shift[0]) * TILE + (c + shift[1]))
    return mask


def _translates(offsets) -> list:
    height = max(r for r, _ in offsets) + 1
    width = max(c for _, c in offsets) + 1
    return [_tile_mask(offsets, (dr, dc)) for dr in range(TILE - height + 1) for dc in range(TILE - width + 1)]


def _span(masks) -> set:
    span = {0}
    for mask in masks:
        span |= {value ^ mask for value in span}
    return span


def implied_gliders(cls: GliderClass) -> Tuple[GliderClass, ...]:
    """
    Other gliders whose statistic is pinned by ``cls``: those whose tile
    pattern is a product of translates of ``cls`` within the tile. A constant
    row texture (beta_h) pins alpha; a constant image (gamma) pins everything.
    """
    span = _span(_translates(cls.offsets))
    return tuple(
        other for other in GliderClass
        if other is not cls and any(mask in span for mask in _translates(other.offsets))
    )
