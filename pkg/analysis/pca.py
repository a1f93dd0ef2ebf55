import logging
from typing import NamedTuple, Sequence

import numpy as np

from core.errors import ParameterError, ShapeError

logger = logging.getLogger(__name__)


class ExplainedVariance(NamedTuple):
    fractions: np.ndarray
    degenerate: bool

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.fractions)


def pca_explained_variance(matrix: np.ndarray) -> ExplainedVariance:
    """
    Variance fractions of the principal components of ``matrix`` (rows are
    observations), descending, from the singular values of the column-centered
    matrix. A matrix without variance gives all-zero fractions and ``degenerate``.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ShapeError(f"Expected a 2-D activation matrix, got shape {matrix.shape}")
    if matrix.shape[0] < 2:
        raise ParameterError("PCA needs at least two observations")
    if not np.isfinite(matrix).all():
        raise ParameterError("Activation matrix contains NaN or Inf")
    centered = matrix - matrix.mean(axis=0)
    singular = np.linalg.svd(centered, full_matrices=False, compute_uv=False)
    variance = singular**2
    total = variance.sum()
    if total <= 0.0:
        logger.warning(f"Activation matrix {matrix.shape} has zero variance")
        return ExplainedVariance(np.zeros_like(variance), True)
    return ExplainedVariance(variance / total, False)


def pc_count_for_threshold(fractions: Sequence[float], threshold: float = 0.95) -> int:
    """Smallest k whose leading k fractions reach ``threshold``; 1 when there is no variance."""
    fractions = np.asarray(fractions, dtype=np.float64)
    if fractions.size == 0:
        raise ParameterError("No variance fractions given")
    if not 0.0 < threshold <= 1.0:
        raise ParameterError(f"threshold must lie in (0, 1], got {threshold}")
    if fractions.sum() == 0.0:
        return 1
    cumulative = np.cumsum(fractions)
    reached = np.flatnonzero(cumulative >= threshold - 1e-12)
    return int(reached[0]) + 1 if reached.size else int(fractions.size)
