"""Representational dissimilarity matrices and their comparisons."""
import logging
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np
from scipy.spatial.distance import squareform
from scipy.stats import spearmanr

from core.errors import ParameterError, ShapeError

logger = logging.getLogger(__name__)

METRICS = ("corr", "corr01")
COMPARE_MODES = ("log_ratio", "hellinger", "abs_diff", "spearman")
LOG_RATIO_EPS = 1e-8


@dataclass
class Rdm:
    matrix: np.ndarray
    metric: str = "corr"

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def upper(self) -> np.ndarray:
        return squareform(self.matrix, checks=False)


def _symmetrized(matrix: np.ndarray) -> np.ndarray:
    matrix = (matrix + matrix.T) / 2.0
    np.fill_diagonal(matrix, 0.0)
    return np.maximum(matrix, 0.0)


def compute_rdm(activations: np.ndarray, metric: str = "corr") -> Rdm:
    """
    1 - Pearson between stimulus rows (``corr``) or half of it (``corr01``).

    Constant rows have no correlation; their dissimilarities are fixed at
    1 (``corr``) or 0.5 (``corr01``).
    """
    if metric not in METRICS:
        raise ParameterError(f"Unknown RDM metric '{metric}', expected one of {METRICS}")
    acts = np.asarray(activations, dtype=np.float64)
    if acts.ndim != 2:
        acts = acts.reshape(acts.shape[0], -1)
    if acts.shape[0] < 2:
        raise ParameterError("An RDM needs at least two stimuli")
    if not np.isfinite(acts).all():
        raise ParameterError("Activations contain NaN or Inf")
    centered = acts - acts.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(centered, axis=1)
    constant = norms == 0.0
    if constant.any():
        logger.warning(f"{int(constant.sum())} of {len(acts)} stimuli have constant activations")
    safe = np.where(constant, 1.0, norms)
    unit = centered / safe[:, None]
    correlation = np.clip(unit @ unit.T, -1.0, 1.0)
    correlation[constant, :] = 0.0
    correlation[:, constant] = 0.0
    dissimilarity = 1.0 - correlation
    if metric == "corr01":
        dissimilarity = dissimilarity / 2.0
    return Rdm(_symmetrized(dissimilarity), metric)


def _matrix(rdm: Union[Rdm, np.ndarray]) -> np.ndarray:
    return rdm.matrix if isinstance(rdm, Rdm) else np.asarray(rdm, dtype=np.float64)


def rdm_compare(a: Union[Rdm, np.ndarray], b: Union[Rdm, np.ndarray], mode: str = "log_ratio"):
    """Elementwise map (log_ratio, hellinger, abs_diff) or a scalar (spearman over upper triangles)."""
    if mode not in COMPARE_MODES:
        raise ParameterError(f"Unknown comparison '{mode}', expected one of {COMPARE_MODES}")
    ma, mb = _matrix(a), _matrix(b)
    if ma.shape != mb.shape or ma.ndim != 2 or ma.shape[0] != ma.shape[1]:
        raise ShapeError(f"RDM shapes differ or are not square: {ma.shape} vs {mb.shape}")
    if mode == "log_ratio":
        return np.log((ma + LOG_RATIO_EPS) / (mb + LOG_RATIO_EPS))
    if mode == "hellinger":
        for rdm in (a, b):
            if isinstance(rdm, Rdm) and rdm.metric != "corr01":
                raise ParameterError("Hellinger comparison needs corr01 RDMs")
        if ma.min() < 0 or mb.min() < 0 or ma.max() > 1 or mb.max() > 1:
            raise ParameterError("Hellinger comparison needs dissimilarities in [0, 1]")
        return np.abs(np.sqrt(ma) - np.sqrt(mb)) / np.sqrt(2.0)
    if mode == "abs_diff":
        return np.abs(ma - mb)
    return _spearman(squareform(ma, checks=False), squareform(mb, checks=False))


def _spearman(x: np.ndarray, y: np.ndarray) -> float:
    if np.array_equal(x, y):
        return 1.0
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        logger.warning("Spearman correlation of a constant RDM is undefined")
        return float("nan")
    return float(spearmanr(x, y)[0])


def average_rdms(rdms: Sequence[Rdm]) -> Rdm:
    """Elementwise mean over model seeds."""
    if not rdms:
        raise ParameterError("No RDMs to average")
    metrics = {rdm.metric for rdm in rdms}
    if len(metrics) > 1:
        raise ParameterError(f"Cannot average RDMs with different metrics {sorted(metrics)}")
    matrices = [rdm.matrix for rdm in rdms]
    if len({m.shape for m in matrices}) > 1:
        raise ShapeError("RDMs to average have different shapes")
    return Rdm(_symmetrized(np.mean(matrices, axis=0)), metrics.pop())


class DistanceDistribution(NamedTuple):
    counts: np.ndarray
    edges: np.ndarray
    mean: float
    variance: float
    modes: int


def count_modes(counts: Sequence[int]) -> int:
    """Occupied bins that are at least their left neighbour and above their right one."""
    counts = np.asarray(counts)
    modes = 0
    for i, count in enumerate(counts):
        if count <= 0:
            continue
        left_ok = i == 0 or count >= counts[i - 1]
        right_ok = i == len(counts) - 1 or count > counts[i + 1]
        modes += bool(left_ok and right_ok)
    return modes


def distance_distribution(rdm: Union[Rdm, np.ndarray], n_bins: int = 20) -> DistanceDistribution:
    """Histogram of the upper-triangle dissimilarities over equal bins spanning [min, max]."""
    if n_bins < 1:
        raise ParameterError(f"n_bins must be at least 1, got {n_bins}")
    values = squareform(_matrix(rdm), checks=False)
    if values.size == 0:
        raise ParameterError("RDM has no off-diagonal entries")
    low, high = float(values.min()), float(values.max())
    if low == high:
        low, high = low - 0.5, high + 0.5
    counts, edges = np.histogram(values, bins=n_bins, range=(low, high))
    return DistanceDistribution(counts, edges, float(values.mean()), float(values.var()), count_modes(counts))
