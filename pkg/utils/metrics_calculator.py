import logging
from typing import Dict, Sequence

import numpy as np

logger = logging.getLogger(__name__)


def summarize_accuracies(accuracies: Sequence[float]) -> Dict[str, float]:
    """
    Mean and sample standard deviation (n - 1) of per-seed accuracies.
    A single value has std 0; no values give NaNs.
    """
    values = np.asarray([float(a) for a in accuracies], dtype=float)
    if values.size == 0:
        logger.warning("No accuracies to summarize")
        return {"n": 0, "mean": float("nan"), "std": float("nan"), "min": float("nan"), "max": float("nan")}
    return {
        "n": int(values.size),
        "mean": float(values.mean()),
        "std": float(values.std(ddof=1)) if values.size > 1 else 0.0,
        "min": float(values.min()),
        "max": float(values.max()),
    }


def normalized_accuracy(accuracy: float, baseline: float) -> float:
    """Accuracy relative to the unperturbed accuracy, in percent."""
    if baseline <= 0:
        return float("nan")
    return 100.0 * accuracy / baseline
