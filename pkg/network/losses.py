from typing import Tuple

import numpy as np
from scipy.special import log_softmax

from core.errors import ShapeError


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean cross-entropy over the batch and its gradient (softmax - onehot) / batch."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    if logits.ndim != 2 or labels.shape != (logits.shape[0],):
        raise ShapeError(f"Expected (batch, classes) logits and (batch,) labels, got {logits.shape} and {labels.shape}")
    batch = logits.shape[0]
    log_probs = log_softmax(logits, axis=1)
    rows = np.arange(batch)
    loss = -log_probs[rows, labels].mean()
    grad = np.exp(log_probs)
    grad[rows, labels] -= 1.0
    return float(loss), grad / batch
