"""Central-difference gradient checks for layers and whole models."""
from typing import Callable, Dict, Optional

import numpy as np

from core.rng import RngState
from network.losses import softmax_cross_entropy
from network.model import Model

STEP = 1e-5


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||a - n|| / max(||a|| + ||n||, tiny); zero when both vanish."""
    analytic = np.ravel(analytic)
    numeric = np.ravel(numeric)
    denominator = np.linalg.norm(analytic) + np.linalg.norm(numeric)
    if denominator == 0.0:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / denominator)


def numerical_gradient(loss: Callable[[], float], array: np.ndarray, indices: Optional[np.ndarray] = None,
                       step: float = STEP) -> np.ndarray:
    """Central differences of ``loss()`` w.r.t. the given flat entries of ``array`` (perturbed in place)."""
    flat = array.reshape(-1)
    indices = np.arange(flat.size) if indices is None else np.asarray(indices)
    grads = np.empty(len(indices))
    for k, index in enumerate(indices):
        original = flat[index]
        flat[index] = original + step
        plus = loss()
        flat[index] = original - step
        minus = loss()
        flat[index] = original
        grads[k] = (plus - minus) / (2.0 * step)
    return grads


def model_gradient_check(model: Model, x: np.ndarray, labels: np.ndarray, max_entries: Optional[int] = None,
                         rng: Optional[RngState] = None, step: float = STEP) -> Dict[str, float]:
    """
    Relative error between backprop and central differences of the mean
    cross-entropy, per parameter array plus ``"input"``, in the model's
    current mode. ``max_entries`` samples that many entries per array.
    """
    rng = rng or RngState(0)
    x = np.array(x, dtype=np.float64)

    def loss() -> float:
        return softmax_cross_entropy(model.forward(x), labels)[0]

    _, grad = softmax_cross_entropy(model.forward(x), labels)
    grad_input, grads = model.backward(grad)
    errors = {}
    for name, param in model.parameters().items():
        indices = None
        if max_entries is not None and param.size > max_entries:
            indices = np.sort(rng.permutation(param.size)[:max_entries])
        numeric = numerical_gradient(loss, param, indices, step)
        analytic = grads[name].reshape(-1) if indices is None else grads[name].reshape(-1)[indices]
        errors[name] = relative_error(analytic, numeric)
    indices = None
    if max_entries is not None and x.size > max_entries:
        indices = np.sort(rng.permutation(x.size)[:max_entries])
    numeric = numerical_gradient(loss, x, indices, step)
    analytic = grad_input.reshape(-1) if indices is None else grad_input.reshape(-1)[indices]
    errors["input"] = relative_error(analytic, numeric)
    return errors
