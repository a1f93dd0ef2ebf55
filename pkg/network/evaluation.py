from typing import Tuple

import numpy as np

from core.errors import ParameterError, ShapeError
from network.losses import softmax_cross_entropy
from network.model import Model

N_CLASSES = 10
EVAL_BATCH_SIZE = 250


def dataset_arrays(dataset) -> Tuple[np.ndarray, np.ndarray]:
    """(N, C, H, W) float64 inputs and intp labels from anything exposing ``images`` and ``labels``."""
    images = np.asarray(dataset.images, dtype=np.float64)
    labels = np.asarray(dataset.labels, dtype=np.intp)
    if images.ndim == 3:
        images = images[:, None]
    if images.ndim != 4 or labels.shape != (images.shape[0],):
        raise ShapeError(f"Dataset images {images.shape} and labels {labels.shape} do not line up")
    if images.shape[0] == 0:
        raise ParameterError("Dataset is empty")
    return images, labels


def predict_logits(model: Model, images: np.ndarray, batch_size: int = EVAL_BATCH_SIZE) -> np.ndarray:
    return np.concatenate([model.forward(images[start:start + batch_size]) for start in range(0, len(images), batch_size)])


def validation_metrics(model: Model, dataset) -> Tuple[float, float]:
    """Eval-mode (mean loss, accuracy); the model's mode is restored afterwards."""
    images, labels = dataset_arrays(dataset)
    was_training = model.training
    model.eval()
    try:
        logits = predict_logits(model, images)
    finally:
        model.training = was_training
    loss, _ = softmax_cross_entropy(logits, labels)
    return loss, float((logits.argmax(axis=1) == labels).mean())


def confusion_matrix(true_labels, predicted_labels, n_classes: int = N_CLASSES) -> np.ndarray:
    """Rows are true classes, columns predicted classes."""
    matrix = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(matrix, (np.asarray(true_labels, dtype=np.intp), np.asarray(predicted_labels, dtype=np.intp)), 1)
    return matrix


def accuracy_from_confusion(matrix: np.ndarray) -> float:
    total = matrix.sum()
    if total == 0:
        raise ParameterError("Confusion matrix is empty")
    return float(np.trace(matrix) / total)


def evaluate(model: Model, dataset, n_classes: int = N_CLASSES) -> Tuple[float, np.ndarray]:
    """Eval-mode accuracy and confusion matrix over a dataset."""
    images, labels = dataset_arrays(dataset)
    return evaluate_arrays(model, images, labels, n_classes)


def evaluate_arrays(model: Model, images: np.ndarray, labels: np.ndarray, n_classes: int = N_CLASSES) -> Tuple[float, np.ndarray]:
    images = np.asarray(images, dtype=np.float64)
    if images.ndim == 3:
        images = images[:, None]
    if len(images) == 0:
        raise ParameterError("Dataset is empty")
    model.eval()
    predictions = predict_logits(model, images).argmax(axis=1)
    matrix = confusion_matrix(labels, predictions, n_classes)
    return accuracy_from_confusion(matrix), matrix
