"""Pure replays of the validation-loss history for lr scheduling and early stopping."""
import math

from models.training import TrainHistory


def _best_index(val_losses) -> int:
    best, best_index = math.inf, 0
    for index, loss in enumerate(val_losses):
        if loss < best:
            best, best_index = loss, index
    return best_index


def reduce_lr_on_plateau(history: TrainHistory, patience: int = 5, factor: float = 0.5) -> float:
    """Learning rate for the next epoch: halves after ``patience`` epochs without strict improvement."""
    if not history.lr:
        raise ValueError("History is empty")
    lr = history.lr[0]
    best = math.inf
    stale = 0
    for loss in history.val_loss:
        if loss < best:
            best = loss
            stale = 0
            continue
        stale += 1
        if stale >= patience:
            lr *= factor
            stale = 0
    return lr


def early_stop(history: TrainHistory, patience: int = 12) -> bool:
    if not history.val_loss:
        return False
    return len(history.val_loss) - 1 - _best_index(history.val_loss) >= patience
