import logging
import math
from typing import Tuple

from core.errors import DivergenceError
from core.rng import RngState
from models.training import TrainConfig, TrainHistory
from network.evaluation import dataset_arrays, validation_metrics
from network.losses import softmax_cross_entropy
from network.model import Model
from network.optim import AdamWState, adamw_step
from network.schedule import early_stop, reduce_lr_on_plateau

logger = logging.getLogger(__name__)


def train(model: Model, train_set, val_set, config: TrainConfig) -> Tuple[Model, TrainHistory]:
    """
    Mini-batch AdamW training with plateau lr halving and early stopping on
    validation loss. Returns the model carrying its best-validation weights,
    in eval mode.
    """
    images, labels = dataset_arrays(train_set)
    dataset_arrays(val_set)
    rng = RngState(config.seed)
    shuffle_rng = rng.substream(1)
    model.bind_rng(rng.substream(2))
    state = AdamWState()
    history = TrainHistory()
    lr = config.lr
    best_loss = math.inf
    best_state = model.snapshot()
    n = len(labels)

    for epoch in range(1, config.max_epochs + 1):
        model.train()
        order = shuffle_rng.permutation(n)
        total_loss = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start:start + config.batch_size]
            logits = model.forward(images[batch])
            loss, grad = softmax_cross_entropy(logits, labels[batch])
            if not math.isfinite(loss):
                raise DivergenceError(epoch, f"training loss became {loss}")
            _, grads = model.backward(grad)
            adamw_step(model.parameters(), grads, state, lr=lr, weight_decay=config.weight_decay)
            total_loss += loss * len(batch)

        val_loss, val_acc = validation_metrics(model, val_set)
        if not math.isfinite(val_loss):
            raise DivergenceError(epoch, f"validation loss became {val_loss}")
        history.append(epoch, total_loss / n, val_loss, val_acc, lr)
        logger.debug(f"{model.name} epoch {epoch}: train_loss={total_loss / n:.4f} val_loss={val_loss:.4f} "
                     f"val_acc={val_acc:.4f} lr={lr:g}")
        if val_loss < best_loss:
            best_loss = val_loss
            best_state = model.snapshot()
            history.best_epoch = epoch

        if early_stop(history, config.early_stop_patience):
            history.stopped_early = True
            logger.info(f"{model.name}: early stop after epoch {epoch}, best epoch {history.best_epoch}")
            break
        lr = reduce_lr_on_plateau(history, config.plateau_patience, config.plateau_factor)

    model.restore(best_state)
    model.eval()
    return model, history
