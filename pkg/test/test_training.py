from types import SimpleNamespace

import numpy as np
import pytest
from pydantic import ValidationError

from core.errors import DivergenceError, ParameterError
from core.rng import RngState
from models.training import TrainConfig, TrainHistory
from network.builders import build_model
from network.evaluation import accuracy_from_confusion, confusion_matrix, evaluate, validation_metrics
from network.layers import Flatten, Linear
from network.model import Model
from network.optim import AdamWState, adamw_step
from network.schedule import early_stop, reduce_lr_on_plateau
from network.trainer import train
from textures.datasets import TextureDataset


def make_history(val_losses, lr=0.01) -> TrainHistory:
    n = len(val_losses)
    return TrainHistory(epoch=list(range(1, n + 1)), train_loss=[1.0] * n, val_loss=list(val_losses),
                        val_acc=[0.5] * n, lr=[lr] * n)


def toy_model() -> Model:
    return Model([Flatten(), Linear(4, 2, rng=RngState(0))], (1, 2, 2), {"logits": 1}, "toy")


def toy_dataset() -> TextureDataset:
    images = np.array([[[1, 0], [0, 0]], [[0, 0], [0, 1]]])
    return TextureDataset(images, np.array([0, 1]))


class TestAdamW:
    def test_zero_gradient_without_decay(self, np_rng):
        params = {"w": np_rng.normal(size=(3, 2))}
        before = params["w"].copy()
        adamw_step(params, {"w": np.zeros((3, 2))}, AdamWState(), lr=0.001)
        np.testing.assert_array_equal(params["w"], before)

    def test_first_step_moves_by_lr(self):
        params = {"w": np.zeros(1)}
        state = AdamWState()
        adamw_step(params, {"w": np.ones(1)}, state, lr=0.001)
        assert params["w"][0] == pytest.approx(-0.001, rel=1e-6)
        assert state.t == 1

    def test_decoupled_decay(self):
        params = {"w": np.full(2, 3.0)}
        state = AdamWState()
        for _ in range(3):
            adamw_step(params, {"w": np.zeros(2)}, state, lr=0.01, weight_decay=0.5)
        np.testing.assert_allclose(params["w"], 3.0 * (1 - 0.01 * 0.5) ** 3)

    def test_updates_in_place(self):
        weight = np.zeros(2)
        adamw_step({"w": weight}, {"w": np.ones(2)}, AdamWState(), lr=0.1)
        assert np.all(weight < 0)


class TestPlateauSchedule:
    def test_improving_run_keeps_lr(self):
        assert reduce_lr_on_plateau(make_history([5, 4, 3, 2, 1, 0.5, 0.4, 0.3])) == 0.01

    def test_flat_run_halves_once(self):
        assert reduce_lr_on_plateau(make_history([1.0] * 6), patience=5) == pytest.approx(0.005)

    def test_two_plateaus_quarter(self):
        assert reduce_lr_on_plateau(make_history([1.0] * 11), patience=5) == pytest.approx(0.0025)

    def test_short_plateau_is_ignored(self):
        assert reduce_lr_on_plateau(make_history([1.0, 1.0, 1.0, 0.5]), patience=5) == 0.01

    def test_empty_history(self):
        with pytest.raises(ValueError):
            reduce_lr_on_plateau(TrainHistory())


class TestEarlyStop:
    def test_improving_run(self):
        assert not early_stop(make_history([5, 4, 3, 2, 1]), patience=2)

    def test_flat_run(self):
        assert not early_stop(make_history([1.0] * 12), patience=12)
        assert early_stop(make_history([1.0] * 13), patience=12)

    def test_counts_from_best_epoch(self):
        assert early_stop(make_history([3, 1, 2, 2, 2]), patience=3)
        assert not early_stop(make_history([3, 1, 2, 2, 0.5]), patience=3)

    def test_empty_history(self):
        assert not early_stop(TrainHistory())


class TestTrainConfig:
    def test_defaults(self):
        config = TrainConfig()
        assert (config.lr, config.weight_decay, config.batch_size) == (0.001, 5e-4, 64)
        assert (config.plateau_patience, config.plateau_factor, config.early_stop_patience) == (5, 0.5, 12)

    def test_only_cross_entropy(self):
        with pytest.raises(ValidationError):
            TrainConfig(loss="mse")

    def test_history_columns_line_up(self):
        with pytest.raises(ValidationError):
            TrainHistory(epoch=[1, 2], train_loss=[1.0], val_loss=[1.0], val_acc=[0.1], lr=[0.1])

    def test_history_frame(self):
        frame = make_history([3.0, 2.0]).to_frame()
        assert list(frame.columns) == ["epoch", "train_loss", "val_loss", "val_acc", "lr"]
        assert len(frame) == 2


class TestTrainer:
    def test_separable_toy_set(self):
        data = toy_dataset()
        model, history = train(toy_model(), data, data, TrainConfig(lr=0.05, weight_decay=0.0, batch_size=2,
                                                                     max_epochs=200))
        assert validation_metrics(model, data)[1] == 1.0
        assert model.mode == "eval"
        assert len(history) <= 200

    def test_fixed_seed_is_deterministic(self, small_splits):
        train_set, val_set, _ = small_splits
        config = TrainConfig(max_epochs=3, batch_size=16, seed=4)
        runs = [train(build_model("hocnn2", RngState(0).substream(0)), train_set, val_set, config) for _ in range(2)]
        assert runs[0][1].model_dump() == runs[1][1].model_dump()
        for (name, a), (_, b) in zip(runs[0][0].state_arrays(), runs[1][0].state_arrays()):
            np.testing.assert_array_equal(a, b, err_msg=name)

    def test_lr_trace_is_non_increasing(self, small_splits):
        train_set, val_set, _ = small_splits
        config = TrainConfig(lr=0.01, max_epochs=8, batch_size=20, plateau_patience=1, early_stop_patience=20)
        _, history = train(build_model("cnn2", RngState(1)), train_set, val_set, config)
        assert history.epoch == list(range(1, len(history) + 1))
        assert all(b <= a for a, b in zip(history.lr, history.lr[1:]))

    def test_returns_best_epoch_weights(self, small_splits):
        train_set, val_set, _ = small_splits
        config = TrainConfig(lr=0.02, max_epochs=6, batch_size=20, early_stop_patience=2)
        model, history = train(build_model("hocnn3", RngState(2)), train_set, val_set, config)
        best = int(np.argmin(history.val_loss))
        assert history.best_epoch == best + 1
        assert validation_metrics(model, val_set)[0] == pytest.approx(history.val_loss[best], rel=1e-12)
        if history.stopped_early:
            assert len(history) - history.best_epoch >= config.early_stop_patience

    def test_non_finite_loss_diverges(self):
        bad = SimpleNamespace(images=np.full((2, 1, 2, 2), np.nan), labels=np.array([0, 1]))
        with pytest.raises(DivergenceError) as info:
            train(toy_model(), bad, toy_dataset(), TrainConfig(max_epochs=3))
        assert info.value.epoch == 1


class TestEvaluation:
    def test_perfect_predictor(self):
        labels = np.arange(50) % 10
        matrix = confusion_matrix(labels, labels)
        np.testing.assert_array_equal(matrix, np.diag(np.full(10, 5)))
        assert accuracy_from_confusion(matrix) == 1.0

    def test_uniform_random_predictor(self):
        rng = RngState(6)
        matrix = confusion_matrix(rng.integers(0, 10, 2000), rng.integers(0, 10, 2000))
        assert accuracy_from_confusion(matrix) == pytest.approx(0.1, abs=0.02)

    def test_accuracy_is_trace_over_sum(self):
        matrix = RngState(7).integers(0, 20, (10, 10))
        assert accuracy_from_confusion(matrix) == pytest.approx(np.trace(matrix) / matrix.sum())

    def test_evaluate_dataset(self, small_splits):
        test_set = small_splits[2]
        accuracy, matrix = evaluate(build_model("hocnn2", RngState(0)), test_set)
        assert matrix.sum() == len(test_set)
        np.testing.assert_array_equal(matrix.sum(axis=1), np.full(10, len(test_set) // 10))
        assert accuracy == pytest.approx(np.trace(matrix) / len(test_set))

    def test_empty_dataset(self):
        with pytest.raises(ParameterError):
            evaluate(build_model("cnn"), TextureDataset(np.zeros((0, 32, 32)), np.zeros(0)))
