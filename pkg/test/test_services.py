import asyncio
import threading

import pytest

from core.errors import DivergenceError
from models.results import SeedRunResult
from services.sweep_service import SeedSweepService


def job_factory(diverging=()):
    def job(seed: int) -> SeedRunResult:
        if seed in diverging:
            raise DivergenceError(3, "loss became nan")
        return SeedRunResult(seed=seed, status="completed", test_accuracy=0.1 * seed, best_epoch=2, epochs=4)
    return job


class TestSeedSweepService:
    def test_results_follow_seed_order(self):
        result = SeedSweepService(max_concurrent=3).run_sync("hocnn3", [5, 1, 3, 2], job_factory())
        assert [run.seed for run in result.results] == [5, 1, 3, 2]
        assert result.status == "completed"
        assert result.completed_seeds == 4 and result.failed_seeds == 0
        assert result.progress_percentage == 100.0
        assert result.summary["n"] == 4
        assert result.summary["mean"] == pytest.approx(0.275)

    def test_diverged_seed_is_recorded(self):
        result = SeedSweepService(max_concurrent=2).run_sync("cnn", [1, 2, 3], job_factory(diverging={2}))
        assert result.status == "completed"
        assert [run.status for run in result.results] == ["completed", "diverged", "completed"]
        assert result.results[1].epochs == 3
        assert result.errors == [{"seed": 2, "epoch": 3, "error": "Training diverged at epoch 3: loss became nan"}]
        assert result.summary["n"] == 2

    def test_every_seed_diverged(self):
        result = SeedSweepService().run_sync("cnn", [0, 1], job_factory(diverging={0, 1}))
        assert result.status == "failed"
        assert result.failed_seeds == 2

    def test_concurrency_is_bounded(self):
        active, peak = [0], [0]
        lock = threading.Lock()

        def job(seed):
            with lock:
                active[0] += 1
                peak[0] = max(peak[0], active[0])
            threading.Event().wait(0.02)
            with lock:
                active[0] -= 1
            return SeedRunResult(seed=seed, status="completed", test_accuracy=0.5)

        asyncio.run(SeedSweepService(max_concurrent=2).run("cnn", list(range(6)), job))
        assert peak[0] <= 2
