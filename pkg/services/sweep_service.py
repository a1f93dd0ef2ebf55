import asyncio
import logging
from typing import Callable, Dict, Sequence

from core.errors import DivergenceError
from models.results import SeedRunResult, SweepResult
from utils.metrics_calculator import summarize_accuracies

logger = logging.getLogger(__name__)

SeedJob = Callable[[int], SeedRunResult]


class SeedSweepService:
    """Runs one job per seed with bounded concurrency; diverged seeds are recorded and the sweep goes on."""

    def __init__(self, max_concurrent: int = 1):
        self.max_concurrent = max(1, max_concurrent)

    async def run(self, model_kind: str, seeds: Sequence[int], job: SeedJob) -> SweepResult:
        result = SweepResult(model_kind=model_kind, status="running", total_seeds=len(seeds))
        semaphore = asyncio.Semaphore(self.max_concurrent)
        finished: Dict[int, SeedRunResult] = {}

        tasks = [
            asyncio.create_task(self._run_seed_with_semaphore(semaphore, result, seed, job, finished))
            for seed in seeds
        ]
        await asyncio.gather(*tasks)

        # Completion order depends on scheduling; records follow the seed list.
        result.results = [finished[seed] for seed in seeds]
        result.errors.sort(key=lambda error: list(seeds).index(error["seed"]))
        result.summary = summarize_accuracies(
            [run.test_accuracy for run in result.results if run.status == "completed" and run.test_accuracy is not None]
        )
        result.status = "completed" if result.completed_seeds > 0 else "failed"
        result.progress_percentage = 100.0
        logger.info(f"Sweep {model_kind} finished. Completed: {result.completed_seeds}, Failed: {result.failed_seeds}")
        return result

    async def _run_seed_with_semaphore(self, semaphore: asyncio.Semaphore, result: SweepResult, seed: int,
                                       job: SeedJob, finished: Dict[int, SeedRunResult]):
        async with semaphore:
            await self._run_seed(result, seed, job, finished)

    async def _run_seed(self, result: SweepResult, seed: int, job: SeedJob, finished: Dict[int, SeedRunResult]):
        try:
            finished[seed] = await asyncio.to_thread(job, seed)
            result.completed_seeds += 1
        except DivergenceError as e:
            logger.error(f"Seed {seed} of {result.model_kind} diverged: {e}")
            finished[seed] = SeedRunResult(seed=seed, status="diverged", epochs=e.epoch, error=str(e))
            result.errors.append({"seed": seed, "epoch": e.epoch, "error": str(e)})
            result.failed_seeds += 1

        total_processed = result.completed_seeds + result.failed_seeds
        result.progress_percentage = (total_processed / result.total_seeds) * 100.0

    def run_sync(self, model_kind: str, seeds: Sequence[int], job: SeedJob) -> SweepResult:
        return asyncio.run(self.run(model_kind, seeds, job))
