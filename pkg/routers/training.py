import logging

from config import VERSION
from core.rng import RngState
from models.experiments import TrainCommandConfig
from models.results import SeedRunResult, SweepResult
from network.builders import build_model, report_param_totals
from network.evaluation import evaluate
from network.trainer import train
from routers.common import checkpoint_file, load_split
from services.sweep_service import SeedSweepService
from utils.checkpoint import encode_checkpoint
from utils.file_system import ArtifactStore

logger = logging.getLogger(__name__)


def cmd_train(config: TrainCommandConfig) -> SweepResult:
    """
    Train one model per seed and evaluate it on the test split.

    Per seed, ``seed-<n>.hock`` and ``history-seed-<n>.csv`` land in
    ``config.out_dir``; ``summary.json`` holds every seed's record plus the
    mean and sample std of the test accuracies. A diverged seed is recorded
    and the sweep continues.
    """
    config_hash = config.config_hash()
    store = ArtifactStore(config.out_dir, config_hash)
    train_set = load_split(config.dataset_dir, "train")
    val_set = load_split(config.dataset_dir, "val")
    test_set = load_split(config.dataset_dir, "test")

    report_param_totals(build_model(config.model_kind, RngState(0), config.activation, config.dropout))

    def run_seed(seed: int) -> SeedRunResult:
        # Substream 0 initializes weights; the trainer uses substreams 1 and 2 of the same seed.
        model = build_model(config.model_kind, RngState(seed).substream(0), config.activation, config.dropout)
        model, history = train(model, train_set, val_set, config.train_config(seed))
        accuracy, _ = evaluate(model, test_set)
        metadata = {"model_kind": config.model_kind, "seed": seed, "config_hash": config_hash, "version": VERSION,
                    "best_epoch": history.best_epoch}
        path = store.write_bytes(checkpoint_file(seed), encode_checkpoint(model, metadata))
        store.write_csv(f"history-seed-{seed}.csv", history.to_frame())
        logger.info(f"{config.model_kind} seed {seed}: test accuracy {accuracy:.4f} after {len(history)} epochs")
        return SeedRunResult(seed=seed, status="completed", test_accuracy=accuracy, best_epoch=history.best_epoch,
                             epochs=len(history), checkpoint=path)

    result = SeedSweepService(config.threads).run_sync(config.model_kind, config.seeds, run_seed)
    record = result.model_dump()
    # Absolute paths vary between output directories.
    for run in record["results"]:
        run["checkpoint"] = checkpoint_file(run["seed"]) if run["checkpoint"] else None
    store.write_json("summary.json", record)
    return result
