import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.errors import ConfigError
from models.training import TrainConfig

ModelKind = Literal["cnn", "cnn2", "hocnn2", "hocnn3", "hocnn4"]
ActivationName = Literal["relu", "leaky_relu", "gelu", "sigmoid", "mish"]

# Fields that never change output bytes.
HASH_EXCLUDE = {"out_dir", "threads"}


def expand_seeds(base_seed: int, count: int) -> List[int]:
    return [base_seed + index for index in range(count)]


class ExperimentConfig(BaseModel):
    """Common fields of every command config; unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid")

    seeds: List[int] = Field(default_factory=lambda: [0], min_length=1, description="Seeds of the run")
    out_dir: str = Field(default="runs", description="Output directory")
    threads: int = Field(default=1, ge=1, description="Concurrent seeds")

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, v):
        if any(seed < 0 or seed >= 2**64 for seed in v):
            raise ValueError("Seeds must be unsigned 64-bit integers")
        if len(set(v)) != len(v):
            raise ValueError("Seeds must be distinct")
        return v

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of every output-relevant field."""
        canonical = json.dumps(self.model_dump(mode="json", exclude=HASH_EXCLUDE), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @classmethod
    def load(cls, path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None,
             defaults: Optional[Dict[str, Any]] = None):
        """Layers ``defaults``, the JSON config at ``path`` (if any) and the non-None ``overrides``."""
        data: Dict[str, Any] = dict(defaults or {})
        if path:
            loaded = json.loads(Path(path).read_text(encoding="utf-8"))
            if not isinstance(loaded, dict):
                raise ConfigError(f"Config file {path} must hold a JSON object")
            data.update(loaded)
        data.update({key: value for key, value in (overrides or {}).items() if value is not None})
        return cls.model_validate(data)


class GenConfig(ExperimentConfig):
    sizes: Tuple[int, int, int] = Field(default=(2000, 1000, 2000), description="Train/val/test split sizes")
    height: int = Field(default=32, ge=4)
    width: int = Field(default=32, ge=4)
    level: float = Field(default=1.0, ge=0.0, le=1.0, description="Correlation level")

    @field_validator("sizes")
    @classmethod
    def validate_sizes(cls, v):
        if any(size <= 0 or size % 10 for size in v):
            raise ValueError("Split sizes must be positive multiples of 10")
        return v


class TrainCommandConfig(ExperimentConfig):
    dataset_dir: str = Field(default="runs/data", description="Directory holding train/val/test HOTX files")
    model_kind: ModelKind = "hocnn3"
    activation: ActivationName = "relu"
    dropout: float = Field(default=0.0, ge=0.0, lt=1.0)
    lr: float = Field(default=0.001, gt=0)
    weight_decay: float = Field(default=5e-4, ge=0)
    batch_size: int = Field(default=64, ge=1)
    max_epochs: int = Field(default=60, ge=1)
    plateau_patience: int = Field(default=5, ge=1)
    early_stop_patience: int = Field(default=12, ge=1)

    def train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(
            lr=self.lr,
            weight_decay=self.weight_decay,
            batch_size=self.batch_size,
            max_epochs=self.max_epochs,
            plateau_patience=self.plateau_patience,
            early_stop_patience=self.early_stop_patience,
            seed=seed,
        )


class EvalConfig(ExperimentConfig):
    dataset_dir: str = "runs/data"
    checkpoint_dir: str = Field(default="runs/hocnn3", description="Directory of seed-<n>.hock checkpoints")
    split: Literal["train", "val", "test"] = "test"


class PcaTiedConfig(ExperimentConfig):
    model_kinds: List[ModelKind] = Field(default_factory=lambda: ["cnn", "hocnn2", "hocnn3"])
    activations: List[ActivationName] = Field(default_factory=lambda: ["relu"])
    n_inits: int = Field(default=1000, ge=2)
    threshold: float = Field(default=0.95, gt=0.0, le=1.0)
    level: float = Field(default=1.0, ge=0.0, le=1.0)
    same_init: bool = False


class RsaConfig(ExperimentConfig):
    dataset_dir: str = "runs/data"
    checkpoint_dirs: Dict[str, str] = Field(
        default_factory=lambda: {"cnn": "runs/cnn", "hocnn3": "runs/hocnn3"},
        description="Model label -> directory of trained checkpoints",
    )
    baseline: str = Field(default="cnn", description="Label the other models are compared against")
    per_class: int = Field(default=10, ge=1)
    metric: Literal["corr", "corr01"] = "corr"
    n_bins: int = Field(default=20, ge=1)
    layer_pairs: List[Tuple[str, str]] = Field(default_factory=lambda: [("block1", "block1"), ("block2", "block2")])


class PerturbConfig(ExperimentConfig):
    dataset_dir: str = "runs/data"
    checkpoint_dirs: Dict[str, str] = Field(default_factory=lambda: {"cnn": "runs/cnn", "hocnn3": "runs/hocnn3"})
    split: Literal["train", "val", "test"] = "test"
    intensities: List[float] = Field(default_factory=lambda: [0.0, 0.05, 0.09, 0.12, 0.16, 0.20])
    level: float = Field(default=1.0, ge=0.0, le=1.0)
    texture_seed: int = Field(default=0, ge=0, description="Seed of the perturbation textures")

    @field_validator("intensities")
    @classmethod
    def validate_intensities(cls, v):
        if any(not 0.0 <= value <= 1.0 for value in v):
            raise ValueError("Intensities must lie in [0, 1]")
        return v


class FlopsConfig(ExperimentConfig):
    kernel_size: Tuple[int, int] = (3, 3)
    in_channels: int = Field(default=1, ge=1)
    out_channels: int = Field(default=64, ge=1)
    max_order: int = Field(default=3, ge=1, le=4)
    input_size: Tuple[int, int] = (32, 32)
    model_kinds: List[ModelKind] = Field(default_factory=lambda: ["cnn", "cnn2", "hocnn2", "hocnn3", "hocnn4"])
