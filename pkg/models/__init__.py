"""
Configuration and result models.

Each command config lives in ``experiments``; training settings and history
in ``training``; records written to disk in ``results``.
"""

# Command configs
from .experiments import (
    EvalConfig,
    ExperimentConfig,
    FlopsConfig,
    GenConfig,
    PcaTiedConfig,
    PerturbConfig,
    RsaConfig,
    TrainCommandConfig,
    expand_seeds,
)

# Run records
from .results import DatasetManifest, SeedRunResult, SweepResult

# Training models
from .training import TrainConfig, TrainHistory

__all__ = [
    # Command configs
    "ExperimentConfig",
    "GenConfig",
    "TrainCommandConfig",
    "EvalConfig",
    "PcaTiedConfig",
    "RsaConfig",
    "PerturbConfig",
    "FlopsConfig",
    "expand_seeds",
    # Run records
    "DatasetManifest",
    "SeedRunResult",
    "SweepResult",
    # Training models
    "TrainConfig",
    "TrainHistory",
]
