from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class DatasetManifest(BaseModel):
    """Sidecar of the HOTX files written by ``gen``."""
    files: Dict[str, str] = Field(description="Split name -> HOTX file name")
    sizes: Dict[str, int]
    class_counts: Dict[str, Dict[str, int]] = Field(description="Split name -> class name -> image count")
    height: int
    width: int
    level: float
    seed: int


class SeedRunResult(BaseModel):
    seed: int
    status: str  # "completed", "diverged"
    test_accuracy: Optional[float] = None
    best_epoch: Optional[int] = None
    epochs: int = 0
    checkpoint: Optional[str] = None
    error: Optional[str] = None


class SweepResult(BaseModel):
    """Outcome of training one model kind over a list of seeds."""
    model_kind: str
    status: str  # "pending", "running", "completed", "failed"
    total_seeds: int
    completed_seeds: int = 0
    failed_seeds: int = 0
    results: List[SeedRunResult] = []
    errors: List[Dict] = []
    progress_percentage: float = 0.0
    summary: Dict[str, float] = {}
