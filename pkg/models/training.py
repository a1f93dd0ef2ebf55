from typing import List, Optional

import pandas as pd
from pydantic import BaseModel, Field, field_validator, model_validator


class TrainConfig(BaseModel):
    """Optimizer, schedule and stopping settings for one training run."""
    lr: float = Field(default=0.001, gt=0, description="Initial AdamW learning rate")
    weight_decay: float = Field(default=5e-4, ge=0, description="Decoupled AdamW weight decay")
    batch_size: int = Field(default=64, ge=1, description="Mini-batch size")
    max_epochs: int = Field(default=60, ge=1, description="Upper bound on training epochs")
    plateau_patience: int = Field(default=5, ge=1, description="Epochs without val-loss improvement before the lr halves")
    plateau_factor: float = Field(default=0.5, gt=0, lt=1, description="Learning-rate multiplier on plateau")
    early_stop_patience: int = Field(default=12, ge=1, description="Epochs without val-loss improvement before stopping")
    seed: int = Field(default=0, ge=0, description="Seed for shuffling and dropout masks")
    loss: str = Field(default="cross_entropy", description="Training loss")

    @field_validator("loss")
    @classmethod
    def validate_loss(cls, v):
        if v != "cross_entropy":
            raise ValueError("Only 'cross_entropy' is supported")
        return v


class TrainHistory(BaseModel):
    """Per-epoch training record; every list has one entry per completed epoch."""
    epoch: List[int] = Field(default_factory=list)
    train_loss: List[float] = Field(default_factory=list)
    val_loss: List[float] = Field(default_factory=list)
    val_acc: List[float] = Field(default_factory=list)
    lr: List[float] = Field(default_factory=list)
    best_epoch: Optional[int] = Field(default=None, description="Epoch whose weights the trained model carries")
    stopped_early: bool = False

    @model_validator(mode="after")
    def validate_lengths(self):
        lengths = {len(self.epoch), len(self.train_loss), len(self.val_loss), len(self.val_acc), len(self.lr)}
        if len(lengths) > 1:
            raise ValueError("History columns must have equal lengths")
        return self

    def __len__(self) -> int:
        return len(self.epoch)

    def append(self, epoch: int, train_loss: float, val_loss: float, val_acc: float, lr: float):
        self.epoch.append(epoch)
        self.train_loss.append(float(train_loss))
        self.val_loss.append(float(val_loss))
        self.val_acc.append(float(val_acc))
        self.lr.append(float(lr))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "epoch": self.epoch,
            "train_loss": self.train_loss,
            "val_loss": self.val_loss,
            "val_acc": self.val_acc,
            "lr": self.lr,
        })
