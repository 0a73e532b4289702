"""Schemas for training configuration, history and model files."""

from typing import Any, Literal

from pydantic import BaseModel, Field


class TrainConfig(BaseModel):
    """Hyperparameters of one training run."""

    epochs: int = Field(ge=1, description="Number of passes over the training split")
    batch_size: int = Field(default=256, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    weight_decay: float = Field(default=0.0, ge=0.0, description="L2 coefficient in the loss")
    seed: int = Field(default=0, ge=0)
    optimizer: Literal["adam", "sgd"] = "adam"
    selection: Literal["final", "best-validation"] = "final"
    selection_set: Literal["random-validation", "sweep-validation"] = "random-validation"
    anchor_fraction: float = Field(
        default=0.0, ge=0.0, le=1.0,
        description="Size of the exactly-labeled noised-GHZ anchor block relative to the "
                    "training split (0 disables anchors)",
    )


class EpochRecord(BaseModel):
    """One row of the training history."""

    epoch: int
    train_loss: float
    train_acc: float
    val_loss: float | None = None
    val_acc: float | None = None


class ModelHeader(BaseModel):
    """Header line of a model file."""

    layer_dims: list[int]
    activations: list[str]
    n: int
    class_table_hash: str
    metadata: dict[str, Any] = Field(default_factory=dict)
