"""Schemas for dataset file metadata."""

from pydantic import BaseModel, Field

DATASET_FORMAT_VERSION = 1


class DatasetMetadata(BaseModel):
    """Header document written as the first line of a dataset file."""

    format_version: int = Field(default=DATASET_FORMAT_VERSION)
    n: int = Field(ge=2, description="Qubit count")
    master_seed: int = Field(ge=0, description="Seed every per-record stream derives from")
    per_composition: int = Field(ge=6, description="Records generated per composition")
    sampler: str = Field(description="Identifier of the seed-parameter sampler")
    class_table: list[tuple[int, int]] = Field(
        description="Feasible (m, d) pairs in label order"
    )
