"""Schema for the manifest written next to every command's outputs."""

from typing import Any

from pydantic import BaseModel, Field


class RunManifest(BaseModel):
    """Everything needed to rerun a command."""

    command: str
    parameters: dict[str, Any] = Field(description="Fully resolved parameters")
    inputs: dict[str, str] = Field(default_factory=dict)
    outputs: dict[str, str] = Field(default_factory=dict)
    master_seed: int | None = None
    tool_version: str
    duration_seconds: float = Field(ge=0.0)
    results: dict[str, Any] = Field(default_factory=dict)
