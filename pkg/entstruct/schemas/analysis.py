"""Schemas for sweep reports, bound reports and measurement ingestion."""

from pydantic import BaseModel, Field


class MeasurementRecord(BaseModel):
    """One measured (or simulated) feature vector with optional ground truth."""

    state_id: str = Field(min_length=1)
    n: int = Field(ge=2)
    mz: float = Field(allow_inf_nan=False)
    mx: float = Field(allow_inf_nan=False)
    az: float = Field(allow_inf_nan=False)
    ax: float = Field(allow_inf_nan=False)
    true_m: int | None = Field(default=None, ge=1)
    true_d: int | None = Field(default=None, ge=1)


class MeasurementPrediction(BaseModel):
    """Predicted structure of one measurement record."""

    state_id: str
    n: int
    pred_m: int
    pred_d: int
    true_m: int | None = None
    true_d: int | None = None

    @property
    def intactness_correct(self) -> bool | None:
        return None if self.true_m is None else self.pred_m == self.true_m

    @property
    def depth_over_predicted(self) -> bool | None:
        return None if self.true_d is None else self.pred_d > self.true_d


class BoundEntry(BaseModel):
    """Learned and analytic bounds for one k."""

    k: int
    intactness_bound: float | None = Field(default=None, ge=0.0, le=1.0)
    depth_bound: float | None = Field(default=None, ge=0.0, le=1.0)
    analytic_bound: float | None = Field(default=None, ge=0.0, le=1.0)
    analytic_depth_bound: float | None = Field(default=None, ge=0.0, le=1.0)


class BoundReport(BaseModel):
    """Bounds extracted from a noised-GHZ sweep."""

    n: int
    entries: list[BoundEntry]
    monotone_intactness: bool = Field(
        description="Predicted intactness is nonincreasing in p over the sweep"
    )
    monotone_depth: bool = Field(description="Predicted depth is nondecreasing in p")

    def entry(self, k: int) -> BoundEntry:
        return self.entries[k - 1]


class BoundComparison(BaseModel):
    """Learned vs analytic intactness bound for one k."""

    k: int
    learned: float | None
    analytic: float
    difference: float | None
    within_tolerance: bool
