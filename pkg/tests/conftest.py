"""Pytest configuration and fixtures."""

import numpy as np
import pytest

from entstruct.core.config import get_settings
from entstruct.ml.mlp import init
from entstruct.physics.structure import class_table
from entstruct.services.dataset_service import DatasetService


@pytest.fixture(autouse=True)
def clear_settings_cache():
    """Every test sees settings built from its own environment."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    """Seeded random stream."""
    return np.random.default_rng(20240115)


@pytest.fixture
def small_dataset():
    """n=4 dataset with 12 records per composition (96 records)."""
    return DatasetService().generate(4, per_composition=12, master_seed=7, threads=1)


@pytest.fixture
def model_n4():
    """Untrained 4 -> 8 -> 5 classifier for n=4."""
    return init([4, 8, len(class_table(4))], seed=3, n=4)


@pytest.fixture
def measurement_csv(tmp_path):
    """Measurement file with one scored and one unscored record."""
    path = tmp_path / "measurements.csv"
    path.write_text(
        "state_id,n,mz,mx,az,ax,true_m,true_d\n"
        "ghz-1,4,1.0,1.0,0.2,0.1,1,4\n"
        "mixed-2,4,0.125,0.0,0.0,0.0,,\n",
        encoding="utf-8",
    )
    return path
