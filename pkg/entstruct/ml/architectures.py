"""Architecture and hyperparameter presets per qubit count."""

from entstruct.core.config import get_settings
from entstruct.core.exceptions import DomainError
from entstruct.physics.features import FEATURE_NAMES
from entstruct.physics.structure import class_table
from entstruct.schemas.training import TrainConfig

MIN_QUBITS = 4
MAX_QUBITS = 12
GHZ_ANCHOR_FRACTION = 0.25


def _check_range(n: int) -> None:
    if not MIN_QUBITS <= n <= MAX_QUBITS:
        raise DomainError(
            f"Architecture presets cover {MIN_QUBITS} <= n <= {MAX_QUBITS}",
            "UNSUPPORTED_QUBIT_COUNT",
            {"n": n}
        )


def base_epochs(n: int) -> int:
    """500 epochs at n=4, growing linearly to 996 at n=12."""
    return 500 + 62 * (n - 4)


def build_base_config(n: int, seed: int = 0) -> tuple[list[int], TrainConfig]:
    """Deep model for the random-state dataset.

    Hidden depth clamp(n - 2, 2, 6), width min(2^(n+1), 512); the final epoch is kept.
    """
    _check_range(n)
    settings = get_settings()
    depth = min(max(n - 2, 2), 6)
    width = min(2 ** (n + 1), 512)
    layer_dims = [len(FEATURE_NAMES)] + [width] * depth + [len(class_table(n))]
    config = TrainConfig(
        epochs=base_epochs(n),
        batch_size=settings.batch_size,
        learning_rate=settings.learning_rate,
        weight_decay=0.0,
        seed=seed,
        selection="final",
        selection_set="random-validation",
    )
    return layer_dims, config


def build_ghz_config(n: int, seed: int = 0) -> tuple[list[int], TrainConfig]:
    """Single hidden layer of 2^(n+1) units, weight decay 0.1^(n-1), selected on the
    noised-GHZ sweep-validation set.

    The training split is anchored with noised-GHZ points whose intactness the analytic
    bounds decide (a quarter of the split's size).
    """
    _check_range(n)
    settings = get_settings()
    layer_dims = [len(FEATURE_NAMES), 2 ** (n + 1), len(class_table(n))]
    config = TrainConfig(
        epochs=base_epochs(n),
        batch_size=settings.batch_size,
        learning_rate=settings.learning_rate,
        weight_decay=0.1 ** (n - 1),
        seed=seed,
        selection="best-validation",
        selection_set="sweep-validation",
        anchor_fraction=GHZ_ANCHOR_FRACTION,
    )
    return layer_dims, config
