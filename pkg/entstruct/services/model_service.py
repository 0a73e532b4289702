"""Model file persistence.

Layout: one JSON header line (ModelHeader), then for each layer a ``# weight i rows cols``
line followed by ``rows`` comma-separated lines, and a ``# bias i size`` line followed by
one line of values. Values use the shortest round-trip float repr.
"""

from pathlib import Path

import numpy as np
from pydantic import ValidationError

from entstruct.core.exceptions import CompatibilityError, DatasetFormatError
from entstruct.core.logging import logger
from entstruct.ml.mlp import MlpModel
from entstruct.physics.structure import class_table, class_table_hash
from entstruct.schemas.training import ModelHeader


def _format_row(values: np.ndarray) -> str:
    return ",".join(repr(float(v)) for v in values)


class ModelService:
    """Service for saving and loading trained models."""

    def save(self, model: MlpModel, path: str | Path) -> str:
        """Write ``model`` to ``path`` and return the path."""
        output_path = Path(path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        header = ModelHeader(
            layer_dims=model.layer_dims,
            activations=model.activations,
            n=model.n,
            class_table_hash=class_table_hash(model.n),
            metadata=model.metadata,
        )

        with open(output_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(header.model_dump_json() + "\n")
            for i, (w, b) in enumerate(zip(model.weights, model.biases)):
                f.write(f"# weight {i} {w.shape[0]} {w.shape[1]}\n")
                for row in w:
                    f.write(_format_row(row) + "\n")
                f.write(f"# bias {i} {b.shape[0]}\n")
                f.write(_format_row(b) + "\n")

        logger.info("Saved model", extra={"path": str(output_path)})
        return str(output_path)

    def load(self, path: str | Path) -> MlpModel:
        """Read a model file.

        Raises:
            DatasetFormatError: On malformed content (context carries the line number)
            CompatibilityError: If the class table hash differs from the running code
        """
        input_path = Path(path)
        with open(input_path, encoding="utf-8") as f:
            lines = f.read().splitlines()
        if not lines:
            raise DatasetFormatError("Model file is empty", "MODEL_PARSE_ERROR",
                                     {"path": str(input_path), "line": 1})

        try:
            header = ModelHeader.model_validate_json(lines[0])
        except ValidationError as e:
            raise DatasetFormatError("Malformed model header", "MODEL_PARSE_ERROR",
                                     {"path": str(input_path), "line": 1}) from e

        if header.class_table_hash != class_table_hash(header.n) or \
                header.layer_dims[-1] != len(class_table(header.n)):
            raise CompatibilityError(
                "Model was trained against a different class table",
                "CLASS_TABLE_MISMATCH",
                {"n": header.n, "hash": header.class_table_hash}
            )

        cursor = 1
        weights: list[np.ndarray] = []
        biases: list[np.ndarray] = []
        try:
            for i, (fan_in, fan_out) in enumerate(
                zip(header.layer_dims[:-1], header.layer_dims[1:])
            ):
                if lines[cursor] != f"# weight {i} {fan_in} {fan_out}":
                    raise ValueError("unexpected weight marker")
                rows = [
                    [float(v) for v in lines[cursor + 1 + r].split(",")] for r in range(fan_in)
                ]
                cursor += 1 + fan_in
                if lines[cursor] != f"# bias {i} {fan_out}":
                    raise ValueError("unexpected bias marker")
                bias = [float(v) for v in lines[cursor + 1].split(",")]
                cursor += 2

                weight = np.array(rows)
                if weight.shape != (fan_in, fan_out) or len(bias) != fan_out:
                    raise ValueError("array shape does not match the header")
                weights.append(weight)
                biases.append(np.array(bias))
        except (ValueError, IndexError) as e:
            raise DatasetFormatError(
                f"Malformed model body near line {cursor + 1}: {e}",
                "MODEL_PARSE_ERROR",
                {"path": str(input_path), "line": cursor + 1}
            ) from e

        logger.info("Loaded model", extra={"path": str(input_path), "n": header.n})
        return MlpModel(header.layer_dims, weights, biases, header.n, header.metadata)
