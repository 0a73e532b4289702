"""Dataset service - deterministic generation and the on-disk dataset format."""

import math
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed, effective_n_jobs
from pydantic import ValidationError

from entstruct.core.config import get_settings
from entstruct.core.exceptions import CompatibilityError, DatasetFormatError, DomainError
from entstruct.core.logging import logger
from entstruct.physics.features import FEATURE_NAMES, features_composed_batch
from entstruct.physics.seeds import SAMPLER_ID, SeedSampler
from entstruct.physics.structure import class_table, enumerate_compositions, label_of
from entstruct.schemas.dataset import DATASET_FORMAT_VERSION, DatasetMetadata

TRAIN, VALIDATION, TEST = 0, 1, 2
SPLIT_CODES = {"train": TRAIN, "validation": VALIDATION, "test": TEST}
RECORD_COLUMNS = ("split", "composition_id", *FEATURE_NAMES, "label")


@dataclass(frozen=True)
class LabeledSet:
    """Feature rows and their class indices."""

    features: np.ndarray
    labels: np.ndarray

    def __len__(self) -> int:
        return int(self.labels.shape[0])


@dataclass(frozen=True)
class Dataset:
    """Labeled feature records for one qubit count, in generation order."""

    metadata: DatasetMetadata
    features: np.ndarray
    labels: np.ndarray
    splits: np.ndarray
    composition_ids: np.ndarray

    @property
    def n(self) -> int:
        return self.metadata.n

    @property
    def class_table(self) -> list[tuple[int, int]]:
        return self.metadata.class_table

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def split(self, name: str) -> LabeledSet:
        """Records of one split: ``train``, ``validation`` or ``test``."""
        if name not in SPLIT_CODES:
            raise DomainError(f"Unknown split {name!r}", "UNKNOWN_SPLIT",
                              {"split": name, "known": list(SPLIT_CODES)})
        mask = self.splits == SPLIT_CODES[name]
        return LabeledSet(self.features[mask], self.labels[mask])

    def split_sizes(self) -> dict[str, int]:
        return {name: int(np.sum(self.splits == code)) for name, code in SPLIT_CODES.items()}

    def records(self) -> Iterator[tuple[int, int, float, float, float, float, int]]:
        """(split, composition_id, mz, mx, az, ax, label) per record."""
        for split, cid, row, label in zip(
            self.splits, self.composition_ids, self.features, self.labels
        ):
            yield (int(split), int(cid), *(float(v) for v in row), int(label))

    def sorted_records(self) -> list[tuple[int, int, float, float, float, float, int]]:
        return sorted(self.records())


def split_counts(per_composition: int) -> tuple[int, int, int]:
    """(train, validation, test) = (floor(2k/3), floor(k/6), remainder)."""
    train = (2 * per_composition) // 3
    validation = per_composition // 6
    return train, validation, per_composition - train - validation


def split_assignment(per_composition: int) -> np.ndarray:
    """Split code per sample index: train first, then validation, then test."""
    train, validation, test = split_counts(per_composition)
    return np.repeat(np.array([TRAIN, VALIDATION, TEST], dtype=np.int64),
                     [train, validation, test])


def generate_chunk(
    n: int,
    composition_index: int,
    master_seed: int,
    start: int,
    stop: int,
    attempt_cap: int,
) -> np.ndarray:
    """Features of samples ``start..stop-1`` of one composition.

    Sample s draws from its own stream seeded by (master_seed, composition_index, s),
    so the output does not depend on how samples are chunked or scheduled.
    """
    composition = enumerate_compositions(n)[composition_index]
    samplers = {size: SeedSampler(size, attempt_cap) for size in set(composition.blocks)}
    count = stop - start
    alphas = np.empty((count, len(composition.blocks)))
    betas = np.empty_like(alphas)

    for row, sample_index in enumerate(range(start, stop)):
        rng = np.random.default_rng([master_seed, composition_index, sample_index])
        for col, size in enumerate(composition.blocks):
            params = samplers[size].sample(rng)
            alphas[row, col] = params.alpha
            betas[row, col] = params.beta

    return features_composed_batch(n, composition, alphas, betas)


class DatasetService:
    """Service for generating, saving and loading labeled datasets."""

    def __init__(self):
        """Initialize the dataset service."""
        self.settings = get_settings()

    def resolve_threads(self, threads: int | None = None) -> int:
        """Worker count actually used: the argument, then settings, then every core."""
        return effective_n_jobs(threads or self.settings.threads or -1)

    def generate(
        self,
        n: int,
        per_composition: int | None = None,
        master_seed: int = 0,
        threads: int | None = None,
    ) -> Dataset:
        """Generate per_composition records for every composition of n.

        Args:
            n: Qubit count (>= 2)
            per_composition: Records per composition (>= 6), default from settings
            master_seed: Non-negative seed all record streams derive from
            threads: Worker count; output is identical for any value

        Returns:
            Dataset in (composition, sample) order

        Raises:
            DomainError: If any parameter is out of range
        """
        if per_composition is None:
            per_composition = self.settings.per_composition
        if n < 2 or per_composition < 6 or master_seed < 0:
            raise DomainError(
                "Dataset generation requires n >= 2, per_composition >= 6, seed >= 0",
                "INVALID_DATASET_PARAMS",
                {"n": n, "per_composition": per_composition, "master_seed": master_seed}
            )

        compositions = enumerate_compositions(n)
        chunk = self.settings.generation_chunk_size
        jobs = [
            (index, start, min(start + chunk, per_composition))
            for index in range(len(compositions))
            for start in range(0, per_composition, chunk)
        ]
        n_jobs = self.resolve_threads(threads)

        logger.info(
            "Generating dataset",
            extra={
                "n": n,
                "compositions": len(compositions),
                "per_composition": per_composition,
                "master_seed": master_seed,
                "chunks": len(jobs),
                "n_jobs": n_jobs
            }
        )

        # Parallel returns results in submission order regardless of scheduling
        chunks = Parallel(n_jobs=n_jobs)(
            delayed(generate_chunk)(
                n, index, master_seed, start, stop, self.settings.sampler_attempt_cap
            )
            for index, start, stop in jobs
        )

        features = np.concatenate(chunks, axis=0)
        labels = np.repeat(
            np.array([label_of(c).class_index for c in compositions], dtype=np.int64),
            per_composition,
        )
        composition_ids = np.repeat(np.arange(len(compositions), dtype=np.int64),
                                    per_composition)
        splits = np.tile(split_assignment(per_composition), len(compositions))

        metadata = DatasetMetadata(
            n=n,
            master_seed=master_seed,
            per_composition=per_composition,
            sampler=SAMPLER_ID,
            class_table=list(class_table(n)),
        )
        dataset = Dataset(metadata, features, labels, splits, composition_ids)

        logger.info(
            "Dataset generated",
            extra={"records": len(dataset), "splits": dataset.split_sizes()}
        )
        return dataset

    def save(self, dataset: Dataset, path: str | Path) -> str:
        """Write the metadata line, the column header and one line per record.

        Floats use Python's shortest round-trip repr (at most 17 significant digits).
        """
        output_path = Path(path)
        output_path.parent.mkdir(parents=True, exist_ok=True)

        with open(output_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(dataset.metadata.model_dump_json() + "\n")
            f.write(",".join(RECORD_COLUMNS) + "\n")
            for split, cid, mz, mx, az, ax, label in dataset.records():
                f.write(f"{split},{cid},{mz!r},{mx!r},{az!r},{ax!r},{label}\n")

        logger.info(
            "Saved dataset",
            extra={"path": str(output_path), "records": len(dataset)}
        )
        return str(output_path)

    def load(self, path: str | Path) -> Dataset:
        """Parse a dataset file.

        Raises:
            DatasetFormatError: On any malformed line (context carries the line number)
            CompatibilityError: If the file's class table or format differs from this code
        """
        input_path = Path(path)
        with open(input_path, encoding="utf-8") as f:
            lines = f.read().split("\n")
        if lines and lines[-1] == "":
            lines.pop()

        metadata = self._parse_metadata(lines, input_path)
        n = metadata.n
        compositions = enumerate_compositions(n)
        expected_labels = [label_of(c).class_index for c in compositions]

        if len(lines) < 2 or lines[1] != ",".join(RECORD_COLUMNS):
            raise DatasetFormatError(
                "Missing or malformed column header",
                "DATASET_PARSE_ERROR",
                {"path": str(input_path), "line": 2}
            )

        body = lines[2:]
        features = np.empty((len(body), len(FEATURE_NAMES)))
        labels = np.empty(len(body), dtype=np.int64)
        splits = np.empty(len(body), dtype=np.int64)
        composition_ids = np.empty(len(body), dtype=np.int64)

        for row, text in enumerate(body):
            line_number = row + 3
            split, cid, values, label = self._parse_record(text, line_number, input_path)
            if split not in (TRAIN, VALIDATION, TEST) or not 0 <= cid < len(compositions):
                raise DatasetFormatError(
                    "Split code or composition id out of range",
                    "DATASET_PARSE_ERROR",
                    {"path": str(input_path), "line": line_number}
                )
            if label != expected_labels[cid]:
                raise DatasetFormatError(
                    "Label does not match the composition",
                    "DATASET_PARSE_ERROR",
                    {"path": str(input_path), "line": line_number, "label": label}
                )
            features[row] = values
            labels[row] = label
            splits[row] = split
            composition_ids[row] = cid

        expected = len(compositions) * metadata.per_composition
        if len(body) != expected:
            raise DatasetFormatError(
                f"Expected {expected} records, found {len(body)}",
                "RECORD_COUNT_MISMATCH",
                {"path": str(input_path), "line": len(lines) + 1}
            )

        per_split = np.bincount(composition_ids * 3 + splits,
                                minlength=3 * len(compositions)).reshape(-1, 3)
        wanted = np.array(split_counts(metadata.per_composition))
        mismatched = np.flatnonzero(np.any(per_split != wanted, axis=1))
        if mismatched.size:
            cid = int(mismatched[0])
            raise DatasetFormatError(
                f"Composition {cid} has split sizes {per_split[cid].tolist()}, "
                f"expected {wanted.tolist()}",
                "SPLIT_COUNT_MISMATCH",
                {"path": str(input_path), "composition_id": cid,
                 "found": per_split[cid].tolist(), "expected": wanted.tolist()}
            )

        logger.info(
            "Loaded dataset",
            extra={"path": str(input_path), "n": n, "records": len(body)}
        )
        return Dataset(metadata, features, labels, splits, composition_ids)

    def _parse_metadata(self, lines: list[str], path: Path) -> DatasetMetadata:
        if not lines:
            raise DatasetFormatError("Dataset file is empty", "DATASET_PARSE_ERROR",
                                     {"path": str(path), "line": 1})
        try:
            metadata = DatasetMetadata.model_validate_json(lines[0])
        except ValidationError as e:
            raise DatasetFormatError(
                f"Malformed metadata header: {e.error_count()} error(s)",
                "DATASET_PARSE_ERROR",
                {"path": str(path), "line": 1, "error": str(e)}
            ) from e

        if metadata.format_version != DATASET_FORMAT_VERSION or metadata.sampler != SAMPLER_ID:
            raise CompatibilityError(
                "Dataset was written by an incompatible format or sampler",
                "DATASET_FORMAT_MISMATCH",
                {"format_version": metadata.format_version, "sampler": metadata.sampler}
            )
        if metadata.class_table != list(class_table(metadata.n)):
            raise CompatibilityError(
                "Dataset class table differs from the running code",
                "CLASS_TABLE_MISMATCH",
                {"n": metadata.n}
            )
        return metadata

    def _parse_record(
        self,
        text: str,
        line_number: int,
        path: Path,
    ) -> tuple[int, int, list[float], int]:
        fields = text.split(",")
        try:
            if len(fields) != len(RECORD_COLUMNS):
                raise ValueError(f"expected {len(RECORD_COLUMNS)} fields, got {len(fields)}")
            values = [float(v) for v in fields[2:6]]
            if not all(math.isfinite(v) for v in values):
                raise ValueError("non-finite feature value")
            return int(fields[0]), int(fields[1]), values, int(fields[6])
        except ValueError as e:
            raise DatasetFormatError(
                f"Malformed record on line {line_number}: {e}",
                "DATASET_PARSE_ERROR",
                {"path": str(path), "line": line_number}
            ) from e
