"""Training service - epoch loop, model selection and evaluation."""

import math
from dataclasses import dataclass

import numpy as np

from entstruct.core.exceptions import CompatibilityError, DomainError, TrainingDivergenceError
from entstruct.core.logging import log_with_context, logger
from entstruct.ml.mlp import SGD, Adam, MlpModel, forward, loss_and_gradients
from entstruct.schemas.training import EpochRecord, TrainConfig
from entstruct.services.dataset_service import Dataset, LabeledSet


@dataclass
class TrainResult:
    """Selected model plus the per-epoch history."""

    model: MlpModel
    history: list[EpochRecord]
    selected_epoch: int


def evaluate(model: MlpModel, records: LabeledSet) -> float:
    """Fraction of records whose argmax prediction equals the label.

    Raises:
        DomainError: If the record set is empty
    """
    if len(records) == 0:
        raise DomainError("Cannot evaluate on an empty record set", "EMPTY_RECORD_SET")
    predictions = np.argmax(forward(model, records.features), axis=1)
    return float(np.mean(predictions == records.labels))


def with_anchors(train_set: LabeledSet, anchors: LabeledSet, fraction: float) -> LabeledSet:
    """``train_set`` plus whole copies of ``anchors`` totalling about
    ``fraction * len(train_set)`` records (at least one copy)."""
    copies = max(1, math.ceil(fraction * len(train_set) / len(anchors)))
    return LabeledSet(
        np.concatenate([train_set.features, np.tile(anchors.features, (copies, 1))]),
        np.concatenate([train_set.labels, np.tile(anchors.labels, copies)]),
    )


def _data_loss(model: MlpModel, records: LabeledSet) -> float:
    probs = forward(model, records.features)
    picked = probs[np.arange(len(records)), records.labels]
    return float(-np.mean(np.log(np.maximum(picked, np.finfo(np.float64).tiny))))


class TrainingService:
    """Service for fitting MLP classifiers."""

    def train(
        self,
        model: MlpModel,
        train_set: LabeledSet,
        config: TrainConfig,
        validation: LabeledSet | None = None,
    ) -> TrainResult:
        """Mini-batch training for ``config.epochs`` epochs.

        The model is trained in place; with ``selection="best-validation"`` the
        returned model is a snapshot from the epoch of highest validation accuracy
        (earliest on ties).

        Args:
            model: Initialized model, mutated by training
            train_set: Training records
            config: Hyperparameters and selection rule
            validation: Records for per-epoch validation metrics and selection

        Returns:
            TrainResult with the selected model and full history

        Raises:
            DomainError: If best-validation selection is requested without a validation set
            TrainingDivergenceError: If the loss becomes non-finite
        """
        if len(train_set) == 0:
            raise DomainError("Training set is empty", "EMPTY_RECORD_SET")
        if config.selection == "best-validation" and (validation is None or len(validation) == 0):
            raise DomainError("Best-validation selection needs a validation set",
                              "MISSING_VALIDATION_SET")

        params = model.parameters()
        optimizer: Adam | SGD
        if config.optimizer == "adam":
            optimizer = Adam(params, learning_rate=config.learning_rate)
        else:
            optimizer = SGD(params, learning_rate=config.learning_rate)

        rng = np.random.default_rng(config.seed)
        size = len(train_set)
        history: list[EpochRecord] = []
        best_acc = -1.0
        best_model = model
        selected_epoch = config.epochs

        logger.info(
            "Starting training",
            extra={
                "layer_dims": model.layer_dims,
                "records": size,
                "epochs": config.epochs,
                "weight_decay": config.weight_decay,
                "selection": config.selection
            }
        )

        for epoch in range(1, config.epochs + 1):
            order = rng.permutation(size)
            loss_sum = 0.0
            correct = 0
            for batch_number, start in enumerate(range(0, size, config.batch_size)):
                index = order[start:start + config.batch_size]
                x = train_set.features[index]
                y = train_set.labels[index]
                loss, grads = loss_and_gradients(model, x, y, config.weight_decay)
                if not math.isfinite(loss):
                    raise TrainingDivergenceError(
                        "Training loss became non-finite",
                        "TRAINING_DIVERGED",
                        {"epoch": epoch, "batch": batch_number, "loss": loss}
                    )
                optimizer.step(params, grads.as_list())
                loss_sum += loss * len(index)
                correct += grads.correct

            record = EpochRecord(
                epoch=epoch,
                train_loss=loss_sum / size,
                train_acc=correct / size,
            )
            if validation is not None and len(validation):
                record.val_loss = _data_loss(model, validation)
                record.val_acc = evaluate(model, validation)
                if config.selection == "best-validation" and record.val_acc > best_acc:
                    best_acc = record.val_acc
                    best_model = model.copy()
                    selected_epoch = epoch
            history.append(record)

            log_with_context("debug", "Epoch finished", **record.model_dump())

        selected = best_model if config.selection == "best-validation" else model
        selected.metadata.update({
            "epochs_run": config.epochs,
            "selected_epoch": selected_epoch,
            "seed": config.seed,
            "weight_decay": config.weight_decay,
            "optimizer": config.optimizer,
            "learning_rate": config.learning_rate,
            "batch_size": config.batch_size,
            "selection": config.selection,
            "selection_set": config.selection_set,
        })

        logger.info(
            "Training finished",
            extra={
                "selected_epoch": selected_epoch,
                "final_train_acc": history[-1].train_acc,
                "final_val_acc": history[-1].val_acc
            }
        )
        return TrainResult(selected, history, selected_epoch)

    def train_on_dataset(
        self,
        model: MlpModel,
        dataset: Dataset,
        config: TrainConfig,
        sweep_validation: LabeledSet | None = None,
        anchors: LabeledSet | None = None,
    ) -> TrainResult:
        """Train on the dataset's train split.

        The validation set is the dataset's validation split, or ``sweep_validation``
        when ``config.selection_set == "sweep-validation"``. With
        ``config.anchor_fraction > 0`` the ``anchors`` records are tiled into the
        training split until they make up about that fraction of its size.

        Raises:
            CompatibilityError: If the model was built for a different class table
            DomainError: If a required validation or anchor set is missing
        """
        if model.class_count != len(dataset.class_table) or model.n != dataset.n:
            raise CompatibilityError(
                "Model output does not match the dataset class table",
                "CLASS_TABLE_MISMATCH",
                {"model_n": model.n, "dataset_n": dataset.n,
                 "model_classes": model.class_count, "dataset_classes": len(dataset.class_table)}
            )

        if config.selection_set == "sweep-validation":
            if sweep_validation is None:
                raise DomainError("Sweep-validation selection needs a sweep validation set",
                                  "MISSING_VALIDATION_SET")
            validation = sweep_validation
        else:
            validation = dataset.split("validation")

        train_set = dataset.split("train")
        if config.anchor_fraction > 0:
            if anchors is None or len(anchors) == 0:
                raise DomainError("Anchored training needs a non-empty anchor set",
                                  "MISSING_ANCHOR_SET",
                                  {"anchor_fraction": config.anchor_fraction})
            train_set = with_anchors(train_set, anchors, config.anchor_fraction)

        return self.train(model, train_set, config, validation)
