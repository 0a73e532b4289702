"""Multilayer perceptron classifier in numpy.

ReLU hidden layers, softmax output, mean cross-entropy with an optional L2 term
``weight_decay / 2 * sum ||W||^2`` (biases are not decayed). Weights are stored as
(fan_in, fan_out) so a batch goes through as ``X @ W + b``.
"""

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from entstruct.core.exceptions import DomainError, NumericIntegrityError

HIDDEN_ACTIVATION = "relu"
OUTPUT_ACTIVATION = "softmax"


@dataclass
class MlpModel:
    """Layer dimensions, parameters and training metadata."""

    layer_dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    n: int
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def class_count(self) -> int:
        return self.layer_dims[-1]

    @property
    def activations(self) -> list[str]:
        return [HIDDEN_ACTIVATION] * (len(self.layer_dims) - 2) + [OUTPUT_ACTIVATION]

    def parameters(self) -> list[np.ndarray]:
        """Parameter arrays in the fixed order W0, b0, W1, b1, ..."""
        params: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            params.extend((w, b))
        return params

    def copy(self) -> "MlpModel":
        return MlpModel(
            layer_dims=list(self.layer_dims),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            n=self.n,
            metadata=dict(self.metadata),
        )


@dataclass
class Gradients:
    """Gradients aligned with MlpModel.weights / MlpModel.biases."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    correct: int = 0  # batch rows whose argmax matched the label before the update

    def as_list(self) -> list[np.ndarray]:
        grads: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            grads.extend((w, b))
        return grads


def _validate_dims(layer_dims: list[int]) -> None:
    if len(layer_dims) < 2 or any(d < 1 for d in layer_dims):
        raise DomainError("Layer dimensions must be positive with at least two layers",
                          "INVALID_LAYER_DIMS", {"layer_dims": layer_dims})


def init(layer_dims: list[int], seed: int, n: int = 0) -> MlpModel:
    """He-initialized model: W ~ N(0, 2/fan_in), zero biases, deterministic per seed."""
    _validate_dims(layer_dims)
    rng = np.random.default_rng(seed)
    weights = [
        rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out))
        for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:])
    ]
    biases = [np.zeros(fan_out) for fan_out in layer_dims[1:]]
    return MlpModel(list(layer_dims), weights, biases, n, {"init_seed": seed})


def zeros(layer_dims: list[int], n: int = 0) -> MlpModel:
    """All-zero model; its softmax output is uniform."""
    _validate_dims(layer_dims)
    weights = [np.zeros((a, b)) for a, b in zip(layer_dims[:-1], layer_dims[1:])]
    biases = [np.zeros(b) for b in layer_dims[1:]]
    return MlpModel(list(layer_dims), weights, biases, n)


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _forward_cache(model: MlpModel, x: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    """Layer inputs (a_0 .. a_{L-1}) and the output logits."""
    inputs = [x]
    hidden = x
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = hidden @ w + b
        if i == last:
            return inputs, z
        hidden = np.maximum(z, 0.0)
        inputs.append(hidden)
    raise AssertionError("unreachable")


def _as_batch(model: MlpModel, x: np.ndarray) -> np.ndarray:
    batch = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if batch.shape[1] != model.layer_dims[0]:
        raise DomainError("Input width does not match the model",
                          "INPUT_DIMENSION_MISMATCH",
                          {"expected": model.layer_dims[0], "got": batch.shape[1]})
    if not np.all(np.isfinite(batch)):
        raise NumericIntegrityError("Model input contains non-finite values",
                                    "NON_FINITE_INPUT")
    return batch


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Class probabilities for one feature vector (shape (4,)) or a batch (k, 4).

    Raises:
        NumericIntegrityError: If the input has NaN or infinite entries
    """
    batch = _as_batch(model, x)
    _, logits = _forward_cache(model, batch)
    probs = np.exp(_log_softmax(logits))
    return probs[0] if np.ndim(x) == 1 else probs


def predict(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Argmax class index per row."""
    return np.argmax(forward(model, np.atleast_2d(x)), axis=1)


def loss_and_gradients(
    model: MlpModel,
    x: np.ndarray,
    labels: np.ndarray,
    weight_decay: float = 0.0,
) -> tuple[float, Gradients]:
    """Mean cross-entropy (+ L2 term) and its analytic gradients.

    Args:
        model: Model to differentiate
        x: (B, in) batch
        labels: (B,) integer class indices
        weight_decay: L2 coefficient

    Returns:
        Tuple of (loss, gradients)
    """
    batch = _as_batch(model, x)
    size = batch.shape[0]
    if size == 0:
        raise DomainError("Batch must not be empty", "EMPTY_BATCH")

    inputs, logits = _forward_cache(model, batch)
    log_probs = _log_softmax(logits)
    rows = np.arange(size)
    loss = -float(log_probs[rows, labels].mean())
    if weight_decay:
        loss += 0.5 * weight_decay * sum(float(np.sum(w * w)) for w in model.weights)

    delta = np.exp(log_probs)
    delta[rows, labels] -= 1.0
    delta /= size

    grad_w: list[np.ndarray] = [np.empty(0)] * len(model.weights)
    grad_b: list[np.ndarray] = [np.empty(0)] * len(model.weights)
    for i in range(len(model.weights) - 1, -1, -1):
        grad_w[i] = inputs[i].T @ delta + weight_decay * model.weights[i]
        grad_b[i] = delta.sum(axis=0)
        if i:
            delta = (delta @ model.weights[i].T) * (inputs[i] > 0.0)

    correct = int(np.sum(np.argmax(logits, axis=1) == labels))
    return loss, Gradients(grad_w, grad_b, correct)


class Adam:
    """Adaptive moment estimation over a fixed-order parameter list."""

    def __init__(
        self,
        params: list[np.ndarray],
        learning_rate: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        """Update ``params`` in place."""
        self.step_count += 1
        correction1 = 1.0 - self.beta1 ** self.step_count
        correction2 = 1.0 - self.beta2 ** self.step_count
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + self.eps)


class SGD:
    """Plain gradient descent."""

    def __init__(self, params: list[np.ndarray], learning_rate: float = 1e-2):
        self.learning_rate = learning_rate

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        for p, g in zip(params, grads):
            p -= self.learning_rate * g
