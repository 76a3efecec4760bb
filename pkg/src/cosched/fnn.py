"""The slowdown predictor: a 40-18-18-1 ReLU network built from first principles.

Forward pass, backpropagation, mini-batch SGD, and a versioned JSON weight
format.  No autodiff framework: the network is tiny and fixed, and the
gradients are checked against finite differences in the test suite.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import INPUT_DIM, NUM_FEATURES, ValidationError

HIDDEN_DIM = 18
WEIGHTS_FORMAT_VERSION = 1


class TrainingDivergedError(RuntimeError):
    """Raised when the training loss stops being finite."""

    def __init__(self, epoch: int):
        super().__init__(f"training loss became non-finite at epoch {epoch}")
        self.epoch = epoch


def _check_matrix(name: str, arr: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if arr.shape != shape:
        raise ValidationError(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class NetworkWeights:
    """Dense layer parameters plus the input normalization maxima.

    The feature bounds travel with the weights so inference always applies
    the exact scaling the network was trained with.
    """

    w1: np.ndarray  # (18, 40)
    b1: np.ndarray  # (18,)
    w2: np.ndarray  # (18, 18)
    b2: np.ndarray  # (18,)
    w_out: np.ndarray  # (1, 18)
    b_out: np.ndarray  # (1,)
    feature_bounds: np.ndarray  # (36,)

    def __post_init__(self) -> None:
        object.__setattr__(self, "w1", _check_matrix("layer_1 weights", self.w1, (HIDDEN_DIM, INPUT_DIM)))
        object.__setattr__(self, "b1", _check_matrix("layer_1 biases", self.b1, (HIDDEN_DIM,)))
        object.__setattr__(self, "w2", _check_matrix("layer_2 weights", self.w2, (HIDDEN_DIM, HIDDEN_DIM)))
        object.__setattr__(self, "b2", _check_matrix("layer_2 biases", self.b2, (HIDDEN_DIM,)))
        object.__setattr__(self, "w_out", _check_matrix("output weights", self.w_out, (1, HIDDEN_DIM)))
        object.__setattr__(self, "b_out", _check_matrix("output biases", self.b_out, (1,)))
        object.__setattr__(self, "feature_bounds",
                           _check_matrix("feature_bounds", self.feature_bounds, (2 * NUM_FEATURES,)))
        if np.any(self.feature_bounds <= 0):
            raise ValidationError("feature_bounds entries must be > 0")


@dataclass(frozen=True)
class TrainingConfig:
    """SGD hyperparameters; defaults follow the standard training recipe."""

    learning_rate: float = 0.001
    batch_size: int = 4
    epochs: int = 200
    seed: int = 0
    validation_fraction: float = 0.2

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValidationError("validation_fraction must be in (0, 1)")


@dataclass(frozen=True)
class LabeledSample:
    """One normalized 40-vector input and its slowdown target."""

    input: np.ndarray
    target: float

    def __post_init__(self) -> None:
        x = np.asarray(self.input, dtype=float)
        if x.shape != (INPUT_DIM,):
            raise ValidationError(f"sample input must have {INPUT_DIM} entries, got {x.shape}")
        x = x.copy()
        x.setflags(write=False)
        object.__setattr__(self, "input", x)
        if not np.isfinite(self.target):
            raise ValidationError("sample target must be finite")


@dataclass
class Gradients:
    """Parameter gradients, congruent with NetworkWeights."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w_out: np.ndarray
    b_out: np.ndarray


def initialize_weights(seed: int, feature_bounds: np.ndarray) -> NetworkWeights:
    """Glorot-uniform weight initialization, fully seeded.

    Hidden biases start at zero.  The output bias starts at 1.0, the
    no-slowdown baseline: targets are always >= 1, and a zero start can
    leave the output ReLU dead (zero gradient) for unlucky seeds.
    """
    rng = np.random.default_rng(seed)

    def glorot(fan_out: int, fan_in: int) -> np.ndarray:
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=(fan_out, fan_in))

    return NetworkWeights(
        w1=glorot(HIDDEN_DIM, INPUT_DIM),
        b1=np.zeros(HIDDEN_DIM),
        w2=glorot(HIDDEN_DIM, HIDDEN_DIM),
        b2=np.zeros(HIDDEN_DIM),
        w_out=glorot(1, HIDDEN_DIM),
        b_out=np.ones(1),
        feature_bounds=feature_bounds,
    )


def forward(weights: NetworkWeights, x: np.ndarray) -> float:
    """Evaluate the network on one input vector.

    ReLU is applied to both hidden layers and to the output, so the
    prediction is always >= 0.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (INPUT_DIM,):
        raise ValidationError(f"input must have {INPUT_DIM} entries, got {x.shape}")
    if not np.all(np.isfinite(x)):
        bad = int(np.flatnonzero(~np.isfinite(x))[0])
        raise ValidationError(f"input entry {bad} is not finite")
    return float(forward_batch(weights, x[np.newaxis, :])[0])


def forward_batch(weights: NetworkWeights, X: np.ndarray) -> np.ndarray:
    """Vectorized forward pass over a (batch, 40) matrix."""
    a1 = np.maximum(X @ weights.w1.T + weights.b1, 0.0)
    a2 = np.maximum(a1 @ weights.w2.T + weights.b2, 0.0)
    return np.maximum(a2 @ weights.w_out.T + weights.b_out, 0.0)[:, 0]


def _stack(batch: Sequence[LabeledSample]) -> tuple[np.ndarray, np.ndarray]:
    X = np.stack([s.input for s in batch])
    t = np.array([s.target for s in batch], dtype=float)
    return X, t


def backward(weights: NetworkWeights, batch: Sequence[LabeledSample]) -> tuple[Gradients, float]:
    """Gradients of the batch mean squared error, plus the loss itself.

    The ReLU subgradient at exactly 0 is taken as 0.
    """
    if len(batch) == 0:
        raise ValidationError("backward needs a nonempty batch")
    X, t = _stack(batch)
    n = len(batch)

    z1 = X @ weights.w1.T + weights.b1
    a1 = np.maximum(z1, 0.0)
    z2 = a1 @ weights.w2.T + weights.b2
    a2 = np.maximum(z2, 0.0)
    z3 = a2 @ weights.w_out.T + weights.b_out  # (n, 1)
    y = np.maximum(z3, 0.0)[:, 0]

    loss = float(np.mean((y - t) ** 2))

    dy = (2.0 / n) * (y - t)  # (n,)
    dz3 = (dy * (z3[:, 0] > 0.0))[:, np.newaxis]  # (n, 1)
    dw_out = dz3.T @ a2
    db_out = dz3.sum(axis=0)

    da2 = dz3 @ weights.w_out
    dz2 = da2 * (z2 > 0.0)
    dw2 = dz2.T @ a1
    db2 = dz2.sum(axis=0)

    da1 = dz2 @ weights.w2
    dz1 = da1 * (z1 > 0.0)
    dw1 = dz1.T @ X
    db1 = dz1.sum(axis=0)

    return Gradients(w1=dw1, b1=db1, w2=dw2, b2=db2, w_out=dw_out, b_out=db_out), loss


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_mse: float
    val_mse: float


def split_dataset(
    dataset: Sequence[LabeledSample], cfg: TrainingConfig
) -> tuple[list[LabeledSample], list[LabeledSample]]:
    """Seeded shuffle split into (train, validation) lists.

    The validation part may be empty for very small datasets.
    """
    rng = np.random.default_rng([cfg.seed, 0])
    order = rng.permutation(len(dataset))
    n_val = int(len(dataset) * cfg.validation_fraction)
    val_idx = order[:n_val]
    train_idx = order[n_val:]
    return [dataset[i] for i in train_idx], [dataset[i] for i in val_idx]


def epoch_batch_order(cfg: TrainingConfig, n_train: int, epoch: int) -> np.ndarray:
    """The deterministic sample permutation used for one training epoch."""
    rng = np.random.default_rng([cfg.seed, 1 + epoch])
    return rng.permutation(n_train)


def _mse(weights: NetworkWeights, samples: Sequence[LabeledSample]) -> float:
    if not samples:
        return float("nan")
    X, t = _stack(samples)
    return float(np.mean((forward_batch(weights, X) - t) ** 2))


def sgd_step(weights: NetworkWeights, grads: Gradients, lr: float) -> NetworkWeights:
    """One plain SGD update; returns fresh weights (inputs untouched)."""
    return NetworkWeights(
        w1=weights.w1 - lr * grads.w1,
        b1=weights.b1 - lr * grads.b1,
        w2=weights.w2 - lr * grads.w2,
        b2=weights.b2 - lr * grads.b2,
        w_out=weights.w_out - lr * grads.w_out,
        b_out=weights.b_out - lr * grads.b_out,
        feature_bounds=weights.feature_bounds,
    )


def train(
    dataset: Sequence[LabeledSample],
    cfg: TrainingConfig,
    feature_bounds: np.ndarray | None = None,
) -> tuple[NetworkWeights, list[EpochStats]]:
    """Mini-batch SGD training; bit-reproducible for a fixed seed.

    The dataset is split into train/validation by a seeded shuffle.  Each
    epoch shuffles the training part (seeded from cfg.seed and the epoch
    index), walks it in batches of ``cfg.batch_size``, and applies one SGD
    step per batch.  The reported per-epoch train MSE averages the batch
    losses as they were seen (before each update); the validation MSE is
    computed once at the end of the epoch.

    Args:
        feature_bounds: normalization maxima to embed in the returned
            weights; defaults to all-ones when the caller manages scaling
            separately.

    Raises:
        TrainingDivergedError: When a batch loss stops being finite; the
            exception carries the epoch index.
    """
    if len(dataset) == 0:
        raise ValidationError("training dataset must be nonempty")
    if feature_bounds is None:
        feature_bounds = np.ones(2 * NUM_FEATURES)

    train_set, val_set = split_dataset(dataset, cfg)
    if not train_set:
        raise ValidationError("validation_fraction leaves no training samples")

    weights = initialize_weights(cfg.seed, feature_bounds)
    history: list[EpochStats] = []
    for epoch in range(cfg.epochs):
        order = epoch_batch_order(cfg, len(train_set), epoch)
        batch_losses = []
        for start in range(0, len(order), cfg.batch_size):
            batch = [train_set[i] for i in order[start:start + cfg.batch_size]]
            grads, loss = backward(weights, batch)
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch)
            batch_losses.append(loss)
            weights = sgd_step(weights, grads, cfg.learning_rate)
        history.append(EpochStats(
            epoch=epoch,
            train_mse=float(np.mean(batch_losses)),
            val_mse=_mse(weights, val_set),
        ))
    return weights, history


def save_weights(weights: NetworkWeights, path) -> None:
    """Write the versioned JSON weight document."""
    doc = {
        "version": WEIGHTS_FORMAT_VERSION,
        "input_dim": INPUT_DIM,
        "hidden_dim": HIDDEN_DIM,
        "layer_1": {"weights": weights.w1.tolist(), "biases": weights.b1.tolist()},
        "layer_2": {"weights": weights.w2.tolist(), "biases": weights.b2.tolist()},
        "output": {"weights": weights.w_out.tolist(), "biases": weights.b_out.tolist()},
        "feature_bounds": weights.feature_bounds.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_weights(path) -> NetworkWeights:
    """Load and validate a weight document; lossless inverse of save_weights.

    Raises:
        ValidationError: On version or dimension mismatch or non-finite
            entries; the message names the offending field.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ValidationError(f"weights file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"weights file {path} must hold a JSON object")
    version = doc.get("version")
    if version != WEIGHTS_FORMAT_VERSION:
        raise ValidationError(
            f"unsupported weights format version {version!r} (expected {WEIGHTS_FORMAT_VERSION})")
    try:
        return NetworkWeights(
            w1=np.asarray(doc["layer_1"]["weights"], dtype=float),
            b1=np.asarray(doc["layer_1"]["biases"], dtype=float),
            w2=np.asarray(doc["layer_2"]["weights"], dtype=float),
            b2=np.asarray(doc["layer_2"]["biases"], dtype=float),
            w_out=np.asarray(doc["output"]["weights"], dtype=float),
            b_out=np.asarray(doc["output"]["biases"], dtype=float),
            feature_bounds=np.asarray(doc["feature_bounds"], dtype=float),
        )
    except KeyError as exc:
        raise ValidationError(f"weights file {path} is missing field {exc}") from exc
    except ValueError as exc:
        # Ragged nested lists fail ndarray conversion.
        raise ValidationError(f"weights file {path} has a malformed array: {exc}") from exc


def write_loss_csv(history: Sequence[EpochStats], path) -> None:
    """Training log: one row per epoch."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_mse", "val_mse"])
        for row in history:
            writer.writerow([row.epoch, repr(row.train_mse), repr(row.val_mse)])
