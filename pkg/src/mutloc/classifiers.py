"""Statistical classifiers over kill-matrix rows.

Each mutant's kill row is a 0-1 feature vector (1 = test kills/fails)
labelled with the method the mutant lives in.  A multinomial logistic
regression or a one-hidden-layer MLP is trained on those rows; serving a
live failure means encoding the observed test results as the same kind
of 0-1 vector and reading the softmax class distribution as per-method
suspiciousness.

Training is full-batch Adam on the softmax cross-entropy, deterministic
for a given seed.  The MLP hidden activation defaults to ReLU and can be
switched to tanh via :class:`TrainConfig`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    EmptyDataset,
    FormatError,
    InvalidConfig,
    InvalidObservation,
    ShapeError,
)
from .matrix import FailureObservation, KillMatrix
from .ranking import Scope, ScoreMap

MODEL_FILE_VERSION = 1

LR = "lr"
MLP = "mlp"


@dataclass(frozen=True)
class Dataset:
    """Training rows: one 0-1 kill row per mutant, labelled by method index."""

    features: np.ndarray  # n_mutants x n_tests, values 0.0/1.0
    labels: np.ndarray  # n_mutants, index into method_index
    method_index: tuple[str, ...]
    test_index: tuple[str, ...]


ACTIVATIONS = ("relu", "tanh")


@dataclass(frozen=True)
class TrainConfig:
    """Optimiser and architecture settings (defaults match the rankers' era)."""

    hidden_size: int = 50
    max_iter: int = 50
    learning_rate: float = 0.01
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    activation: str = "relu"  # MLP hidden layer only

    def __post_init__(self):
        if self.hidden_size < 1:
            raise InvalidConfig(f"hidden_size must be >= 1, got {self.hidden_size}")
        if self.max_iter < 1:
            raise InvalidConfig(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.learning_rate > 0:
            raise InvalidConfig(f"learning_rate must be positive, got {self.learning_rate}")
        if not (self.adam_beta1 > 0 and self.adam_beta2 > 0 and self.adam_eps > 0):
            raise InvalidConfig("adam parameters must be positive")
        if self.seed < 0:
            raise InvalidConfig(f"seed must be unsigned, got {self.seed}")
        if self.activation not in ACTIVATIONS:
            raise InvalidConfig(
                f"unsupported activation {self.activation!r}; pick one of {ACTIVATIONS}"
            )


@dataclass(frozen=True)
class ClassifierModel:
    """Trained weights plus the index metadata needed to serve queries."""

    kind: str  # "lr" or "mlp"
    params: tuple[np.ndarray, ...]
    method_index: tuple[str, ...]
    test_index: tuple[str, ...]
    config: TrainConfig
    loss_curve: tuple[float, ...] = field(default=())

    @property
    def final_loss(self) -> float:
        return self.loss_curve[-1]

    @property
    def initial_loss(self) -> float:
        return self.loss_curve[0]


def build_dataset(matrix: KillMatrix) -> Dataset:
    """One training row per mutant, verbatim kill row, labelled by method.

    Duplicate rows are expected and kept: repeated kill patterns are the
    signal, not noise.
    """
    if matrix.n_mutants == 0 or matrix.n_tests == 0:
        raise EmptyDataset(
            f"matrix has {matrix.n_mutants} mutants and {matrix.n_tests} tests"
        )
    method_index = matrix.methods
    method_pos = {e: i for i, e in enumerate(method_index)}
    labels = np.array([method_pos[m.method] for m in matrix.mutants], dtype=int)
    features = matrix.kills.astype(np.float64)
    return Dataset(features, labels, method_index, matrix.tests)


# -- losses and gradients -------------------------------------------------
#
# The analytic gradients below are cross-checked against central finite
# differences in the test suite; keep them in sync with the forward passes.


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _softmax(logits: np.ndarray) -> np.ndarray:
    return np.exp(_log_softmax(logits))


def lr_loss_and_grad(params, X, y):
    """Mean softmax cross-entropy and gradients for (W: CxF, b: C)."""
    W, b = params
    logits = X @ W.T + b
    log_p = _log_softmax(logits)
    n = X.shape[0]
    loss = -log_p[np.arange(n), y].mean()
    delta = np.exp(log_p)
    delta[np.arange(n), y] -= 1.0
    delta /= n
    grad_W = delta.T @ X
    grad_b = delta.sum(axis=0)
    return loss, [grad_W, grad_b]


def _hidden(z1, activation):
    if activation == "relu":
        return np.maximum(z1, 0.0)
    return np.tanh(z1)


def _hidden_grad(z1, h, activation):
    if activation == "relu":
        return (z1 > 0.0).astype(z1.dtype)
    return 1.0 - h * h


def mlp_loss_and_grad(params, X, y, activation: str = "relu"):
    """Loss/gradients for (W1: FxH, b1: H, W2: HxC, b2: C)."""
    if activation not in ACTIVATIONS:
        raise InvalidConfig(f"unsupported activation {activation!r}")
    W1, b1, W2, b2 = params
    z1 = X @ W1 + b1
    h = _hidden(z1, activation)
    logits = h @ W2 + b2
    log_p = _log_softmax(logits)
    n = X.shape[0]
    loss = -log_p[np.arange(n), y].mean()
    delta = np.exp(log_p)
    delta[np.arange(n), y] -= 1.0
    delta /= n
    grad_W2 = h.T @ delta
    grad_b2 = delta.sum(axis=0)
    dh = delta @ W2.T
    dz1 = dh * _hidden_grad(z1, h, activation)
    grad_W1 = X.T @ dz1
    grad_b1 = dz1.sum(axis=0)
    return loss, [grad_W1, grad_b1, grad_W2, grad_b2]


def _adam_minimise(loss_and_grad, params, cfg: TrainConfig):
    """Full-batch Adam; returns final params and the per-iteration loss curve.

    The curve has max_iter + 1 entries: the loss before any update, then
    the loss after each of the max_iter steps.
    """
    params = [p.copy() for p in params]
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    curve = []
    for t in range(1, cfg.max_iter + 1):
        loss, grads = loss_and_grad(params)
        curve.append(loss)
        for i, g in enumerate(grads):
            m[i] = cfg.adam_beta1 * m[i] + (1 - cfg.adam_beta1) * g
            v[i] = cfg.adam_beta2 * v[i] + (1 - cfg.adam_beta2) * g * g
            m_hat = m[i] / (1 - cfg.adam_beta1**t)
            v_hat = v[i] / (1 - cfg.adam_beta2**t)
            params[i] -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)
    final_loss, _ = loss_and_grad(params)
    curve.append(final_loss)
    return params, curve


def train_lr(data: Dataset, cfg: TrainConfig = TrainConfig()) -> ClassifierModel:
    """Multinomial (softmax) logistic regression from zero-initialised weights."""
    n_features = data.features.shape[1]
    n_classes = len(data.method_index)
    params = [np.zeros((n_classes, n_features)), np.zeros(n_classes)]
    params, curve = _adam_minimise(
        lambda p: lr_loss_and_grad(p, data.features, data.labels), params, cfg
    )
    return ClassifierModel(
        LR, tuple(params), data.method_index, data.test_index, cfg, tuple(curve)
    )


def train_mlp(data: Dataset, cfg: TrainConfig = TrainConfig()) -> ClassifierModel:
    """One-hidden-layer perceptron (ReLU by default, tanh selectable).

    Weights start from a seeded uniform draw in +-sqrt(6/(fan_in+fan_out));
    biases start at zero.
    """
    n_features = data.features.shape[1]
    n_classes = len(data.method_index)
    rng = np.random.default_rng(cfg.seed)

    def uniform_init(fan_in, fan_out):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-bound, bound, size=(fan_in, fan_out))

    params = [
        uniform_init(n_features, cfg.hidden_size),
        np.zeros(cfg.hidden_size),
        uniform_init(cfg.hidden_size, n_classes),
        np.zeros(n_classes),
    ]
    params, curve = _adam_minimise(
        lambda p: mlp_loss_and_grad(p, data.features, data.labels, cfg.activation),
        params,
        cfg,
    )
    return ClassifierModel(
        MLP, tuple(params), data.method_index, data.test_index, cfg, tuple(curve)
    )


def train(data: Dataset, kind: str, cfg: TrainConfig = TrainConfig()) -> ClassifierModel:
    if kind == LR:
        return train_lr(data, cfg)
    if kind == MLP:
        return train_mlp(data, cfg)
    raise InvalidConfig(f"unknown classifier kind {kind!r}")


# -- serving ----------------------------------------------------------------


def predict_logits(model: ClassifierModel, vector: np.ndarray) -> np.ndarray:
    if model.kind == LR:
        W, b = model.params
        return vector @ W.T + b
    W1, b1, W2, b2 = model.params
    return _hidden(vector @ W1 + b1, model.config.activation) @ W2 + b2


def predict_scores(model: ClassifierModel, vector) -> ScoreMap:
    """Softmax class probabilities keyed by method (sums to 1)."""
    vector = np.asarray(vector, dtype=np.float64)
    if vector.shape != (len(model.test_index),):
        raise ShapeError(
            f"query vector has shape {vector.shape}, "
            f"model expects ({len(model.test_index)},)"
        )
    probs = _softmax(predict_logits(model, vector)[None, :])[0]
    return dict(zip(model.method_index, (float(p) for p in probs)))


def training_accuracy(model: ClassifierModel, data: Dataset) -> float:
    logits = np.stack([predict_logits(model, row) for row in data.features])
    return float((logits.argmax(axis=1) == data.labels).mean())


def build_query_vector(obs: FailureObservation, test_index, scope: Scope) -> np.ndarray:
    """Encode observed test results over ``test_index``: 1 = fails, 0 = passes.

    fp scope requires every indexed test to be classified by the
    observation.  f scope expects the index to be exactly the failing set
    (the model was trained on a matrix restricted to it), so the vector
    is all ones.
    """
    test_index = tuple(test_index)
    if scope is Scope.F:
        if set(test_index) != obs.failing:
            raise InvalidObservation(
                "f-scope query: test index must equal the failing set"
            )
        return np.ones(len(test_index), dtype=np.float64)
    if obs.passing is None:
        raise InvalidObservation("fp scope requires a recorded passing set")
    vector = np.zeros(len(test_index), dtype=np.float64)
    for i, t in enumerate(test_index):
        if t in obs.failing:
            vector[i] = 1.0
        elif t not in obs.passing:
            raise InvalidObservation(f"test {t!r} is neither failing nor passing")
    return vector


# -- persistence ----------------------------------------------------------------


def save_model(model: ClassifierModel, path, *, extra: dict | None = None) -> None:
    """Versioned JSON with flat full-precision weight arrays.

    Output is byte-identical for identical models: keys are sorted and
    floats use the shortest round-trip decimal representation.
    """
    doc = {
        "format": "mutloc-classifier",
        "version": MODEL_FILE_VERSION,
        "kind": model.kind,
        "test_index": list(model.test_index),
        "method_index": list(model.method_index),
        "config": {
            "hidden_size": model.config.hidden_size,
            "max_iter": model.config.max_iter,
            "learning_rate": model.config.learning_rate,
            "adam_beta1": model.config.adam_beta1,
            "adam_beta2": model.config.adam_beta2,
            "adam_eps": model.config.adam_eps,
            "seed": model.config.seed,
            "activation": model.config.activation,
        },
        "shapes": [list(p.shape) for p in model.params],
        "weights": [[float(x) for x in p.ravel()] for p in model.params],
        "loss_curve": [float(x) for x in model.loss_curve],
        "final_loss": float(model.final_loss),
    }
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> ClassifierModel:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if doc.get("format") != "mutloc-classifier":
        raise FormatError("not a mutloc classifier model file")
    if doc.get("version") != MODEL_FILE_VERSION:
        raise FormatError(f"unsupported model file version {doc.get('version')!r}")
    kind = doc["kind"]
    if kind not in (LR, MLP):
        raise FormatError(f"unknown classifier kind {kind!r}")
    cfg = TrainConfig(**doc["config"])
    params = tuple(
        np.array(flat, dtype=np.float64).reshape(shape)
        for flat, shape in zip(doc["weights"], doc["shapes"])
    )
    expected = 2 if kind == LR else 4
    if len(params) != expected:
        raise FormatError(f"{kind} model must carry {expected} weight tensors")
    return ClassifierModel(
        kind,
        params,
        tuple(doc["method_index"]),
        tuple(doc["test_index"]),
        cfg,
        tuple(doc.get("loss_curve", ())),
    )
