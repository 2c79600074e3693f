"""Binary neural classifiers: the fully connected three-layer network
and its locally connected counterpart.

Both share the hidden structure input -> 10 -> 5 -> 1 with tanh, relu
and sigmoid activations and an L1 penalty of 1e-5 on the first hidden
layer; they differ only in whether the first layer is dense or locally
connected with 10 non-overlapping receptive fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import StateError
from .net import (
    Activation,
    Loss,
    NetworkSpec,
    State,
    TrainConfig,
    dense,
    forward,
    locally_connected,
    save_state,
    load_state,
    train,
)
from .spectra import MODEL_INPUT_WIDTH, Label, SpectraSet

HIDDEN_1 = 10
HIDDEN_2 = 5
FIRST_LAYER_L1 = 1e-5
N_FIELDS = 10


def fcnn_spec(input_width: int = MODEL_INPUT_WIDTH) -> NetworkSpec:
    return NetworkSpec(
        (
            dense(input_width, HIDDEN_1, Activation.TANH, l1_lambda=FIRST_LAYER_L1),
            dense(HIDDEN_1, HIDDEN_2, Activation.RELU),
            dense(HIDDEN_2, 1, Activation.SIGMOID),
        )
    )


def lcnn_spec(input_width: int = MODEL_INPUT_WIDTH, n_fields: int = N_FIELDS) -> NetworkSpec:
    if input_width % n_fields != 0:
        raise ValueError(f"input width {input_width} is not divisible into {n_fields} fields")
    return NetworkSpec(
        (
            locally_connected(input_width, n_fields, Activation.TANH, l1_lambda=FIRST_LAYER_L1),
            dense(n_fields, HIDDEN_2, Activation.RELU),
            dense(HIDDEN_2, 1, Activation.SIGMOID),
        )
    )


@dataclass
class BinaryNetClassifier:
    """Trained network plus a decision threshold (score >= threshold is
    positive; the tie at the threshold resolves positive)."""

    spec: NetworkSpec
    state: State | None = None
    threshold: float = 0.5
    epoch_losses: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not (0.0 < self.threshold < 1.0):
            raise ValueError("threshold must lie strictly inside (0, 1)")
        last = self.spec.layers[-1]
        if last.out_width != 1 or last.activation is not Activation.SIGMOID:
            raise ValueError("binary classifier needs a width-1 sigmoid output layer")

    def scores(self, X: np.ndarray) -> np.ndarray:
        if self.state is None:
            raise StateError("classifier has no trained weights")
        out, _ = forward(self.spec, self.state, np.atleast_2d(np.asarray(X, dtype=float)))
        return out[:, 0]

    def predict_matrix(self, X: np.ndarray):
        scores = self.scores(X)
        return (scores >= self.threshold).astype(int), scores

    def predict(self, x) -> tuple[Label, float]:
        values = x.intensities if hasattr(x, "intensities") else np.asarray(x, dtype=float)
        score = float(self.scores(values[None, :])[0])
        label = Label.POSITIVE if score >= self.threshold else Label.NEGATIVE
        return label, score

    def save(self, path) -> None:
        if self.state is None:
            raise StateError("classifier has no trained weights")
        save_state(path, self.spec, self.state, extra_meta={"threshold": self.threshold})

    @classmethod
    def load(cls, path) -> "BinaryNetClassifier":
        spec, state, extra = load_state(path)
        return cls(spec=spec, state=state, threshold=float(extra.get("threshold", 0.5)))


def fit_binary(spec: NetworkSpec, data, cfg: TrainConfig, threshold: float = 0.5) -> BinaryNetClassifier:
    """Train a binary classifier with binary cross-entropy.

    `data` is either a SpectraSet (positives -> 1, negatives -> 0) or an
    (X, y) pair. Both classes must be present.
    """
    if isinstance(data, SpectraSet):
        X = data.matrix()
        y = data.targets()
    else:
        X, y = data
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
    if not (np.any(y == 1.0) and np.any(y == 0.0)):
        raise ValueError("binary training needs both classes")
    if cfg.loss is not Loss.BINARY_CROSS_ENTROPY:
        raise ValueError("binary classifier training uses binary cross-entropy")
    result = train(spec, X, y, cfg)
    return BinaryNetClassifier(
        spec=spec, state=result.state, threshold=threshold, epoch_losses=result.epoch_losses
    )
