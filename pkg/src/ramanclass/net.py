"""Minimal feed-forward network engine.

Dense and locally connected layers, pluggable activations, cross-entropy
and squared-error losses with optional per-layer L1 weight penalties,
Adam updates with bias correction, and a seeded mini-batch training
loop. Plain numpy throughout; every run is a pure function of
(spec, data, config, seed).

A locally connected layer splits its input into `out_width`
non-overlapping receptive fields of `receptive_field` values each; every
output node owns one field with unshared weights, so the layer has
out_width * (receptive_field + 1) parameters.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DivergenceError, ShapeError

State = list[tuple[np.ndarray, np.ndarray]]


class Activation(enum.Enum):
    TANH = "tanh"
    RELU = "relu"
    SIGMOID = "sigmoid"
    ELU = "elu"
    IDENTITY = "identity"


class LayerKind(enum.Enum):
    DENSE = "dense"
    LOCALLY_CONNECTED = "locally_connected"


class Loss(enum.Enum):
    BINARY_CROSS_ENTROPY = "bce"
    RECONSTRUCTION_CROSS_ENTROPY = "recon_ce"
    SQUARED_ERROR = "mse"
    VAE = "vae"


def sigmoid(z):
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def activate(kind: Activation, z: np.ndarray) -> np.ndarray:
    if kind is Activation.TANH:
        return np.tanh(z)
    if kind is Activation.RELU:
        return np.maximum(z, 0.0)
    if kind is Activation.SIGMOID:
        return sigmoid(z)
    if kind is Activation.ELU:
        return np.where(z > 0.0, z, np.expm1(z))
    return z


def activation_deriv(kind: Activation, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    """da/dz, expressed from z and the already computed activation a."""
    if kind is Activation.TANH:
        return 1.0 - a * a
    if kind is Activation.RELU:
        return (z > 0.0).astype(float)
    if kind is Activation.SIGMOID:
        return a * (1.0 - a)
    if kind is Activation.ELU:
        return np.where(z > 0.0, 1.0, a + 1.0)
    return np.ones_like(z)


@dataclass(frozen=True)
class LayerSpec:
    kind: LayerKind
    in_width: int
    out_width: int
    activation: Activation
    receptive_field: int | None = None
    l1_lambda: float = 0.0

    def __post_init__(self):
        if self.in_width < 1 or self.out_width < 1:
            raise ValueError("layer widths must be positive")
        if self.l1_lambda < 0:
            raise ValueError("l1_lambda must be non-negative")
        if self.kind is LayerKind.LOCALLY_CONNECTED:
            if self.receptive_field is None:
                raise ValueError("locally connected layer needs a receptive_field")
            if self.in_width != self.out_width * self.receptive_field:
                raise ValueError(
                    f"receptive fields must tile the input exactly: "
                    f"{self.out_width} x {self.receptive_field} != {self.in_width}"
                )
        elif self.receptive_field is not None:
            raise ValueError("receptive_field only applies to locally connected layers")

    @property
    def n_params(self) -> int:
        if self.kind is LayerKind.LOCALLY_CONNECTED:
            return self.out_width * (self.receptive_field + 1)
        return self.in_width * self.out_width + self.out_width


def dense(in_width: int, out_width: int, activation: Activation, l1_lambda: float = 0.0) -> LayerSpec:
    return LayerSpec(LayerKind.DENSE, in_width, out_width, activation, l1_lambda=l1_lambda)


def locally_connected(
    in_width: int, out_width: int, activation: Activation, l1_lambda: float = 0.0
) -> LayerSpec:
    if in_width % out_width != 0:
        raise ValueError("in_width must be a multiple of out_width for non-overlapping fields")
    return LayerSpec(
        LayerKind.LOCALLY_CONNECTED,
        in_width,
        out_width,
        activation,
        receptive_field=in_width // out_width,
        l1_lambda=l1_lambda,
    )


@dataclass(frozen=True)
class NetworkSpec:
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        if not self.layers:
            raise ValueError("network needs at least one layer")
        object.__setattr__(self, "layers", tuple(self.layers))
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.out_width != nxt.in_width:
                raise ValueError(
                    f"adjacent layer widths disagree: {prev.out_width} -> {nxt.in_width}"
                )

    @property
    def in_width(self) -> int:
        return self.layers[0].in_width

    @property
    def out_width(self) -> int:
        return self.layers[-1].out_width


def parameter_count(spec: NetworkSpec) -> int:
    """Trainable parameters: dense layers contribute in*out + out,
    locally connected layers out*(receptive_field + 1)."""
    return sum(layer.n_params for layer in spec.layers)


@dataclass(frozen=True)
class AdamParams:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    loss: Loss
    optimizer: AdamParams = field(default_factory=AdamParams)
    batch_size: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")


def init_state(spec: NetworkSpec, rng: np.random.Generator) -> State:
    """Seeded uniform Glorot-style initialization; biases start at zero."""
    state: State = []
    for layer in spec.layers:
        if layer.kind is LayerKind.LOCALLY_CONNECTED:
            fan_in, fan_out = layer.receptive_field, 1
            shape = (layer.out_width, layer.receptive_field)
        else:
            fan_in, fan_out = layer.in_width, layer.out_width
            shape = (layer.in_width, layer.out_width)
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        W = rng.uniform(-limit, limit, size=shape)
        b = np.zeros(layer.out_width)
        state.append((W, b))
    return state


def _layer_forward(layer: LayerSpec, W: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    if layer.kind is LayerKind.LOCALLY_CONNECTED:
        xr = x.reshape(x.shape[0], layer.out_width, layer.receptive_field)
        return np.einsum("bor,or->bo", xr, W) + b
    return x @ W + b


def forward(spec: NetworkSpec, state: State, x: np.ndarray):
    """Run the network; returns (output, caches) where caches hold the
    per-layer (input, pre-activation, activation) needed for backprop."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != spec.in_width:
        raise ShapeError(f"input width {x.shape[1]} does not match network input {spec.in_width}")
    caches = []
    a = x
    for layer, (W, b) in zip(spec.layers, state):
        z = _layer_forward(layer, W, b, a)
        a_next = activate(layer.activation, z)
        caches.append((a, z, a_next))
        a = a_next
    return (a[0] if single else a), caches


def _layer_backward(layer: LayerSpec, W: np.ndarray, x: np.ndarray, dz: np.ndarray):
    if layer.kind is LayerKind.LOCALLY_CONNECTED:
        xr = x.reshape(x.shape[0], layer.out_width, layer.receptive_field)
        dW = np.einsum("bo,bor->or", dz, xr)
        db = dz.sum(axis=0)
        dx = (dz[:, :, None] * W[None, :, :]).reshape(x.shape)
        return dW, db, dx
    dW = x.T @ dz
    db = dz.sum(axis=0)
    dx = dz @ W.T
    return dW, db, dx


def backward_z(spec: NetworkSpec, state: State, caches, dz_last: np.ndarray):
    """Backpropagate from d(loss)/d(z) of the final layer.

    Returns (grads, dx) where grads mirrors the state layout (L1
    subgradients included for layers with l1_lambda > 0) and dx is the
    loss gradient with respect to the network input.
    """
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(spec.layers)  # type: ignore[list-item]
    dz = dz_last
    for i in range(len(spec.layers) - 1, -1, -1):
        layer = spec.layers[i]
        W, _ = state[i]
        x, _, _ = caches[i]
        dW, db, dx = _layer_backward(layer, W, x, dz)
        if layer.l1_lambda > 0:
            dW = dW + layer.l1_lambda * np.sign(W)
        grads[i] = (dW, db)
        if i > 0:
            _, z_prev, a_prev = caches[i - 1]
            dz = dx * activation_deriv(spec.layers[i - 1].activation, z_prev, a_prev)
    return grads, dx


def backward_a(spec: NetworkSpec, state: State, caches, da_last: np.ndarray):
    """Backpropagate from d(loss)/d(activation) of the final layer."""
    _, z, a = caches[-1]
    dz_last = da_last * activation_deriv(spec.layers[-1].activation, z, a)
    return backward_z(spec, state, caches, dz_last)


_CLIP = 1e-12


def _check_targets_unit_interval(Y: np.ndarray):
    if np.min(Y) < 0.0 or np.max(Y) > 1.0:
        raise ValueError("cross-entropy targets must lie in [0, 1]")


def _data_loss(loss: Loss, A: np.ndarray, Y: np.ndarray) -> float:
    if loss is Loss.BINARY_CROSS_ENTROPY:
        _check_targets_unit_interval(Y)
        a = np.clip(A, _CLIP, 1.0 - _CLIP)
        per_example = -(Y * np.log(a) + (1.0 - Y) * np.log(1.0 - a)).sum(axis=1)
        return float(per_example.mean())
    if loss is Loss.RECONSTRUCTION_CROSS_ENTROPY:
        _check_targets_unit_interval(Y)
        a = np.clip(A, _CLIP, 1.0 - _CLIP)
        per_example = -(Y * np.log(a) + (1.0 - Y) * np.log(1.0 - a)).sum(axis=1)
        return float(per_example.mean())
    if loss is Loss.SQUARED_ERROR:
        return float(np.mean((A - Y) ** 2))
    raise ValueError(f"loss {loss} is not handled by the sequential engine")


def l1_penalty(spec: NetworkSpec, state: State) -> float:
    total = 0.0
    for layer, (W, _) in zip(spec.layers, state):
        if layer.l1_lambda > 0:
            total += layer.l1_lambda * float(np.abs(W).sum())
    return total


def _as_batch(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    return arr[None, :] if arr.ndim == 1 else arr


def loss_value(spec: NetworkSpec, state: State, X, Y, loss: Loss) -> float:
    """Mean per-example data loss plus L1 penalties; no gradients."""
    X, Y = _as_batch(X), _as_batch(Y)
    A, _ = forward(spec, state, X)
    return _data_loss(loss, A, Y) + l1_penalty(spec, state)


def loss_and_gradients(spec: NetworkSpec, state: State, X, Y, loss: Loss):
    """Total loss and exact analytic gradients for a batch.

    Cross-entropy losses require a sigmoid output layer (the gradient is
    propagated through the fused sigmoid/cross-entropy form for
    stability). The L1 subgradient uses sign(w), 0 at w = 0.
    """
    X, Y = _as_batch(X), _as_batch(Y)
    if X.shape[0] == 0:
        raise ValueError("batch must be nonempty")
    if X.shape[0] != Y.shape[0]:
        raise ShapeError("inputs and targets disagree on batch size")
    A, caches = forward(spec, state, X)
    value = _data_loss(loss, A, Y) + l1_penalty(spec, state)
    B = X.shape[0]
    if loss in (Loss.BINARY_CROSS_ENTROPY, Loss.RECONSTRUCTION_CROSS_ENTROPY):
        if spec.layers[-1].activation is not Activation.SIGMOID:
            raise ValueError("cross-entropy losses require a sigmoid output layer")
        dz_last = (A - Y) / B
        grads, _ = backward_z(spec, state, caches, dz_last)
    elif loss is Loss.SQUARED_ERROR:
        da_last = 2.0 * (A - Y) / A.size
        grads, _ = backward_a(spec, state, caches, da_last)
    else:
        raise ValueError(f"loss {loss} is not handled by the sequential engine")
    return value, grads


def zero_like_state(state: State) -> State:
    return [(np.zeros_like(W), np.zeros_like(b)) for W, b in state]


def adam_step(
    state: State,
    grads: State,
    opt_state,
    t: int,
    params: AdamParams,
):
    """One Adam update with bias correction; returns (state', opt_state').

    `opt_state` is a pair of first/second moment lists; pass None on the
    first call. `t` is the 1-based step index.
    """
    if t < 1:
        raise ValueError("step index t starts at 1")
    if opt_state is None:
        opt_state = (zero_like_state(state), zero_like_state(state))
    m_state, v_state = opt_state
    new_state: State = []
    new_m: State = []
    new_v: State = []
    b1, b2 = params.beta1, params.beta2
    bc1 = 1.0 - b1**t
    bc2 = 1.0 - b2**t
    for (W, b), (gW, gb), (mW, mb), (vW, vb) in zip(state, grads, m_state, v_state):
        mW = b1 * mW + (1.0 - b1) * gW
        mb = b1 * mb + (1.0 - b1) * gb
        vW = b2 * vW + (1.0 - b2) * gW**2
        vb = b2 * vb + (1.0 - b2) * gb**2
        W = W - params.lr * (mW / bc1) / (np.sqrt(vW / bc2) + params.eps)
        b = b - params.lr * (mb / bc1) / (np.sqrt(vb / bc2) + params.eps)
        new_state.append((W, b))
        new_m.append((mW, mb))
        new_v.append((vW, vb))
    return new_state, (new_m, new_v)


@dataclass
class TrainResult:
    state: State
    epoch_losses: np.ndarray


def train(
    spec: NetworkSpec,
    X: np.ndarray,
    Y: np.ndarray,
    cfg: TrainConfig,
    corrupt=None,
) -> TrainResult:
    """Seeded mini-batch training.

    Each epoch reshuffles the data and walks it in sequential
    mini-batches (the final short batch is kept). `corrupt`, when given,
    maps an input batch to the presented batch (targets stay clean),
    which is how denoising autoencoders inject noise per presentation.
    Raises DivergenceError naming the epoch if the loss goes non-finite.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.shape[0] == 0:
        raise ValueError("training data must be nonempty")
    if X.shape[0] != Y.shape[0]:
        raise ShapeError("inputs and targets disagree on sample count")
    if X.shape[1] != spec.in_width:
        raise ShapeError(f"data width {X.shape[1]} does not match network input {spec.in_width}")
    rng = np.random.default_rng(cfg.seed)
    state = init_state(spec, rng)
    opt_state = None
    t = 0
    n = X.shape[0]
    epoch_losses = np.empty(cfg.epochs)
    for epoch in range(1, cfg.epochs + 1):
        perm = rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = perm[start : start + cfg.batch_size]
            Xb = X[batch]
            Yb = Y[batch]
            X_in = corrupt(Xb, rng) if corrupt is not None else Xb
            value, grads = loss_and_gradients(spec, state, X_in, Yb, cfg.loss)
            if not np.isfinite(value):
                raise DivergenceError(epoch)
            t += 1
            state, opt_state = adam_step(state, grads, opt_state, t, cfg.optimizer)
            total += value * len(batch)
        epoch_losses[epoch - 1] = total / n
    return TrainResult(state=state, epoch_losses=epoch_losses)


# --- persistence ------------------------------------------------------------

FORMAT_VERSION = 1


def spec_to_dict(spec: NetworkSpec) -> dict:
    return {
        "layers": [
            {
                "kind": layer.kind.value,
                "in_width": layer.in_width,
                "out_width": layer.out_width,
                "activation": layer.activation.value,
                "receptive_field": layer.receptive_field,
                "l1_lambda": layer.l1_lambda,
            }
            for layer in spec.layers
        ]
    }


def spec_from_dict(doc: dict) -> NetworkSpec:
    layers = tuple(
        LayerSpec(
            kind=LayerKind(ld["kind"]),
            in_width=int(ld["in_width"]),
            out_width=int(ld["out_width"]),
            activation=Activation(ld["activation"]),
            receptive_field=None if ld.get("receptive_field") is None else int(ld["receptive_field"]),
            l1_lambda=float(ld.get("l1_lambda", 0.0)),
        )
        for ld in doc["layers"]
    )
    return NetworkSpec(layers)


def save_state(path, spec: NetworkSpec, state: State, extra_meta: dict | None = None) -> None:
    """Write weights to an .npz file with a JSON spec echo."""
    meta = {
        "format_version": FORMAT_VERSION,
        "spec": spec_to_dict(spec),
        "extra": extra_meta or {},
    }
    arrays = {}
    for i, (W, b) in enumerate(state):
        arrays[f"W{i}"] = W
        arrays[f"b{i}"] = b
    np.savez(Path(path), meta=np.array(json.dumps(meta)), **arrays)


def load_state(path):
    """Read a weights file; validates array shapes against the spec echo.

    Returns (spec, state, extra_meta).
    """
    with np.load(Path(path)) as data:
        meta = json.loads(str(data["meta"]))
        if meta.get("format_version") != FORMAT_VERSION:
            raise ShapeError(f"unsupported weights file version {meta.get('format_version')}")
        spec = spec_from_dict(meta["spec"])
        state: State = []
        for i, layer in enumerate(spec.layers):
            W = data[f"W{i}"]
            b = data[f"b{i}"]
            if layer.kind is LayerKind.LOCALLY_CONNECTED:
                expect = (layer.out_width, layer.receptive_field)
            else:
                expect = (layer.in_width, layer.out_width)
            if W.shape != expect or b.shape != (layer.out_width,):
                raise ShapeError(f"layer {i} weights {W.shape} do not match spec {expect}")
            state.append((W, b))
    return spec, state, meta.get("extra", {})
