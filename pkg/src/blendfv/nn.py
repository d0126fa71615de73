"""Data-driven blend predictor: a small numpy MLP trained with ADAM.

The network maps the conserved variables and pressure of the five cells on
each side of an interface (40 inputs, ordered left to right as
rho, mom, E, p per cell) to a raw blend value; inference clamps to [0, 1]
because the convex flux needs a true convex parameter while the output layer
is a plain affine map.

Everything is deterministic given the seed: initialization, epoch shuffling
and batching all run off one numpy Generator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

DEFAULT_DIMS = (40, 80, 80, 80, 80, 1)
INPUT_ORDER = "rho,mom,E,p x cells -5..+4"
LOSS_KINDS = ("mse", "mexp", "nonsym")
NONSYM_GAMMA = 10.0


def elu(x):
    """x for x > 0, exp(x) - 1 otherwise."""
    x = np.asarray(x, dtype=float)
    return np.where(x > 0.0, x, np.expm1(np.minimum(x, 0.0)))


def _elu_prime(x):
    return np.where(x > 0.0, 1.0, np.exp(np.minimum(x, 0.0)))


@dataclass
class MlpModel:
    """Affine layers with ELU activations on all but the last layer."""

    weights: list  # W_k with shape (out_dim, in_dim)
    biases: list   # b_k with shape (out_dim,)

    @property
    def dims(self):
        return tuple([self.weights[0].shape[1]] + [w.shape[0] for w in self.weights])

    def copy(self) -> "MlpModel":
        return MlpModel([w.copy() for w in self.weights], [b.copy() for b in self.biases])


def init_model(rng: np.random.Generator, dims=DEFAULT_DIMS) -> MlpModel:
    """Fan-in scaled uniform initialization."""
    weights, biases = [], []
    for n_in, n_out in zip(dims[:-1], dims[1:]):
        bound = 1.0 / np.sqrt(n_in)
        weights.append(rng.uniform(-bound, bound, size=(n_out, n_in)))
        biases.append(rng.uniform(-bound, bound, size=n_out))
    return MlpModel(weights, biases)


def mlp_forward(model: MlpModel, x) -> np.ndarray:
    """Raw network output for inputs of shape (..., dims[0])."""
    z = np.asarray(x, dtype=float)
    if z.shape[-1] != model.dims[0]:
        raise ValueError(f"expected {model.dims[0]} inputs, got {z.shape[-1]}")
    last = len(model.weights) - 1
    for k, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = z @ W.T + b
        if k < last:
            z = elu(z)
    return z[..., 0]


def predict_alpha(model: MlpModel, window) -> np.ndarray:
    """Clamped blend prediction in [0, 1]."""
    return np.clip(mlp_forward(model, window), 0.0, 1.0)


# ------------------------------------------------------------------ losses

def loss(predictions, targets, kind: str) -> float:
    """Mean training loss of one batch.

    mse: mean squared error; mexp: mean (exp(Y - Yhat) - 1)^2; nonsym:
    absolute error where the prediction exceeds the target, 10x squared
    error where it falls short (under-prediction of the blend parameter is
    the dangerous direction).
    """
    pred = np.asarray(predictions, dtype=float)
    tgt = np.asarray(targets, dtype=float)
    if pred.shape != tgt.shape:
        raise ValueError("predictions and targets must have equal length")
    d = tgt - pred
    if kind == "mse":
        return float(np.mean(d**2))
    if kind == "mexp":
        return float(np.mean(np.expm1(d) ** 2))
    if kind == "nonsym":
        per = np.where(d <= 0.0, np.abs(d), NONSYM_GAMMA * d**2)
        return float(np.mean(per))
    raise ValueError(f"unknown loss kind {kind!r}")


def _loss_gradient(pred, tgt, kind):
    """d(loss)/d(pred), averaged over the batch."""
    n = pred.size
    d = tgt - pred
    if kind == "mse":
        return -2.0 * d / n
    if kind == "mexp":
        e = np.expm1(d)
        return -2.0 * e * (e + 1.0) / n
    if kind == "nonsym":
        return np.where(d <= 0.0, np.sign(pred - tgt), -2.0 * NONSYM_GAMMA * d) / n
    raise ValueError(f"unknown loss kind {kind!r}")


def backprop(model: MlpModel, inputs, targets, kind: str = "mse"):
    """Exact gradients of the batch loss; returns (loss, grad_W, grad_b)."""
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    tgt = np.asarray(targets, dtype=float).reshape(-1)
    last = len(model.weights) - 1
    pre_acts, acts = [], [x]
    z = x
    for k, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = z @ W.T + b
        pre_acts.append(z)
        if k < last:
            z = elu(z)
        acts.append(z)
    pred = acts[-1][:, 0]
    value = loss(pred, tgt, kind)

    delta = _loss_gradient(pred, tgt, kind)[:, None]
    grad_W = [None] * len(model.weights)
    grad_b = [None] * len(model.weights)
    for k in range(last, -1, -1):
        grad_W[k] = delta.T @ acts[k]
        grad_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ model.weights[k]) * _elu_prime(pre_acts[k - 1])
    return value, grad_W, grad_b


# -------------------------------------------------------------------- ADAM

@dataclass
class AdamState:
    """First/second moment accumulators plus the step counter."""

    m_w: list
    v_w: list
    m_b: list
    v_b: list
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_model(cls, model: MlpModel) -> "AdamState":
        return cls(
            m_w=[np.zeros_like(w) for w in model.weights],
            v_w=[np.zeros_like(w) for w in model.weights],
            m_b=[np.zeros_like(b) for b in model.biases],
            v_b=[np.zeros_like(b) for b in model.biases],
        )


def adam_step(model: MlpModel, grad_W, grad_b, state: AdamState, step_size: float):
    """Standard bias-corrected ADAM update, in place on model and state."""
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**state.t
    c2 = 1.0 - b2**state.t
    for k in range(len(model.weights)):
        for p, g, m, v in (
            (model.weights[k], grad_W[k], state.m_w[k], state.v_w[k]),
            (model.biases[k], grad_b[k], state.m_b[k], state.v_b[k]),
        ):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= step_size * (m / c1) / (np.sqrt(v / c2) + state.eps)


# ---------------------------------------------------------------- training

@dataclass(frozen=True)
class ScheduleSection:
    epochs: int
    batch_size: int
    step_size: float


# Seven sections of 25 epochs: batch size ramps 32 -> 4096 while the step
# size decays 1e-3 -> 1e-6.
PAPER_SCHEDULE = (
    ScheduleSection(25, 32, 1e-3),
    ScheduleSection(25, 256, 1e-3),
    ScheduleSection(25, 1024, 1e-3),
    ScheduleSection(25, 4096, 1e-3),
    ScheduleSection(25, 4096, 1e-4),
    ScheduleSection(25, 4096, 1e-5),
    ScheduleSection(25, 4096, 1e-6),
)

QUICK_SCHEDULE = (
    ScheduleSection(8, 128, 1e-3),
    ScheduleSection(8, 512, 3e-4),
)

SCHEDULES = {"paper": PAPER_SCHEDULE, "quick": QUICK_SCHEDULE}


@dataclass
class TrainingResult:
    model: MlpModel
    epoch_losses: list            # mean loss per epoch, all sections chained
    section_boundaries: list      # epoch index where each section starts


def train(
    inputs,
    targets,
    schedule,
    kind: str = "nonsym",
    seed: int = 0,
    dims=DEFAULT_DIMS,
    model: MlpModel | None = None,
) -> TrainingResult:
    """Run the sectioned ADAM schedule over the dataset.

    Shuffles per epoch with the seeded generator and records the mean
    per-sample loss of every epoch. With an empty schedule the (possibly
    freshly initialized) model is returned untouched.
    """
    x = np.asarray(inputs, dtype=float)
    y = np.asarray(targets, dtype=float).reshape(-1)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("training needs a non-empty 2-d input array")
    if x.shape[0] != y.shape[0]:
        raise ValueError("inputs and targets disagree in length")

    rng = np.random.default_rng(seed)
    if model is None:
        model = init_model(rng, dims)
    state = AdamState.for_model(model)
    n = x.shape[0]
    epoch_losses: list[float] = []
    boundaries: list[int] = []
    for section in schedule:
        boundaries.append(len(epoch_losses))
        for _ in range(section.epochs):
            order = rng.permutation(n)
            total = 0.0
            for start in range(0, n, section.batch_size):
                idx = order[start : start + section.batch_size]
                value, gw, gb = backprop(model, x[idx], y[idx], kind)
                adam_step(model, gw, gb, state, section.step_size)
                total += value * idx.size
            epoch_losses.append(total / n)
    return TrainingResult(model=model, epoch_losses=epoch_losses, section_boundaries=boundaries)


# ------------------------------------------------------------ weight files

def save_weights(model: MlpModel, path):
    """Write the portable JSON weight file."""
    doc = {
        "dims": list(model.dims),
        "layers": [
            {"W": w.tolist(), "b": b.tolist()} for w, b in zip(model.weights, model.biases)
        ],
        "activation": "elu",
        "input_order": INPUT_ORDER,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_weights(path) -> MlpModel:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("activation", "elu") != "elu":
        raise ValueError(f"unsupported activation {doc.get('activation')!r}")
    weights = [np.asarray(layer["W"], dtype=float) for layer in doc["layers"]]
    biases = [np.asarray(layer["b"], dtype=float) for layer in doc["layers"]]
    model = MlpModel(weights, biases)
    if "dims" in doc and tuple(doc["dims"]) != model.dims:
        raise ValueError("weight file dims field disagrees with layer shapes")
    return model
