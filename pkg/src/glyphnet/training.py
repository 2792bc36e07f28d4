"""Loss, exact BPTT gradients, Adam, and the per-sample training loop.

Training draws one sample per step (batch size 1), runs the net for that
sample's length with its one-hot label, and applies Adam to every tensor.
The per-sequence loss is the mean over all time steps and output channels,
which keeps the learning rate insensitive to variable sequence lengths.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .backend import kernels
from .network import TENSOR_NAMES, forward_inputs, init_params, one_hot

# Gradients are a plain name -> array mapping with the shapes of ModelParams.
Gradients = dict

# Distinct stream tag so the sampling RNG never collides with init_params,
# which is seeded with the bare config seed.
_SAMPLER_STREAM = 0x5A


@dataclass
class TrainConfig:
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    steps: int = 20000
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("betas must lie in [0, 1)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")


@dataclass
class AdamState:
    """First/second moment accumulators plus the shared step counter."""

    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    t: int = 0


def init_adam_state(params):
    return AdamState(
        m={n: np.zeros_like(getattr(params, n)) for n in TENSOR_NAMES},
        v={n: np.zeros_like(getattr(params, n)) for n in TENSOR_NAMES},
        t=0,
    )


def mse_loss(pred, target):
    pred = np.asarray(pred)
    target = np.asarray(target)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {target.shape}")
    d = pred - target
    return float(np.mean(d * d))


def loss_gradient(pred, target):
    """dL/dpred for mse_loss."""
    return 2.0 * (pred - target) / pred.size


def backprop_through_time(params, trace, target):
    """Exact gradients of mse_loss(trace.y, target) w.r.t. every parameter
    tensor and w.r.t. the constant input vector (summed over time steps).

    The trace must come from a forward pass with exactly these params.
    """
    target = np.asarray(target, dtype=np.float64)
    if target.shape != trace.y.shape:
        raise ValueError(f"target shape {target.shape} does not match "
                         f"trace outputs {trace.y.shape}")
    d_y = loss_gradient(trace.y, target)
    grad_tuple, input_grad = kernels.backward_pass(
        params.tensor_tuple(), trace.x, trace.a, trace.i, trace.f,
        trace.g, trace.o, trace.c, trace.h, d_y)
    return dict(zip(TENSOR_NAMES, grad_tuple)), input_grad


def adam_step(params, grads, state, config, mask=None):
    """One Adam update. `mask` restricts the update to the named tensors;
    everything outside it (parameters and moments) is passed through
    untouched, sharing the input arrays."""
    if mask is None:
        mask = TENSOR_NAMES
    else:
        unknown = set(mask) - set(TENSOR_NAMES)
        if unknown:
            raise ValueError(f"unknown tensors in mask: {sorted(unknown)}")
    t = state.t + 1
    bc1 = 1.0 - config.beta1 ** t
    bc2 = 1.0 - config.beta2 ** t
    new_tensors = {}
    new_m = dict(state.m)
    new_v = dict(state.v)
    for name in TENSOR_NAMES:
        if name not in mask:
            continue
        g = grads[name]
        m = config.beta1 * state.m[name] + (1.0 - config.beta1) * g
        v = config.beta2 * state.v[name] + (1.0 - config.beta2) * (g * g)
        update = config.learning_rate * (m / bc1) / (np.sqrt(v / bc2)
                                                     + config.epsilon)
        new_tensors[name] = getattr(params, name) - update
        new_m[name] = m
        new_v[name] = v
    return replace(params, **new_tensors), AdamState(m=new_m, v=new_v, t=t)


def sgd_step(params, grads, learning_rate, mask=None):
    """Plain gradient descent counterpart of adam_step."""
    if mask is None:
        mask = TENSOR_NAMES
    new_tensors = {name: getattr(params, name) - learning_rate * grads[name]
                   for name in mask}
    return replace(params, **new_tensors)


def train(corpus, config, n_ff=100, n_lstm=100, start_params=None,
          snapshot_every=0, snapshot_fn=None):
    """Train on every sample in `corpus` (the caller filters to the trained
    half of the alphabet). Returns (params, per-step loss array).

    Deterministic given config.seed: with steps=0 the result equals
    init_params(n_ff, n_lstm, config.seed).
    """
    samples = corpus.samples if hasattr(corpus, "samples") else list(corpus)
    if not samples:
        raise ValueError("cannot train on an empty corpus")
    params = start_params if start_params is not None \
        else init_params(n_ff, n_lstm, config.seed)
    state = init_adam_state(params)
    rng = np.random.default_rng((config.seed, _SAMPLER_STREAM))

    # Constant one-hot input rows per sample, built once.
    x_cache = [np.tile(one_hot(s.label), (len(s.points), 1))
               for s in samples]
    targets = [np.asarray(s.points, dtype=np.float64) for s in samples]

    losses = np.empty(config.steps)
    for step in range(config.steps):
        k = int(rng.integers(len(samples)))
        _, trace = forward_inputs(params, x_cache[k])
        losses[step] = mse_loss(trace.y, targets[k])
        grads, _ = backprop_through_time(params, trace, targets[k])
        params, state = adam_step(params, grads, state, config)
        if snapshot_every and snapshot_fn and (step + 1) % snapshot_every == 0:
            snapshot_fn(step + 1, params)
    return params, losses


def save_loss_history(losses, path):
    """Two-column text export: step index, loss."""
    with open(path, "w") as fh:
        for step, loss in enumerate(losses):
            fh.write(f"{step} {float(loss)!r}\n")


def load_loss_history(path):
    steps, losses = [], []
    with open(path) as fh:
        for line in fh:
            s, l = line.split()
            steps.append(int(s))
            losses.append(float(l))
    return np.array(steps), np.array(losses)
