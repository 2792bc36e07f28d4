"""Inference-time optimization procedures.

Four operations share one idea: keep the recurrent dynamics frozen and move
some other quantity down the loss gradient.

* one_shot_acquire  - fit a single novel sample by adapting only the weights
  into the feedforward layer; every LSTM and readout tensor stays untouched.
* infer_class       - classify a query by optimizing the length-26 input
  vector from zero; the argmax of the result is the label.
* generate_variants - perturb the one-hot input with per-step Gaussian noise.
* blend             - feed a convex mixture of two one-hot codes.
"""

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .network import forward_inputs, forward_sequence, one_hot
from .training import (TrainConfig, adam_step, backprop_through_time,
                       init_adam_state, mse_loss, sgd_step)

FF_MASK = ("w_ff", "b_ff")
FF_MASK_NO_BIAS = ("w_ff",)

# Input-noise scale for variant generation; chosen so desk-scale variants
# stay classifiable.
DEFAULT_NOISE_SIGMA = 0.05


@dataclass
class OneShotConfig:
    iterations: int = 13000
    learning_rate: float = 0.001

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")


@dataclass
class ClassInferConfig:
    iterations: int = 1000
    learning_rate: float = 0.01

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")


@dataclass
class PriorComparison:
    """Final acquisition losses of a trained vs an untrained prior."""

    trained_final_loss: float
    untrained_final_loss: float
    iterations: int
    learning_rate: float
    label: int


def one_shot_acquire(params, sample, config, adapt_bias=True, use_adam=True):
    """Acquire one character by gradient updates masked to the feedforward
    layer's incoming weights (and bias unless adapt_bias=False).

    Returns new params and the per-iteration loss history; the input params
    are never mutated, and all tensors outside the mask are shared with
    them. Adam starts from a fresh state; use_adam=False switches to plain
    gradient descent at the same learning rate.
    """
    mask = FF_MASK if adapt_bias else FF_MASK_NO_BIAS
    work = _copy_masked(params, mask)
    target = np.asarray(sample.points, dtype=np.float64)
    x_seq = np.tile(one_hot(sample.label), (len(target), 1))
    adam_cfg = TrainConfig(learning_rate=config.learning_rate, steps=0,
                           seed=0)
    state = init_adam_state(work)
    losses = np.empty(config.iterations)
    for it in range(config.iterations):
        _, trace = forward_inputs(work, x_seq)
        losses[it] = mse_loss(trace.y, target)
        grads, _ = backprop_through_time(work, trace, target)
        if use_adam:
            work, state = adam_step(work, grads, state, adam_cfg, mask=mask)
        else:
            work = sgd_step(work, grads, config.learning_rate, mask=mask)
    return work, losses


def _copy_masked(params, mask):
    return replace(params, **{n: getattr(params, n).copy() for n in mask})


def compare_priors(trained_params, untrained_params, sample, config,
                   **acquire_kwargs):
    """Run one_shot_acquire on both priors and report the final losses
    (the trained-vs-untrained control experiment)."""
    if not trained_params.same_architecture(untrained_params):
        raise ValueError("priors must share one architecture")
    _, trained_losses = one_shot_acquire(trained_params, sample, config,
                                         **acquire_kwargs)
    _, untrained_losses = one_shot_acquire(untrained_params, sample, config,
                                           **acquire_kwargs)
    return PriorComparison(
        trained_final_loss=float(trained_losses[-1]),
        untrained_final_loss=float(untrained_losses[-1]),
        iterations=config.iterations,
        learning_rate=config.learning_rate,
        label=sample.label,
    )


def infer_class(params, query, config):
    """Infer which acquired character a query trajectory is.

    Starts from an all-zero input vector and runs gradient descent on it,
    feeding the same vector at every time step; parameters never change.
    The objective is the summed squared error over all steps and channels
    (the L2 loss; under the mean-squared convention the stated learning
    rate would shrink with trajectory length). Returns the final vector
    and its argmax; ties resolve to the lowest index.
    """
    target = _query_points(query)
    x = np.zeros(26)
    for _ in range(config.iterations):
        _, trace = forward_sequence(params, x, len(target))
        _, input_grad = backprop_through_time(params, trace, target)
        x = x - config.learning_rate * target.size * input_grad
    return x, int(np.argmax(x))


def _query_points(query):
    """Accept a CharacterSample or a bare [T, 4] trajectory array."""
    points = getattr(query, "points", query)
    return np.asarray(points, dtype=np.float64)


def generate(params, label, n_steps):
    """Free generation: run the net on the plain one-hot code."""
    y, _ = forward_sequence(params, one_hot(label), n_steps)
    return y


def generate_variants(params, label, noise_sigma, count, n_steps, seed,
                      per_step_noise=True):
    """Trajectory variants from Gaussian noise on the input code.

    Noise is drawn independently per time step and dimension (the
    per_step_noise=False mode draws one vector per variant instead).
    sigma = 0 reproduces the base generation exactly.
    """
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    rng = np.random.default_rng(seed)
    base = one_hot(label)
    variants = []
    for _ in range(count):
        if per_step_noise:
            noise = rng.normal(0.0, noise_sigma, size=(n_steps, 26))
        else:
            noise = np.tile(rng.normal(0.0, noise_sigma, size=26),
                            (n_steps, 1))
        y, _ = forward_inputs(params, base + noise)
        variants.append(y)
    return variants


def blend(params, label_a, label_b, alpha, n_steps):
    """Generate from alpha * one_hot(a) + (1 - alpha) * one_hot(b)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    x = alpha * one_hot(label_a) + (1.0 - alpha) * one_hot(label_b)
    y, _ = forward_sequence(params, x, n_steps)
    return y


def acquire_all(params, samples, config, **acquire_kwargs):
    """Acquire several single samples sequentially into one model, in
    ascending label order. Returns (params, manifest)."""
    manifest = AcquisitionManifest()
    for sample in sorted(samples, key=lambda s: s.label):
        params, losses = one_shot_acquire(params, sample, config,
                                          **acquire_kwargs)
        manifest.entries.append(AcquiredLabel(
            label=sample.label, length=len(sample.points),
            final_loss=float(losses[-1])))
    return params, manifest


@dataclass
class AcquiredLabel:
    label: int
    length: int
    final_loss: float


@dataclass
class AcquisitionManifest:
    """Sidecar record of which labels a checkpoint acquired one-shot."""

    entries: list = field(default_factory=list)

    def labels(self):
        return [e.label for e in self.entries]

    def length_of(self, label):
        for e in self.entries:
            if e.label == label:
                return e.length
        raise KeyError(f"label {label} not in manifest")


def save_manifest(manifest, path):
    doc = {"version": 1,
           "acquired": [{"label": e.label, "length": e.length,
                         "final_loss": e.final_loss}
                        for e in manifest.entries]}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path):
    with open(path) as fh:
        doc = json.load(fh)
    manifest = AcquisitionManifest()
    for e in doc["acquired"]:
        manifest.entries.append(AcquiredLabel(label=e["label"],
                                              length=e["length"],
                                              final_loss=e["final_loss"]))
    return manifest
