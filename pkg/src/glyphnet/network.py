"""Model parameters and the deterministic forward pass.

Architecture: a constant length-26 input per time step feeds a tanh
feedforward layer, then a single LSTM layer, then a linear readout to the
four trajectory channels (dx, dy, pressure, stroke onset). Every forward
call caches all per-step activations so the training module can run exact
backpropagation through time.
"""

import struct
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .backend import kernels

N_INPUT = 26
N_OUTPUT = 4

# Fixed tensor order shared by the kernels, the optimizer state and the
# checkpoint format.
TENSOR_NAMES = (
    "w_ff", "b_ff",
    "w_i", "u_i", "b_i",
    "w_f", "u_f", "b_f",
    "w_g", "u_g", "b_g",
    "w_o", "u_o", "b_o",
    "w_out", "b_out",
)

_CKPT_MAGIC = b"GLYPHNET"
_CKPT_VERSION = 1


@dataclass
class ModelParams:
    """All learnable weights. Arrays are C-contiguous float64."""

    w_ff: np.ndarray   # [n_ff, 26]
    b_ff: np.ndarray   # [n_ff]
    w_i: np.ndarray    # [n_lstm, n_ff]
    u_i: np.ndarray    # [n_lstm, n_lstm]
    b_i: np.ndarray    # [n_lstm]
    w_f: np.ndarray
    u_f: np.ndarray
    b_f: np.ndarray
    w_g: np.ndarray    # cell candidate gate
    u_g: np.ndarray
    b_g: np.ndarray
    w_o: np.ndarray
    u_o: np.ndarray
    b_o: np.ndarray
    w_out: np.ndarray  # [4, n_lstm]
    b_out: np.ndarray  # [4]

    @property
    def n_ff(self):
        return self.w_ff.shape[0]

    @property
    def n_lstm(self):
        return self.b_i.shape[0]

    def tensors(self):
        """Name -> array view, in TENSOR_NAMES order."""
        return {name: getattr(self, name) for name in TENSOR_NAMES}

    def tensor_tuple(self):
        return tuple(getattr(self, name) for name in TENSOR_NAMES)

    def copy(self):
        return ModelParams(*(getattr(self, n).copy() for n in TENSOR_NAMES))

    def same_architecture(self, other):
        return all(getattr(self, n).shape == getattr(other, n).shape
                   for n in TENSOR_NAMES)


@dataclass
class LSTMState:
    h: np.ndarray
    c: np.ndarray


class GateActivations(NamedTuple):
    i: np.ndarray
    f: np.ndarray
    g: np.ndarray  # cell candidate
    o: np.ndarray


@dataclass
class ForwardTrace:
    """Per-step activation cache produced by a forward pass."""

    x: np.ndarray     # [T, 26] inputs actually fed
    z_ff: np.ndarray  # [T, n_ff] feedforward pre-activation
    a: np.ndarray     # [T, n_ff] feedforward activation
    i: np.ndarray     # [T, n_lstm] gate activations ...
    f: np.ndarray
    g: np.ndarray
    o: np.ndarray
    c: np.ndarray     # [T, n_lstm] cell state
    h: np.ndarray     # [T, n_lstm] hidden state
    y: np.ndarray     # [T, 4] readout

    def __len__(self):
        return self.x.shape[0]


def init_params(n_ff, n_lstm, seed):
    """Uniform [-1/sqrt(fan_in), +1/sqrt(fan_in)] weights, zero biases
    except the forget gate bias, which starts at one."""
    if n_ff < 1 or n_lstm < 1:
        raise ValueError("layer sizes must be >= 1")
    rng = np.random.default_rng(seed)

    def u(rows, cols, fan_in):
        s = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-s, s, size=(rows, cols))

    return ModelParams(
        w_ff=u(n_ff, N_INPUT, N_INPUT),
        b_ff=np.zeros(n_ff),
        w_i=u(n_lstm, n_ff, n_ff),
        u_i=u(n_lstm, n_lstm, n_lstm),
        b_i=np.zeros(n_lstm),
        w_f=u(n_lstm, n_ff, n_ff),
        u_f=u(n_lstm, n_lstm, n_lstm),
        b_f=np.ones(n_lstm),
        w_g=u(n_lstm, n_ff, n_ff),
        u_g=u(n_lstm, n_lstm, n_lstm),
        b_g=np.zeros(n_lstm),
        w_o=u(n_lstm, n_ff, n_ff),
        u_o=u(n_lstm, n_lstm, n_lstm),
        b_o=np.zeros(n_lstm),
        w_out=u(N_OUTPUT, n_lstm, n_lstm),
        b_out=np.zeros(N_OUTPUT),
    )


def one_hot(label):
    if not 0 <= label <= 25:
        raise ValueError(f"label {label} outside [0, 25]")
    x = np.zeros(N_INPUT)
    x[label] = 1.0
    return x


def ff_forward(params, x):
    """tanh(W x + b) for a single input vector."""
    return np.tanh(params.w_ff @ x + params.b_ff)


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def lstm_step(params, a, state):
    """One LSTM step on feedforward activation `a`. Returns the new state
    and the gate activations."""
    i = _sigmoid(params.w_i @ a + params.u_i @ state.h + params.b_i)
    f = _sigmoid(params.w_f @ a + params.u_f @ state.h + params.b_f)
    g = np.tanh(params.w_g @ a + params.u_g @ state.h + params.b_g)
    o = _sigmoid(params.w_o @ a + params.u_o @ state.h + params.b_o)
    c = f * state.c + i * g
    h = o * np.tanh(c)
    return LSTMState(h=h, c=c), GateActivations(i=i, f=f, g=g, o=o)


def readout(params, h):
    """Linear projection to (dx, dy, pressure, stroke_onset)."""
    return params.w_out @ h + params.b_out


def forward_inputs(params, x_seq):
    """Forward pass over explicit per-step inputs [T, 26]; zero initial
    state. Returns (outputs [T, 4], ForwardTrace)."""
    x_seq = np.ascontiguousarray(x_seq, dtype=np.float64)
    if x_seq.ndim != 2 or x_seq.shape[1] != N_INPUT:
        raise ValueError(f"input sequence must be [T, {N_INPUT}]")
    y, z_ff, a, i, f, g, o, c, h = kernels.forward_pass(
        params.tensor_tuple(), x_seq)
    trace = ForwardTrace(x=x_seq, z_ff=z_ff, a=a, i=i, f=f, g=g, o=o,
                         c=c, h=h, y=y)
    return y, trace


def forward_sequence(params, input_vec, n_steps):
    """Forward pass feeding the same input vector at every step."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    x_seq = np.tile(np.asarray(input_vec, dtype=np.float64), (n_steps, 1))
    return forward_inputs(params, x_seq)


def save_checkpoint(params, path):
    """Binary checkpoint: 8-byte magic, then version/n_ff/n_lstm as
    little-endian uint32, then the tensors of TENSOR_NAMES in order as raw
    little-endian float64. load(save(p)) is bit-exact."""
    with open(path, "wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(struct.pack("<III", _CKPT_VERSION, params.n_ff,
                             params.n_lstm))
        for name in TENSOR_NAMES:
            fh.write(np.ascontiguousarray(getattr(params, name),
                                          dtype="<f8").tobytes())


def load_checkpoint(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != _CKPT_MAGIC:
        raise ValueError(f"{path}: not a glyphnet checkpoint")
    version, n_ff, n_lstm = struct.unpack_from("<III", blob, 8)
    if version != _CKPT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    shapes = _tensor_shapes(n_ff, n_lstm)
    offset = 8 + 12
    arrays = {}
    for name in TENSOR_NAMES:
        shape = shapes[name]
        count = int(np.prod(shape))
        arr = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
        arrays[name] = arr.reshape(shape).copy()
        offset += count * 8
    if offset != len(blob):
        raise ValueError(f"{path}: trailing bytes in checkpoint")
    return ModelParams(**arrays)


def _tensor_shapes(n_ff, n_lstm):
    shapes = {"w_ff": (n_ff, N_INPUT), "b_ff": (n_ff,),
              "w_out": (N_OUTPUT, n_lstm), "b_out": (N_OUTPUT,)}
    for gate in "ifgo":
        shapes[f"w_{gate}"] = (n_lstm, n_ff)
        shapes[f"u_{gate}"] = (n_lstm, n_lstm)
        shapes[f"b_{gate}"] = (n_lstm,)
    return shapes
