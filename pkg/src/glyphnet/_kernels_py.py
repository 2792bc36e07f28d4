"""Numpy implementation of the sequence kernels.

This is the fallback backend used when the compiled extension
(`glyphnet._kernels_c`) is unavailable; both expose the same two functions
with identical semantics. Everything is double precision. The weight tuple
argument `w` carries the sixteen parameter tensors in the fixed order of
`glyphnet.network.TENSOR_NAMES`.
"""

import numpy as np

BACKEND_NAME = "python"


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def forward_pass(w, x_seq):
    """Run the net for all steps of `x_seq` ([T, 26], one row per step).

    Returns (y, z_ff, a, i, f, g, o, c, h): the [T, 4] readout plus every
    per-step activation the backward pass needs. Initial LSTM state is zero.
    """
    (w_ff, b_ff, w_i, u_i, b_i, w_f, u_f, b_f,
     w_g, u_g, b_g, w_o, u_o, b_o, w_out, b_out) = w
    n_steps = x_seq.shape[0]
    n_lstm = b_i.shape[0]

    z_ff = x_seq @ w_ff.T + b_ff
    a = np.tanh(z_ff)

    # Input-driven halves of the gate pre-activations batch over time; only
    # the h recurrence is inherently sequential.
    pre_i = a @ w_i.T + b_i
    pre_f = a @ w_f.T + b_f
    pre_g = a @ w_g.T + b_g
    pre_o = a @ w_o.T + b_o

    i = np.empty((n_steps, n_lstm))
    f = np.empty((n_steps, n_lstm))
    g = np.empty((n_steps, n_lstm))
    o = np.empty((n_steps, n_lstm))
    c = np.empty((n_steps, n_lstm))
    h = np.empty((n_steps, n_lstm))

    h_t = np.zeros(n_lstm)
    c_t = np.zeros(n_lstm)
    for t in range(n_steps):
        i_t = _sigmoid(pre_i[t] + u_i @ h_t)
        f_t = _sigmoid(pre_f[t] + u_f @ h_t)
        g_t = np.tanh(pre_g[t] + u_g @ h_t)
        o_t = _sigmoid(pre_o[t] + u_o @ h_t)
        c_t = f_t * c_t + i_t * g_t
        h_t = o_t * np.tanh(c_t)
        i[t] = i_t
        f[t] = f_t
        g[t] = g_t
        o[t] = o_t
        c[t] = c_t
        h[t] = h_t

    y = h @ w_out.T + b_out
    return y, z_ff, a, i, f, g, o, c, h


def backward_pass(w, x_seq, a, i, f, g, o, c, h, d_y):
    """Exact reverse-mode gradients for a forward pass.

    `d_y` is dLoss/dOutput, [T, 4]. Returns a 16-tuple of gradient tensors
    (same order and shapes as `w`) and the gradient of the loss with respect
    to the input vector summed over time steps, [26].
    """
    (w_ff, b_ff, w_i, u_i, b_i, w_f, u_f, b_f,
     w_g, u_g, b_g, w_o, u_o, b_o, w_out, b_out) = w
    n_steps, n_lstm = h.shape

    d_w_out = d_y.T @ h
    d_b_out = d_y.sum(axis=0)
    d_h_seq = d_y @ w_out

    d_zi = np.empty((n_steps, n_lstm))
    d_zf = np.empty((n_steps, n_lstm))
    d_zg = np.empty((n_steps, n_lstm))
    d_zo = np.empty((n_steps, n_lstm))

    d_h_next = np.zeros(n_lstm)
    d_c_next = np.zeros(n_lstm)
    for t in range(n_steps - 1, -1, -1):
        d_h = d_h_seq[t] + d_h_next
        tc = np.tanh(c[t])
        d_o = d_h * tc
        d_c = d_h * o[t] * (1.0 - tc * tc) + d_c_next
        c_prev = c[t - 1] if t > 0 else 0.0
        d_zi[t] = d_c * g[t] * i[t] * (1.0 - i[t])
        d_zf[t] = d_c * c_prev * f[t] * (1.0 - f[t])
        d_zg[t] = d_c * i[t] * (1.0 - g[t] * g[t])
        d_zo[t] = d_o * o[t] * (1.0 - o[t])
        d_c_next = d_c * f[t]
        d_h_next = (u_i.T @ d_zi[t] + u_f.T @ d_zf[t]
                    + u_g.T @ d_zg[t] + u_o.T @ d_zo[t])

    h_prev = np.vstack([np.zeros((1, n_lstm)), h[:-1]])
    d_w_i = d_zi.T @ a
    d_u_i = d_zi.T @ h_prev
    d_b_i = d_zi.sum(axis=0)
    d_w_f = d_zf.T @ a
    d_u_f = d_zf.T @ h_prev
    d_b_f = d_zf.sum(axis=0)
    d_w_g = d_zg.T @ a
    d_u_g = d_zg.T @ h_prev
    d_b_g = d_zg.sum(axis=0)
    d_w_o = d_zo.T @ a
    d_u_o = d_zo.T @ h_prev
    d_b_o = d_zo.sum(axis=0)

    d_a = d_zi @ w_i + d_zf @ w_f + d_zg @ w_g + d_zo @ w_o
    d_z_ff = d_a * (1.0 - a * a)
    d_w_ff = d_z_ff.T @ x_seq
    d_b_ff = d_z_ff.sum(axis=0)
    d_x = d_z_ff @ w_ff

    grads = (d_w_ff, d_b_ff, d_w_i, d_u_i, d_b_i, d_w_f, d_u_f, d_b_f,
             d_w_g, d_u_g, d_b_g, d_w_o, d_u_o, d_b_o, d_w_out, d_b_out)
    return grads, d_x.sum(axis=0)
