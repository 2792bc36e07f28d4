"""Compiled sequence kernels (same contract as glyphnet._kernels_py).

Only the time recurrences run as C loops; everything that batches over all
time steps at once (feedforward layer, gate input halves, weight-gradient
accumulation) stays in numpy, where BLAS already does it well. This keeps
the compiled backend ahead of the numpy fallback at every model size
instead of only at small ones.

All arrays must be C-contiguous float64, which glyphnet.network hands in.
"""

import numpy as np

from libc.math cimport exp, tanh

BACKEND_NAME = "c"


cdef inline double _sig(double z) noexcept nogil:
    return 1.0 / (1.0 + exp(-z))


cdef void _recurrence(double[:, ::1] pre_i, double[:, ::1] pre_f,
                      double[:, ::1] pre_g, double[:, ::1] pre_o,
                      double[:, ::1] u_i_t, double[:, ::1] u_f_t,
                      double[:, ::1] u_g_t, double[:, ::1] u_o_t,
                      double[:, ::1] i, double[:, ::1] f,
                      double[:, ::1] g, double[:, ::1] o,
                      double[:, ::1] c, double[:, ::1] h,
                      double[:, ::1] z) noexcept nogil:
    # u_*_t are the transposed recurrent matrices, so the inner loops run
    # over contiguous rows (axpy form) and auto-vectorize.
    cdef Py_ssize_t n_steps = pre_i.shape[0]
    cdef Py_ssize_t n = pre_i.shape[1]
    cdef Py_ssize_t t, j, k
    cdef double iv, fv, gv, ov, cv, hk

    for t in range(n_steps):
        for j in range(n):
            z[0, j] = pre_i[t, j]
            z[1, j] = pre_f[t, j]
            z[2, j] = pre_g[t, j]
            z[3, j] = pre_o[t, j]
        if t > 0:
            for k in range(n):
                hk = h[t - 1, k]
                for j in range(n):
                    z[0, j] += u_i_t[k, j] * hk
                for j in range(n):
                    z[1, j] += u_f_t[k, j] * hk
                for j in range(n):
                    z[2, j] += u_g_t[k, j] * hk
                for j in range(n):
                    z[3, j] += u_o_t[k, j] * hk
        for j in range(n):
            iv = _sig(z[0, j])
            fv = _sig(z[1, j])
            gv = tanh(z[2, j])
            ov = _sig(z[3, j])
            cv = iv * gv
            if t > 0:
                cv += fv * c[t - 1, j]
            i[t, j] = iv
            f[t, j] = fv
            g[t, j] = gv
            o[t, j] = ov
            c[t, j] = cv
            h[t, j] = ov * tanh(cv)


def forward_pass(w, x_seq):
    """See glyphnet._kernels_py.forward_pass."""
    (w_ff, b_ff, w_i, u_i, b_i, w_f, u_f, b_f,
     w_g, u_g, b_g, w_o, u_o, b_o, w_out, b_out) = w
    n_steps = x_seq.shape[0]
    n_lstm = b_i.shape[0]

    z_ff = x_seq @ w_ff.T + b_ff
    a = np.tanh(z_ff)
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
    z = np.empty((4, n_lstm))
    _recurrence(pre_i, pre_f, pre_g, pre_o,
                np.ascontiguousarray(u_i.T), np.ascontiguousarray(u_f.T),
                np.ascontiguousarray(u_g.T), np.ascontiguousarray(u_o.T),
                i, f, g, o, c, h, z)

    y = h @ w_out.T + b_out
    return y, z_ff, a, i, f, g, o, c, h


cdef void _back_recurrence(double[:, ::1] d_h_seq, double[:, ::1] u_i,
                           double[:, ::1] u_f, double[:, ::1] u_g,
                           double[:, ::1] u_o, double[:, ::1] i,
                           double[:, ::1] f, double[:, ::1] g,
                           double[:, ::1] o, double[:, ::1] c,
                           double[:, ::1] d_zi, double[:, ::1] d_zf,
                           double[:, ::1] d_zg, double[:, ::1] d_zo,
                           double[::1] d_h_next,
                           double[::1] d_c_next) noexcept nogil:
    cdef Py_ssize_t n_steps = d_h_seq.shape[0]
    cdef Py_ssize_t n = d_h_seq.shape[1]
    cdef Py_ssize_t t, j, k
    cdef double dh, dc, tc, dov, cp, vi, vf, vg, vo

    for t in range(n_steps - 1, -1, -1):
        for j in range(n):
            dh = d_h_seq[t, j] + d_h_next[j]
            tc = tanh(c[t, j])
            dov = dh * tc
            dc = dh * o[t, j] * (1.0 - tc * tc) + d_c_next[j]
            cp = c[t - 1, j] if t > 0 else 0.0
            d_zi[t, j] = dc * g[t, j] * i[t, j] * (1.0 - i[t, j])
            d_zf[t, j] = dc * cp * f[t, j] * (1.0 - f[t, j])
            d_zg[t, j] = dc * i[t, j] * (1.0 - g[t, j] * g[t, j])
            d_zo[t, j] = dov * o[t, j] * (1.0 - o[t, j])
            d_c_next[j] = dc * f[t, j]
        # d_h_next = U_i^T dzi + ... accumulated row-wise so the inner
        # loops stay contiguous.
        for k in range(n):
            d_h_next[k] = 0.0
        for j in range(n):
            vi = d_zi[t, j]
            vf = d_zf[t, j]
            vg = d_zg[t, j]
            vo = d_zo[t, j]
            for k in range(n):
                d_h_next[k] += (u_i[j, k] * vi + u_f[j, k] * vf
                                + u_g[j, k] * vg + u_o[j, k] * vo)


def backward_pass(w, x_seq, a, i, f, g, o, c, h, d_y):
    """See glyphnet._kernels_py.backward_pass."""
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
    _back_recurrence(d_h_seq, u_i, u_f, u_g, u_o, i, f, g, o, c,
                     d_zi, d_zf, d_zg, d_zo, d_h_next, d_c_next)

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
