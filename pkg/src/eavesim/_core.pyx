# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-step simulation kernels.

Twin of eavesim._core_py with identical semantics; the episode loop runs
entirely in C with small dense matrix helpers sized for desk-scale plants.
"""

from libc.stdlib cimport malloc, free

import numpy as np

BACKEND = "compiled"


cdef inline void _matvec(const double* m, const double* x, double* out,
                         Py_ssize_t rows, Py_ssize_t cols) noexcept:
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(rows):
        acc = 0.0
        for j in range(cols):
            acc += m[i * cols + j] * x[j]
        out[i] = acc


cdef inline void _cov_predict(const double* a, const double* p, const double* q,
                              double* tmp, double* out, Py_ssize_t n) noexcept:
    # out = a p a' + q, tmp is n*n scratch
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc += a[i * n + k] * p[k * n + j]
            tmp[i * n + j] = acc
    for i in range(n):
        for j in range(n):
            acc = q[i * n + j]
            for k in range(n):
                acc += tmp[i * n + k] * a[j * n + k]
            out[i * n + j] = acc


cdef inline double _trace(const double* p, Py_ssize_t n) noexcept:
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(n):
        acc += p[i * n + i]
    return acc


cdef inline void _copy(const double* src, double* dst, Py_ssize_t size) noexcept:
    cdef Py_ssize_t i
    for i in range(size):
        dst[i] = src[i]


def shiryaev_path(signed char[::1] lam_bits, double kappa, double gamma,
                  double gamma_bar, double m0=1.0):
    """No-change posterior after each outcome in lam_bits, starting from m0."""
    cdef Py_ssize_t horizon = lam_bits.shape[0]
    out = np.empty(horizon, dtype=np.float64)
    cdef double[::1] out_v = out
    cdef double m = m0, p
    cdef Py_ssize_t i
    for i in range(horizon):
        p = (1.0 - kappa) * m
        if lam_bits[i] == 1:
            m = p * (1.0 - gamma) / ((1.0 - gamma_bar) + (gamma_bar - gamma) * p)
        else:
            m = p * gamma / (gamma_bar - (gamma_bar - gamma) * p)
        out_v[i] = m
    return out


def run_episode_core(
    double[:, ::1] a,
    double[:, ::1] q,
    double[:, ::1] c,
    double[:, ::1] kbar,
    double[:, ::1] pbar,
    double[:, ::1] pn,
    double[:, ::1] p_user0,
    double[:, ::1] p_eaves0,
    double[::1] x0,
    double[:, ::1] w,
    double[:, ::1] v,
    double[:, ::1] decoy,
    signed char[::1] lam_bits,
    signed char[::1] lam_e_bits,
    signed char[::1] u_bits,
    double kappa,
    double gamma,
    double gamma_bar,
    double h,
    bint start_detected,
):
    """Simulate one episode step by step; see eavesim._core_py for the contract."""
    cdef Py_ssize_t horizon = lam_bits.shape[0]
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t mdim = c.shape[0]

    nu_out = np.empty(horizon, dtype=np.int8)
    m_out = np.empty(horizon, dtype=np.float64)
    tr_p = np.empty(horizon, dtype=np.float64)
    tr_pe = np.empty(horizon, dtype=np.float64)
    se_u = np.empty(horizon, dtype=np.float64)
    se_e = np.empty(horizon, dtype=np.float64)
    cdef signed char[::1] nu_v = nu_out
    cdef double[::1] m_v = m_out
    cdef double[::1] trp_v = tr_p
    cdef double[::1] trpe_v = tr_pe
    cdef double[::1] seu_v = se_u
    cdef double[::1] see_v = se_e

    # one flat scratch block: vectors, covariances, matrix temp
    cdef Py_ssize_t nn = n * n
    cdef double* buf = <double*> malloc(sizeof(double) * (6 * n + 2 * mdim + 3 * nn))
    if buf == NULL:
        raise MemoryError()
    cdef double* x = buf
    cdef double* xs = buf + n
    cdef double* xu = buf + 2 * n
    cdef double* xe = buf + 3 * n
    cdef double* vec_a = buf + 4 * n        # generic n-temp
    cdef double* vec_b = buf + 5 * n        # generic n-temp
    cdef double* y = buf + 6 * n            # m-temp
    cdef double* innov = buf + 6 * n + mdim
    cdef double* p_u = buf + 6 * n + 2 * mdim
    cdef double* p_e = p_u + nn
    cdef double* tmp = p_u + 2 * nn

    cdef Py_ssize_t i, j, t
    for j in range(n):
        x[j] = x0[j]
        xs[j] = 0.0
        xu[j] = 0.0
        xe[j] = 0.0
    for j in range(nn):
        p_u[j] = p_user0[j // n, j % n]
        p_e[j] = p_eaves0[j // n, j % n]

    # flat copies of the constant matrices for the C helpers
    cdef double* a_f = <double*> malloc(sizeof(double) * (4 * nn + 2 * n * mdim))
    if a_f == NULL:
        free(buf)
        raise MemoryError()
    cdef double* q_f = a_f + nn
    cdef double* pbar_f = a_f + 2 * nn
    cdef double* pn_f = a_f + 3 * nn
    cdef double* c_f = a_f + 4 * nn                  # mdim x n
    cdef double* k_f = a_f + 4 * nn + n * mdim       # n x mdim
    for i in range(n):
        for j in range(n):
            a_f[i * n + j] = a[i, j]
            q_f[i * n + j] = q[i, j]
            pbar_f[i * n + j] = pbar[i, j]
            pn_f[i * n + j] = pn[i, j]
    for i in range(mdim):
        for j in range(n):
            c_f[i * n + j] = c[i, j]
    for i in range(n):
        for j in range(mdim):
            k_f[i * mdim + j] = kbar[i, j]

    cdef double m = 1.0, p_pred, acc, du, de
    cdef bint detected = start_detected
    cdef long tau = 0 if start_detected else -1
    cdef int lam, nu, u_eff
    cdef const double* payload

    for t in range(horizon):
        # plant: x <- A x + w
        _matvec(a_f, x, vec_a, n, n)
        for j in range(n):
            x[j] = vec_a[j] + w[t, j]
        # measurement: y = C x + v
        _matvec(c_f, x, y, mdim, n)
        for j in range(mdim):
            y[j] += v[t, j]
        # sensor filter: xs <- A xs + K (y - C A xs)
        _matvec(a_f, xs, vec_a, n, n)
        _matvec(c_f, vec_a, innov, mdim, n)
        for j in range(mdim):
            innov[j] = y[j] - innov[j]
        _matvec(k_f, innov, vec_b, n, mdim)
        for j in range(n):
            xs[j] = vec_a[j] + vec_b[j]

        # detector on the user's channel outcome
        lam = lam_bits[t]
        p_pred = (1.0 - kappa) * m
        if lam == 1:
            m = p_pred * (1.0 - gamma) / ((1.0 - gamma_bar) + (gamma_bar - gamma) * p_pred)
        else:
            m = p_pred * gamma / (gamma_bar - (gamma_bar - gamma) * p_pred)
        if not detected and m <= h:
            detected = True
            tau = t + 1
        nu = 0 if detected else 1

        u_eff = u_bits[t] if nu == 0 else 1
        if u_eff == 1:
            payload = xs
        else:
            payload = &decoy[t, 0]

        # legitimate user
        if lam == 1 and u_eff == 1:
            _copy(payload, xu, n)
            _copy(pbar_f, p_u, nn)
        else:
            _matvec(a_f, xu, vec_a, n, n)
            _copy(vec_a, xu, n)
            _cov_predict(a_f, p_u, q_f, tmp, p_u, n)

        # eavesdropper
        if lam_e_bits[t] == 1:
            _copy(payload, xe, n)
            if u_eff == 1:
                _copy(pbar_f, p_e, nn)
            else:
                _copy(pn_f, p_e, nn)
        else:
            _matvec(a_f, xe, vec_a, n, n)
            _copy(vec_a, xe, n)
            _cov_predict(a_f, p_e, q_f, tmp, p_e, n)

        nu_v[t] = <signed char> nu
        m_v[t] = m
        trp_v[t] = _trace(p_u, n)
        trpe_v[t] = _trace(p_e, n)
        du = 0.0
        de = 0.0
        for j in range(n):
            acc = x[j] - xu[j]
            du += acc * acc
            acc = x[j] - xe[j]
            de += acc * acc
        seu_v[t] = du
        see_v[t] = de

    free(a_f)
    free(buf)
    return nu_out, m_out, tr_p, tr_pe, se_u, se_e, int(tau)
