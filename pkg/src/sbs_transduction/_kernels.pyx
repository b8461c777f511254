# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops; mirrors ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs

cnp.import_array()

ctypedef double complex cplx

cdef inline cplx cj(cplx z) noexcept nogil:
    return z.conjugate()


cdef inline void _env_rhs(cplx a1, cplx a2, cplx b, cplx c1, cplx c2, cplx cb,
                          double alpha, double loss1, double loss2, double s, bint local,
                          cplx* d1, cplx* d2, cplx* db) noexcept nogil:
    cdef cplx mi = -1j
    if local:
        b = mi * cb * cj(a1) * a2 / alpha
        db[0] = 0
    else:
        db[0] = mi * cb * cj(a1) * a2 - alpha * b
    d1[0] = s * (mi * c1 * a2 * cj(b) - loss1 * a1)
    d2[0] = mi * c2 * a1 * b - loss2 * a2


def march_envelopes(a1_0, a2_0, b_0, Py_ssize_t n_steps, double h, c1_, c2_, cb_,
                    double alpha, double loss1, double loss2, double stokes_sign, bint local):
    cdef cnp.ndarray[cplx, ndim=1] a1o = np.empty(n_steps + 1, dtype=complex)
    cdef cnp.ndarray[cplx, ndim=1] a2o = np.empty(n_steps + 1, dtype=complex)
    cdef cnp.ndarray[cplx, ndim=1] bo = np.empty(n_steps + 1, dtype=complex)
    cdef cplx a1 = a1_0, a2 = a2_0, b = b_0
    cdef cplx c1 = c1_, c2 = c2_, cb = cb_
    cdef cplx k1a, k1b, k1c, k2a, k2b, k2c, k3a, k3b, k3c, k4a, k4b, k4c
    cdef cplx mi = -1j
    cdef double hh = 0.5 * h, s = stokes_sign
    cdef Py_ssize_t k
    if local:
        b = mi * cb * cj(a1) * a2 / alpha
    a1o[0] = a1
    a2o[0] = a2
    bo[0] = b
    with nogil:
        for k in range(n_steps):
            _env_rhs(a1, a2, b, c1, c2, cb, alpha, loss1, loss2, s, local, &k1a, &k1b, &k1c)
            _env_rhs(a1 + hh * k1a, a2 + hh * k1b, b + hh * k1c, c1, c2, cb, alpha, loss1, loss2, s,
                     local, &k2a, &k2b, &k2c)
            _env_rhs(a1 + hh * k2a, a2 + hh * k2b, b + hh * k2c, c1, c2, cb, alpha, loss1, loss2, s,
                     local, &k3a, &k3b, &k3c)
            _env_rhs(a1 + h * k3a, a2 + h * k3b, b + h * k3c, c1, c2, cb, alpha, loss1, loss2, s,
                     local, &k4a, &k4b, &k4c)
            a1 = a1 + h / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a)
            a2 = a2 + h / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b)
            if local:
                b = mi * cb * cj(a1) * a2 / alpha
            else:
                b = b + h / 6.0 * (k1c + 2 * k2c + 2 * k3c + k4c)
            a1o[k + 1] = a1
            a2o[k + 1] = a2
            bo[k + 1] = b
    return a1o, a2o, bo


def green_recursion(drive, double decay, w0_, w1_):
    cdef cnp.ndarray[cplx, ndim=1] d = np.ascontiguousarray(drive, dtype=complex)
    cdef Py_ssize_t n = d.shape[0], k
    cdef cnp.ndarray[cplx, ndim=1] out = np.empty(n, dtype=complex)
    cdef cplx acc = 0, w0 = w0_, w1 = w1_
    if n == 0:
        return out
    out[0] = acc
    with nogil:
        for k in range(n - 1):
            acc = decay * acc + w0 * d[k] + w1 * d[k + 1]
            out[k + 1] = acc
    return out


cdef void _advect(cplx[::1] f, cplx[::1] g, double c, cplx bc) noexcept nogil:
    cdef Py_ssize_t n = f.shape[0], j
    if c > 0:
        g[0] = bc
        for j in range(1, n):
            g[j] = f[j] - c * (f[j] - f[j - 1])
    elif c < 0:
        for j in range(n - 1):
            g[j] = f[j] - c * (f[j + 1] - f[j])
        g[n - 1] = bc
    else:
        for j in range(n):
            g[j] = f[j]


def upwind_run(a1_in, a2_in, b_in, Py_ssize_t steps, double dt, double h, double v1, double v2,
               double vb, double g1, double g2, double gb, c1_, c2_, cb_, bc1_, bc2_, bcb_):
    cdef cplx[::1] a1 = np.array(a1_in, dtype=complex)
    cdef cplx[::1] a2 = np.array(a2_in, dtype=complex)
    cdef cplx[::1] b = np.array(b_in, dtype=complex)
    cdef Py_ssize_t n = a1.shape[0], j, it
    cdef cplx[::1] n1 = np.empty(n, dtype=complex)
    cdef cplx[::1] n2 = np.empty(n, dtype=complex)
    cdef cplx[::1] nb = np.empty(n, dtype=complex)
    cdef cplx c1 = c1_, c2 = c2_, cb = cb_, bc1 = bc1_, bc2 = bc2_, bcb = bcb_
    cdef cplx mi = -1j
    cdef double e1 = exp(-g1 * dt), e2 = exp(-g2 * dt), eb = exp(-gb * dt)
    cdef double s1 = fabs(v1) * dt, s2 = fabs(v2) * dt, sb = fabs(vb) * dt
    with nogil:
        for it in range(steps):
            _advect(a1, n1, v1 * dt / h, bc1)
            _advect(a2, n2, v2 * dt / h, bc2)
            _advect(b, nb, vb * dt / h, bcb)
            for j in range(n):
                n1[j] = (n1[j] + s1 * mi * c1 * a2[j] * cj(b[j])) * e1
                n2[j] = (n2[j] + s2 * mi * c2 * a1[j] * b[j]) * e2
                nb[j] = (nb[j] + sb * mi * cb * cj(a1[j]) * a2[j]) * eb
            for j in range(n):
                a1[j] = n1[j]
                a2[j] = n2[j]
                b[j] = nb[j]
            if v1 > 0:
                a1[0] = bc1
            elif v1 < 0:
                a1[n - 1] = bc1
            if v2 > 0:
                a2[0] = bc2
            elif v2 < 0:
                a2[n - 1] = bc2
            if vb > 0:
                b[0] = bcb
            elif vb < 0:
                b[n - 1] = bcb
    return np.asarray(a1), np.asarray(a2), np.asarray(b)


cdef inline void _rlc_rhs(double* y, double eps, double L, double dL, double R, double C,
                          double* out) noexcept nogil:
    cdef double I = y[1] / L
    out[0] = I
    out[1] = eps - R * I - y[0] / C
    out[2] = eps * I
    out[3] = R * I * I
    out[4] = 0.5 * I * I * dL


def rk4_rlc(eps_f_, eps_h_, L_f_, L_h_, dL_f_, dL_h_, double dt, double R, double C,
            double q0, double phi0):
    cdef double[::1] eps_f = np.ascontiguousarray(eps_f_, dtype=float)
    cdef double[::1] eps_h = np.ascontiguousarray(eps_h_, dtype=float)
    cdef double[::1] L_f = np.ascontiguousarray(L_f_, dtype=float)
    cdef double[::1] L_h = np.ascontiguousarray(L_h_, dtype=float)
    cdef double[::1] dL_f = np.ascontiguousarray(dL_f_, dtype=float)
    cdef double[::1] dL_h = np.ascontiguousarray(dL_h_, dtype=float)
    cdef Py_ssize_t n = eps_f.shape[0], k, i
    out_arr = np.zeros((5, n))
    cdef double[:, ::1] out = out_arr
    cdef double y[5]
    cdef double t[5]
    cdef double k1[5]
    cdef double k2[5]
    cdef double k3[5]
    cdef double k4[5]
    y[0] = q0
    y[1] = phi0
    y[2] = 0
    y[3] = 0
    y[4] = 0
    for i in range(5):
        out[i, 0] = y[i]
    with nogil:
        for k in range(n - 1):
            _rlc_rhs(y, eps_f[k], L_f[k], dL_f[k], R, C, k1)
            for i in range(5):
                t[i] = y[i] + 0.5 * dt * k1[i]
            _rlc_rhs(t, eps_h[k], L_h[k], dL_h[k], R, C, k2)
            for i in range(5):
                t[i] = y[i] + 0.5 * dt * k2[i]
            _rlc_rhs(t, eps_h[k], L_h[k], dL_h[k], R, C, k3)
            for i in range(5):
                t[i] = y[i] + dt * k3[i]
            _rlc_rhs(t, eps_f[k + 1], L_f[k + 1], dL_f[k + 1], R, C, k4)
            for i in range(5):
                y[i] = y[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i])
                out[i, k + 1] = y[i]
    return out_arr
