"""Pure-Python reference kernels.

Same signatures and semantics as the compiled ``_kernels`` module; used
when the extension is unavailable or ``SBS_TRANSDUCTION_PURE`` is set.
"""

import numpy as np


def march_envelopes(a1_0, a2_0, b_0, n_steps, h, c1, c2, cb, alpha, loss1, loss2,
                    stokes_sign, local):
    a1o = np.empty(n_steps + 1, dtype=complex)
    a2o = np.empty(n_steps + 1, dtype=complex)
    bo = np.empty(n_steps + 1, dtype=complex)
    a1, a2, b = complex(a1_0), complex(a2_0), complex(b_0)
    c1, c2, cb = complex(c1), complex(c2), complex(cb)
    s = float(stokes_sign)
    mi = -1j

    def rhs(a1, a2, b):
        if local:
            b = mi * cb * a1.conjugate() * a2 / alpha
            db = 0j
        else:
            db = mi * cb * a1.conjugate() * a2 - alpha * b
        d1 = s * (mi * c1 * a2 * b.conjugate() - loss1 * a1)
        d2 = mi * c2 * a1 * b - loss2 * a2
        return d1, d2, db

    if local:
        b = mi * cb * a1.conjugate() * a2 / alpha
    a1o[0], a2o[0], bo[0] = a1, a2, b
    hh = 0.5 * h
    for k in range(n_steps):
        k1 = rhs(a1, a2, b)
        k2 = rhs(a1 + hh * k1[0], a2 + hh * k1[1], b + hh * k1[2])
        k3 = rhs(a1 + hh * k2[0], a2 + hh * k2[1], b + hh * k2[2])
        k4 = rhs(a1 + h * k3[0], a2 + h * k3[1], b + h * k3[2])
        a1 = a1 + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        a2 = a2 + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if local:
            b = mi * cb * a1.conjugate() * a2 / alpha
        else:
            b = b + h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        a1o[k + 1], a2o[k + 1], bo[k + 1] = a1, a2, b
    return a1o, a2o, bo


def green_recursion(drive, decay, w0, w1):
    d = np.asarray(drive, dtype=complex)
    out = np.empty_like(d)
    acc = 0j
    out[0] = acc
    for k in range(d.size - 1):
        acc = decay * acc + w0 * d[k] + w1 * d[k + 1]
        out[k + 1] = acc
    return out


def _advect(f, c, bc):
    # first-order upwind; c = v dt / h (signed)
    g = f.copy()
    if c > 0:
        g[1:] = f[1:] - c * (f[1:] - f[:-1])
        g[0] = bc
    elif c < 0:
        g[:-1] = f[:-1] - c * (f[1:] - f[:-1])
        g[-1] = bc
    return g


def upwind_run(a1, a2, b, steps, dt, h, v1, v2, vb, g1, g2, gb, c1, c2, cb, bc1, bc2, bcb):
    a1 = np.array(a1, dtype=complex)
    a2 = np.array(a2, dtype=complex)
    b = np.array(b, dtype=complex)
    e1, e2, eb = np.exp(-g1 * dt), np.exp(-g2 * dt), np.exp(-gb * dt)
    s1, s2, sb = abs(v1) * dt, abs(v2) * dt, abs(vb) * dt
    for _ in range(steps):
        r1 = -1j * c1 * a2 * np.conj(b)
        r2 = -1j * c2 * a1 * b
        rb = -1j * cb * np.conj(a1) * a2
        n1 = _advect(a1, v1 * dt / h, bc1) + s1 * r1
        n2 = _advect(a2, v2 * dt / h, bc2) + s2 * r2
        nb = _advect(b, vb * dt / h, bcb) + sb * rb
        a1, a2, b = n1 * e1, n2 * e2, nb * eb
        # inflow nodes hold the boundary value exactly
        if v1 > 0:
            a1[0] = bc1
        elif v1 < 0:
            a1[-1] = bc1
        if v2 > 0:
            a2[0] = bc2
        elif v2 < 0:
            a2[-1] = bc2
        if vb > 0:
            b[0] = bcb
        elif vb < 0:
            b[-1] = bcb
    return a1, a2, b


def rk4_rlc(eps_f, eps_h, L_f, L_h, dL_f, dL_h, dt, R, C, q0, phi0):
    n = len(eps_f)
    out = np.zeros((5, n))
    y = [float(q0), float(phi0), 0.0, 0.0, 0.0]
    out[:, 0] = y

    def f(y, eps, L, dL):
        I = y[1] / L
        return (I, eps - R * I - y[0] / C, eps * I, R * I * I, 0.5 * I * I * dL)

    for k in range(n - 1):
        k1 = f(y, eps_f[k], L_f[k], dL_f[k])
        y2 = [y[i] + 0.5 * dt * k1[i] for i in range(5)]
        k2 = f(y2, eps_h[k], L_h[k], dL_h[k])
        y3 = [y[i] + 0.5 * dt * k2[i] for i in range(5)]
        k3 = f(y3, eps_h[k], L_h[k], dL_h[k])
        y4 = [y[i] + dt * k3[i] for i in range(5)]
        k4 = f(y4, eps_f[k + 1], L_f[k + 1], dL_f[k + 1])
        y = [y[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) for i in range(5)]
        out[:, k + 1] = y
    return out
