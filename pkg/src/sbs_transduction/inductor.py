"""Finite solenoid magnetostatics and the inductance of a SAW-modulated core.

Cylindrical coordinates ``(r, theta, y)`` with the coil axis along ``y``.
The coil is a uniform current sheet of radius ``a`` spanning
``[center - L/2, center + L/2]``; with ``xi = y - y'`` running over the
winding, ``A_theta``, ``B_r`` and ``B_z`` reduce to one angular integral
each once the ``xi`` integral is done in closed form.

The core radius follows ``x(y, t) = A sin(2 pi y / lambda - omega t) + r_i``.
Two inductance estimates are provided:

``"flux"``
    ``L = (n / i) int Phi(y, t) dy`` with ``Phi`` the flux through the core
    cross-section, using the near-axis expansion
    ``Phi = pi x^2 B0(y) - pi x^4 B0''(y) / 8`` (relative error
    ``O((x/a)^4)``). The y integral is decomposed into harmonics of the SAW
    phase and evaluated once with oscillatory-weight quadrature.
``"approx"``
    The published closed-form approximation: the field brackets are taken
    at the coil center and multiply the surface-element integrals of
    ``(r_i + A sin z) / sqrt(1 + cos^2 z)``, evaluated over the whole SAW
    periods in the core. It yields a static baseline only.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import constants, integrate, special

from .errors import QuadratureError, StepSizeError, ValidationError

__all__ = [
    "SawSpec",
    "SolenoidSpec",
    "divergence_residual",
    "emf_series",
    "field_components",
    "induced_emf",
    "inductance_series",
    "on_axis_field",
    "saw_inductance",
    "series_to_csv",
    "turns_per_length",
    "vector_potential",
]

MU0 = constants.mu_0


def turns_per_length(turns, length, interpretation="total"):
    """Winding density for a quoted turn count.

    ``"total"``: ``turns`` are spread over ``length``; ``"per-length"``: the
    number already is a density in 1/m.
    """
    if interpretation == "total":
        return turns / length
    if interpretation == "per-length":
        return float(turns)
    raise ValidationError("interpretation", f"unknown turn-count interpretation {interpretation!r}")


@dataclass(frozen=True)
class SolenoidSpec:
    coil_radius: float
    length: float
    n_per_len: float
    current: float = 1.0
    mu_r: float = 1.0
    center: float = 0.0

    def __post_init__(self):
        for name in ("coil_radius", "length", "n_per_len", "mu_r"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(name, f"must be finite and > 0, got {v}")
        if not math.isfinite(self.current):
            raise ValidationError("current", "must be finite")

    @property
    def mu(self):
        return MU0 * self.mu_r

    def xi(self, y):
        d = y - self.center
        return d - self.length / 2, d + self.length / 2


@dataclass(frozen=True)
class SawSpec:
    amplitude: float
    wavelength: float
    omega: float
    base_radius: float

    def __post_init__(self):
        if not self.base_radius > 0:
            raise ValidationError("base_radius", "must be > 0")
        if not 0 <= self.amplitude < self.base_radius:
            raise ValidationError("amplitude", "must satisfy 0 <= A < base_radius")
        if not self.wavelength > 0:
            raise ValidationError("wavelength", "must be > 0")
        if not self.omega > 0:
            raise ValidationError("omega", "must be > 0")

    @property
    def k(self):
        return 2.0 * math.pi / self.wavelength

    @property
    def period(self):
        return 2.0 * math.pi / self.omega

    def radius(self, y, t):
        return self.amplitude * np.sin(self.k * np.asarray(y) - self.omega * t) + self.base_radius


def _quad(f, lo, hi, epsrel, what, points=None, scale=0.0):
    # scale: magnitude the error is judged against when the integral itself may vanish
    res = integrate.quad(f, lo, hi, epsabs=epsrel * scale, epsrel=epsrel, limit=500,
                         points=points, full_output=1)
    val, err = res[0], res[1]
    if len(res) == 4 and err > 1e2 * epsrel * max(abs(val), scale, 1e-300):
        raise QuadratureError(f"{what}: {res[3].splitlines()[0]}", err)
    return val


def _chord2(a, r, th):
    # squared distance to a winding point, free of cancellation when r ~ a
    return (a - r) ** 2 + 4 * a * r * math.sin(0.5 * th) ** 2


def _angle_points(spec, r):
    # the integrand is sharply peaked near theta = 0 when r ~ a
    return [min(abs(r - spec.coil_radius) / spec.coil_radius, 1.0) * 0.5 + 1e-6]


def vector_potential(spec, r, y, epsrel=1e-10):
    """Azimuthal vector potential ``A_theta`` (T m)."""
    if r < 0:
        raise ValidationError("r", "must be >= 0")
    if r == 0 or spec.current == 0:
        return 0.0
    a = spec.coil_radius
    xm, xp = spec.xi(y)

    def f(th):
        c = math.sqrt(max(_chord2(a, r, th), 1e-300))
        return math.cos(th) * (math.asinh(xp / c) - math.asinh(xm / c))

    val = _quad(f, 0.0, math.pi, epsrel, "vector potential", _angle_points(spec, r))
    return a * spec.mu * spec.n_per_len * spec.current / (2 * math.pi) * val


def field_components(spec, r, y, epsrel=1e-10):
    """``(B_r, B_z)`` in T from the closed-form axial integrals."""
    if r < 0:
        raise ValidationError("r", "must be >= 0")
    a = spec.coil_radius
    xm, xp = spec.xi(y)
    pref = a * spec.mu * spec.n_per_len * spec.current / (2 * math.pi)
    if spec.current == 0:
        return 0.0, 0.0
    if r == 0:
        return 0.0, on_axis_field(spec, y)
    if abs(r - a) < 1e-12 * a and xm <= 0 <= xp:
        raise ValidationError("r", "field point lies on the winding")

    def fr(th):
        c2 = _chord2(a, r, th)
        return math.cos(th) * (1 / math.sqrt(xp * xp + c2) - 1 / math.sqrt(xm * xm + c2))

    def fz(th):
        c2 = _chord2(a, r, th)
        return (a - r * math.cos(th)) / c2 * (xp / math.sqrt(xp * xp + c2)
                                              - xm / math.sqrt(xm * xm + c2))

    pts = _angle_points(spec, r)
    iz = _quad(fz, 0.0, math.pi, epsrel, "B_z", pts)
    ir = _quad(fr, 0.0, math.pi, epsrel, "B_r", pts, scale=abs(iz))
    return -pref * ir, pref * iz


def _bracket(xi, a):
    return xi / math.sqrt(xi * xi + a * a)


def on_axis_field(spec, y):
    """On-axis ``B_z = (mu n i / 2) [xi / sqrt(xi^2 + a^2)]``."""
    xm, xp = spec.xi(y)
    a = spec.coil_radius
    return 0.5 * spec.mu * spec.n_per_len * spec.current * (_bracket(xp, a) - _bracket(xm, a))


def divergence_residual(spec, rs, ys, h=None, epsrel=1e-12):
    """Max of ``|div B| * h_ref / |B|`` over a lattice, by 4th-order differences.

    ``div B = (1/r) d(r B_r)/dr + dB_z/dy``; normalized by ``|B| / a``.
    """
    a = spec.coil_radius
    h = h or 1e-3 * a
    worst = 0.0
    for r in rs:
        for y in ys:
            def rbr(rr):
                return rr * field_components(spec, rr, y, epsrel)[0]

            def bz(yy):
                return field_components(spec, r, yy, epsrel)[1]

            d_r = (-rbr(r + 2 * h) + 8 * rbr(r + h) - 8 * rbr(r - h) + rbr(r - 2 * h)) / (12 * h)
            d_y = (-bz(y + 2 * h) + 8 * bz(y + h) - 8 * bz(y - h) + bz(y - 2 * h)) / (12 * h)
            br, bz0 = field_components(spec, r, y, epsrel)
            worst = max(worst, abs(d_r / r + d_y) * a / math.hypot(br, bz0))
    return worst


# -- SAW-modulated inductance -------------------------------------------------

def _b0_shape(spec, y, order):
    """On-axis field per unit current (order 0) or its second y-derivative (order 2)."""
    a = spec.coil_radius
    xm, xp = spec.xi(y)
    if order == 0:
        g = _bracket
    else:
        def g(xi, a):
            return -3 * a * a * xi / (xi * xi + a * a) ** 2.5
    return 0.5 * spec.mu * spec.n_per_len * (g(xp, a) - g(xm, a))


# sin(p)^k as sum c_m cos(m p) + s_m sin(m p), m = 0..4
_SIN_POWERS = {
    0: ({0: 1.0}, {}),
    1: ({}, {1: 1.0}),
    2: ({0: 0.5, 2: -0.5}, {}),
    3: ({}, {1: 0.75, 3: -0.25}),
    4: ({0: 0.375, 2: -0.5, 4: 0.125}, {}),
}


def _harmonics(spec, k, lo, hi, order, epsrel):
    """``(C_m, S_m) = int f(y) (cos, sin)(m k y) dy`` for m = 0..4."""
    f = lambda y: _b0_shape(spec, y, order)  # noqa: E731
    a = spec.coil_radius
    ends = [e for e in (spec.center - spec.length / 2, spec.center + spec.length / 2) if lo < e < hi]
    C, S = np.zeros(5), np.zeros(5)
    C[0] = _quad(f, lo, hi, epsrel, "flux harmonic", sorted(ends + [lo + a, hi - a]) or None)
    for m in range(1, 5):
        w = m * k
        for weight, store in (("cos", C), ("sin", S)):
            res = integrate.quad(f, lo, hi, weight=weight, wvar=w, epsabs=0.0, epsrel=epsrel,
                                 limit=2000, full_output=1)
            # harmonics are edge effects far below C_0, so judge them on that scale
            if len(res) == 4 and res[1] > 1e3 * epsrel * abs(C[0]):
                raise QuadratureError(f"flux harmonic m={m}: {res[3].splitlines()[0]}", res[1])
            store[m] = res[0]
    return C, S


@lru_cache(maxsize=64)
def _flux_tables(spec, k, lo, hi, epsrel):
    return _harmonics(spec, k, lo, hi, 0, epsrel), _harmonics(spec, k, lo, hi, 2, epsrel)


def _project(power, wt, tables):
    """``int f(y) sin(k y - wt)^power dy`` from harmonic tables."""
    C, S = tables
    cs, ss = _SIN_POWERS[power]
    total = 0.0
    for m, c in cs.items():
        # cos(m(ky - wt)) = cos(mky) cos(mwt) + sin(mky) sin(mwt)
        total += c * (C[m] * math.cos(m * wt) + S[m] * math.sin(m * wt))
    for m, s in ss.items():
        total += s * (S[m] * math.cos(m * wt) - C[m] * math.sin(m * wt))
    return total


def _flux_inductance(sol, saw, t, core_length, epsrel):
    lo, hi = sol.center - core_length / 2, sol.center + core_length / 2
    t0, t2 = _flux_tables(sol, saw.k, lo, hi, epsrel)
    wt = saw.omega * t
    r, A = saw.base_radius, saw.amplitude
    # (r + A s)^2 and (r + A s)^4 in powers of s
    sq = {0: r * r, 1: 2 * r * A, 2: A * A}
    qu = {p: math.comb(4, p) * r ** (4 - p) * A**p for p in range(5)}
    lin = sum(c * _project(p, wt, t0) for p, c in sq.items() if c)
    cur = sum(c * _project(p, wt, t2) for p, c in qu.items() if c)
    return sol.n_per_len * math.pi * (lin - cur / 8.0)


# int_0^{2 pi} dz / sqrt(1 + cos^2 z) = 4 K(1/2) / sqrt(2)
PERIOD_INTEGRAL = 4.0 * special.ellipk(0.5) / math.sqrt(2.0)


def _approx_inductance(sol, saw, core_length):
    """Closed-form approximation over the whole SAW periods inside the core.

    Per period the odd integrals (``sin``, ``cos`` and ``sin cos`` against
    ``1 / sqrt(1 + cos^2 z)``) vanish, so only the ``r_i`` term of the second
    bracket survives and the result carries no time dependence. The dropped
    fractional period is below ``lambda / core_length`` in relative terms.
    """
    a = sol.coil_radius
    xm, xp = sol.xi(sol.center)
    periods = math.floor(core_length / saw.wavelength)
    if periods < 1:
        raise ValidationError("core_length", "approximation needs at least one SAW period in the core")
    s_plain = saw.base_radius * periods * PERIOD_INTEGRAL
    second = _bracket(xp, a) - _bracket(xm, a)
    return 0.5 * sol.mu * sol.n_per_len**2 * second * saw.wavelength * s_plain


def saw_inductance(sol, saw, t=0.0, method="flux", core_length=None, epsrel=1e-12):
    """Inductance (H) of the coil with the SAW-modulated core at time ``t``."""
    core_length = sol.length if core_length is None else core_length
    if not core_length > 0:
        raise ValidationError("core_length", "must be > 0")
    if method == "flux":
        return _flux_inductance(sol, saw, t, core_length, epsrel)
    if method == "approx":
        return _approx_inductance(sol, saw, core_length)
    raise ValidationError("method", f"unknown inductance method {method!r}")


def induced_emf(sol, saw, t, dt=None, method="flux", core_length=None, tol=1e-4):
    """EMF ``-i dL/dt`` (V) by central differences, checked against a halved step."""
    dt = saw.period / 1000 if dt is None else dt
    if not 0 < dt < saw.period:
        raise ValidationError("dt", "must satisfy 0 < dt < SAW period")

    def diff(h):
        lp = saw_inductance(sol, saw, t + h, method, core_length)
        lm = saw_inductance(sol, saw, t - h, method, core_length)
        return -(lp - lm) / (2 * h) * sol.current

    e1, e2 = diff(dt), diff(dt / 2)
    # compare against the inductance-rate scale: dL/dt ~ omega * (modulation)
    scale = abs(e2) + saw.omega * 1e-30
    if abs(e1 - e2) > tol * max(scale, abs(e1)) and abs(e1 - e2) > 1e-300:
        raise StepSizeError(f"EMF changed by {abs(e1 - e2):.3e} on halving dt; reduce dt")
    return e2


def inductance_series(sol, saw, times, method="flux", core_length=None):
    return np.array([saw_inductance(sol, saw, float(t), method, core_length) for t in times])


def emf_series(sol, saw, times, method="flux", core_length=None):
    """EMF at each time from the spectral derivative of one sampled period.

    Uses the exact periodicity of ``L(t)``; ``times`` may be arbitrary.
    """
    n = 64
    tt = np.arange(n) * saw.period / n
    Ls = inductance_series(sol, saw, tt, method, core_length)
    times = np.asarray(times, dtype=float)
    if np.ptp(Ls) == 0:
        return np.zeros(times.shape)
    c = np.fft.rfft(Ls) / n
    m = np.arange(c.size)
    w = saw.omega
    ph = np.exp(1j * w * np.outer(times, m))
    weights = np.where((m == 0) | ((n % 2 == 0) & (m == n // 2)), 1.0, 2.0)
    dL = np.real(ph @ (1j * m * w * c * weights))
    return -dL * sol.current


def series_to_csv(path, times, inductance, emf):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t_s", "L_H", "emf_V"])
        for row in zip(times, inductance, emf):
            w.writerow([repr(float(v)) for v in row])
