"""Series RLC resonator driven by an EMF, with optionally time-varying inductance.

Circuit equation (flux form)::

    d(L(t) I)/dt + R I + q / C = emf(t),    dq/dt = I

integrated by RK4 on ``(q, phi = L I)``. Three running integrals are carried
with the state: source work ``W = int emf I``, dissipation ``D = int R I^2``
and parametric work ``M = int L' I^2 / 2``, so that
``W = D + M + E(t) - E(0)`` with ``E = q^2/2C + L I^2/2``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InstabilityError, ValidationError

__all__ = [
    "RlcResponse",
    "RlcSpec",
    "default_resistance",
    "driven_response",
    "quality_factor",
    "resonance_frequency",
    "response_spectrum",
]

DEFAULT_Q = 100.0
DT_LIMIT = 0.05


def resonance_frequency(l, c):
    """``1 / (2 pi sqrt(L C))``, Hz."""
    if not l > 0:
        raise ValidationError("inductance", f"must be > 0, got {l}")
    if not c > 0:
        raise ValidationError("capacitance", f"must be > 0, got {c}")
    return 1.0 / (2.0 * math.pi * math.sqrt(l * c))


def default_resistance(l, c, q=DEFAULT_Q):
    """Series resistance giving quality factor ``q``."""
    return math.sqrt(l / c) / q


def quality_factor(l, c, r):
    if r == 0:
        return math.inf
    return math.sqrt(l / c) / r


@dataclass(frozen=True)
class RlcSpec:
    capacitance: float
    inductance_static: float
    resistance: float | None = None

    def __post_init__(self):
        if not self.capacitance > 0:
            raise ValidationError("capacitance", "must be > 0")
        if not self.inductance_static > 0:
            raise ValidationError("inductance_static", "must be > 0")
        if self.resistance is not None and not self.resistance >= 0:
            raise ValidationError("resistance", "must be >= 0")

    @property
    def R(self):
        if self.resistance is None:
            return default_resistance(self.inductance_static, self.capacitance)
        return self.resistance

    @property
    def f_r(self):
        return resonance_frequency(self.inductance_static, self.capacitance)

    @property
    def Q(self):
        return quality_factor(self.inductance_static, self.capacitance, self.R)


@dataclass(frozen=True, eq=False)
class RlcResponse:
    t: np.ndarray
    charge: np.ndarray
    current: np.ndarray
    inductance: np.ndarray
    source_work: np.ndarray
    dissipated: np.ndarray
    parametric_work: np.ndarray
    capacitance: float

    @property
    def stored(self):
        return self.charge**2 / (2 * self.capacitance) + 0.5 * self.inductance * self.current**2

    def energy_residual(self):
        """``W - D - M - (E - E0)`` at each sample."""
        return (self.source_work - self.dissipated - self.parametric_work
                - (self.stored - self.stored[0]))

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["t_s", "charge_C", "current_A"])
            for row in zip(self.t, self.charge, self.current):
                w.writerow([repr(float(v)) for v in row])


def _midpoints(f):
    """Cubic interpolation to the half step between samples."""
    f = np.asarray(f, dtype=float)
    n = f.size
    if n < 2:
        return np.empty(0)
    mid = 0.5 * (f[:-1] + f[1:])
    if n >= 4:
        mid[1:-1] = (-f[:-3] + 9 * f[1:-2] + 9 * f[2:-1] - f[3:]) / 16.0
        mid[0] = (5 * f[0] + 15 * f[1] - 5 * f[2] + f[3]) / 16.0
        mid[-1] = (f[-4] - 5 * f[-3] + 15 * f[-2] + 5 * f[-1]) / 16.0
    return mid


def _as_series(x, n, name):
    if np.isscalar(x):
        return np.full(n, float(x))
    arr = np.asarray(x, dtype=float)
    if arr.shape != (n,):
        raise ValidationError(name, f"expected {n} samples, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(name, "non-finite samples")
    return arr


def driven_response(spec, emf_series, l_series=None, dt=None, *, l_derivative=None,
                    emf_mid=None, l_mid=None, q0=0.0, i0=0.0):
    """Charge and current for EMF samples on a uniform time grid ``t_k = k dt``.

    ``l_series`` defaults to the static inductance. Half-step values are
    interpolated unless ``emf_mid``/``l_mid`` are given; ``l_derivative``
    defaults to second-order finite differences of ``l_series``.
    """
    emf = np.asarray(emf_series, dtype=float)
    n = emf.size
    if n < 2:
        raise ValidationError("emf_series", "need at least 2 samples")
    if not np.all(np.isfinite(emf)):
        raise ValidationError("emf_series", "non-finite samples")
    if dt is None or not dt > 0:
        raise ValidationError("dt", "must be > 0")
    L = _as_series(spec.inductance_static if l_series is None else l_series, n, "l_series")
    if np.any(L <= 0):
        raise ValidationError("l_series", "inductance must be > 0 at all samples")
    constant_l = bool(np.all(L == L[0]))
    f_r = resonance_frequency(float(L.min()), spec.capacitance)
    if dt >= DT_LIMIT / f_r:
        raise ValidationError("dt", f"dt = {dt:.3e} must be < {DT_LIMIT}/f_r = {DT_LIMIT / f_r:.3e}")
    if l_derivative is None:
        dL = np.zeros(n) if constant_l else np.gradient(L, dt, edge_order=2)
    else:
        dL = _as_series(l_derivative, n, "l_derivative")
    e_h = _midpoints(emf) if emf_mid is None else _as_series(emf_mid, n - 1, "emf_mid")
    L_h = _midpoints(L) if l_mid is None else _as_series(l_mid, n - 1, "l_mid")
    dL_h = _midpoints(dL)
    R = spec.R
    out = kernels.rk4_rlc(emf, e_h, L, L_h, dL, dL_h, float(dt), float(R), spec.capacitance,
                          float(q0), float(i0) * L[0])
    q, phi, W, D, M = out
    current = phi / L
    resp = RlcResponse(np.arange(n) * dt, q, current, L, W, D, M, spec.capacitance)
    if R > 0 and constant_l and not np.any(emf):
        e = resp.stored
        # the exact undriven energy never rises; allow for RK4 truncation only
        if np.max(e) > e[0] * (1 + 1e-6) + 1e-300:
            raise InstabilityError("undriven response grew; reduce dt")
    if not np.all(np.isfinite(current)):
        raise InstabilityError("response diverged")
    return resp


def response_spectrum(resp, signal="current"):
    """One-sided amplitude spectrum ``(f, |X(f)|)`` with a Hann window."""
    x = getattr(resp, signal)
    n = x.size
    win = np.hanning(n)
    X = np.fft.rfft(x * win)
    f = np.fft.rfftfreq(n, resp.t[1] - resp.t[0])
    return f, np.abs(X) * 2.0 / win.sum()


def spectrum_to_csv(path, f, mag):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["f_Hz", "magnitude"])
        for row in zip(f, mag):
            w.writerow([repr(float(v)) for v in row])
