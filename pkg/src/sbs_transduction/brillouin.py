"""Stimulated Brillouin scattering: gain, critical power and envelope dynamics.

Conventions
-----------
* ``a2`` is the pump (``omega2``), ``a1`` the Stokes wave (``omega1``), ``b`` the
  acoustic wave with ``Omega = omega2 - omega1`` and ``q = k2 - k1``.
* Envelopes are power-normalized: ``|a1|^2``, ``|a2|^2``, ``|b|^2`` are in W.
  The coupled equations (steady state) are::

      +/- da1/dz = -i c1 a2 b^*  - (Gamma1/v1) a1
          da2/dz = -i c2 a1 b    - (Gamma2/v2) a2
    (d/dz + alpha) b = -i cb a1^* a2

  with ``(c1, c2, cb) = (omega1 Q1, omega2 Q2, Omega Qb) / sqrt(P1 P2 Pb)``;
  the upper sign is co-propagating, the lower backward SBS. The pump
  equation carries ``b`` (not ``b^*``), which is what phase matching of
  ``a1 b`` onto the pump carrier requires.
* Detuning (rad/s) maps to an acoustic wavenumber mismatch
  ``kappa = detuning / v_b``; the small-signal gain is
  ``G = omega Omega Q1 Qb^* / (P1 P2 Pb (alpha - i kappa))`` and the Stokes
  power grows as ``dP1/dz = 2 Re(G) P2 P1``, so ``g_B = 2 Re G(0) A_eff``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import constants, optimize

from . import kernels
from .errors import CFLError, NumericalError, StepSizeError, ValidationError
from .materials import MaterialParams

__all__ = [
    "EnvelopeState",
    "SbsGainResult",
    "acoustic_steady_state",
    "complex_gain",
    "critical_power",
    "effective_length",
    "gain_coefficient",
    "green_weights",
    "photon_flux_invariant",
    "propagate_steady",
    "propagate_time",
]

CRITICAL_GAIN_EXPONENT = 21.0
# RK4 is stable on the acoustic decay b' = -alpha b for alpha h up to about 2.78
GREEN_STEP_LIMIT = 2.5


def gain_coefficient(m: MaterialParams, wavelength: float) -> float:
    """Bulk Brillouin gain ``2 pi n^7 p12^2 / (c rho lambda^2 v_s dnu_B)``, m/W."""
    if not wavelength > 0:
        raise ValidationError("wavelength", "must be > 0")
    return (2.0 * math.pi * m.n_eff**7 * m.p12**2
            / (constants.c * m.rho * wavelength**2 * m.v_s * m.dnu_B))


def critical_power(a_eff, g_b, l_eff, kappa_pol=1.0):
    """SBS threshold ``21 A_eff / (kappa g_B L_eff)``, W."""
    for name, v in (("a_eff", a_eff), ("g_b", g_b), ("l_eff", l_eff), ("kappa_pol", kappa_pol)):
        if not v > 0:
            raise ValidationError(name, f"must be > 0, got {v}")
    return CRITICAL_GAIN_EXPONENT * a_eff / (kappa_pol * g_b * l_eff)


def effective_length(alpha, length):
    """``(1 - exp(-alpha L)) / alpha``; equals ``L`` for a lossless guide."""
    if alpha == 0:
        return length
    return -math.expm1(-alpha * length) / alpha


@dataclass(frozen=True)
class SbsGainResult:
    g_complex: complex
    g_B: float | None
    detuning: float
    kappa: float


def complex_gain(cs, omega, omega_ac, detuning=0.0, v_b=None, a_eff=None):
    """Complex small-signal gain per unit pump power and length, 1/(W m)."""
    if v_b is None:
        if cs.alpha_ac > 0 and cs.gamma_ac > 0:
            v_b = cs.gamma_ac / cs.alpha_ac
        elif detuning == 0:
            v_b = 1.0  # unused
        else:
            raise ValidationError("v_b", "acoustic group velocity needed to convert detuning")
    kappa = detuning / v_b
    den = complex(cs.alpha_ac, -kappa)
    if den == 0:
        raise ValidationError("alpha_ac", "zero acoustic damping at zero detuning: gain diverges")
    g = omega * omega_ac * cs.q_1 * np.conj(cs.q_b) / (cs.p_1 * cs.p_2 * cs.p_b * den)
    g = complex(g)
    g_b = 2.0 * g.real * a_eff if a_eff is not None else None
    return SbsGainResult(g, g_b, detuning, kappa)


@dataclass(frozen=True, eq=False)
class EnvelopeState:
    z: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    b: np.ndarray
    v1: float
    v2: float
    v_b: float
    gamma1: float
    gamma2: float
    omega1: float
    omega2: float
    Omega: float
    t: float = 0.0

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if z.ndim != 1 or z.size < 2 or not np.all(np.diff(z) > 0):
            raise ValidationError("z", "grid must be strictly increasing with >= 2 points")
        for name in ("a1", "a2", "b"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != z.shape:
                raise ValidationError(name, f"shape {arr.shape} does not match z grid {z.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValidationError(name, "non-finite envelope")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "z", z)
        if not self.Omega > 0:
            raise ValidationError("Omega", "must be > 0 (Stokes configuration)")
        if abs(self.Omega - (self.omega2 - self.omega1)) > 1e-9 * self.omega2:
            raise ValidationError("Omega", "phase matching requires Omega = omega2 - omega1")
        for name in ("v1", "v2", "v_b"):
            if not getattr(self, name) > 0:
                raise ValidationError(name, "group velocity must be > 0")
        for name in ("gamma1", "gamma2"):
            if not getattr(self, name) >= 0:
                raise ValidationError(name, "damping must be >= 0")

    @classmethod
    def initial(cls, length, n, a1, a2, *, v1, v2, v_b, omega2, Omega, gamma1=0.0, gamma2=0.0,
                b=0.0):
        """Uniform grid with constant envelopes (boundary values are read from the ends)."""
        z = np.linspace(0.0, length, n)
        full = lambda v: np.full(n, v, dtype=complex)  # noqa: E731
        return cls(z, full(a1), full(a2), full(b), v1, v2, v_b, gamma1, gamma2,
                   omega2 - Omega, omega2, Omega)

    @property
    def length(self):
        return float(self.z[-1] - self.z[0])

    @property
    def spacing(self):
        return float(self.z[1] - self.z[0])

    @property
    def P1(self):
        return np.abs(self.a1) ** 2

    @property
    def P2(self):
        return np.abs(self.a2) ** 2

    @property
    def Pb(self):
        return np.abs(self.b) ** 2

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["z_m", "re_a1", "im_a1", "re_a2", "im_a2", "re_b", "im_b",
                        "P1_W", "P2_W", "Pb_W"])
            for k in range(self.z.size):
                row = [self.z[k], self.a1[k].real, self.a1[k].imag, self.a2[k].real,
                       self.a2[k].imag, self.b[k].real, self.b[k].imag,
                       self.P1[k], self.P2[k], self.Pb[k]]
                w.writerow([repr(float(v)) for v in row])


def photon_flux_invariant(state, direction="forward"):
    """Manley-Rowe photon flux: ``P1/w1 + P2/w2`` (forward) or ``P2/w2 - P1/w1`` (backward)."""
    s = 1.0 if direction == "forward" else -1.0
    return s * state.P1 / state.omega1 + state.P2 / state.omega2


# -- Green's-function acoustic response ---------------------------------------

def green_weights(alpha, h):
    """Exact weights for ``int_0^h exp(-alpha (h - s)) d(s) ds`` with linear ``d``.

    Returns ``(decay, w0, w1)`` so that the integral equals ``w0 d(0) + w1 d(h)``.
    """
    x = alpha * h
    if x < 1.0:
        w0 = w1 = 0.0
        term = 1.0  # (-x)^k / (k+2)!
        for k in range(30):
            if k:
                term *= -x / (k + 2)
            else:
                term = 0.5
            w1 += term
            w0 += term * (k + 1)
        w0, w1 = w0 * h, w1 * h
    else:
        E = math.exp(-x)
        a = (1.0 - E) / alpha
        w1 = a - (1.0 - E * (1.0 + x)) / (alpha**2 * h)
        w0 = a - w1
    return math.exp(-x), w0, w1


def acoustic_steady_state(z, a1, a2, cs, omega_ac):
    """Steady acoustic envelope from the causal Green's function.

    ``b(z) = -(i Omega Qb / N) int_0^z a1^*(s) a2(s) exp(-alpha (z - s)) ds`` with
    ``N = sqrt(P1 P2 Pb)`` (power-normalized envelopes) and no field before
    ``z = 0``. The drive is taken piecewise linear between samples, for which
    the recursion is exact.
    """
    z = np.asarray(z, dtype=float)
    h = np.diff(z)
    if h.size == 0 or not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValidationError("z", "acoustic_steady_state needs a uniform grid")
    drive = np.conj(np.asarray(a1, dtype=complex)) * np.asarray(a2, dtype=complex)
    decay, w0, w1 = green_weights(cs.alpha_ac, float(h[0]))
    conv = kernels.green_recursion(drive, decay, w0, w1)
    return -1j * omega_ac * cs.q_b / cs.norm * conv


# -- steady z-marching --------------------------------------------------------

def _march(state, cs, n, h, a1_0, direction, acoustic):
    c1, c2, cb = cs.coefficients(state.omega1, state.omega2, state.Omega)
    sign = 1.0 if direction == "forward" else -1.0
    local = acoustic == "local"
    if local and cs.alpha_ac <= 0:
        raise ValidationError("alpha_ac", "local acoustic response needs alpha_ac > 0")
    return kernels.march_envelopes(
        complex(a1_0), complex(state.a2[0]), 0j if local else complex(state.b[0]), n, h,
        c1, c2, cb, cs.alpha_ac, state.gamma1 / state.v1, state.gamma2 / state.v2, sign, local)


def _shoot(state, cs, n, h, acoustic):
    """Backward SBS: find a1(0) so the Stokes field equals the seed at z = L."""
    target = complex(state.a1[-1])
    if target == 0:
        return _march(state, cs, n, h, 0j, "backward", acoustic)
    loss1 = state.gamma1 / state.v1
    log_t = math.log(abs(target))

    def resid(log_s):
        with np.errstate(all="ignore"):
            a1, _, _ = _march(state, cs, n, h, math.exp(log_s), "backward", acoustic)
        v = abs(a1[-1])
        if not math.isfinite(v):
            return math.inf
        return (math.log(v) if v > 0 else -math.inf) - log_t

    # photon flux P2/w2 - P1/w1 cannot grow along z, which bounds the Stokes output
    p_max = state.omega1 / state.omega2 * abs(state.a2[0]) ** 2 + abs(target) ** 2
    lo = log_t - loss1 * state.length - 1.0
    hi = 0.5 * math.log(p_max) + 1e-9
    f_lo, f_hi = resid(lo), resid(hi)
    for _ in range(60):
        if f_lo <= 0:
            break
        lo -= 2.0
        f_lo = resid(lo)
    for _ in range(60):
        if f_hi >= 0:
            break
        hi += 1.0
        f_hi = resid(hi)
    if not (f_lo <= 0 <= f_hi):
        raise NumericalError("backward SBS shooting could not bracket the Stokes input")
    if f_lo == 0:
        log_s = lo
    elif f_hi == 0:
        log_s = hi
    else:
        log_s = optimize.brentq(resid, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=300)
    a1, a2, b = _march(state, cs, n, h, math.exp(log_s), "backward", acoustic)
    phase = target / a1[-1]
    phase /= abs(phase)
    return a1 * phase, a2, b * np.conj(phase)


def propagate_steady(state, cs, step, direction="backward", acoustic="local", check_step=True,
                     step_tol=1e-6):
    """Steady-state (d/dt = 0) coupled envelopes over ``[0, L]`` by fixed-step RK4.

    ``direction="forward"``: pump and Stokes enter at z = 0 (``a1[0], a2[0]``).
    ``direction="backward"``: pump enters at z = 0, the Stokes seed at z = L
    (``a1[-1]``); solved by shooting on ``|a1(0)|`` using the phase symmetry
    ``a1 -> a1 e^{i phi}, b -> b e^{-i phi}``.
    ``acoustic="local"`` eliminates ``b`` adiabatically (``b = -i cb a1^* a2 / alpha``);
    ``"green"`` marches the causal Green's-function response along z.
    """
    if direction not in ("forward", "backward"):
        raise ValidationError("direction", f"unknown direction {direction!r}")
    if acoustic not in ("local", "green"):
        raise ValidationError("acoustic", f"unknown acoustic model {acoustic!r}")
    L = state.length
    if not step > 0:
        raise ValidationError("step", "must be > 0")
    n = int(round(L / step))
    if n < 1 or abs(n * step - L) > 1e-9 * L:
        raise ValidationError("step", f"step {step} must divide the length {L}")

    if acoustic == "green" and cs.alpha_ac * L / n > GREEN_STEP_LIMIT:
        raise StepSizeError(f"acoustic march needs alpha * step <= {GREEN_STEP_LIMIT} for RK4 "
                            f"stability, got {cs.alpha_ac * L / n:.3g}; reduce step")

    def run(nn):
        hh = L / nn
        with np.errstate(all="ignore"):
            if direction == "forward":
                out = _march(state, cs, nn, hh, state.a1[0], "forward", acoustic)
            else:
                out = _shoot(state, cs, nn, hh, acoustic)
        if not all(np.all(np.isfinite(f)) for f in out):
            raise StepSizeError(f"envelopes diverged with step {hh:.3g} m; reduce step")
        return out

    a1, a2, b = run(n)
    if check_step:
        f1, f2, _ = run(2 * n)
        for coarse, fine in ((a1, f1[::2]), (a2, f2[::2])):
            scale = np.max(np.abs(fine))
            if scale > 0:
                err = np.max(np.abs(coarse - fine)) / scale
                if err > step_tol:
                    raise StepSizeError(f"RK4 step halving changed the envelopes by {err:.2e} "
                                        f"(> {step_tol:.0e}); reduce step")
    z = state.z[0] + np.linspace(0.0, L, n + 1)
    return replace(state, z=z, a1=a1, a2=a2, b=b)


# -- time-domain transport ----------------------------------------------------

def propagate_time(state, cs, dt, steps, direction="backward"):
    """Advance the full transport equations ``(d_t + v d_z + Gamma) a = v * coupling``.

    First-order upwind in z, explicit in t, damping applied exactly per step.
    Boundary (inflow) values are the current end samples of ``state``: pump
    and acoustic at z = 0, Stokes at z = 0 (forward) or z = L (backward).
    """
    h = state.spacing
    if not np.allclose(np.diff(state.z), h, rtol=1e-9, atol=0):
        raise ValidationError("z", "propagate_time needs a uniform grid")
    vmax = max(state.v1, state.v2, state.v_b)
    if dt > h / vmax * (1 + 1e-12):
        raise CFLError(f"dt = {dt:.3e} exceeds CFL limit h/v_max = {h / vmax:.3e}")
    if steps < 0:
        raise ValidationError("steps", "must be >= 0")
    c1, c2, cb = cs.coefficients(state.omega1, state.omega2, state.Omega)
    v1 = state.v1 if direction == "forward" else -state.v1
    bc1 = state.a1[0] if direction == "forward" else state.a1[-1]
    a1, a2, b = kernels.upwind_run(
        state.a1, state.a2, state.b, int(steps), float(dt), h, v1, state.v2, state.v_b,
        state.gamma1, state.gamma2, cs.alpha_ac * state.v_b, c1, c2, cb,
        complex(bc1), complex(state.a2[0]), complex(state.b[0]))
    return replace(state, a1=a1, a2=a2, b=b, t=state.t + steps * dt)
