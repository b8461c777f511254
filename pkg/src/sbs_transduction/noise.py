"""Thermal phonon occupation and amplified spontaneous Brillouin scattering.

The spectral factor is the Lorentzian ``Gamma^2 / ((2 pi delta)^2 + Gamma^2)``
with ``Gamma`` the phonon amplitude decay rate (1/s) and ``delta`` the
detuning from line center (Hz); its half width is ``Gamma / 2 pi`` Hz.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import constants, integrate

from .errors import QuadratureError, ValidationError

__all__ = [
    "NoiseSpec",
    "NoiseSpectrum",
    "RayleighJeansWarning",
    "gain_exponent",
    "lorentzian",
    "spectrum",
    "spontaneous_power_density",
    "thermal_phonons",
]

RJ_LIMIT = 0.5


class RayleighJeansWarning(UserWarning):
    """``h nu / k T`` is not small; ``N = kT/h nu`` overestimates the occupation."""


def thermal_phonons(temperature, nu_B):
    """Classical phonon occupation ``k T / (h nu_B)``."""
    if not nu_B > 0:
        raise ValidationError("nu_B", "must be > 0")
    if not temperature >= 0:
        raise ValidationError("temperature", "must be >= 0")
    if temperature == 0:
        return 0.0
    x = constants.h * nu_B / (constants.k * temperature)
    if x > RJ_LIMIT:
        warnings.warn(f"h nu_B / kT = {x:.3g} > {RJ_LIMIT}: classical occupation is inaccurate",
                      RayleighJeansWarning, stacklevel=2)
    return 1.0 / x


@dataclass(frozen=True)
class NoiseSpec:
    """Inputs to the spontaneous-scattering model.

    The pump defaults to the undepleted profile ``pump_power * exp(-alpha_opt z)``;
    ``pump_profile`` (a callable ``z -> W``) overrides it. ``optical_frequency``
    sets the photon energy of the scattered light.
    """

    temperature: float
    nu_B: float
    gamma_ph: float
    a_eff: float
    length: float
    alpha_opt: float = 0.0
    pump_power: float = 0.0
    detuning_delta: float = 0.0
    optical_frequency: float = constants.c / 1534e-9
    pump_profile: Callable[[float], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.temperature >= 0:
            raise ValidationError("temperature", "must be >= 0")
        for name in ("nu_B", "gamma_ph", "a_eff", "length", "optical_frequency"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(name, f"must be finite and > 0, got {v}")
        if not self.alpha_opt >= 0:
            raise ValidationError("alpha_opt", "must be >= 0")
        if not self.pump_power >= 0:
            raise ValidationError("pump_power", "must be >= 0")

    def pump(self, z):
        if self.pump_profile is not None:
            return self.pump_profile(z)
        return self.pump_power * np.exp(-self.alpha_opt * np.asarray(z, dtype=float))


def lorentzian(spec, nu_offset=0.0):
    d = 2.0 * math.pi * (spec.detuning_delta + np.asarray(nu_offset, dtype=float))
    g2 = spec.gamma_ph**2
    return g2 / (d * d + g2)


def _check_z(spec, z):
    if not 0.0 <= z <= spec.length:
        raise ValidationError("z", f"must lie in [0, {spec.length}], got {z}")


def _rate(spec, g_b, nu_offset):
    lor = float(lorentzian(spec, nu_offset))
    return lambda s: float(spec.pump(s)) / spec.a_eff * lor * g_b - spec.alpha_opt


def gain_exponent(spec, g_b, nu_offset=0.0, z=0.0, epsrel=1e-12):
    """``G(nu, z) = exp(int_z^L [(P_p/A) g_B lor - alpha] dz')``."""
    _check_z(spec, z)
    if z == spec.length:
        return 1.0
    res = integrate.quad(_rate(spec, g_b, nu_offset), z, spec.length,
                         epsabs=1e-300, epsrel=epsrel, limit=200, full_output=1)
    val, err = res[0], res[1]
    # quad flags roundoff-limited results too; only fail if the estimate is poor
    if len(res) == 4 and err > 1e3 * epsrel * max(abs(val), 1e-300):
        raise QuadratureError(f"gain integral did not converge: {res[3]}", err)
    return math.exp(val)


def _transfer(spec, g_b, lor, z, rtol):
    """``u(z) = G(z) int_z^L P_p / G`` for each Lorentzian weight in ``lor``.

    Solves ``u' = -r u - P_p`` backwards from ``u(L) = 0``.
    """
    lor = np.atleast_1d(np.asarray(lor, dtype=float))

    def rhs(s, u):
        p = float(spec.pump(s))
        return -(p / spec.a_eff * lor * g_b - spec.alpha_opt) * u - p

    if z == spec.length:
        return np.zeros_like(lor)
    sol = integrate.solve_ivp(rhs, (spec.length, z), np.zeros_like(lor), method="DOP853",
                              rtol=rtol, atol=1e-300)
    if not sol.success:
        raise QuadratureError(f"transfer integral failed: {sol.message}", rtol)
    return sol.y[:, -1]


def spontaneous_power_density(spec, g_b, nu_offset=0.0, z=0.0, n_phonons=None, rtol=1e-11):
    """Amplified spontaneous power per unit bandwidth at ``z``, W/Hz.

    ``P = (h nu / A) lor g_B (N + 1) G(z) int_z^L P_p(z') / G(z') dz'``;
    ``N`` defaults to the classical thermal occupation at ``spec.temperature`` and ``spec.nu_B``.
    """
    _check_z(spec, z)
    if n_phonons is None:
        n_phonons = thermal_phonons(spec.temperature, spec.nu_B)
    lor = float(lorentzian(spec, nu_offset))
    u = _transfer(spec, g_b, lor, z, rtol)[0]
    p = constants.h * spec.optical_frequency / spec.a_eff * lor * g_b * (n_phonons + 1.0) * u
    return max(float(p), 0.0)


@dataclass(frozen=True, eq=False)
class NoiseSpectrum:
    nu_offset: np.ndarray
    density: np.ndarray
    gain: np.ndarray

    @property
    def peak(self):
        return float(self.density.max())

    @property
    def integrated_power(self):
        return float(np.trapezoid(self.density, self.nu_offset))

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["nu_offset_Hz", "P_W_per_Hz", "G"])
            for row in zip(self.nu_offset, self.density, self.gain):
                w.writerow([repr(float(v)) for v in row])


def spectrum(spec, g_b, z=0.0, n_points=201, span=5.0, n_phonons=None, rtol=1e-11):
    """Spontaneous spectrum on ``n_points`` offsets across ``+/- span`` half widths."""
    if n_points < 2:
        raise ValidationError("n_points", "need at least 2 points")
    _check_z(spec, z)
    if n_phonons is None:
        n_phonons = thermal_phonons(spec.temperature, spec.nu_B)
    hw = spec.gamma_ph / (2.0 * math.pi)
    nu = np.linspace(-span * hw, span * hw, n_points)
    lor = lorentzian(spec, nu)
    u = _transfer(spec, g_b, lor, z, rtol)
    dens = constants.h * spec.optical_frequency / spec.a_eff * lor * g_b * (n_phonons + 1.0) * u
    gain = np.array([gain_exponent(spec, g_b, v, z) for v in nu])
    return NoiseSpectrum(nu, np.maximum(dens, 0.0), gain)
