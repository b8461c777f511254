"""Step-index circular microwire: guided LP01 / HE11 mode, profiles, effective area.

Field phasors follow ``E(t) = Re[E exp(-i w t)]``; the optical power of a
sampled profile is ``n_eff / (2 Z0) * integral |E|^2 dA``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import constants, optimize, special

from .errors import GridMismatchError, NoGuidedModeError, ValidationError, ZeroFieldError

__all__ = [
    "Grid2D",
    "ModeProfile",
    "WaveguideGeometry",
    "acoustic_profile",
    "characteristic_lp01",
    "disk_fill_fraction",
    "effective_area",
    "gaussian_profile",
    "mode_power",
    "profile_to_csv",
    "sample_profile",
    "solve_mode",
    "solve_neff",
]

Z0 = constants.physical_constants["characteristic impedance of vacuum"][0]
J01 = special.jn_zeros(0, 1)[0]


@dataclass(frozen=True)
class WaveguideGeometry:
    core_radius: float
    core_index: float
    clad_index: float = 1.0
    length: float = 0.08

    def __post_init__(self):
        if not self.core_radius > 0:
            raise ValidationError("core_radius", f"must be > 0, got {self.core_radius}")
        if not self.clad_index >= 1.0:
            raise ValidationError("clad_index", f"must be >= 1, got {self.clad_index}")
        # equal indices are representable so that solve_neff can report "no guided mode"
        if not self.core_index >= self.clad_index:
            raise ValidationError("core_index", "must not be below clad_index")
        if not self.length > 0:
            raise ValidationError("length", f"must be > 0, got {self.length}")

    def v_number(self, wavelength):
        k0a = 2 * math.pi / wavelength * self.core_radius
        return k0a * math.sqrt(self.core_index**2 - self.clad_index**2)


@dataclass(frozen=True)
class Grid2D:
    """Square uniform lattice of ``n x n`` points spanning ``[-half_width, half_width]``."""

    n: int
    half_width: float

    def __post_init__(self):
        if self.n < 3:
            raise ValidationError("grid.n", "need at least 3 points")
        if not self.half_width > 0:
            raise ValidationError("grid.half_width", "must be > 0")

    @property
    def spacing(self):
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def axis(self):
        return np.linspace(-self.half_width, self.half_width, self.n)

    def mesh(self):
        x = self.axis
        return np.meshgrid(x, x, indexing="xy")

    @property
    def dA(self):
        return self.spacing**2


def check_same_grid(*grids):
    first = grids[0]
    for g in grids[1:]:
        if g != first:
            raise GridMismatchError(f"{g} differs from {first}")


@dataclass(frozen=True, eq=False)
class ModeProfile:
    """Vector field sampled on a :class:`Grid2D`.

    ``field`` has shape ``(n, n, 3)`` (rows are y, columns x). ``index`` is the
    refractive-index map for optical modes; ``mask`` is the material fill
    fraction used to weight acoustic integrals.
    """

    grid: Grid2D
    field: np.ndarray
    beta: float
    omega: float
    kind: Literal["optical", "acoustic"] = "optical"
    n_eff: float | None = None
    index: np.ndarray | None = None
    mask: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        f = np.asarray(self.field, dtype=complex)
        if f.shape != (self.grid.n, self.grid.n, 3):
            raise ValidationError("field", f"shape {f.shape} does not match grid {self.grid.n}")
        if not np.all(np.isfinite(f)):
            raise ValidationError("field", "contains non-finite samples")
        if not self.beta > 0:
            raise ValidationError("beta", "must be > 0")
        if self.kind not in ("optical", "acoustic"):
            raise ValidationError("kind", f"unknown kind {self.kind!r}")
        object.__setattr__(self, "field", f)

    def intensity(self):
        return np.sum(np.abs(self.field) ** 2, axis=-1)

    def scaled(self, s):
        return ModeProfile(self.grid, self.field * s, self.beta, self.omega, self.kind,
                           self.n_eff, self.index, self.mask, dict(self.meta))

    def conj(self):
        return ModeProfile(self.grid, np.conj(self.field), self.beta, self.omega, self.kind,
                           self.n_eff, self.index, self.mask, dict(self.meta))


def characteristic_lp01(u, V):
    """Pole-free LP01 dispersion function ``u J1(u) K0(w) - w K1(w) J0(u)``, scaled.

    The scaling by ``K0(w)`` keeps the value O(1) over the bracket.
    """
    w = math.sqrt(max(V * V - u * u, 0.0))
    if w == 0.0:
        return u * special.j1(u)
    k0 = special.k0e(w)
    k1 = special.k1e(w)
    return u * special.j1(u) - w * (k1 / k0) * special.j0(u)


def _he11_function(u, V, n1, n2, k0a):
    w = math.sqrt(V * V - u * u)
    kp = -(special.k0(w) + special.k1(w) / w) / (w * special.k1(w))  # K1'/(w K1)
    beta_n = math.sqrt(n1**2 - (u / k0a) ** 2) / n1
    d = (n1**2 - n2**2) / (2 * n1**2)
    r = math.sqrt((d * kp) ** 2 + (beta_n * (1 / u**2 + 1 / w**2)) ** 2)
    return special.j0(u) / (u * special.j1(u)) + (n1**2 + n2**2) / (2 * n1**2) * kp - 1 / u**2 + r


def solve_mode(geom, wavelength, model="lp", xtol=1e-15):
    """Return ``(n_eff, u, w, V)`` for the fundamental mode.

    ``model="lp"`` solves the weakly guiding LP01 equation; ``"he11"`` the
    exact vector HE11 equation of the step-index fibre.
    """
    if not wavelength > 0:
        raise ValidationError("wavelength", "must be > 0")
    k0a = 2 * math.pi / wavelength * geom.core_radius
    V = geom.v_number(wavelength)
    if V <= 0:
        raise NoGuidedModeError("no index contrast: V = 0, no bound mode")
    hi = min(V, J01) * (1 - 1e-13)
    lo = 1e-9 * hi
    if model == "lp":
        fun = lambda u: characteristic_lp01(u, V)  # noqa: E731
    elif model == "he11":
        fun = lambda u: _he11_function(u, V, geom.core_index, geom.clad_index, k0a)  # noqa: E731
    else:
        raise ValidationError("model", f"unknown mode model {model!r}")
    # scan for the first sign change, then refine (bisection/secant/IQI)
    us = np.linspace(lo, hi, 400)
    vals = np.array([fun(u) for u in us])
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if idx.size == 0:
        raise NoGuidedModeError(f"characteristic equation has no root for V = {V:.6g}")
    i = idx[0]
    u = optimize.brentq(fun, us[i], us[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    w = math.sqrt(V * V - u * u)
    n_eff = math.sqrt(geom.core_index**2 - (u / k0a) ** 2)
    if not geom.clad_index < n_eff < geom.core_index:
        raise NoGuidedModeError(f"root n_eff={n_eff} outside the guided range")
    return n_eff, u, w, V


def solve_neff(geom, wavelength, model="lp"):
    return solve_mode(geom, wavelength, model)[0]


def _radial_lp01(r, a, u, w):
    rho = r / a
    inside = rho < 1.0
    out = np.empty_like(rho)
    out[inside] = special.j0(u * rho[inside]) / special.j0(u)
    # K0 ratio via scaled functions avoids underflow far from the core
    ro = rho[~inside]
    out[~inside] = special.k0e(w * ro) / special.k0e(w) * np.exp(-w * (ro - 1.0))
    return out


def mode_power(profile, rho=None, v_group=None):
    """Power carried by a unit-envelope profile, W.

    Optical: ``n_eff/(2 Z0) * int |E|^2``. Acoustic: ``0.5 rho Omega^2 v_g * int mask |Phi|^2``.
    """
    dA = profile.grid.dA
    if profile.kind == "optical":
        n = profile.n_eff if profile.n_eff is not None else 1.0
        return float(n / (2 * Z0) * np.sum(profile.intensity()) * dA)
    if rho is None or v_group is None:
        raise ValidationError("rho", "acoustic mode power needs density and group velocity")
    w = profile.mask if profile.mask is not None else 1.0
    return float(0.5 * rho * profile.omega**2 * v_group * np.sum(w * profile.intensity()) * dA)


def default_grid(geom, n=201, extent=3.0):
    return Grid2D(n, extent * geom.core_radius)


def sample_profile(geom, wavelength, grid=None, model="lp", polarization="x"):
    """Sampled fundamental-mode electric field normalized to 1 W of power."""
    grid = grid or default_grid(geom)
    n_eff, u, w, V = solve_mode(geom, wavelength, model)
    X, Y = grid.mesh()
    r = np.hypot(X, Y)
    radial = _radial_lp01(r, geom.core_radius, u, w)
    f = np.zeros((grid.n, grid.n, 3), dtype=complex)
    f[..., 0 if polarization == "x" else 1] = radial
    index = np.where(r < geom.core_radius, geom.core_index, geom.clad_index)
    k0 = 2 * math.pi / wavelength
    omega = 2 * math.pi * constants.c / wavelength
    prof = ModeProfile(grid, f, n_eff * k0, omega, "optical", n_eff=n_eff, index=index,
                       meta={"u": u, "w": w, "V": V, "model": model})
    p = mode_power(prof)
    if p <= 0:
        raise ZeroFieldError("mode profile has zero norm on this grid")
    return prof.scaled(1.0 / math.sqrt(p))


def gaussian_profile(grid, waist, beta=1.0, omega=1.0, n_eff=1.0):
    X, Y = grid.mesh()
    f = np.zeros((grid.n, grid.n, 3), dtype=complex)
    f[..., 0] = np.exp(-(X**2 + Y**2) / waist**2)
    return ModeProfile(grid, f, beta, omega, "optical", n_eff=n_eff)


def disk_fill_fraction(grid, radius, supersample=8):
    """Fraction of each grid cell lying inside the disk ``r < radius``."""
    X, Y = grid.mesh()
    h = grid.spacing
    r = np.hypot(X, Y)
    frac = (r < radius).astype(float)
    edge = np.abs(r - radius) < h * 0.75
    if np.any(edge):
        offs = (np.arange(supersample) + 0.5) / supersample - 0.5
        ox, oy = np.meshgrid(offs * h, offs * h)
        xs = X[edge][:, None] + ox.ravel()[None, :]
        ys = Y[edge][:, None] + oy.ravel()[None, :]
        frac[edge] = np.mean(np.hypot(xs, ys) < radius, axis=1)
    return frac


def acoustic_profile(geom, omega_ac, q, decay_length, grid=None, amplitude=1.0):
    """Surface-localized radial displacement ansatz for the SAW.

    ``Phi = r_hat * (r/a) * exp((r - a)/decay_length)``; the expression is
    continued smoothly past the surface (exponent capped) so that grid
    derivatives stay accurate at the boundary, and ``mask`` carries the
    material fill fraction.
    """
    if not decay_length > 0:
        raise ValidationError("decay_length", "must be > 0")
    grid = grid or default_grid(geom)
    a = geom.core_radius
    X, Y = grid.mesh()
    r = np.hypot(X, Y)
    expo = np.minimum((r - a) / decay_length, 10.0)
    env = amplitude * np.exp(expo) / a  # (r/a) * exp(...) * r_hat = (x, y)/a * exp(...)
    f = np.zeros((grid.n, grid.n, 3), dtype=complex)
    f[..., 0] = X * env
    f[..., 1] = Y * env
    return ModeProfile(grid, f, q, omega_ac, "acoustic", mask=disk_fill_fraction(grid, a),
                       meta={"decay_length": decay_length})


def effective_area(geom, profile, convention="integral"):
    """Effective area, m^2.

    ``"integral"``: ``(int |E|^2)^2 / int |E|^4``; ``"geometric"``: ``pi r^2``.
    """
    if convention == "geometric":
        return math.pi * geom.core_radius**2
    if convention != "integral":
        raise ValidationError("convention", f"unknown area convention {convention!r}")
    I = profile.intensity()
    s2 = np.sum(I**2)
    if s2 == 0:
        raise ZeroFieldError("profile has zero norm")
    dA = profile.grid.dA
    return float((np.sum(I) * dA) ** 2 / (s2 * dA))


def profile_to_csv(profile, path):
    X, Y = profile.grid.mesh()
    f = profile.field
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["x_m", "y_m", "re_x", "im_x", "re_y", "im_y", "re_z", "im_z"])
        for j in range(profile.grid.n):
            for i in range(profile.grid.n):
                v = f[j, i]
                w.writerow([repr(float(X[j, i])), repr(float(Y[j, i]))]
                           + [repr(float(c)) for z in v for c in (z.real, z.imag)])
