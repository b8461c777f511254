"""Overlap, force and dissipation integrals for the coupled-mode SBS model.

All overlaps are evaluated at the carrier phase z = t = 0; phase factors
``exp(i(qz - Omega t))`` are handled by the envelope solvers.

Normalization constants ``p_1, p_2, p_b`` are the powers (W) carried by the
unit-envelope profiles. The envelope solvers work with power-normalized
envelopes (``|a|^2`` in W), so every coupling enters divided by
``sqrt(p_1 p_2 p_b)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import GridMismatchError, NumericalError, ValidationError
from .fibermode import Grid2D, ModeProfile, check_same_grid, mode_power

__all__ = [
    "CouplingSet",
    "ForceField",
    "Perturbation",
    "acoustic_coupling",
    "acoustic_damping",
    "build_coupling_set",
    "calibrate_eta_scale",
    "electrostrictive_force",
    "optical_overlap",
    "photoelastic_perturbation",
]

EPS0 = constants.epsilon_0
MU0 = constants.mu_0


@dataclass(frozen=True)
class CouplingSet:
    q_b: complex
    q_1: complex
    q_2: complex
    p_1: float
    p_2: float
    p_b: float
    alpha_ac: float
    gamma_ac: float = 0.0

    def __post_init__(self):
        for name in ("p_1", "p_2", "p_b"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(name, f"must be finite and > 0, got {v}")
        for name in ("alpha_ac", "gamma_ac"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValidationError(name, f"must be finite and >= 0, got {v}")
        for name in ("q_b", "q_1", "q_2"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValidationError(name, "must be finite")
            object.__setattr__(self, name, v)

    @property
    def norm(self):
        return math.sqrt(self.p_1 * self.p_2 * self.p_b)

    def coefficients(self, omega1, omega2, omega_ac):
        """``(c1, c2, cb)`` multiplying the power-normalized envelope products."""
        s = self.norm
        return omega1 * self.q_1 / s, omega2 * self.q_2 / s, omega_ac * self.q_b / s

    @classmethod
    def from_gain(cls, g_b, a_eff, omega1, omega_ac, alpha_ac, v_b=None):
        """Reciprocal coupling set with real overlaps reproducing a bulk gain ``g_b``.

        Chosen so that ``2 Re G(0) * a_eff = g_b``, with unit mode powers.
        """
        if alpha_ac <= 0:
            raise ValidationError("alpha_ac", "must be > 0 to define a local gain")
        q = math.sqrt(max(g_b, 0.0) * alpha_ac / (2.0 * a_eff * omega1 * omega_ac))
        return cls(q, q, q, 1.0, 1.0, 1.0, alpha_ac, alpha_ac * v_b if v_b else 0.0)


@dataclass(frozen=True, eq=False)
class ForceField:
    grid: Grid2D
    f: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.f, dtype=complex)
        if f.shape != (self.grid.n, self.grid.n, 3):
            raise ValidationError("force", f"shape {f.shape} does not match grid")
        if not np.all(np.isfinite(f)):
            raise ValidationError("force", "contains non-finite samples")
        object.__setattr__(self, "f", f)

    def scaled(self, s):
        return ForceField(self.grid, self.f * s)


@dataclass(frozen=True, eq=False)
class Perturbation:
    """Field perturbations of one optical mode; any of them may be ``None`` (zero)."""

    delta_d: np.ndarray | None = None
    delta_e: np.ndarray | None = None
    delta_h: np.ndarray | None = None


def _dot_conj(a, b):
    return np.sum(np.conj(a) * b, axis=-1)


def acoustic_coupling(phi, force):
    """Work linear density ``Q_b = int Phi^* . f dA``."""
    check_same_grid(phi.grid, force.grid)
    return complex(np.sum(_dot_conj(phi.field, force.f)) * phi.grid.dA)


def optical_overlap(psi, perturbation, d=None, h=None):
    """``Q_i = int [Psi^* . dD - d^* . dE - mu0 h^* . dH] dA``.

    ``d`` defaults to ``eps0 n^2 Psi`` from the profile's index map; ``h``
    defaults to zero.
    """
    grid = psi.grid
    shape = psi.field.shape
    total = np.zeros(shape[:2], dtype=complex)
    if perturbation.delta_d is not None:
        total += _dot_conj(psi.field, _checked(perturbation.delta_d, shape))
    if perturbation.delta_e is not None:
        if d is None:
            n = psi.index if psi.index is not None else np.ones(shape[:2])
            d = EPS0 * (n**2)[..., None] * psi.field
        total -= _dot_conj(_checked(d, shape), _checked(perturbation.delta_e, shape))
    if perturbation.delta_h is not None and h is not None:
        total -= MU0 * _dot_conj(_checked(h, shape), _checked(perturbation.delta_h, shape))
    return complex(np.sum(total) * grid.dA)


def _checked(arr, shape):
    arr = np.asarray(arr)
    if arr.shape != shape:
        raise GridMismatchError(f"field shape {arr.shape} != {shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("perturbation", "contains non-finite samples")
    return arr


def _gradient(scalar, h):
    gy, gx = np.gradient(scalar, h, h)
    return gx, gy


def electrostrictive_force(psi_1, psi_2, material, q=None, gamma_map=None, surface_term=False):
    """Electrostrictive body force per unit envelope product ``a1^* a2``.

    ``f = (eps0/2) grad(gamma_e E1^* . E2)`` with ``gamma_e = n^4 p12`` inside the
    core (from the profile index map) and zero outside, so the force
    concentrates at the core boundary where ``gamma_e`` jumps. The axial
    derivative contributes ``i q``, ``q = beta_2 - beta_1`` unless given.
    ``surface_term`` adds the permittivity-jump (radiation-pressure) force
    ``-(eps0/2) (E1^* . E2) grad(eps_r)``.
    """
    check_same_grid(psi_1.grid, psi_2.grid)
    grid = psi_1.grid
    if q is None:
        q = psi_2.beta - psi_1.beta
    if gamma_map is None:
        index = psi_1.index if psi_1.index is not None else np.full((grid.n, grid.n), material.n_eff)
        core = index > index.min() if index.max() > index.min() else np.ones_like(index, dtype=bool)
        gamma_map = np.where(core, material.n_eff**4 * material.p12, 0.0)
    overlap = _dot_conj(psi_1.field, psi_2.field)
    s = gamma_map * overlap
    gx, gy = _gradient(s, grid.spacing)
    f = np.empty((grid.n, grid.n, 3), dtype=complex)
    f[..., 0] = 0.5 * EPS0 * gx
    f[..., 1] = 0.5 * EPS0 * gy
    f[..., 2] = 0.5 * EPS0 * 1j * q * s
    if surface_term:
        index = psi_1.index if psi_1.index is not None else np.ones((grid.n, grid.n))
        ex, ey = _gradient(index**2, grid.spacing)
        f[..., 0] -= 0.5 * EPS0 * overlap * ex
        f[..., 1] -= 0.5 * EPS0 * overlap * ey
    return ForceField(grid, f)


def _displacement_gradient(phi):
    """``D[i][j] = D_j Phi_i`` with ``D = (d/dx, d/dy, i q)``."""
    h = phi.grid.spacing
    out = []
    for i in range(3):
        comp = phi.field[..., i]
        gx, gy = _gradient(comp, h)
        out.append((gx, gy, 1j * phi.beta * comp))
    return out


def acoustic_damping(phi, eta_scale, omega_ac, p_b, bulk_ratio=-2.0 / 3.0):
    """Viscous amplitude damping ``alpha`` (1/m) of an acoustic profile.

    Uses ``eta_ijkl = eta (r d_ij d_kl + d_ik d_jl + d_il d_jk)`` with
    ``r = bulk_ratio`` (Stokes hypothesis by default), integrated in the
    symmetric (by-parts) form ``int (D_j Phi_i)^* eta_ijkl D_k Phi_l dA``,
    weighted by the material mask. Derivatives are central differences.
    """
    if not p_b > 0:
        raise ValidationError("p_b", "must be > 0")
    if eta_scale == 0:
        return 0.0
    D = _displacement_gradient(phi)
    div = D[0][0] + D[1][1] + D[2][2]
    sym = 0.0
    for i in range(3):
        for j in range(3):
            sym = sym + np.abs(D[i][j] + D[j][i]) ** 2
    dens = eta_scale * (bulk_ratio * np.abs(div) ** 2 + 0.5 * sym)
    if not np.all(np.isfinite(dens)):
        raise NumericalError("non-finite strain; grid too coarse for the profile decay length")
    w = phi.mask if phi.mask is not None else 1.0
    integral = float(np.sum(w * dens) * phi.grid.dA)
    return omega_ac**2 / p_b * integral


def calibrate_eta_scale(phi, omega_ac, p_b, v_b, dnu_B, bulk_ratio=-2.0 / 3.0):
    """Viscosity scale making the acoustic linewidth ``Gamma/pi`` equal ``dnu_B``.

    ``Gamma = alpha v_b`` is the amplitude decay rate, so the target is
    ``alpha = pi dnu_B / v_b``; ``alpha`` is linear in ``eta``.
    """
    ref = acoustic_damping(phi, 1.0, omega_ac, p_b, bulk_ratio)
    if ref <= 0:
        raise NumericalError("profile has no strain; cannot calibrate viscosity")
    return (math.pi * dnu_B / v_b) / ref


def photoelastic_perturbation(psi_i, psi_j, phi, material, conjugate_acoustic=False):
    """Photoelastic field perturbation of mode ``i`` scattered from mode ``j`` by ``phi``.

    ``d eps_r = -n^4 p12 div(Phi)`` inside the material; expressed as an
    electric-field perturbation ``dE = -(d eps_r / eps_r) E_j`` (fixed
    induction). ``conjugate_acoustic`` uses ``Phi^*`` with ``-i q``, as for
    the Stokes mode driven through ``b^*``.
    """
    check_same_grid(psi_i.grid, psi_j.grid, phi.grid)
    field = np.conj(phi.field) if conjugate_acoustic else phi.field
    q = -phi.beta if conjugate_acoustic else phi.beta
    h = phi.grid.spacing
    gx, _ = _gradient(field[..., 0], h)
    _, gy = _gradient(field[..., 1], h)
    div = gx + gy + 1j * q * field[..., 2]
    w = phi.mask if phi.mask is not None else 1.0
    d_eps = -(material.n_eff**4) * material.p12 * div * w
    n = psi_i.index if psi_i.index is not None else np.ones(div.shape)
    delta_e = -(d_eps / n**2)[..., None] * psi_j.field
    return Perturbation(delta_e=delta_e)


def build_coupling_set(psi_1, psi_2, phi, material, v_b, eta_scale=None):
    """Assemble a :class:`CouplingSet` from sampled Stokes, pump and acoustic profiles."""
    force = electrostrictive_force(psi_1, psi_2, material, q=phi.beta)
    q_b = acoustic_coupling(phi, force)
    q_1 = optical_overlap(psi_1, photoelastic_perturbation(psi_1, psi_2, phi, material, True))
    q_2 = optical_overlap(psi_2, photoelastic_perturbation(psi_2, psi_1, phi, material, False))
    p_1, p_2 = mode_power(psi_1), mode_power(psi_2)
    p_b = mode_power(phi, rho=material.rho, v_group=v_b)
    if eta_scale is None:
        eta_scale = material.eta_scale
    if eta_scale is None:
        eta_scale = calibrate_eta_scale(phi, phi.omega, p_b, v_b, material.dnu_B)
    alpha = acoustic_damping(phi, eta_scale, phi.omega, p_b)
    return CouplingSet(q_b, q_1, q_2, p_1, p_2, p_b, alpha, alpha * v_b), eta_scale
