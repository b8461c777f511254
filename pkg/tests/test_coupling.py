import math

import numpy as np
import pytest
from scipy import constants, integrate

from sbs_transduction import coupling, fibermode
from sbs_transduction.coupling import CouplingSet, ForceField, Perturbation
from sbs_transduction.errors import GridMismatchError, ValidationError
from sbs_transduction.fibermode import Grid2D, ModeProfile, WaveguideGeometry

EPS0 = constants.epsilon_0
Z0 = constants.physical_constants["characteristic impedance of vacuum"][0]
RNG = np.random.default_rng(7)


def random_field(n):
    return RNG.normal(size=(n, n, 3)) + 1j * RNG.normal(size=(n, n, 3))


def test_double_loop_oracle(lp01, saw_profile, lanthano):
    force = coupling.electrostrictive_force(lp01, lp01, lanthano, q=saw_profile.beta)
    q_b = coupling.acoustic_coupling(saw_profile, force)
    n = lp01.grid.n
    total = 0j
    phi, f = saw_profile.field, force.f
    for j in range(n):
        for i in range(n):
            for c in range(3):
                total += phi[j, i, c].conjugate() * f[j, i, c]
    oracle = total * saw_profile.grid.dA
    assert abs(q_b - oracle) <= 1e-12 * abs(oracle)
    assert abs(q_b) > 0


def test_orthogonal_force_gives_zero(saw_profile):
    g = saw_profile.grid
    f = np.zeros((g.n, g.n, 3), dtype=complex)
    f[..., 2] = random_field(g.n)[..., 0]  # SAW ansatz has no axial component
    assert coupling.acoustic_coupling(saw_profile, ForceField(g, f)) == 0


def test_linearity(saw_profile):
    g = saw_profile.grid
    f1, f2 = ForceField(g, random_field(g.n)), ForceField(g, random_field(g.n))
    s, t = 0.3 - 1.7j, 2.1 + 0.4j
    lhs = coupling.acoustic_coupling(saw_profile, ForceField(g, s * f1.f + t * f2.f))
    rhs = s * coupling.acoustic_coupling(saw_profile, f1) + t * coupling.acoustic_coupling(saw_profile, f2)
    assert abs(lhs - rhs) <= 1e-12 * abs(rhs)
    # antilinear in the acoustic profile
    q1 = coupling.acoustic_coupling(saw_profile.scaled(s), f1)
    assert abs(q1 - np.conj(s) * coupling.acoustic_coupling(saw_profile, f1)) <= 1e-12 * abs(q1)


def test_grid_mismatch(saw_profile):
    other = Grid2D(31, 1e-6)
    with pytest.raises(GridMismatchError):
        coupling.acoustic_coupling(saw_profile, ForceField(other, np.zeros((31, 31, 3))))


def test_optical_overlap_null(lp01):
    assert coupling.optical_overlap(lp01, Perturbation()) == 0
    z = np.zeros(lp01.field.shape)
    assert coupling.optical_overlap(lp01, Perturbation(z, z, z), h=z) == 0


def test_constant_perturbation_closed_form(lp01):
    d_eps = 0.0123
    q = coupling.optical_overlap(lp01, Perturbation(delta_d=EPS0 * d_eps * lp01.field))
    # unit-power normalization fixes int |E|^2 dA = 2 Z0 / n_eff
    expected = EPS0 * d_eps * 2 * Z0 / lp01.n_eff
    assert q == pytest.approx(expected, rel=1e-12)


def test_overlap_conjugation_symmetry(lp01):
    g = lp01.grid
    pert = Perturbation(delta_d=random_field(g.n), delta_e=random_field(g.n))
    conj_pert = Perturbation(delta_d=np.conj(pert.delta_d), delta_e=np.conj(pert.delta_e))
    q = coupling.optical_overlap(lp01, pert)
    qc = coupling.optical_overlap(lp01.conj(), conj_pert)
    assert abs(q - np.conj(qc)) <= 1e-12 * abs(q)


def test_overlap_linear_in_perturbation(lp01):
    g = lp01.grid
    a, b = random_field(g.n), random_field(g.n)
    s = 1.5 - 0.5j
    lhs = coupling.optical_overlap(lp01, Perturbation(delta_e=a + s * b))
    rhs = coupling.optical_overlap(lp01, Perturbation(delta_e=a)) + s * coupling.optical_overlap(
        lp01, Perturbation(delta_e=b))
    assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


def test_force_bilinear_and_zero(lp01, lanthano):
    zero = lp01.scaled(0.0)
    assert not np.any(coupling.electrostrictive_force(zero, lp01, lanthano).f)
    s = 0.7 + 2.2j
    f1 = coupling.electrostrictive_force(lp01.scaled(s), lp01, lanthano).f
    f0 = coupling.electrostrictive_force(lp01, lp01, lanthano).f
    assert np.max(np.abs(f1 - np.conj(s) * f0)) <= 1e-12 * np.max(np.abs(f1))


def test_force_swap_conjugates(lp01, lanthano):
    g = lp01.grid
    X, Y = g.mesh()
    twisted = ModeProfile(g, lp01.field * np.exp(1j * 3e6 * X)[..., None], lp01.beta * 1.001,
                          lp01.omega, "optical", lp01.n_eff, lp01.index)
    f12 = coupling.electrostrictive_force(lp01, twisted, lanthano).f
    f21 = coupling.electrostrictive_force(twisted, lp01, lanthano).f
    assert np.max(np.abs(f21 - np.conj(f12))) <= 1e-12 * np.max(np.abs(f12))


def test_top_hat_force_at_boundary(lanthano):
    a = 1e-6
    geom = WaveguideGeometry(a, 1.65)
    g = Grid2D(401, 2 * a)
    X, Y = g.mesh()
    r = np.hypot(X, Y)
    f = np.zeros((g.n, g.n, 3), dtype=complex)
    f[..., 0] = np.where(r < a, 1.0, 0.0)
    index = np.where(r < a, 1.65, 1.0)
    psi = ModeProfile(g, f, 1.0, 1.0, "optical", 1.4, index)
    force = coupling.electrostrictive_force(psi, psi, lanthano, q=0.0).f
    h = g.spacing
    interior = r < a - 2 * h
    exterior = r > a + 2 * h
    assert not np.any(force[interior, :2]) and not np.any(force[exterior, :2])
    # analytic gradient of gamma H(a - r) is -gamma delta(r - a) r_hat
    gamma = 1.65**4 * lanthano.p12
    with np.errstate(invalid="ignore", divide="ignore"):
        radial = np.where(r > 0, (force[..., 0].real * X + force[..., 1].real * Y) / r, 0.0)
    total = radial.sum() * g.dA
    assert total == pytest.approx(-0.5 * EPS0 * gamma * 2 * math.pi * a, rel=2e-2)


def saw_damping_oracle(a, d, q, eta, omega, p_b, bulk_ratio=-2.0 / 3.0):
    """Damping integral of the SAW ansatz from its analytic derivatives."""
    def dens(r):
        G2 = (math.exp((r - a) / d) / a) ** 2
        div2 = G2 * (2 + r / d) ** 2
        sym = 4 * G2 * (2 + 2 * r / d + (r / d) ** 2) + 2 * q * q * r * r * G2
        return eta * (bulk_ratio * div2 + 0.5 * sym) * 2 * math.pi * r
    val, _ = integrate.quad(dens, 0, a, epsabs=0, epsrel=1e-13)
    return omega**2 / p_b * val


def test_damping_richardson(wire):
    omega = 2 * math.pi * 11.476e9
    q = omega / 5727.0
    d, eta, p_b = 0.2e-6, 1.3e-3, 2.5
    alphas = []
    for n in (161, 321):
        phi = fibermode.acoustic_profile(wire, omega, q, d, Grid2D(n, 2 * wire.core_radius))
        alphas.append(coupling.acoustic_damping(phi, eta, omega, p_b))
    extrapolated = (4 * alphas[1] - alphas[0]) / 3
    oracle = saw_damping_oracle(wire.core_radius, d, q, eta, omega, p_b)
    assert extrapolated == pytest.approx(oracle, rel=1e-2)
    assert abs(alphas[1] / alphas[0] - 1) < 1e-2


def test_damping_scaling(saw_profile):
    assert coupling.acoustic_damping(saw_profile, 0.0, saw_profile.omega, 1.0) == 0.0
    a1 = coupling.acoustic_damping(saw_profile, 1e-3, 1e10, 1.0)
    a2 = coupling.acoustic_damping(saw_profile, 1e-3, 2e10, 1.0)
    assert a2 == pytest.approx(4 * a1, rel=1e-12)
    ratios = [coupling.acoustic_damping(saw_profile, 1e-3, w, 1.0) / w**2 for w in (1e9, 3.7e9, 7.2e10)]
    assert np.ptp(ratios) <= 1e-12 * ratios[0]
    assert a1 > 0


def test_calibration_hits_linewidth(saw_profile, lanthano):
    cs, eta = coupling.build_coupling_set(
        fibermode_profile(saw_profile), fibermode_profile(saw_profile), saw_profile, lanthano, lanthano.v_s)
    assert cs.alpha_ac == pytest.approx(math.pi * lanthano.dnu_B / lanthano.v_s, rel=1e-12)
    assert cs.gamma_ac == pytest.approx(math.pi * lanthano.dnu_B, rel=1e-12)
    assert eta > 0


def fibermode_profile(phi):
    wire = WaveguideGeometry(0.5e-6, 1.65)
    return fibermode.sample_profile(wire, 1534e-9, phi.grid)


def test_coupling_grid_convergence(wire, lanthano):
    omega = 2 * math.pi * 11.476e9
    vals = []
    for n in (121, 241):
        g = Grid2D(n, 2.5 * wire.core_radius)
        psi = fibermode.sample_profile(wire, 1534e-9, g)
        phi = fibermode.acoustic_profile(wire, omega, omega / 5727.0, 0.2e-6, g)
        cs, _ = coupling.build_coupling_set(psi, psi, phi, lanthano, 5727.0)
        vals.append(cs)
    for name in ("q_b", "q_1", "q_2", "alpha_ac"):
        a, b = getattr(vals[0], name), getattr(vals[1], name)
        assert abs(b - a) < 1e-2 * abs(b), name


def test_coupling_set_validation():
    with pytest.raises(ValidationError):
        CouplingSet(1, 1, 1, 0.0, 1, 1, 0.1)
    with pytest.raises(ValidationError):
        CouplingSet(1, 1, 1, 1, 1, 1, -0.1)
    with pytest.raises(ValidationError):
        CouplingSet(complex("nan"), 1, 1, 1, 1, 1, 0.1)


def test_from_gain_reproduces_gain():
    g_b, a_eff, w1, W, alpha = 1.0727e-11, math.pi * 0.25e-12, 1.2e15, 7.2e10, 550.0
    cs = CouplingSet.from_gain(g_b, a_eff, w1, W, alpha)
    c1, _, cb = cs.coefficients(w1, w1 + W, W)
    assert 2 * (c1 * np.conj(cb)).real / alpha * a_eff == pytest.approx(g_b, rel=1e-14)
