"""End-to-end runs: source -> mode -> SBS -> noise -> SAW inductor -> resonator.

Efficiency model (each factor reported):

* photon -> phonon: Stokes photons generated per pump photon by the steady
  envelope solution, limited by ``efficiency.conversion_cap``;
* pickup: ``"ideal"`` (1) or ``"modulation"``, the relative inductance
  modulation depth ``L_mod_depth / L_mean``;
* acceptance: ``"ideal"`` (1) or ``"lorentzian"``, the resonator's power
  response at the SAW frequency, ``1 / (1 + (2 Q (f_ac - f_r) / f_r)^2)``.

The SAW amplitude scales with the square root of the achieved conversion
relative to the cap, so an unpumped wire carries no SAW.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy import constants

from .. import brillouin, fibermode, inductor, noise, reference, resonator
from ..coupling import CouplingSet
from ..errors import TransductionError
from .report import SweepRow, SweepTable, TransductionReport

__all__ = ["run_scenario", "run_sweep"]

N_PHASES = 16


def _finding(f, out):
    if f is not None:
        out.append(f.to_dict())


def _sbs(scn, material, a_eff, g_used, n_eff, tolerance):
    src = scn.source
    sbs = scn.section("sbs")
    wg = scn.section("waveguide")
    omega2 = src.omega
    Omega = 2 * math.pi * material.nu_B
    v = constants.c / n_eff
    alpha_ac = math.pi * material.dnu_B / material.v_s
    cs = CouplingSet.from_gain(g_used, a_eff, omega2 - Omega, Omega, alpha_ac, material.v_s)
    gamma = 0.5 * material.alpha_opt * v
    if src.pump_power == 0:
        return src.seed_power, 0.0
    state = brillouin.EnvelopeState.initial(
        wg["length"], 2, math.sqrt(src.seed_power), math.sqrt(src.pump_power), v1=v, v2=v,
        v_b=material.v_s, omega2=omega2, Omega=Omega, gamma1=gamma, gamma2=gamma)
    L = wg["length"]
    step = L / max(1, round(L / sbs["step"]))
    out = brillouin.propagate_steady(state, cs, step, direction=sbs["direction"],
                                     step_tol=tolerance or 1e-6)
    if sbs["direction"] == "backward":
        p_out, p_in = out.P1[0], out.P1[-1]
    else:
        p_out, p_in = out.P1[-1], out.P1[0]
    photons = (p_out - p_in) / out.omega1
    conversion = max(photons, 0.0) / (out.P2[0] / out.omega2)
    return float(p_out), float(min(conversion, 1.0))


def _inductance_table(scn, saw_spec, core_length):
    sol_cfg = scn.section("solenoid")
    coil_len = sol_cfg["length"] or core_length
    rows = []
    times = np.arange(N_PHASES) * saw_spec.period / N_PHASES
    for interp in ("total", "per-length"):
        n = inductor.turns_per_length(sol_cfg["turns"], coil_len, interp)
        sol = inductor.SolenoidSpec(sol_cfg["coil_radius"], coil_len, n, sol_cfg["current"],
                                    sol_cfg["mu_r"])
        for method in ("flux", "approx"):
            Ls = inductor.inductance_series(sol, saw_spec, times, method, core_length)
            Lm = float(Ls.mean())
            rows.append({"interpretation": interp, "method": method, "n_per_len": float(n),
                         "L": Lm,
                         "decades_from_reference": abs(math.log10(Lm / reference.DESIGN["inductance"]))})
    return rows


def run_scenario(scn, tolerance=None, emit_warnings=True):
    """Run the full chain for one validated :class:`Scenario`."""
    try:
        return _run(scn, tolerance, emit_warnings)
    except TransductionError as exc:
        exc.args = (f"scenario {scn.name!r}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
        raise


def _run(scn, tolerance, emit):
    found = []
    m = scn.material
    src = scn.source
    wg_cfg = scn.section("waveguide")
    mode_cfg = scn.section("mode")
    sbs = scn.section("sbs")
    eff = scn.section("efficiency")

    _finding(reference.check_optical_frequency(src.wavelength_vac, emit), found)

    geom = fibermode.WaveguideGeometry(wg_cfg["core_radius"], wg_cfg["core_index"] or m.n_eff,
                                       wg_cfg["clad_index"], wg_cfg["length"])
    grid = fibermode.Grid2D(mode_cfg["grid_points"], mode_cfg["extent"] * geom.core_radius)
    profile = fibermode.sample_profile(geom, src.wavelength_vac, grid, mode_cfg["model"])
    n_eff = float(profile.n_eff)
    a_int = fibermode.effective_area(geom, profile, "integral")
    if sbs["a_eff"] is not None:
        a_eff, convention = float(sbs["a_eff"]), "explicit"
    else:
        convention = sbs["area_convention"]
        a_eff = a_int if convention == "integral" else fibermode.effective_area(geom, profile, "geometric")

    g_comp = brillouin.gain_coefficient(m, src.wavelength_vac)
    _finding(reference.check_gain(g_comp, m, emit), found)
    g_used = float(sbs["g_B"]) if sbs["g_B"] is not None else g_comp
    l_eff = sbs["l_eff"] if sbs["l_eff"] is not None else brillouin.effective_length(m.alpha_opt, geom.length)
    p_cr = brillouin.critical_power(a_eff, g_used, l_eff, sbs["kappa_pol"])

    stokes_out, conv = _sbs(scn, m, a_eff, g_used, n_eff, tolerance)
    cap = float(eff["conversion_cap"])
    eta_pp = min(conv, cap)

    # thermal phonons and spontaneous scattering
    ncfg = scn.section("noise")
    nu_noise = ncfg["nu_B"] or m.nu_B
    with warnings.catch_warnings():
        if not emit:
            warnings.simplefilter("ignore")
        n_ph = noise.thermal_phonons(ncfg["temperature"], nu_noise)
        n_ph_mat = noise.thermal_phonons(ncfg["temperature"], m.nu_B)
    _finding(reference.check_phonon_count(ncfg["temperature"], m.nu_B, n_ph_mat, emit), found)
    _finding(reference.check_phonon_count(ncfg["temperature"], nu_noise, n_ph, emit), found)
    p_noise = ncfg["pump_power"] if ncfg["pump_power"] is not None else 0.5 * p_cr
    nspec = noise.NoiseSpec(ncfg["temperature"], nu_noise, math.pi * m.dnu_B, a_eff, geom.length,
                            m.alpha_opt, p_noise, optical_frequency=src.frequency)
    spec_out = noise.spectrum(nspec, g_used, 0.0, ncfg["n_points"], ncfg["span"], n_ph)

    # SAW and inductor
    saw_cfg = scn.section("saw")
    f_ac = saw_cfg["frequency"] or m.nu_B
    v_ac = saw_cfg["velocity"] or m.v_s
    amp = saw_cfg["amplitude"] * (math.sqrt(eta_pp / cap) if cap > 0 else 0.0)
    saw_spec = inductor.SawSpec(amp, v_ac / f_ac, 2 * math.pi * f_ac, saw_cfg["base_radius"])
    _finding(reference.check_core_radius(geom.core_radius, saw_spec.base_radius, emit), found)
    sol_cfg = scn.section("solenoid")
    core_length = geom.length
    coil_len = sol_cfg["length"] or core_length
    n_len = inductor.turns_per_length(sol_cfg["turns"], coil_len, sol_cfg["turn_interpretation"])
    sol = inductor.SolenoidSpec(sol_cfg["coil_radius"], coil_len, n_len, sol_cfg["current"],
                                sol_cfg["mu_r"])
    times = np.arange(N_PHASES) * saw_spec.period / N_PHASES
    Ls = inductor.inductance_series(sol, saw_spec, times, "flux", core_length)
    L_mean = float(Ls.mean())
    L_depth = float(0.5 * (Ls.max() - Ls.min()))
    L_approx = float(inductor.inductance_series(sol, saw_spec, times, "approx", core_length).mean())
    emf = inductor.emf_series(sol, saw_spec, times, "flux", core_length)
    emf_amp = float(np.max(np.abs(emf)))
    table = _inductance_table(scn, saw_spec, core_length)

    # resonator
    rcfg = scn.section("rlc")
    rlc = resonator.RlcSpec(rcfg["capacitance"], rcfg["inductance_static"], rcfg["resistance"])
    f_r = rlc.f_r
    _finding(reference.check_resonance(rlc.inductance_static, rlc.capacitance, f_r, emit), found)
    w_ac = 2 * math.pi * f_ac
    z = complex(rlc.R, w_ac * rlc.inductance_static - 1 / (w_ac * rlc.capacitance))
    i_res = emf_amp / abs(z)

    pickup = 1.0 if eff["pickup"] == "ideal" else (L_depth / L_mean if L_mean > 0 else 0.0)
    if eff["acceptance"] == "ideal":
        accept = 1.0
    else:
        accept = 1.0 / (1.0 + (2 * rlc.Q * (f_ac - f_r) / f_r) ** 2)
    overall = eta_pp * pickup * accept

    return TransductionReport(
        scenario=scn.name, material=m.name, wavelength=src.wavelength_vac,
        optical_frequency=src.frequency, n_eff=n_eff, A_eff=float(a_eff),
        A_eff_integral=float(a_int), area_convention=convention, g_B=g_used,
        g_B_computed=g_comp, g_B_ratio=g_comp / reference.DESIGN["g_B"], L_eff=float(l_eff),
        P_cr=p_cr, pump_power=src.pump_power, stokes_output=stokes_out,
        conversion_achieved=conv, N_phonons=n_ph, N_phonons_material=n_ph_mat,
        noise_pump_power=float(p_noise), noise_peak_density=spec_out.peak,
        noise_integrated_power=spec_out.integrated_power,
        noise_peak_gain=float(spec_out.gain.max()), saw_amplitude=amp, saw_frequency=f_ac,
        saw_wavelength=saw_spec.wavelength, n_per_len=float(n_len),
        turn_interpretation=sol_cfg["turn_interpretation"], L_mean=L_mean, L_mod_depth=L_depth,
        L_approx=L_approx, emf_amplitude=emf_amp, L_static=rlc.inductance_static, f_r=f_r,
        resistance=rlc.R, Q=rlc.Q, resonator_current=i_res, efficiency_photon_phonon=eta_pp,
        efficiency_pickup=pickup, efficiency_acceptance=accept, overall_efficiency=overall,
        inductance_interpretations=table, warnings=found)


def _sweep_point(args):
    scn, point, tolerance = args
    try:
        sub = scn.with_values(point)
        return SweepRow(list(point), run_scenario(sub, tolerance, emit_warnings=False))
    except TransductionError as exc:
        return SweepRow(list(point), None, f"{type(exc).__name__}: {exc}")


def run_sweep(scn, jobs=1, tolerance=None):
    """Evaluate every sweep grid point; rows come back in declaration order."""
    if not scn.sweeps:
        from ..errors import ValidationError
        raise ValidationError("sweep", "scenario declares no sweep axes")
    tasks = [(scn, p, tolerance) for p in scn.grid_points()]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    return SweepTable(scn.name, [ax.path for ax in scn.sweeps], rows)
