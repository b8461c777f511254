"""Published design values and consistency checks against them.

Each check returns a :class:`Finding` (or ``None``) and, when ``emit`` is
set, raises a :class:`ReferenceMismatchWarning`. Nothing here patches a
computed number; the findings only document where computed and published
values part ways.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

from scipy import constants

__all__ = [
    "DESIGN",
    "Finding",
    "ReferenceMismatchWarning",
    "check_core_radius",
    "check_gain",
    "check_optical_frequency",
    "check_phonon_count",
    "check_resonance",
]


class ReferenceMismatchWarning(UserWarning):
    """A computed quantity disagrees with a published design value."""


DESIGN = {
    "wavelength": 1534e-9,
    "optical_frequency": 195.57e12,
    "g_B": 1.0727e-11,
    "P_cr": 19.2194,
    "f_r": 325.08e6,
    "capacitance": 47e-12,
    "inductance": 5.1e-9,
    "inductance_stated": 1e-3,
    "N_phonons": 565.0,
    "N_temperature": 298.0,
    "N_nu_B": 11.476e9,
    "turns": 250,
    "core_radius": 1e-6,
    "core_length": 0.08,
    "saw_amplitude": 0.05e-6,
    "conversion_cap": 0.45,
}


@dataclass(frozen=True)
class Finding:
    code: str
    message: str
    published: float
    computed: float

    def to_dict(self):
        return asdict(self)


def _near(x, y, rel=1e-6):
    return abs(x - y) <= rel * abs(y)


def _emit(finding, emit):
    if finding is not None and emit:
        warnings.warn(finding.message, ReferenceMismatchWarning, stacklevel=3)
    return finding


def check_optical_frequency(wavelength, emit=True):
    if not _near(wavelength, DESIGN["wavelength"]):
        return None
    f = constants.c / wavelength
    pub = DESIGN["optical_frequency"]
    if _near(f, pub, 1e-5):
        return None
    return _emit(Finding(
        "optical-frequency",
        f"c / {wavelength * 1e9:.0f} nm = {f / 1e12:.2f} THz; the published design value "
        f"{pub / 1e12:.2f} THz corresponds to {constants.c / pub * 1e9:.2f} nm. "
        "Frequencies are derived from the wavelength.", pub, f), emit)


def check_gain(g_computed, material=None, emit=True, rel=0.01):
    pub = DESIGN["g_B"]
    if _near(g_computed, pub, rel):
        return None
    ratio = g_computed / pub
    msg = (f"g_B = {g_computed:.4e} m/W from the material constants is {ratio:.4g} x the "
           f"published design value {pub:.4e} m/W")
    if material is not None:
        rho_needed = material.rho * ratio
        msg += f"; matching it at the other constants needs rho = {rho_needed:.4g} kg/m3"
        if _near(rho_needed, material.rho / 1000.0, 0.01):
            msg += " (the density's g/cm3 magnitude, suggesting a unit slip)"
    return _emit(Finding("gain-residual", msg + ".", pub, g_computed), emit)


def check_phonon_count(temperature, nu_B, n_computed, emit=True):
    if not (_near(temperature, DESIGN["N_temperature"]) and _near(nu_B, DESIGN["N_nu_B"])):
        return None
    pub = DESIGN["N_phonons"]
    if abs(n_computed - pub) <= 1.0:
        return None
    nu_match = constants.k * temperature / (constants.h * pub)
    return _emit(Finding(
        "phonon-count",
        f"kT/h nu at {temperature:g} K and {nu_B / 1e9:.3f} GHz gives N = {n_computed:.1f}, "
        f"not the published design value {pub:.0f}, which corresponds to nu_B = "
        f"{nu_match / 1e9:.2f} GHz.", pub, n_computed), emit)


def check_resonance(inductance, capacitance, f_computed, emit=True):
    if not _near(capacitance, DESIGN["capacitance"]):
        return None
    if _near(inductance, DESIGN["inductance_stated"]):
        need = 1.0 / ((2 * math.pi * DESIGN["f_r"]) ** 2 * capacitance)
        return _emit(Finding(
            "inductance-resonance",
            f"published design value L = 1 mH with C = {capacitance * 1e12:g} pF resonates at "
            f"{f_computed / 1e3:.1f} kHz, not the published {DESIGN['f_r'] / 1e6:.2f} MHz, "
            f"which needs L = {need * 1e9:.2f} nH.", DESIGN["f_r"], f_computed), emit)
    return None


def check_core_radius(waveguide_radius, saw_radius, emit=True):
    if math.isclose(waveguide_radius, saw_radius, rel_tol=1e-12):
        return None
    return _emit(Finding(
        "core-radius",
        f"optical area uses r = {waveguide_radius * 1e6:g} um while the SAW core radius is "
        f"{saw_radius * 1e6:g} um; the published critical power is reproduced with the former "
        "and the inductance with the latter.", saw_radius, waveguide_radius), emit)
