"""Optoelectromechanical transduction through Brillouin scattering in glass microwires.

Modules
-------
materials
    Glass parameter records, presets and YAML loading.
fibermode
    Step-index LP01 solver, sampled profiles and effective area.
coupling
    Overlap, force and viscous-damping integrals of the coupled-mode model.
brillouin
    Gain, critical power, Green's-function acoustic response and envelope solvers.
noise
    Thermal phonon occupation and amplified spontaneous scattering.
inductor
    Finite-solenoid magnetostatics and SAW-modulated inductance.
resonator
    Series RLC resonance and driven response.
pipeline
    Scenario files, end-to-end runs, sweeps and report rendering.
"""

from .errors import (
    CFLError,
    ConfigParseError,
    GridMismatchError,
    InstabilityError,
    NoGuidedModeError,
    NumericalError,
    QuadratureError,
    StepSizeError,
    TransductionError,
    ValidationError,
    ZeroFieldError,
)
from .kernels import BACKEND

__version__ = "0.1.0"
