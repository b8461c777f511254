"""Scenario files: one YAML document describing a full transduction chain.

Every section is optional except ``material``; missing keys take the
defaults in ``DEFAULTS``. Any numeric field may declare a unit in the
section's ``units`` mapping (see ``SCENARIO_UNITS``). Example::

    name: design
    material: lanthano-aluminosilicate
    source: {wavelength_vac: 1534, pump_power: 38.4, units: {wavelength_vac: nm}}
    waveguide: {core_radius: 0.5, length: 8, units: {core_radius: um, length: cm}}
    sweep:
      - {path: saw.amplitude, start: 0, stop: 0.05, count: 5}
"""

from __future__ import annotations

import copy
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from ..errors import ConfigParseError, ValidationError
from ..materials import MaterialParams, SourceSpec, get_material, load_materials

__all__ = ["DEFAULTS", "SCENARIO_UNITS", "Scenario", "SweepAxis", "load_scenario",
           "parse_scenario", "set_path"]

_LENGTH = {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9}
_FREQ = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "THz": 1e12}
_POWER = {"W": 1.0, "mW": 1e-3, "uW": 1e-6}
_AREA = {"m2": 1.0, "um2": 1e-12}
_CAP = {"F": 1.0, "nF": 1e-9, "pF": 1e-12}
_IND = {"H": 1.0, "mH": 1e-3, "uH": 1e-6, "nH": 1e-9}
_CURRENT = {"A": 1.0, "mA": 1e-3}

SCENARIO_UNITS = {
    "source": {"wavelength_vac": _LENGTH, "pump_power": _POWER, "seed_power": _POWER},
    "waveguide": {"core_radius": _LENGTH, "length": _LENGTH},
    "sbs": {"a_eff": _AREA, "l_eff": _LENGTH, "step": _LENGTH},
    "saw": {"amplitude": _LENGTH, "base_radius": _LENGTH, "frequency": _FREQ},
    "solenoid": {"coil_radius": _LENGTH, "length": _LENGTH, "current": _CURRENT},
    "rlc": {"capacitance": _CAP, "inductance_static": _IND},
    "noise": {"nu_B": _FREQ, "pump_power": _POWER},
}

DEFAULTS = {
    "name": "scenario",
    "material": None,
    "materials_file": None,
    "source": {"wavelength_vac": 1534e-9, "pump_power": 0.0, "seed_power": 1e-3},
    "waveguide": {"core_radius": 0.5e-6, "core_index": None, "clad_index": 1.0, "length": 0.08},
    "mode": {"model": "lp", "grid_points": 161, "extent": 3.0},
    "sbs": {"area_convention": "geometric", "a_eff": None, "g_B": None, "kappa_pol": 1.0,
            "l_eff": None, "direction": "backward", "step": 1e-4},
    "saw": {"amplitude": 0.05e-6, "base_radius": 1e-6, "frequency": None, "velocity": None},
    "solenoid": {"coil_radius": 100e-6, "length": None, "turns": 250,
                 "turn_interpretation": "total", "current": 1e-3, "mu_r": 1.0},
    "rlc": {"capacitance": 47e-12, "inductance_static": 5.1e-9, "resistance": None},
    "noise": {"temperature": 298.0, "nu_B": None, "pump_power": None, "n_points": 201,
              "span": 5.0},
    "efficiency": {"conversion_cap": 0.45, "pickup": "ideal", "acceptance": "ideal"},
    "sweep": [],
    "base": None,
}

_CHOICES = {
    ("mode", "model"): ("lp", "he11"),
    ("sbs", "area_convention"): ("geometric", "integral"),
    ("sbs", "direction"): ("backward", "forward"),
    ("solenoid", "turn_interpretation"): ("total", "per-length"),
    ("efficiency", "pickup"): ("ideal", "modulation"),
    ("efficiency", "acceptance"): ("ideal", "lorentzian"),
}


@dataclass(frozen=True)
class SweepAxis:
    path: str
    values: tuple

    @classmethod
    def from_doc(cls, d, where):
        if not isinstance(d, dict) or "path" not in d:
            raise ValidationError(where, "sweep entry needs a 'path'")
        path = d["path"]
        if "values" in d:
            values = tuple(d["values"] or ())
        else:
            try:
                start, stop, count = d["start"], d["stop"], int(d["count"])
            except KeyError as exc:
                raise ValidationError(where, f"sweep needs 'values' or start/stop/count ({exc})") from None
            spacing = d.get("spacing", "linear")
            if spacing == "linear":
                values = tuple(float(v) for v in np.linspace(start, stop, count))
            elif spacing == "log":
                if not (start > 0 and stop > 0):
                    raise ValidationError(where, "log sweep needs positive bounds")
                values = tuple(float(v) for v in np.geomspace(start, stop, count))
            else:
                raise ValidationError(where, f"unknown spacing {spacing!r}")
        if not values:
            raise ValidationError(where, "sweep range is empty")
        return cls(path, values)


@dataclass(frozen=True, eq=False)
class Scenario:
    """Validated scenario; ``doc`` keeps the raw document for sweeps and overrides."""

    name: str
    material: MaterialParams
    source: SourceSpec
    sections: dict
    sweeps: tuple
    doc: dict = field(repr=False)

    def section(self, key):
        return self.sections[key]

    def with_values(self, assignments):
        doc = copy.deepcopy(self.doc)
        for path, value in assignments:
            set_path(doc, path, value)
        return parse_scenario(doc, self.name, _base_dir=self.doc.get("_base_dir"))

    def grid_points(self):
        """Cartesian product of the sweep axes, in declaration order."""
        if not self.sweeps:
            return [()]
        axes = [[(ax.path, v) for v in ax.values] for ax in self.sweeps]
        return list(itertools.product(*axes))


def set_path(doc, path, value):
    keys = path.split(".")
    node = doc
    for k in keys[:-1]:
        if not isinstance(node.get(k), dict):
            node[k] = {}
        node = node[k]
    node[keys[-1]] = value


def _merge(defaults, given, where):
    if given is None:
        given = {}
    if not isinstance(given, dict):
        raise ConfigParseError(f"{where}: expected a mapping")
    given = dict(given)
    units = given.pop("units", None) or {}
    unknown = set(given) - set(defaults)
    if unknown:
        raise ValidationError(f"{where}.{sorted(unknown)[0]}", "unknown field")
    out = dict(defaults)
    out.update(given)
    table = SCENARIO_UNITS.get(where, {})
    for fname, unit in units.items():
        if fname not in table:
            raise ValidationError(f"{where}.units.{fname}", "no unit conversion for this field")
        if unit not in table[fname]:
            raise ValidationError(f"{where}.units.{fname}", f"unit {unit!r} not in {sorted(table[fname])}")
        if fname in given and given[fname] is not None:
            out[fname] = _number(given[fname], f"{where}.{fname}") * table[fname][unit]
    return out


def _number(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(where, f"expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise ValidationError(where, "must be finite")
    return v


def _check(sec, where, positive=(), nonneg=(), optional_positive=()):
    for k in positive:
        if not _number(sec[k], f"{where}.{k}") > 0:
            raise ValidationError(f"{where}.{k}", f"must be > 0, got {sec[k]}")
    for k in nonneg:
        if not _number(sec[k], f"{where}.{k}") >= 0:
            raise ValidationError(f"{where}.{k}", f"must be >= 0, got {sec[k]}")
    for k in optional_positive:
        if sec[k] is not None and not _number(sec[k], f"{where}.{k}") > 0:
            raise ValidationError(f"{where}.{k}", f"must be > 0, got {sec[k]}")


def parse_scenario(doc, source="<memory>", _base_dir=None):
    if not isinstance(doc, dict):
        raise ConfigParseError(f"{source}: scenario must be a mapping")
    doc = copy.deepcopy(doc)
    base_dir = doc.pop("_base_dir", _base_dir)
    unknown = set(doc) - set(DEFAULTS)
    if unknown:
        raise ValidationError(sorted(unknown)[0], "unknown top-level field")
    if not doc.get("material"):
        raise ValidationError("material", "a material name is required")
    extra = None
    if doc.get("materials_file"):
        p = Path(doc["materials_file"])
        if not p.is_absolute() and base_dir:
            p = Path(base_dir) / p
        extra = load_materials(p)
    try:
        material = get_material(doc["material"], extra) if extra else get_material(doc["material"])
    except ValidationError:
        if extra is None:
            raise
        material = get_material(doc["material"])

    sections = {}
    for key in ("source", "waveguide", "mode", "sbs", "saw", "solenoid", "rlc", "noise", "efficiency"):
        sections[key] = _merge(DEFAULTS[key], doc.get(key), key)
    for (sec, k), choices in _CHOICES.items():
        if sections[sec][k] not in choices:
            raise ValidationError(f"{sec}.{k}", f"must be one of {choices}, got {sections[sec][k]!r}")

    src = sections["source"]
    source_spec = SourceSpec(_number(src["wavelength_vac"], "source.wavelength_vac"),
                             _number(src["pump_power"], "source.pump_power"),
                             _number(src["seed_power"], "source.seed_power"))
    _check(sections["waveguide"], "waveguide", positive=("core_radius", "clad_index", "length"),
           optional_positive=("core_index",))
    m = sections["mode"]
    if not isinstance(m["grid_points"], int) or m["grid_points"] < 21:
        raise ValidationError("mode.grid_points", "must be an integer >= 21")
    _check(m, "mode", positive=("extent",))
    _check(sections["sbs"], "sbs", positive=("kappa_pol", "step"),
           optional_positive=("a_eff", "g_B", "l_eff"))
    _check(sections["saw"], "saw", positive=("base_radius",), nonneg=("amplitude",),
           optional_positive=("frequency", "velocity"))
    if sections["saw"]["amplitude"] >= sections["saw"]["base_radius"]:
        raise ValidationError("saw.amplitude", "must be below saw.base_radius")
    _check(sections["solenoid"], "solenoid", positive=("coil_radius", "turns", "mu_r"),
           optional_positive=("length",))
    _check(sections["rlc"], "rlc", positive=("capacitance", "inductance_static"))
    if sections["rlc"]["resistance"] is not None:
        _check(sections["rlc"], "rlc", nonneg=("resistance",))
    n = sections["noise"]
    _check(n, "noise", nonneg=("temperature",), positive=("span",), optional_positive=("nu_B",))
    if n["pump_power"] is not None:
        _check(n, "noise", nonneg=("pump_power",))
    if not isinstance(n["n_points"], int) or n["n_points"] < 2:
        raise ValidationError("noise.n_points", "must be an integer >= 2")
    cap = _number(sections["efficiency"]["conversion_cap"], "efficiency.conversion_cap")
    if not 0.0 <= cap <= 1.0:
        raise ValidationError("efficiency.conversion_cap", f"must lie in [0, 1], got {cap}")

    sweeps = doc.get("sweep") or []
    if not isinstance(sweeps, list):
        raise ConfigParseError(f"{source}: 'sweep' must be a list")
    axes = tuple(SweepAxis.from_doc(d, f"sweep[{i}]") for i, d in enumerate(sweeps))
    raw = dict(doc)
    if base_dir:
        raw["_base_dir"] = str(base_dir)
    return Scenario(str(doc.get("name") or DEFAULTS["name"]), material, source_spec, sections,
                    axes, raw)


def _deep_merge(base, top):
    out = copy.deepcopy(base)
    for k, v in top.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _with_base(doc, folder, depth):
    """Resolve ``base: other.yaml`` (relative to the including file) by deep merge."""
    ref = doc.get("base")
    if not ref:
        return doc
    if depth > 8:
        raise ConfigParseError("scenario 'base' chain too deep")
    p = Path(ref) if Path(ref).is_absolute() else Path(folder) / ref
    try:
        parent = yaml.safe_load(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigParseError(f"{p}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"{p}: {exc}") from exc
    if not isinstance(parent, dict):
        raise ConfigParseError(f"{p}: scenario must be a mapping")
    parent = _with_base(parent, p.parent, depth + 1)
    child = {k: v for k, v in doc.items() if k != "base"}
    # a child's sweep list replaces the parent's
    merged = _deep_merge({k: v for k, v in parent.items() if k != "base"}, child)
    return merged


def load_scenario(path, overrides=None):
    """Load a scenario file; ``overrides`` maps dotted paths to replacement values."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigParseError(f"{path}: scenario must be a mapping")
    doc = _with_base(doc, path.parent, depth=0)
    for p, v in (overrides or {}).items():
        set_path(doc, p, v)
    return parse_scenario(doc, str(path), _base_dir=str(path.parent))
