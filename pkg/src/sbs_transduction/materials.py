"""Material parameter records for rare-earth aluminosilicate glasses.

All quantities are held in SI base units. Configuration files may declare
a unit per field from a fixed whitelist; values are converted on load.

File schema (YAML)::

    materials:
      - name: lanthano-aluminosilicate
        n_eff: 1.65
        p12: -0.027
        rho: 3.48
        v_s: 5727
        nu_B: 11.476
        dnu_B: 1011.2
        alpha_opt: 0.0
        eta_scale: null          # null -> calibrated from dnu_B
        units: {rho: g/cm3, nu_B: GHz, dnu_B: MHz}
        metadata: {rho_range: [3480, 4190]}
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import yaml
from scipy import constants

from .errors import ConfigParseError, ValidationError

__all__ = [
    "MaterialParams",
    "SourceSpec",
    "UNIT_FACTORS",
    "builtin_materials",
    "dump_materials",
    "get_material",
    "load_materials",
    "parse_materials",
]

_DB_PER_NEPER = 10.0 / math.log(10.0)

# field -> {unit: factor to SI}
UNIT_FACTORS: dict[str, dict[str, float]] = {
    "rho": {"kg/m3": 1.0, "g/cm3": 1e3},
    "v_s": {"m/s": 1.0, "km/s": 1e3},
    "nu_B": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
    "dnu_B": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
    "alpha_opt": {"1/m": 1.0, "1/km": 1e-3, "dB/m": 1.0 / _DB_PER_NEPER, "dB/km": 1e-3 / _DB_PER_NEPER},
    "eta_scale": {"Pa*s": 1.0, "mPa*s": 1e-3},
    "wavelength": {"m": 1.0, "um": 1e-6, "nm": 1e-9},
}

_NUMERIC_FIELDS = ("n_eff", "p12", "rho", "v_s", "nu_B", "dnu_B", "alpha_opt", "eta_scale")


def _require(name, value, ok, bound):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and ok(value)):
        raise ValidationError(name, f"must satisfy {bound}, got {value!r}")


@dataclass(frozen=True)
class MaterialParams:
    """Optical, acoustic and elastic constants of one glass.

    ``eta_scale`` is the viscosity scale of the isotropic damping tensor;
    ``None`` means it is calibrated from ``dnu_B`` when needed.
    """

    name: str
    n_eff: float
    p12: float
    rho: float
    v_s: float
    nu_B: float
    dnu_B: float
    alpha_opt: float = 0.0
    eta_scale: float | None = None
    metadata: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name.strip():
            raise ValidationError("name", "must be a non-empty string")
        _require("n_eff", self.n_eff, lambda v: v >= 1.0, "n_eff >= 1")
        _require("p12", self.p12, lambda v: True, "finite")
        _require("rho", self.rho, lambda v: v > 0, "rho > 0")
        _require("v_s", self.v_s, lambda v: v > 0, "v_s > 0")
        _require("nu_B", self.nu_B, lambda v: v > 0, "nu_B > 0")
        _require("dnu_B", self.dnu_B, lambda v: v > 0, "dnu_B > 0")
        _require("alpha_opt", self.alpha_opt, lambda v: v >= 0, "alpha_opt >= 0")
        if self.eta_scale is not None:
            _require("eta_scale", self.eta_scale, lambda v: v >= 0, "eta_scale >= 0")

    @property
    def key(self):
        return self.name.strip().lower()

    def to_dict(self):
        d = asdict(self)
        if not d["metadata"]:
            del d["metadata"]
        return d


@dataclass(frozen=True)
class SourceSpec:
    """Optical source: vacuum wavelength plus pump and Stokes-seed powers."""

    wavelength_vac: float
    pump_power: float = 0.0
    seed_power: float = 0.0

    def __post_init__(self):
        _require("wavelength_vac", self.wavelength_vac, lambda v: v > 0, "wavelength_vac > 0")
        _require("pump_power", self.pump_power, lambda v: v >= 0, "pump_power >= 0")
        _require("seed_power", self.seed_power, lambda v: v >= 0, "seed_power >= 0")

    @property
    def frequency(self):
        return constants.c / self.wavelength_vac

    @property
    def omega(self):
        return 2.0 * math.pi * self.frequency


def _convert(record, units):
    out = dict(record)
    for fname, unit in (units or {}).items():
        table = UNIT_FACTORS.get(fname)
        if table is None:
            raise ValidationError(f"units.{fname}", "no unit conversion defined for this field")
        if unit not in table:
            raise ValidationError(f"units.{fname}", f"unit {unit!r} not in {sorted(table)}")
        if out.get(fname) is not None:
            out[fname] = float(out[fname]) * table[unit]
    return out


def _material_from_record(rec, where):
    if not isinstance(rec, dict):
        raise ConfigParseError(f"{where}: expected a mapping, got {type(rec).__name__}")
    rec = dict(rec)
    units = rec.pop("units", None)
    metadata = rec.pop("metadata", None) or {}
    unknown = set(rec) - {"name", *_NUMERIC_FIELDS}
    if unknown:
        raise ValidationError(f"{where}.{sorted(unknown)[0]}", "unknown field")
    missing = {"name", "n_eff", "p12", "rho", "v_s", "nu_B", "dnu_B"} - set(rec)
    if missing:
        raise ValidationError(f"{where}.{sorted(missing)[0]}", "required field missing")
    rec = _convert(rec, units)
    for k in _NUMERIC_FIELDS:
        if k in rec and rec[k] is not None:
            if isinstance(rec[k], bool) or not isinstance(rec[k], (int, float)):
                raise ValidationError(f"{where}.{k}", f"expected a number, got {rec[k]!r}")
            rec[k] = float(rec[k])
    try:
        return MaterialParams(metadata=dict(metadata), **rec)
    except ValidationError as exc:
        raise ValidationError(f"{where}.{exc.field}", str(exc).split(": ", 1)[1]) from None


def parse_materials(doc, source="<memory>"):
    """Validate an already-parsed document into a list of records."""
    if doc is None:
        return []
    if not isinstance(doc, dict) or "materials" not in doc:
        raise ConfigParseError(f"{source}: top-level 'materials' list required")
    entries = doc["materials"] or []
    if not isinstance(entries, list):
        raise ConfigParseError(f"{source}: 'materials' must be a list")
    out, seen = [], set()
    for i, rec in enumerate(entries):
        m = _material_from_record(rec, f"materials[{i}]")
        if m.key in seen:
            raise ValidationError(f"materials[{i}].name", f"duplicate material name {m.name!r}")
        seen.add(m.key)
        out.append(m)
    return out


def load_materials(path):
    """Load and validate materials from a YAML file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc
    return parse_materials(doc, str(path))


def dump_materials(materials):
    """Serialize records (SI units, no ``units`` block) to YAML text."""
    return yaml.safe_dump({"materials": [m.to_dict() for m in materials]}, sort_keys=False)


_BUILTIN = None


def builtin_materials():
    global _BUILTIN
    if _BUILTIN is None:
        text = resources.files("sbs_transduction").joinpath("data/presets.yaml").read_text("utf-8")
        _BUILTIN = parse_materials(yaml.safe_load(text), "presets.yaml")
    return list(_BUILTIN)


def get_material(name, materials=None):
    """Look up a record by name, case-insensitively."""
    key = name.strip().lower()
    for m in materials if materials is not None else builtin_materials():
        if m.key == key:
            return m
    raise ValidationError("material", f"unknown material {name!r}")
