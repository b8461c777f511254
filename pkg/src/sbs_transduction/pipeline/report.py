"""Transduction reports and their CSV / JSON / text renderings.

JSON documents carry ``"schema": "transduction-report/1"`` (single report)
or ``"transduction-sweep/1"`` (sweep table). CSV columns are ``CSV_COLUMNS``
for a report, prefixed by the swept paths and suffixed by ``error`` for a
sweep table. All renderers are deterministic: floats are written with
``repr`` so parsing returns the identical value.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields

from ..errors import ValidationError

__all__ = [
    "CSV_COLUMNS",
    "REPORT_SCHEMA",
    "SWEEP_SCHEMA",
    "SweepRow",
    "SweepTable",
    "TransductionReport",
    "parse_report_json",
    "render",
]

REPORT_SCHEMA = "transduction-report/1"
SWEEP_SCHEMA = "transduction-sweep/1"
FORMATS = ("csv", "json", "text")


@dataclass
class TransductionReport:
    """End-to-end results. SI units throughout (m, W, H, Hz, V)."""

    scenario: str
    material: str
    wavelength: float
    optical_frequency: float
    n_eff: float
    A_eff: float
    A_eff_integral: float
    area_convention: str
    g_B: float
    g_B_computed: float
    g_B_ratio: float
    L_eff: float
    P_cr: float
    pump_power: float
    stokes_output: float
    conversion_achieved: float
    N_phonons: float
    N_phonons_material: float
    noise_pump_power: float
    noise_peak_density: float
    noise_integrated_power: float
    noise_peak_gain: float
    saw_amplitude: float
    saw_frequency: float
    saw_wavelength: float
    n_per_len: float
    turn_interpretation: str
    L_mean: float
    L_mod_depth: float
    L_approx: float
    emf_amplitude: float
    L_static: float
    f_r: float
    resistance: float
    Q: float
    resonator_current: float
    efficiency_photon_phonon: float
    efficiency_pickup: float
    efficiency_acceptance: float
    overall_efficiency: float
    inductance_interpretations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ValidationError(f.name, "report values must be finite")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in fields(cls)}
        missing = names - set(d)
        if missing:
            raise ValidationError(sorted(missing)[0], "missing from report document")
        return cls(**{k: d[k] for k in names})

    @property
    def warning_codes(self):
        return [w["code"] for w in self.warnings]


CSV_COLUMNS = tuple(f.name for f in fields(TransductionReport)
                    if f.name not in ("inductance_interpretations", "warnings")) + ("warnings",)


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):  # warnings column
        return ";".join(w["code"] for w in v)
    return str(v)


@dataclass
class SweepRow:
    point: list
    report: TransductionReport | None = None
    error: str | None = None

    def to_dict(self):
        return {"point": [[p, v] for p, v in self.point],
                "report": self.report.to_dict() if self.report else None,
                "error": self.error}


@dataclass
class SweepTable:
    scenario: str
    paths: list
    rows: list


def _report_json(r):
    return json.dumps({"schema": REPORT_SCHEMA, **r.to_dict()}, indent=2, sort_keys=True,
                      allow_nan=False) + "\n"


def _sweep_json(t):
    doc = {"schema": SWEEP_SCHEMA, "scenario": t.scenario, "paths": list(t.paths),
           "rows": [row.to_dict() for row in t.rows]}
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def parse_report_json(text):
    doc = json.loads(text)
    if doc.get("schema") == REPORT_SCHEMA:
        doc = dict(doc)
        del doc["schema"]
        return TransductionReport.from_dict(doc)
    if doc.get("schema") == SWEEP_SCHEMA:
        rows = [SweepRow([tuple(p) for p in r["point"]],
                         TransductionReport.from_dict(r["report"]) if r["report"] else None,
                         r["error"]) for r in doc["rows"]]
        return SweepTable(doc["scenario"], doc["paths"], rows)
    raise ValidationError("schema", f"unknown report schema {doc.get('schema')!r}")


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _report_text(r):
    lines = [f"transduction report: {r.scenario} ({r.material})"]
    width = max(len(c) for c in CSV_COLUMNS)
    for c in CSV_COLUMNS[:-1]:
        v = getattr(r, c)
        lines.append(f"  {c:<{width}}  {v:.6g}" if isinstance(v, float) else f"  {c:<{width}}  {v}")
    lines.append("  inductance interpretations:")
    for row in r.inductance_interpretations:
        lines.append(f"    {row['interpretation']:<10} {row['method']:<7} L = {row['L']:.4e} H"
                     f"  |log10(L/L_ref)| = {row['decades_from_reference']:.3f}")
    if r.warnings:
        lines.append("  warnings:")
        for w in r.warnings:
            lines.append(f"    [{w['code']}] {w['message']}")
    return "\n".join(lines) + "\n"


def render(obj, fmt="text"):
    """Render a report or sweep table as ``csv``, ``json`` or ``text``."""
    if fmt not in FORMATS:
        raise ValidationError("format", f"unsupported format {fmt!r}; choose from {FORMATS}")
    if isinstance(obj, TransductionReport):
        if fmt == "json":
            return _report_json(obj)
        if fmt == "csv":
            return _csv(CSV_COLUMNS, [[_cell(getattr(obj, c)) for c in CSV_COLUMNS]])
        return _report_text(obj)
    if isinstance(obj, SweepTable):
        if fmt == "json":
            return _sweep_json(obj)
        header = list(obj.paths) + list(CSV_COLUMNS) + ["error"]
        rows = []
        for row in obj.rows:
            vals = [_cell(float(v)) if isinstance(v, (int, float)) else str(v) for _, v in row.point]
            if row.report is not None:
                vals += [_cell(getattr(row.report, c)) for c in CSV_COLUMNS] + [""]
            else:
                vals += [""] * len(CSV_COLUMNS) + [row.error or ""]
            rows.append(vals)
        if fmt == "csv":
            return _csv(header, rows)
        out = [f"sweep: {obj.scenario} ({len(obj.rows)} points)"]
        for row in obj.rows:
            pt = ", ".join(f"{p}={v}" for p, v in row.point)
            if row.report is None:
                out.append(f"  {pt}: ERROR {row.error}")
            else:
                r = row.report
                out.append(f"  {pt}: P_cr={r.P_cr:.6g} W  f_r={r.f_r:.6g} Hz  "
                           f"emf={r.emf_amplitude:.4g} V  efficiency={r.overall_efficiency:.4g}")
        return "\n".join(out) + "\n"
    raise ValidationError("report", f"cannot render {type(obj).__name__}")
