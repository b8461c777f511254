import copy
import json
import math
from dataclasses import fields

import numpy as np
import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from sbs_transduction.errors import ConfigParseError, TransductionError, ValidationError
from sbs_transduction.pipeline import (
    CSV_COLUMNS,
    TransductionReport,
    builtin_scenario,
    load_scenario,
    parse_report_json,
    parse_scenario,
    render,
    run_scenario,
    run_sweep,
)


@pytest.fixture(scope="module")
def design_doc():
    return yaml.safe_load(open(builtin_scenario("design"), encoding="utf-8"))


@pytest.fixture(scope="module")
def design_report():
    return run_scenario(load_scenario(builtin_scenario("design")), emit_warnings=False)


def variant(doc, **paths):
    d = copy.deepcopy(doc)
    for path, value in paths.items():
        node = d
        keys = path.split("__")
        for k in keys[:-1]:
            node = node.setdefault(k, {})
        node[keys[-1]] = value
    return parse_scenario(d)


# -- run_scenario ---------------------------------------------------------------

def test_design_headline_numbers(design_report):
    r = design_report
    assert r.f_r == pytest.approx(325.08e6, abs=0.05e6)
    assert r.P_cr == pytest.approx(19.2194, abs=1e-3)
    assert r.N_phonons == pytest.approx(565, abs=1)
    assert r.N_phonons_material == pytest.approx(541.1, abs=0.5)
    assert {"gain-residual", "phonon-count"} <= set(r.warning_codes)


def test_everything_finite_and_efficiency_in_range(design_report):
    for f in fields(TransductionReport):
        v = getattr(design_report, f.name)
        if isinstance(v, float):
            assert math.isfinite(v), f.name
    assert 0 <= design_report.overall_efficiency <= 0.45


def test_unpumped_wire_gives_nothing(design_doc):
    r = run_scenario(variant(design_doc, source__pump_power=0.0), emit_warnings=False)
    assert r.saw_amplitude == 0.0
    assert r.emf_amplitude == 0.0
    assert r.L_mod_depth == 0.0
    assert r.overall_efficiency == 0.0


def test_cap_propagates_with_ideal_back_end(design_report, design_doc):
    assert design_report.conversion_achieved > 0.45
    assert design_report.efficiency_photon_phonon == 0.45
    assert design_report.overall_efficiency == 0.45
    r = run_scenario(variant(design_doc, efficiency__conversion_cap=0.3), emit_warnings=False)
    assert r.overall_efficiency == 0.3
    r = run_scenario(variant(design_doc, efficiency__conversion_cap=1.0), emit_warnings=False)
    assert r.overall_efficiency == r.conversion_achieved < 1.0


def test_efficiency_factors_multiply(design_doc):
    r = run_scenario(variant(design_doc, efficiency__pickup="modulation",
                             efficiency__acceptance="lorentzian"), emit_warnings=False)
    assert r.efficiency_pickup == pytest.approx(r.L_mod_depth / r.L_mean, rel=1e-12)
    detune = 2 * r.Q * (r.saw_frequency - r.f_r) / r.f_r
    assert r.efficiency_acceptance == pytest.approx(1 / (1 + detune**2), rel=1e-12)
    assert r.overall_efficiency == pytest.approx(
        r.efficiency_photon_phonon * r.efficiency_pickup * r.efficiency_acceptance, rel=1e-12)


def test_both_turn_interpretations_recorded(design_report):
    rows = design_report.inductance_interpretations
    assert {(r["interpretation"], r["method"]) for r in rows} == {
        ("total", "flux"), ("total", "approx"), ("per-length", "flux"), ("per-length", "approx")}
    assert min(r["decades_from_reference"] for r in rows) < 1.0


def test_stated_inductance_scenario_warns():
    with pytest.warns(UserWarning):
        r = run_scenario(load_scenario(builtin_scenario("stated_inductance")))
    assert r.f_r == pytest.approx(734.2e3, rel=1e-3)
    assert "inductance-resonance" in r.warning_codes


def test_errors_carry_scenario_context(design_doc):
    scn = variant(design_doc, name="tiny", waveguide__core_radius=1e-4, waveguide__units={"core_radius": "nm"})
    with pytest.raises(TransductionError) as exc:
        run_scenario(scn, emit_warnings=False)
    assert "scenario 'tiny'" in str(exc.value)


# -- sweeps ---------------------------------------------------------------------

def test_single_point_sweep_equals_run(design_doc):
    d = copy.deepcopy(design_doc)
    d["sweep"] = [{"path": "rlc.capacitance", "values": [47]}]
    scn = parse_scenario(d)
    table = run_sweep(scn)
    assert len(table.rows) == 1
    single = run_scenario(parse_scenario({k: v for k, v in d.items() if k != "sweep"}),
                          emit_warnings=False)
    assert render(table.rows[0].report, "json") == render(single, "json")


def test_area_sweep_doubles_critical_power():
    table = run_sweep(load_scenario(builtin_scenario("sweep_area")))
    p = [row.report.P_cr for row in table.rows]
    assert p[1] / p[0] == pytest.approx(2.0, rel=1e-14)
    assert p[2] / p[1] == pytest.approx(2.0, rel=1e-14)


@pytest.fixture(scope="module")
def saw_sweeps():
    scn = load_scenario(builtin_scenario("sweep_saw_amplitude"))
    return run_sweep(scn, jobs=1), run_sweep(scn, jobs=3)


def test_saw_amplitude_sweep_monotone(saw_sweeps):
    emf = [row.report.emf_amplitude for row in saw_sweeps[0].rows]
    assert len(emf) == 5 and emf[0] == 0.0
    assert all(b > a for a, b in zip(emf, emf[1:]))


@pytest.mark.parametrize("fmt", ["csv", "json", "text"])
def test_parallel_sweep_byte_identical(saw_sweeps, fmt):
    assert render(saw_sweeps[0], fmt) == render(saw_sweeps[1], fmt)


def test_sweep_records_row_errors(design_doc):
    d = copy.deepcopy(design_doc)
    d["sweep"] = [{"path": "saw.amplitude", "values": [0.01, 2.0]}]
    table = run_sweep(parse_scenario(d))
    assert table.rows[0].report is not None and table.rows[0].error is None
    assert table.rows[1].report is None and "ValidationError" in table.rows[1].error
    csv_lines = render(table, "csv").splitlines()
    assert csv_lines[2].endswith("must be below saw.base_radius") or "base_radius" in csv_lines[2]


def test_sweep_requires_axes(design_doc):
    with pytest.raises(ValidationError):
        run_sweep(parse_scenario(design_doc))


# -- rendering --------------------------------------------------------------------

def test_render_deterministic(design_report):
    again = run_scenario(load_scenario(builtin_scenario("design")), emit_warnings=False)
    for fmt in ("csv", "json", "text"):
        assert render(design_report, fmt) == render(again, fmt) == render(design_report, fmt)


def test_csv_header_matches_schema(design_report):
    header = render(design_report, "csv").splitlines()[0].split(",")
    assert tuple(header) == CSV_COLUMNS
    assert header[:3] == ["scenario", "material", "wavelength"] and header[-1] == "warnings"
    assert len(render(design_report, "csv").splitlines()) == 2


def test_json_schema_tag_and_parse(design_report, saw_sweeps):
    doc = json.loads(render(design_report, "json"))
    assert doc["schema"] == "transduction-report/1"
    assert parse_report_json(render(design_report, "json")) == design_report
    table = parse_report_json(render(saw_sweeps[0], "json"))
    assert render(table, "json") == render(saw_sweeps[0], "json")
    with pytest.raises(ValidationError):
        parse_report_json('{"schema": "other/9"}')


def test_unsupported_format(design_report):
    with pytest.raises(ValidationError):
        render(design_report, "xml")
    with pytest.raises(ValidationError):
        render(object(), "json")


finite = st.floats(allow_nan=False, allow_infinity=False)
warning = st.fixed_dictionaries({"code": st.text(min_size=1, max_size=12), "message": st.text(max_size=40),
                                 "published": finite, "computed": finite})
interp = st.fixed_dictionaries({"interpretation": st.sampled_from(["total", "per-length"]),
                                "method": st.sampled_from(["flux", "approx"]),
                                "n_per_len": finite, "L": finite, "decades_from_reference": finite})


def _report_strategy():
    kw = {}
    for f in fields(TransductionReport):
        if f.name == "warnings":
            kw[f.name] = st.lists(warning, max_size=4)
        elif f.name == "inductance_interpretations":
            kw[f.name] = st.lists(interp, max_size=4)
        elif f.type in ("str", str):
            kw[f.name] = st.text(max_size=20)
        else:
            kw[f.name] = finite
    return st.builds(TransductionReport, **kw)


@settings(max_examples=1000, deadline=None)
@given(_report_strategy())
def test_json_round_trip_property(rep):
    text = render(rep, "json")
    back = parse_report_json(text)
    assert back == rep
    assert render(back, "json") == text


# -- scenario files -----------------------------------------------------------------

@pytest.mark.parametrize("patch,exc", [
    ({"bogus": 1}, ValidationError),
    ({"material": None}, ValidationError),
    ({"material": "unobtainium"}, ValidationError),
    ({"sbs": {"colour": 1}}, ValidationError),
    ({"sbs": {"direction": "sideways"}}, ValidationError),
    ({"efficiency": {"conversion_cap": 1.5}}, ValidationError),
    ({"rlc": {"capacitance": -1, "units": {"capacitance": "pF"}}}, ValidationError),
    ({"rlc": {"units": {"capacitance": "furlong"}}}, ValidationError),
    ({"mode": {"grid_points": 5}}, ValidationError),
    ({"source": {"pump_power": "lots"}}, ValidationError),
    ({"sweep": [{"path": "saw.amplitude", "values": []}]}, ValidationError),
    ({"sweep": [{"path": "saw.amplitude", "start": 0}]}, ValidationError),
    ({"sweep": {"path": "x"}}, ConfigParseError),
    ({"sbs": [1, 2]}, ConfigParseError),
])
def test_scenario_validation(design_doc, patch, exc):
    d = copy.deepcopy(design_doc)
    for k, v in patch.items():
        if isinstance(v, dict) and isinstance(d.get(k), dict):
            d[k] = {**d[k], **v}
        else:
            d[k] = v
    with pytest.raises(exc):
        parse_scenario(d)


def test_units_are_converted(design_doc):
    scn = parse_scenario(design_doc)
    assert scn.section("waveguide")["length"] == pytest.approx(0.08, rel=1e-15)
    assert scn.section("rlc")["capacitance"] == pytest.approx(47e-12, rel=1e-15)
    assert scn.source.wavelength_vac == pytest.approx(1534e-9, rel=1e-15)


def test_log_sweep_grid(design_doc):
    d = copy.deepcopy(design_doc)
    d["sweep"] = [{"path": "rlc.capacitance", "start": 1, "stop": 100, "count": 3, "spacing": "log"},
                  {"path": "saw.amplitude", "values": [0.0, 0.01]}]
    pts = parse_scenario(d).grid_points()
    assert len(pts) == 6
    assert [v for _, v in pts[0]] == [1.0, 0.0]
    assert pts[2][0][1] == pytest.approx(10.0, rel=1e-14)


def test_base_inheritance(tmp_path):
    (tmp_path / "parent.yaml").write_text(open(builtin_scenario("design")).read())
    (tmp_path / "child.yaml").write_text("base: parent.yaml\nname: child\nrlc: {capacitance: 94}\n")
    scn = load_scenario(tmp_path / "child.yaml")
    assert scn.name == "child"
    # the child's value is read in the parent's declared units
    assert scn.section("rlc")["capacitance"] == pytest.approx(94e-12, rel=1e-15)
    assert scn.section("rlc")["inductance_static"] == pytest.approx(5.1e-9, rel=1e-15)


def test_scenario_io_errors(tmp_path):
    with pytest.raises(ConfigParseError):
        load_scenario(tmp_path / "absent.yaml")
    (tmp_path / "bad.yaml").write_text("name: [unclosed\n")
    with pytest.raises(ConfigParseError):
        load_scenario(tmp_path / "bad.yaml")
    (tmp_path / "list.yaml").write_text("- 1\n- 2\n")
    with pytest.raises(ConfigParseError):
        load_scenario(tmp_path / "list.yaml")
    (tmp_path / "orphan.yaml").write_text("base: nowhere.yaml\nmaterial: silica\n")
    with pytest.raises(ConfigParseError):
        load_scenario(tmp_path / "orphan.yaml")
    (tmp_path / "loop.yaml").write_text("base: loop.yaml\n")
    with pytest.raises(ConfigParseError):
        load_scenario(tmp_path / "loop.yaml")
    with pytest.raises(ValidationError):
        builtin_scenario("nonexistent")


def test_overrides(design_doc):
    scn = load_scenario(builtin_scenario("design"), {"rlc.capacitance": 94})
    assert scn.section("rlc")["capacitance"] == pytest.approx(94e-12, rel=1e-15)
    assert np.isclose(scn.with_values([("rlc.capacitance", 10)]).section("rlc")["capacitance"], 10e-12)


def test_readme_documents_csv_columns():
    from pathlib import Path

    text = (Path(__file__).parents[1] / "README.md").read_text(encoding="utf-8")
    block = text.split("CSV columns for a report", 1)[1].split("```")[1]
    assert tuple(c.strip() for c in block.replace("\n", " ").split(",")) == CSV_COLUMNS
