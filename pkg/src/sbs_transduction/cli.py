"""Command-line interface: ``sbs-transduce <command> [options]``.

Exit codes: 0 success, 1 validation error, 2 numerical non-convergence,
3 I/O or configuration-file error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

from . import brillouin, fibermode, inductor, noise, reference, resonator
from .errors import ConfigParseError, NumericalError, TransductionError, ValidationError
from .materials import get_material, load_materials
from .pipeline import builtin_scenario, load_scenario, render, run_scenario, run_sweep

__all__ = ["main"]


def _emit(args, rows, title=None):
    """Write a list of (key, value) pairs or a table dict in the chosen format."""
    fmt = args.format
    if isinstance(rows, dict) and "columns" in rows:
        cols, data = rows["columns"], rows["rows"]
        if fmt == "json":
            text = json.dumps([dict(zip(cols, r)) for r in data], indent=2) + "\n"
        elif fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(cols)
            w.writerows([[repr(v) if isinstance(v, float) else v for v in r] for r in data])
            text = buf.getvalue()
        else:
            width = [max(len(str(c)), *(len(_fmt(r[i])) for r in data)) for i, c in enumerate(cols)]
            lines = ["  ".join(f"{c:<{w}}" for c, w in zip(cols, width))]
            lines += ["  ".join(f"{_fmt(v):<{w}}" for v, w in zip(r, width)) for r in data]
            text = "\n".join(lines) + "\n"
    else:
        items = list(rows.items()) if isinstance(rows, dict) else list(rows)
        if fmt == "json":
            text = json.dumps(dict(items), indent=2) + "\n"
        elif fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow([k for k, _ in items])
            w.writerow([repr(v) if isinstance(v, float) else v for _, v in items])
            text = buf.getvalue()
        else:
            width = max(len(k) for k, _ in items)
            text = (f"{title}\n" if title else "") + "\n".join(
                f"  {k:<{width}}  {_fmt(v)}" for k, v in items) + "\n"
    _write(args, text)


def _fmt(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _write(args, text):
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigParseError(f"{args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _materials(args):
    return load_materials(args.materials) if args.materials else None


def cmd_materials(args):
    mats = _materials(args)
    if args.action == "list":
        from .materials import builtin_materials
        mats = mats if mats is not None else builtin_materials()
        cols = ["name", "n_eff", "p12", "rho", "v_s", "nu_B", "dnu_B", "alpha_opt"]
        _emit(args, {"columns": cols, "rows": [[getattr(m, c) for c in cols] for m in mats]})
    else:
        if not args.name:
            raise ValidationError("name", "materials show needs a material name")
        m = get_material(args.name, mats)
        d = m.to_dict()
        d.pop("metadata", None)
        d["eta_scale"] = "calibrated" if d["eta_scale"] is None else d["eta_scale"]
        _emit(args, d, title=m.name)


def cmd_mode(args):
    geom = fibermode.WaveguideGeometry(args.radius, args.core_index, args.clad_index, 0.08)
    n_eff, u, w, V = fibermode.solve_mode(geom, args.wavelength, args.model)
    grid = fibermode.default_grid(geom, n=args.grid)
    prof = fibermode.sample_profile(geom, args.wavelength, grid, args.model)
    if args.profile_csv:
        fibermode.profile_to_csv(prof, args.profile_csv)
    _emit(args, [("n_eff", n_eff), ("u", u), ("w", w), ("V", V),
                 ("A_eff_integral", fibermode.effective_area(geom, prof, "integral")),
                 ("A_eff_geometric", fibermode.effective_area(geom, prof, "geometric"))],
          title="fundamental mode")


def cmd_gain(args):
    from dataclasses import replace
    m = get_material(args.material, _materials(args))
    over = {k: getattr(args, k) for k in ("n_eff", "p12", "rho", "v_s", "dnu_B") if getattr(args, k) is not None}
    if over:
        m = replace(m, **over)
    g = brillouin.gain_coefficient(m, args.wavelength)
    f = reference.check_gain(g, m)
    rows = [("material", m.name), ("wavelength", args.wavelength), ("g_B", g),
            ("published_g_B", reference.DESIGN["g_B"]), ("ratio", g / reference.DESIGN["g_B"])]
    if f:
        rows.append(("warning", f.message))
    _emit(args, rows, title="Brillouin gain")


def cmd_critpower(args):
    if args.a_eff is None and args.radius is None:
        raise ValidationError("a_eff", "give --a-eff or --radius")
    if args.radius is not None and not args.radius > 0:
        raise ValidationError("radius", f"must be > 0, got {args.radius}")
    a = args.a_eff if args.a_eff is not None else math.pi * args.radius**2
    l_eff = args.l_eff if args.l_eff is not None else brillouin.effective_length(args.alpha, args.length)
    p = brillouin.critical_power(a, args.g_b, l_eff, args.kappa)
    _emit(args, [("A_eff", a), ("g_B", args.g_b), ("L_eff", l_eff), ("kappa_pol", args.kappa),
                 ("P_cr", p)], title="critical power")


def cmd_inductance(args):
    n = inductor.turns_per_length(args.turns, args.coil_length, args.interpretation)
    sol = inductor.SolenoidSpec(args.coil_radius, args.coil_length, n, args.current)
    wavelength = args.velocity / args.frequency
    saw = inductor.SawSpec(args.amplitude, wavelength, 2 * math.pi * args.frequency, args.base_radius)
    import numpy as np
    times = np.arange(args.phases) * saw.period / args.phases
    Ls = inductor.inductance_series(sol, saw, times, args.method)
    emf = inductor.emf_series(sol, saw, times, args.method)
    if args.series_csv:
        inductor.series_to_csv(args.series_csv, times, Ls, emf)
    _emit(args, [("method", args.method), ("interpretation", args.interpretation),
                 ("n_per_len", float(n)), ("L_mean", float(Ls.mean())),
                 ("L_mod_depth", float(0.5 * (Ls.max() - Ls.min()))),
                 ("emf_amplitude", float(np.max(np.abs(emf))))], title="SAW inductance")


def cmd_resonance(args):
    f = resonator.resonance_frequency(args.inductance, args.capacitance)
    rows = [("inductance", args.inductance), ("capacitance", args.capacitance), ("f_r", f)]
    finding = reference.check_resonance(args.inductance, args.capacitance, f)
    if finding:
        rows.append(("warning", finding.message))
    _emit(args, rows, title="series resonance")


def cmd_noise(args):
    spec = noise.NoiseSpec(args.temperature, args.nu_b, math.pi * args.linewidth, args.a_eff,
                           args.length, args.alpha, args.pump)
    rtol = args.tolerance or 1e-11
    sp = noise.spectrum(spec, args.g_b, 0.0, args.points, args.span, rtol=rtol)
    _emit(args, {"columns": ["nu_offset_Hz", "P_W_per_Hz", "G"],
                 "rows": [[float(a), float(b), float(c)]
                          for a, b, c in zip(sp.nu_offset, sp.density, sp.gain)]})


def _scenario_path(p):
    return builtin_scenario(p[1:]) if p.startswith("@") else p


def cmd_simulate(args):
    scn = load_scenario(_scenario_path(args.file))
    rep = run_scenario(scn, tolerance=args.tolerance)
    _write(args, render(rep, args.format))


def cmd_sweep(args):
    scn = load_scenario(_scenario_path(args.file))
    table = run_sweep(scn, jobs=args.jobs, tolerance=args.tolerance)
    _write(args, render(table, args.format))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json", "text"), default="text")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--tolerance", type=float, default=None,
                        help="relative tolerance for adaptive numerics")
    common.add_argument("--materials", help="extra materials file (YAML)")

    p = argparse.ArgumentParser(prog="sbs-transduce", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("materials", parents=[common], help="list or show material presets")
    s.add_argument("action", choices=("list", "show"))
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_materials)

    s = sub.add_parser("mode", parents=[common], help="fundamental-mode solver")
    s.add_argument("action", choices=("solve",))
    s.add_argument("--radius", type=float, default=0.5e-6)
    s.add_argument("--core-index", type=float, default=1.65)
    s.add_argument("--clad-index", type=float, default=1.0)
    s.add_argument("--wavelength", type=float, default=1534e-9)
    s.add_argument("--model", choices=("lp", "he11"), default="lp")
    s.add_argument("--grid", type=int, default=201)
    s.add_argument("--profile-csv")
    s.set_defaults(func=cmd_mode)

    s = sub.add_parser("gain", parents=[common], help="bulk Brillouin gain of a material")
    s.add_argument("--material", default="lanthano-aluminosilicate")
    s.add_argument("--wavelength", type=float, default=1534e-9)
    for flag, dest in (("--n", "n_eff"), ("--p12", "p12"), ("--rho", "rho"), ("--v-s", "v_s"),
                       ("--dnu-b", "dnu_B")):
        s.add_argument(flag, dest=dest, type=float, default=None)
    s.set_defaults(func=cmd_gain)

    s = sub.add_parser("critpower", parents=[common], help="SBS critical power")
    s.add_argument("--a-eff", type=float)
    s.add_argument("--radius", type=float)
    s.add_argument("--g-b", type=float, default=1.0727e-11)
    s.add_argument("--l-eff", type=float)
    s.add_argument("--length", type=float, default=0.08)
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--kappa", type=float, default=1.0)
    s.set_defaults(func=cmd_critpower)

    s = sub.add_parser("inductance", parents=[common], help="SAW-modulated coil inductance")
    s.add_argument("--coil-radius", type=float, default=100e-6)
    s.add_argument("--coil-length", type=float, default=0.08)
    s.add_argument("--turns", type=float, default=250)
    s.add_argument("--interpretation", choices=("total", "per-length"), default="total")
    s.add_argument("--current", type=float, default=1e-3)
    s.add_argument("--amplitude", type=float, default=0.05e-6)
    s.add_argument("--base-radius", type=float, default=1e-6)
    s.add_argument("--frequency", type=float, default=11.476e9)
    s.add_argument("--velocity", type=float, default=5727.0)
    s.add_argument("--method", choices=("flux", "approx"), default="flux")
    s.add_argument("--phases", type=int, default=16)
    s.add_argument("--series-csv")
    s.set_defaults(func=cmd_inductance)

    s = sub.add_parser("resonance", parents=[common], help="RLC resonance frequency")
    s.add_argument("--inductance", type=float, default=5.1e-9)
    s.add_argument("--capacitance", type=float, default=47e-12)
    s.set_defaults(func=cmd_resonance)

    s = sub.add_parser("noise", parents=[common], help="spontaneous Brillouin spectrum")
    s.add_argument("action", choices=("spectrum",))
    s.add_argument("--temperature", type=float, default=298.0)
    s.add_argument("--nu-b", type=float, default=11e9)
    s.add_argument("--linewidth", type=float, default=1011.2e6, help="FWHM, Hz")
    s.add_argument("--a-eff", type=float, default=math.pi * 0.25e-12)
    s.add_argument("--length", type=float, default=0.08)
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--pump", type=float, default=5.0)
    s.add_argument("--g-b", type=float, default=1.0727e-11)
    s.add_argument("--points", type=int, default=201)
    s.add_argument("--span", type=float, default=5.0)
    s.set_defaults(func=cmd_noise)

    for name, fn, doc in (("simulate", cmd_simulate, "run one scenario file"),
                          ("sweep", cmd_sweep, "run a scenario's parameter sweep")):
        s = sub.add_parser(name, parents=[common], help=doc)
        s.add_argument("file", help="scenario YAML (or @name for a built-in scenario)")
        s.set_defaults(func=fn)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except ConfigParseError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except TransductionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
