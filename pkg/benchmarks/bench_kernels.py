"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0] [--json out.json]

Each kernel runs on the same inputs in both backends; outputs are compared
before any timing is reported.
"""

import argparse
import json
import math
import sys
import time

import numpy as np

from scipy import constants

from sbs_transduction import kernels
from sbs_transduction.coupling import CouplingSet


def design_coefficients():
    """Coupling coefficients of the reference microwire (g_B, pi (0.5 um)^2, 1534 nm)."""
    Omega = 2 * math.pi * 11.476e9
    omega2 = 2 * math.pi * constants.c / 1534e-9
    alpha = math.pi * 1011.2e6 / 5727.0
    cs = CouplingSet.from_gain(1.0727e-11, math.pi * 0.25e-12, omega2 - Omega, Omega, alpha, 5727.0)
    return cs.coefficients(omega2 - Omega, omega2, Omega), alpha


def cases(scale):
    rng = np.random.default_rng(0)
    (c1, c2, cb), alpha = design_coefficients()
    n_march = int(20000 * scale)
    # pump at twice the critical power, so the Stokes wave grows and depletes the pump
    march = (math.sqrt(1e-3) + 0j, math.sqrt(38.4) + 0j, 0j, n_march, 0.08 / n_march, c1, c2, cb,
             alpha, 0.0, 0.0, 1.0, True)

    n_green = int(200000 * scale)
    drive = rng.standard_normal(n_green) + 1j * rng.standard_normal(n_green)
    a, h = alpha, 1e-6
    decay = math.exp(-a * h)
    w1 = (1 - (1 - decay) / (a * h)) / a
    green = (drive, decay, (1 - decay) / a - w1, w1)

    cells, steps = 201, int(400 * scale)
    z1 = rng.standard_normal(cells) * 1e-3 + 0j
    z2 = np.full(cells, 1.5 + 0j)
    zb = np.zeros(cells, complex)
    v = 2.07e8
    hz = 0.08 / (cells - 1)
    dt = 0.9 * hz / v
    upwind = (z1, z2, zb, steps, dt, hz, -v, v, 5727.0, 0.0, 0.0, alpha * 5727.0, c1, c2, cb,
              1e-3 + 0j, 1.5 + 0j, 0j)

    per, periods = 40, int(200 * scale)
    n = per * periods + 1
    fr = 325.08e6
    t = np.arange(n) / (fr * per)
    emf = 1e-3 * np.sin(2 * math.pi * fr * t)
    L = 5.1e-9 * (1 + 0.01 * np.sin(2 * math.pi * fr / 8 * t))
    dL = np.gradient(L, t[1])
    rlc = (emf, 0.5 * (emf[1:] + emf[:-1]), L, 0.5 * (L[1:] + L[:-1]), dL, 0.5 * (dL[1:] + dL[:-1]),
           t[1], 0.104, 47e-12, 0.0, 0.0)
    return {"march_envelopes": (march, n_march), "green_recursion": (green, n_green),
            "upwind_run": (upwind, cells * steps), "rk4_rlc": (rlc, n)}


def _flat(x):
    if isinstance(x, tuple):
        return np.concatenate([np.ravel(np.asarray(v, dtype=complex)) for v in x])
    return np.ravel(np.asarray(x, dtype=complex))


def best_time(fn, args, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--scale", type=float, default=1.0, help="multiply problem sizes")
    p.add_argument("--json", help="also write results here")
    args = p.parse_args(argv)

    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled kernels not built; run `python setup.py build_ext --inplace`", file=sys.stderr)
    rows = []
    print(f"{'kernel':<16} {'work':>10} {'python s':>10} {'cython s':>10} {'speedup':>8} {'max rel diff':>13}")
    for name, (call, work) in cases(args.scale).items():
        res = {b: best_time(getattr(mod, name), call, args.repeat) for b, mod in backends.items()}
        tp, outp = res["python"]
        row = {"kernel": name, "work": work, "python_s": tp}
        if "cython" in res:
            tc, outc = res["cython"]
            ref = _flat(outp)
            diff = float(np.max(np.abs(_flat(outc) - ref)) / max(np.max(np.abs(ref)), 1e-300))
            row.update(cython_s=tc, speedup=tp / tc, max_rel_diff=diff)
            print(f"{name:<16} {work:>10d} {tp:>10.4f} {tc:>10.4f} {tp / tc:>7.1f}x {diff:>13.1e}")
        else:
            print(f"{name:<16} {work:>10d} {tp:>10.4f} {'-':>10} {'-':>8} {'-':>13}")
        rows.append(row)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"backend_default": kernels.BACKEND, "results": rows}, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
