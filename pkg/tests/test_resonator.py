import math

import numpy as np
import pytest
from scipy import integrate

from sbs_transduction import kernels, resonator
from sbs_transduction.errors import InstabilityError, ValidationError
from sbs_transduction.resonator import RlcSpec

L0, C0 = 5.1e-9, 47e-12
FR = 1 / (2 * math.pi * math.sqrt(L0 * C0))
SAMPLES = 40  # per resonance period


def grid(periods, per=SAMPLES):
    n = periods * per + 1
    dt = 1 / (FR * per)
    return np.arange(n) * dt, dt


def amplitude_at(x, t, f, window):
    # uniform sampling over an integer number of periods: projection is exact for a pure tone
    xs, ts = x[-window - 1:-1], t[-window - 1:-1]
    a = 2 * np.mean(xs * np.cos(2 * math.pi * f * ts))
    b = 2 * np.mean(xs * np.sin(2 * math.pi * f * ts))
    return math.hypot(a, b)


# -- closed forms -------------------------------------------------------------

def test_design_resonance():
    assert resonator.resonance_frequency(L0, C0) == pytest.approx(325.08e6, abs=0.05e6)


def test_unit_and_millihenry_cases():
    assert resonator.resonance_frequency(1.0, 1.0) == 1 / (2 * math.pi)
    assert resonator.resonance_frequency(1e-3, C0) == pytest.approx(734.2e3, rel=1e-4)


@pytest.mark.parametrize("l", [1e-9, 5.1e-9, 1e-3, 0.7])
def test_quadrupled_inductance_halves_frequency(l):
    assert resonator.resonance_frequency(4 * l, C0) == resonator.resonance_frequency(l, C0) / 2


def test_validation():
    for l, c in ((0.0, 1.0), (1.0, 0.0), (-1.0, 1.0), (float("nan"), 1.0)):
        with pytest.raises(ValidationError):
            resonator.resonance_frequency(l, c)
    with pytest.raises(ValidationError):
        RlcSpec(0.0, L0)
    with pytest.raises(ValidationError):
        RlcSpec(C0, -L0)
    with pytest.raises(ValidationError):
        RlcSpec(C0, L0, -1.0)


def test_default_resistance_gives_q100():
    spec = RlcSpec(C0, L0)
    assert spec.Q == pytest.approx(100.0, rel=1e-12)
    assert spec.R == pytest.approx(math.sqrt(L0 / C0) / 100, rel=1e-12)
    assert RlcSpec(C0, L0, 0.0).Q == math.inf


# -- driven response ----------------------------------------------------------

def test_null_drive_is_identically_zero():
    t, dt = grid(20)
    r = resonator.driven_response(RlcSpec(C0, L0), np.zeros(t.size), dt=dt)
    assert not np.any(r.charge) and not np.any(r.current)


def test_free_decay_matches_closed_form():
    spec = RlcSpec(C0, L0, 2.0)
    t, dt = grid(30, 400)
    q0 = 1e-12
    r = resonator.driven_response(spec, np.zeros(t.size), dt=dt, q0=q0)
    g = spec.R / (2 * L0)
    wd = math.sqrt(1 / (L0 * C0) - g * g)
    q = q0 * np.exp(-g * t) * (np.cos(wd * t) + g / wd * np.sin(wd * t))
    assert np.max(np.abs(r.charge - q)) < 1e-6 * q0


def test_series_resonance_amplitude():
    spec = RlcSpec(C0, L0)
    t, dt = grid(400)
    v0 = 1e-3
    r = resonator.driven_response(spec, v0 * np.sin(2 * math.pi * FR * t), dt=dt)
    amp = amplitude_at(r.current, t, FR, 20 * SAMPLES)
    assert amp == pytest.approx(v0 / spec.R, rel=1e-2)


def test_off_resonance_impedance_ratio():
    spec = RlcSpec(C0, L0)
    t, dt = grid(800)
    f = 0.1 * FR
    v0 = 1e-3
    r = resonator.driven_response(spec, v0 * np.sin(2 * math.pi * f * t), dt=dt)
    w = 2 * math.pi * f
    z = abs(complex(spec.R, w * L0 - 1 / (w * C0)))
    amp = amplitude_at(r.current, t, f, 100 * SAMPLES)
    assert amp == pytest.approx(v0 / z, rel=1e-2)
    # and the suppression relative to resonance follows |Z| as well
    assert (amp * spec.R / v0) == pytest.approx(spec.R / z, rel=1e-2)


def modulated(m, f_ac, t):
    w = 2 * math.pi * f_ac
    L = L0 * (1 + m * np.sin(w * t))
    dL = L0 * m * w * np.cos(w * t)
    th = t[:-1] + 0.5 * (t[1] - t[0])
    return L, dL, L0 * (1 + m * np.sin(w * th)), th


@pytest.mark.parametrize("m", [0.0, 0.01])
def test_energy_balance_per_period(m):
    spec = RlcSpec(C0, L0)
    t, dt = grid(120)
    L, dL, Lh, th = modulated(m, FR / 8, t)
    emf = 1e-3 * np.sin(2 * math.pi * FR * t)
    r = resonator.driven_response(spec, emf, L, dt, l_derivative=dL, l_mid=Lh,
                                  emf_mid=1e-3 * np.sin(2 * math.pi * FR * th))
    E = r.stored
    for k in range(0, t.size - SAMPLES, SAMPLES):
        j = k + SAMPLES
        dW = r.source_work[j] - r.source_work[k]
        res = dW - (r.dissipated[j] - r.dissipated[k]) - (r.parametric_work[j] - r.parametric_work[k]) \
            - (E[j] - E[k])
        assert abs(res) < 1e-3 * abs(dW)
    assert np.max(np.abs(r.energy_residual())) < 1e-3 * r.source_work[-1]


def test_bibo_bound():
    spec = RlcSpec(C0, L0)
    t, dt = grid(100)
    rng = np.random.default_rng(7)
    v0 = 1e-3
    freqs = FR * rng.uniform(0.5, 1.5, 6)
    phases = rng.uniform(0, 2 * math.pi, 6)
    emf = v0 / 6 * np.sum(np.sin(2 * math.pi * freqs[:, None] * t + phases[:, None]), axis=0)
    r = resonator.driven_response(spec, emf, dt=dt)
    # |I| <= sup|emf| * int |h|, h the admittance impulse response
    g = spec.R / (2 * L0)
    wd = math.sqrt(1 / (L0 * C0) - g * g)
    h = lambda s: abs(math.exp(-g * s) * (math.cos(wd * s) - g / wd * math.sin(wd * s))) / L0  # noqa: E731
    T = 2 * math.pi / wd
    l1 = sum(integrate.quad(h, k * T / 2, (k + 1) * T / 2, limit=200)[0] for k in range(2000))
    assert np.max(np.abs(r.current)) <= np.max(np.abs(emf)) * l1


def test_modulated_response_stays_bounded():
    spec = RlcSpec(C0, L0)
    t, dt = grid(200)
    L, dL, Lh, _ = modulated(0.01, 0.3 * FR, t)
    r = resonator.driven_response(spec, 1e-3 * np.sin(2 * math.pi * FR * t), L, dt, l_derivative=dL,
                                  l_mid=Lh)
    late = np.max(np.abs(r.current[-20 * SAMPLES:]))
    mid = np.max(np.abs(r.current[-60 * SAMPLES:-40 * SAMPLES]))
    assert late <= 1.01 * mid


def test_sidebands_grow_with_modulation_depth():
    spec = RlcSpec(C0, L0)
    t, dt = grid(800)
    f_ac = FR / 8
    win = 400 * SAMPLES
    ratios = []
    for m in (0.002, 0.005, 0.01, 0.02):
        L, dL, Lh, th = modulated(m, f_ac, t)
        r = resonator.driven_response(spec, 1e-3 * np.sin(2 * math.pi * FR * t), L, dt,
                                      l_derivative=dL, l_mid=Lh,
                                      emf_mid=1e-3 * np.sin(2 * math.pi * FR * th))
        tail = resonator.RlcResponse(r.t[-win:], r.charge[-win:], r.current[-win:],
                                     r.inductance[-win:], r.source_work[-win:],
                                     r.dissipated[-win:], r.parametric_work[-win:], C0)
        f, mag = resonator.response_spectrum(tail)
        bin_of = lambda x: int(round(x / f[1]))  # noqa: E731
        carrier = mag[bin_of(FR)]
        side = max(mag[bin_of(FR - f_ac)], mag[bin_of(FR + f_ac)])
        assert side > 10 * np.median(mag)
        ratios.append(side / carrier)
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] / ratios[-2] == pytest.approx(2.0, rel=0.1)


def test_step_and_input_guards():
    spec = RlcSpec(C0, L0)
    with pytest.raises(ValidationError):
        resonator.driven_response(spec, np.zeros(10), dt=0.06 / FR)
    with pytest.raises(ValidationError):
        resonator.driven_response(spec, np.zeros(10), dt=0.0)
    with pytest.raises(ValidationError):
        resonator.driven_response(spec, np.zeros(10), np.full(9, L0), dt=0.01 / FR)
    with pytest.raises(ValidationError):
        resonator.driven_response(spec, np.zeros(10), np.full(10, -L0), dt=0.01 / FR)
    with pytest.raises(ValidationError):
        resonator.driven_response(spec, np.array([0.0, np.nan]), dt=0.01 / FR)


def test_instability_guard(monkeypatch):
    real = kernels.rk4_rlc

    def growing(*args):
        out = real(*args)
        out[1] *= np.exp(np.linspace(0, 1, out.shape[1]))
        return out

    monkeypatch.setattr(kernels, "rk4_rlc", growing)
    t, dt = grid(10)
    with pytest.raises(InstabilityError):
        resonator.driven_response(RlcSpec(C0, L0), np.zeros(t.size), dt=dt, q0=1e-12)


def test_backends_agree():
    t, dt = grid(30)
    n = t.size
    emf = 1e-3 * np.sin(2 * math.pi * FR * t)
    L, dL, Lh, _ = modulated(0.01, FR / 8, t)
    args = (emf, emf[:-1], L, Lh, dL, dL[:-1], dt, 0.1, C0, 0.0, 0.0)
    outs = [b.rk4_rlc(*args) for b in kernels.backends().values()]
    for o in outs[1:]:
        assert np.allclose(o, outs[0], rtol=1e-13, atol=0)
    assert outs[0].shape == (5, n)


def test_csv_exports(tmp_path):
    t, dt = grid(5)
    r = resonator.driven_response(RlcSpec(C0, L0), 1e-3 * np.sin(2 * math.pi * FR * t), dt=dt)
    p = tmp_path / "resp.csv"
    r.to_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "t_s,charge_C,current_A" and len(lines) == t.size + 1
    assert float(lines[-1].split(",")[2]) == r.current[-1]
    f, mag = resonator.response_spectrum(r)
    q = tmp_path / "spec.csv"
    resonator.spectrum_to_csv(q, f, mag)
    assert q.read_text().splitlines()[0] == "f_Hz,magnitude"
