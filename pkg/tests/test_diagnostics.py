import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from inviscid_damping import Grid, Interval, make_shear_profile
from inviscid_damping.degeneracy import build_partition, build_modified_derivative
from inviscid_damping.diagnostics import (TimeSeries, fit_decay, fit_log_growth, growth_verdict, last_half_increase,
                                          sobolev_norm, weighted_velocity_energy, weighted_velocity_energy_scattered,
                                          weighted_streamfunction_energy, nu_weighted_norms, residual_DyF,
                                          default_window, random_h10_fields)
from inviscid_damping.dynamics import Mode, ModeState, SimConfig, integrate


def test_energies_of_zero(couette):
    g = Grid(0, 1, 128)
    m = Mode(couette, g, 1)
    s = ModeState(1, 2.0, np.zeros(len(g), complex), g)
    assert weighted_velocity_energy(s, couette, m) == 0
    assert weighted_streamfunction_energy(s, couette, m) == 0


def test_couette_energies_closed_form(couette):
    g = Grid(0, 1, 1024)
    m = Mode(couette, g, 1)
    s = ModeState(1, 0.0, np.sin(np.pi * g.y) + 0j, g)
    a = 1 + np.pi**2
    assert weighted_velocity_energy(s, couette, m) == pytest.approx(1 / (2 * a), rel=1e-5)
    assert weighted_streamfunction_energy(s, couette, m) == pytest.approx(1 / (2 * a * a), rel=1e-5)


@settings(max_examples=20, deadline=None)
@given(t=st.floats(0, 100), k=st.integers(1, 5))
def test_energy_gauge_agreement(t, k):
    p = make_shear_profile("exponential", [0.5, 0.1], Interval(0, 2))
    g = Grid(0, 2, 256)
    m = Mode(p, g, k)
    s = ModeState(k, t, (1 + np.cos(3 * g.y) + 0.2j * g.y).astype(complex), g)
    a = weighted_velocity_energy(s, p, m)
    b = weighted_velocity_energy_scattered(s, p, m)
    assert abs(a - b) <= 1e-10 * a


def test_sobolev_examples(couette):
    g = Grid(0, 1, 1024)
    assert sobolev_norm(np.full(len(g), 3.0), g) == pytest.approx(3.0, rel=1e-14)
    s = np.sin(np.pi * g.y)
    assert sobolev_norm(s, g, order=1) == pytest.approx(math.sqrt(0.5 + np.pi**2 / 2), rel=1e-5)
    with pytest.raises(ValueError):
        sobolev_norm(s, g, weight="sobolev")


def test_H1t_norm_of_transported_field():
    p = make_shear_profile("exponential", [0.5], Interval(0, 2))
    g = Grid(0, 2, 2048)
    k, t = 2, 7.0
    f = np.cos(2 * g.y) + 0.5j * g.y**2
    ph = np.exp(1j * k * t * p.U(g.y))
    lhs = sobolev_norm(ph * f, g, weight="H1_t", profile=p, k=k, t=t)
    rhs = math.sqrt(g.integrate(np.abs(f) ** 2 + k * k * np.abs(f) ** 2 + np.abs(g.ddy(f)) ** 2))
    assert lhs == pytest.approx(rhs, rel=1e-4)


def test_sobolev_converges_second_order():
    errs = []
    for N in (64, 128, 256, 512):
        g = Grid(0, 1, N)
        errs.append(abs(sobolev_norm(np.exp(g.y), g, 1) - math.sqrt(math.e**2 - 1)))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 1.8)


def test_fit_decay_exact_and_bracket():
    t = np.linspace(1, 100, 400)
    f = fit_decay(TimeSeries(t, 3 * t**-2.0))
    assert f.exponent == pytest.approx(-2.0, abs=1e-10) and f.residual < 1e-12
    f4 = fit_decay(TimeSeries(t, (1 + t * t) ** -2.0), window=(10, 100))
    assert abs(f4.exponent + 4) <= 0.02
    assert f4.window[0] >= 10 - 1e-9
    with pytest.raises(ValueError):
        TimeSeries(t, t[:-1])
    with pytest.raises(ValueError):
        fit_decay(TimeSeries(t, t**-2.0), window=(200, 300))


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-5, -0.5), c=st.floats(0.1, 10), seed=st.integers(0, 2**32 - 1))
def test_fit_decay_recovers_power_laws(a, c, seed):
    t = np.linspace(2, 200, 300)
    assert fit_decay(TimeSeries(t, c * t**a)).exponent == pytest.approx(a, abs=1e-6)
    noise = 1 + 0.1 * np.random.default_rng(seed).uniform(-1, 1, t.size)
    assert abs(fit_decay(TimeSeries(t, c * t**a * noise)).exponent - a) <= 0.1


def test_log_growth_fits():
    t = np.linspace(0, 100, 500)
    f = fit_log_growth(TimeSeries(t, 3 * np.log(2 + t)))
    assert f.C == pytest.approx(3, abs=1e-6)
    b = fit_log_growth(TimeSeries(t, 1 + 0.3 * np.sin(t)))
    assert abs(b.C) < 0.1 and b.residual > abs(b.C)
    v = growth_verdict(TimeSeries(t, 3 * np.log(2 + t)))
    assert v["monotone"] and v["diverging"]
    assert not growth_verdict(TimeSeries(t, 1 + 0.3 * np.sin(t)))["diverging"]
    assert last_half_increase(TimeSeries(t, np.ones_like(t))) == 0


def test_nu_norms_zero_and_cutoff():
    p = make_shear_profile("exponential", [1.0], Interval(0, 1))
    g = Grid(0, 1, 4096)
    assert nu_weighted_norms(np.zeros(len(g)), p, g) == (0.0, 0.0, 0.0)
    dist = np.abs(p.U(g.y) - p.U(0))
    first, unweighted = [], []
    for cut in (1e-2, 1e-3, 1e-4):
        f = np.where(dist > cut, 1 / np.sqrt(np.maximum(dist, cut)), 0.0)
        first.append(nu_weighted_norms(f, p, g)[0])
        unweighted.append(g.norm(f))
    # weighted integrand is 1 where dist < 1, so the first norm is stable as the cutoff shrinks
    assert max(first) - min(first) < 0.05 * max(first)
    assert unweighted[0] < unweighted[1] < unweighted[2]


def test_default_window():
    p = make_shear_profile("exponential", [0.5], Interval(0, 1))
    g = Grid(0, 1, 64)
    lo, hi = default_window(2, p, g, 100.0)
    assert lo == pytest.approx(10 / (2 * 0.5)) and hi == pytest.approx(90.0)


def test_random_fields_vanish_at_walls():
    g = Grid(0, 3, 128)
    fs = random_h10_fields(g, 5, np.random.default_rng(0))
    assert all(abs(f[0]) < 1e-12 and abs(f[-1]) < 1e-12 for f in fs)


def test_DyF_identity_trivial_cases(couette):
    g = Grid(0, 1, 256)
    P = build_partition(couette, g)
    m = Mode(couette, g, 1, build_modified_derivative(couette, P))
    tr = integrate(ModeState(1, 0.0, 1 + np.sin(np.pi * g.y) + 0j, g), SimConfig(dt=0.1, t_end=5.0), m)
    for r in residual_DyF(tr, couette, P, [1.0, 5.0], m):
        assert r["residual"] <= 1e-6


def test_DyF_identity_converges():
    p = make_shear_profile("exponential", [1.0, 0.3], Interval(0, 2))
    out = []
    for N in (1024, 2048, 4096):
        g = Grid(0, 2, N)
        P = build_partition(p, g)
        m = Mode(p, g, 1, build_modified_derivative(p, P))
        F = np.exp(-(((g.y - 0.9) / 0.3) ** 2)) * (1 + 0.3j * g.y) + 0.7 * np.cos(g.y)
        states = [ModeState(1, t, F, g) for t in (2.0, 10.0, 50.0)]
        res = residual_DyF(states, p, P, [2.0, 10.0, 50.0], m)
        out.append([r["residual"] for r in res])
        if N >= 2048:
            assert all(r["resolved"] for r in res)
    out = np.array(out)
    assert np.all(out[1:] < out[:-1] / 3)
    assert np.all(out[-1] <= 1e-3)
    with pytest.raises(ValueError):
        residual_DyF([ModeState(1, 0.0, F, g)], p, P, [0.0], m)
