import math

import numpy as np
import pytest

from nsflab.errors import InvalidStateError, NonConvergenceError
from nsflab.gas import GasParams, ThermoState, pressure
from nsflab.profiles import (CompositeWave, contact_ode_residual,
                             contact_tail_fit, profile_ode_residual,
                             sample_composite, sample_contact_fields,
                             shock_profile_from_pattern, solve_contact_wave,
                             solve_shock_profile, tail_decay_fit,
                             verify_profile_equivalences)
from nsflab.riemann import build_pattern

MONOTONE_SIGNS = {1: (-1, -1, +1), 3: (+1, -1, -1)}


def test_zero_amplitude_profile_rejected(gas, right_state):
    with pytest.raises(InvalidStateError):
        solve_shock_profile(right_state, right_state, -1.29, 1, gas)


def test_inconsistent_endpoints_rejected(gas, pattern):
    with pytest.raises(InvalidStateError):
        solve_shock_profile(pattern.left, pattern.mid_left, -2.5, 1, gas)


@pytest.mark.parametrize("family", [1, 3])
def test_profile_monotonicity_and_slaving(gas, pattern, shock1, shock3, family):
    p = shock1 if family == 1 else shock3
    sv, su, sth = MONOTONE_SIGNS[family]
    assert np.all(sv * p.dv_tab > 0)
    assert np.all(su * (-p.sigma * p.dv_tab) > 0)
    assert np.all(sth * p.dtheta_tab > 0)
    # algebraic slaving holds exactly on the table
    expect = p.left.u - p.sigma * (p.v_tab - p.left.v)
    assert np.max(np.abs(p.u_tab - expect)) == 0.0


@pytest.mark.parametrize("family", [1, 3])
def test_profile_endpoints_and_centering(gas, shock1, shock3, family):
    p = shock1 if family == 1 else shock3
    d = p.delta
    assert abs(p.v_tab[0] - p.left.v) <= 1e-8 * d
    assert abs(p.v_tab[-1] - p.right.v) <= 1e-8 * d
    assert abs(p.theta_tab[0] - p.left.theta) <= 1e-8 * d
    assert p.v(0.0) == pytest.approx(0.5 * (p.left.v + p.right.v), abs=1e-9 * d)


def test_profile_residual_small(shock1, shock3):
    assert profile_ode_residual(shock1) <= 1e-8
    assert profile_ode_residual(shock3) <= 1e-8


def test_tail_rate_scales_linearly_with_delta(gas, right_state):
    rates = []
    for d in (0.1, 0.05):
        pat = build_pattern(right_state, d, 0.0, 0.0, gas)
        p = shock_profile_from_pattern(pat, 1, gas)
        fit = tail_decay_fit(p)
        assert fit.rate_left > 0 and fit.rate_right > 0
        assert fit.r2_left >= 0.99 and fit.r2_right >= 0.99
        rates.append(fit.rate_right)
    assert rates[0] / rates[1] == pytest.approx(2.0, rel=0.15)


def test_equivalence_ratios_bounded_and_shrinking(gas, right_state):
    history = {1: [], 3: []}
    for d in (0.1, 0.05, 0.025):
        pat = build_pattern(right_state, d, 0.0, d, gas)
        for fam in (1, 3):
            p = shock_profile_from_pattern(pat, fam, gas)
            ru, rth = verify_profile_equivalences(p)
            assert ru <= 10.0 and rth <= 10.0
            history[fam].append((ru, rth))
    for fam in (1, 3):
        for (ru0, rth0), (ru1, rth1) in zip(history[fam], history[fam][1:]):
            # ratios decrease when the strength is halved, up to 20% slack
            assert ru1 <= ru0 * 1.2
            assert rth1 <= rth0 * 1.2


def test_second_derivative_domination(shock1):
    d2v, _, _ = shock1.second_derivatives(shock1.xi_grid)
    dv = shock1.dv_tab
    mask = np.abs(dv) >= 1e-6 * np.max(np.abs(dv))
    assert np.max(np.abs(d2v[mask]) / (shock1.delta * np.abs(dv[mask]))) <= 10.0


def test_profile_refinement_consistency(gas, pattern):
    a = shock_profile_from_pattern(pattern, 1, gas, tol=1e-8)
    b = shock_profile_from_pattern(pattern, 1, gas, tol=1e-8, n_tab=16385)
    xi = np.linspace(-40.0, 40.0, 1001)
    assert np.max(np.abs(a.v(xi) - b.v(xi))) <= 1e-7


def test_contact_constant_case(gas):
    cw = solve_contact_wave(1.1, 1.1, 1.0, 0.2, gas)
    assert np.all(cw.Theta_tab == 1.1)
    assert np.all(cw.dTheta_tab == 0.0)
    v, u, th = sample_contact_fields(cw, 0.5, np.linspace(-5, 5, 11), gas)
    assert np.all(u == 0.2)
    assert np.all(v == gas.R * 1.1 / 1.0)


def test_contact_monotone_and_residual(contact):
    assert np.all(np.diff(contact.Theta_tab) >= 0.0)
    assert contact_ode_residual(contact) <= 1e-8
    amp = contact.amplitude
    assert abs(contact.Theta_tab[0] - contact.theta_left) <= 1e-8 * amp
    assert abs(contact.Theta_tab[-1] - contact.theta_right) <= 1e-8 * amp
    assert max(abs(contact.dTheta_tab[0]), abs(contact.dTheta_tab[-1])) <= 1e-6 * amp


def test_contact_gaussian_tail(contact):
    slope, r2 = contact_tail_fit(contact)
    assert slope < 0.0
    assert r2 >= 0.99


def test_contact_collocation_agrees_with_shooting(gas, pattern, contact):
    cw2 = solve_contact_wave(pattern.mid_left.theta, pattern.mid_right.theta,
                             pressure(pattern.mid_left, gas), pattern.mid_left.u,
                             gas, method="collocation")
    assert np.max(np.abs(cw2.Theta_tab - contact.Theta_tab)) <= 1e-7


def test_contact_pressure_identity(gas, contact):
    x = np.linspace(-30.0, 30.0, 501)
    for t in (0.0, 2.0, 10.0):
        v, u, th = sample_contact_fields(contact, t, x, gas)
        p = gas.R * th / v
        assert np.max(np.abs(p - contact.p_star)) <= 4e-16 * contact.p_star


def test_contact_velocity_decay(gas, contact):
    # u - u_* at fixed similarity coordinate decays like (1+t)^(-1/2)
    xi0 = 0.7
    vals = []
    for t in (0.0, 3.0, 15.0):
        x = xi0 * math.sqrt(1.0 + t)
        v, u, th = sample_contact_fields(contact, t, np.array([x]), gas)
        vals.append((u[0] - contact.u_star) * math.sqrt(1.0 + t))
    assert vals[0] != 0.0
    assert vals[1] == pytest.approx(vals[0], rel=1e-10)
    assert vals[2] == pytest.approx(vals[0], rel=1e-10)


def test_composite_far_field_and_zero_amplitude(gas, right_state, composite, pattern):
    x = np.linspace(-250.0, 250.0, 101)
    v, u, th = composite.sample(0.0, x, 0.0, 0.0)
    tail = 2e-10
    assert abs(v[0] - pattern.left.v) <= tail
    assert abs(th[-1] - pattern.right.theta) <= tail

    zero = build_pattern(right_state, 0.0, 0.0, 0.0, gas)
    cw0 = solve_contact_wave(zero.mid_left.theta, zero.mid_right.theta,
                             pressure(zero.mid_left, gas), zero.mid_left.u, gas)
    v0, u0, th0 = sample_composite(zero, None, None, cw0, 0.0, 0.0, 0.0, x, gas)
    assert np.all(v0 == right_state.v)
    assert np.all(u0 == right_state.u)
    assert np.all(th0 == right_state.theta)


def test_composite_shift_translates_shock(gas, right_state):
    # with only the 1-shock present, shifting X1 translates the whole field
    pat = build_pattern(right_state, 0.1, 0.0, 0.0, gas)
    s1 = shock_profile_from_pattern(pat, 1, gas)
    cw = solve_contact_wave(pat.mid_left.theta, pat.mid_right.theta,
                            pressure(pat.mid_left, gas), pat.mid_left.u, gas)
    comp = CompositeWave(pat, s1, None, cw, gas)
    x = np.linspace(-40.0, 40.0, 801)
    delta = 3.7
    a = comp.sample(1.0, x, delta, 0.0)
    b = comp.sample(1.0, x - delta, 0.0, 0.0)
    for fa, fb in zip(a, b):
        assert np.max(np.abs(fa - fb)) <= 1e-12
