import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from nsflab.errors import (BoundaryContaminationError, InvalidStateError,
                           PositivityError)
from nsflab.gas import GasParams, ThermoState, total_energy_vt
from nsflab.profiles import shock_profile_from_pattern
from nsflab.riemann import build_pattern
from nsflab.solver import (Field, Grid, PerturbationSpec, SolverConfig,
                           bump_profile, check_boundary_contamination,
                           make_initial_data, nsf_rhs, stable_dt, step,
                           step_with_fluxes)


@pytest.fixture(scope="module")
def base():
    return ThermoState(1.0, 0.0, 1.0)


def constant_field(grid, s):
    n = grid.n
    return Field(grid, 0.0, np.full(n, s.v), np.full(n, s.u), np.full(n, s.theta))


def test_grid_validation():
    with pytest.raises(InvalidStateError):
        Grid(0.0, 0.0, 32)
    with pytest.raises(InvalidStateError):
        Grid(0.0, 1.0, 8)
    g = Grid(-1.0, 1.0, 101)
    assert g.dx == pytest.approx(0.02)


def test_field_positivity_enforced():
    grid = Grid(-1.0, 1.0, 16)
    v = np.ones(16)
    v[7] = -0.1
    with pytest.raises(PositivityError):
        Field(grid, 0.0, v, np.zeros(16), np.ones(16))


def test_constant_state_is_steady(gas, base):
    grid = Grid(-5.0, 5.0, 64)
    f = constant_field(grid, base)
    r = nsf_rhs(f, gas, (base, base))
    assert np.max(np.abs(r.v_t)) == 0.0
    assert np.max(np.abs(r.u_t)) == 0.0
    assert np.max(np.abs(r.E_t)) == 0.0
    cfg = SolverConfig(bc_left=base, bc_right=base)
    f2 = step(f, gas, cfg)
    assert np.array_equal(f2.v, f.v) and np.array_equal(f2.theta, f.theta)


def test_discrete_conservation_per_step(gas, base):
    grid = Grid(-10.0, 10.0, 256)
    x = grid.x
    b = 0.1 * bump_profile(x, 0.0, 4.0)
    f = Field(grid, 0.0, 1.0 + b, b.copy(), 1.0 + 0.5 * b)
    cfg = SolverConfig(bc_left=base, bc_right=base)
    dx = grid.dx
    for _ in range(5):
        E_old = total_energy_vt(f.v, f.u, f.theta, gas)
        old = np.array([np.sum(f.v) * dx, np.sum(f.u) * dx, np.sum(E_old) * dx])
        f, fluxes = step_with_fluxes(f, gas, cfg)
        E_new = total_energy_vt(f.v, f.u, f.theta, gas)
        new = np.array([np.sum(f.v) * dx, np.sum(f.u) * dx, np.sum(E_new) * dx])
        boundary = fluxes[:, 1] - fluxes[:, 0]
        assert np.max(np.abs(new - old - boundary) / np.maximum(np.abs(old), 1.0)) <= 1e-12


def test_comoving_profile_residual_second_order(gas, right_state):
    pat = build_pattern(right_state, 0.1, 0.0, 0.0, gas)
    s1 = shock_profile_from_pattern(pat, 1, gas)

    def resid(n):
        grid = Grid(-180.0, 140.0, n)
        x = grid.x
        f = Field(grid, 0.0, s1.v(x), s1.u(x), s1.theta(x))
        r = nsf_rhs(f, gas, (pat.left, pat.mid_left))
        m = slice(n // 10, -n // 10)
        rv = r.v_t - (-pat.sigma1 * s1.dv(x))
        ru = r.u_t - (-pat.sigma1 * s1.du(x))
        return max(np.max(np.abs(rv[m])), np.max(np.abs(ru[m])))

    r1, r2 = resid(1024), resid(2048)
    assert r1 / r2 >= 3.5  # clean second-order decay


def test_step_dt_halving_second_order(gas, base):
    grid = Grid(-10.0, 10.0, 512)
    x = grid.x
    b = 0.05 * bump_profile(x, 0.0, 3.0)
    cfg = SolverConfig(bc_left=base, bc_right=base)
    h0 = stable_dt(Field(grid, 0.0, 1.0 + b, b.copy(), 1.0 + b), gas, cfg)

    def run(h):
        f = Field(grid, 0.0, 1.0 + b, b.copy(), 1.0 + b)
        while f.t < 0.1 - 1e-12:
            f = step(f, gas, cfg, min(h, 0.1 - f.t))
        return f

    fa, fb, fc = run(h0), run(h0 / 2), run(h0 / 4)
    d1 = np.max(np.abs(fa.u - fb.u))
    d2 = np.max(np.abs(fb.u - fc.u))
    assert math.log2(d1 / d2) >= 1.9


def test_positivity_loss_reported_with_node(gas, base):
    grid = Grid(-5.0, 5.0, 128)
    f = constant_field(grid, base)
    f.theta[60] = 1e-3  # near-vacuum pocket collapses under a large step
    cfg = SolverConfig(bc_left=base, bc_right=base)
    with pytest.raises(PositivityError) as exc:
        for _ in range(200):
            f = step(f, gas, cfg, 0.05)
    assert exc.value.node is not None
    assert exc.value.time is not None


def test_make_initial_data_unperturbed_and_mass(gas, composite):
    grid = Grid(-60.0, 60.0, 8192)
    f0 = make_initial_data(composite, grid, gas, None)
    v, u, th = composite.sample(0.0, grid.x, 0.0, 0.0)
    assert np.array_equal(f0.v, v)

    spec = PerturbationSpec(amplitude=1e-2, center=0.5, width=2.0, components=("u",))
    f1 = make_initial_data(composite, grid, gas, spec)
    mass_grid = np.trapezoid(f1.u - u, grid.x)
    shape, _ = quad(lambda s: math.exp(1.0 - 1.0 / (1.0 - s * s)), -1.0, 1.0,
                    limit=200)
    mass_exact = spec.amplitude * spec.width * shape
    assert mass_grid == pytest.approx(mass_exact, rel=1e-6)


def test_perturbation_outside_domain_is_noop(gas, composite):
    grid = Grid(-60.0, 60.0, 512)
    spec = PerturbationSpec(amplitude=1e-2, center=100.0, width=2.0)
    f = make_initial_data(composite, grid, gas, spec)
    v, u, th = composite.sample(0.0, grid.x, 0.0, 0.0)
    assert np.array_equal(f.v, v) and np.array_equal(f.theta, th)


def test_perturbation_positivity_loss_raises(gas, composite):
    grid = Grid(-60.0, 60.0, 512)
    spec = PerturbationSpec(amplitude=-1.5, center=0.0, width=3.0,
                            components=("theta",))
    with pytest.raises(PositivityError):
        make_initial_data(composite, grid, gas, spec)


def test_boundary_contamination_monitor(gas, base):
    grid = Grid(-5.0, 5.0, 100)
    f = constant_field(grid, base)
    check_boundary_contamination(f, (base, base))
    f.u[2] = 1e-3  # inside the 5% margin band
    with pytest.raises(BoundaryContaminationError):
        check_boundary_contamination(f, (base, base))


def test_domain_doubling_leaves_interior_diagnostics(gas, composite, pattern):
    # same dx, same nodes on the shared interior; diagnostics agree to 1e-6
    from nsflab.stability import ShiftState, coupled_step, diagnostics

    cfg = SolverConfig(bc_left=pattern.left, bc_right=pattern.right)
    spec = PerturbationSpec(amplitude=1e-2, center=0.0, width=4.0,
                            components=("theta",))
    results = []
    for lim, n in ((160.0, 1025), (320.0, 2049)):
        grid = Grid(-lim, lim, n)
        f = make_initial_data(composite, grid, gas, spec)
        sh = ShiftState()
        while f.t < 1.0 - 1e-12:
            dt = min(0.02, 1.0 - f.t)
            f, sh = coupled_step(f, sh, composite, gas, cfg, dt)
        results.append(diagnostics(f, composite, sh, gas))
    a, b = results
    assert abs(a.E_rel - b.E_rel) <= 1e-6
    assert abs(a.supnorm - b.supnorm) <= 1e-6
    assert abs(a.Xdot1 - b.Xdot1) <= 1e-6
