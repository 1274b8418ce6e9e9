"""Weighted relative entropy machinery: weights, cutoffs, shifts, diagnostics.

The shift ODE is explicit: the reference wave depends on the shifts but not
on their rates, so each stage evaluates a plain quadrature.  It is advanced
with the same two-stage structure and dt as the PDE, re-sampling the
reference wave from the stage shifts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import WaveSeparationError
from .gas import (GasParams, pressure, theta_from_energy, total_energy_vt,
                  weighted_relative_entropy_vt)
from .profiles import CompositePieces, CompositeWave
from .riemann import WavePattern
from .solver import Field, SolverConfig, _check_positive, nsf_rhs, stable_dt


@dataclass(frozen=True)
class ShiftState:
    """Current shock shifts and their rates; both shifts start at zero."""

    X1: float = 0.0
    X3: float = 0.0
    Xdot1: float = 0.0
    Xdot3: float = 0.0


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    E_rel: float
    G1S: float
    G3S: float
    Dv1: float
    Du1: float
    Dth1: float
    Du2: float
    Dth2: float
    X1: float
    X3: float
    Xdot1: float
    Xdot3: float
    supnorm: float
    h1norm: float
    Q1_l2: float
    Q2_l2: float

    CSV_COLUMNS = (
        "t", "E_rel", "G1S", "G3S", "Dv1", "Du1", "Dth1", "Du2", "Dth2",
        "X1", "X3", "Xdot1", "Xdot3", "supnorm", "h1norm", "Q1_l2", "Q2_l2",
    )

    def row(self) -> tuple:
        return tuple(getattr(self, c) for c in self.CSV_COLUMNS)


def weight_arrays(comp: CompositeWave, t: float, x: np.ndarray,
                  X1: float, X3: float):
    """Per-family weights (a1, a3) and their x-derivatives on the grid.

    a_i = 1 + (vtilde_i - v_leftend)/sqrt(delta_i); a zero-amplitude family
    contributes the constant 1.
    """
    pat = comp.pattern
    n = x.shape[0]
    one = np.ones(n)
    zero = np.zeros(n)
    if comp.shock1 is not None and pat.delta1 > 0:
        xi1 = x - pat.sigma1 * t - X1
        rd1 = math.sqrt(pat.delta1)
        a1 = 1.0 + (comp.shock1.v(xi1) - pat.left.v) / rd1
        a1x = comp.shock1.dv(xi1) / rd1
    else:
        a1, a1x = one, zero
    if comp.shock3 is not None and pat.delta3 > 0:
        xi3 = x - pat.sigma3 * t - X3
        rd3 = math.sqrt(pat.delta3)
        a3 = 1.0 + (comp.shock3.v(xi3) - pat.mid_right.v) / rd3
        a3x = comp.shock3.dv(xi3) / rd3
    else:
        a3, a3x = one, zero
    return a1, a3, a1x, a3x


def weight_a(comp: CompositeWave, t: float, x: np.ndarray,
             X1: float, X3: float) -> np.ndarray:
    """Combined weight a = a1 + a3 - 1, pointwise in [1/2, 3/2]."""
    a1, a3, _, _ = weight_arrays(comp, t, x, X1, X3)
    return a1 + a3 - 1.0


def cutoffs(X1: float, X3: float, sigma1: float, sigma3: float, t: float,
            x: np.ndarray):
    """Localization pair (phi1, phi3): phi1 falls linearly from 1 to 0
    between the shock midpoints, phi3 = 1 - phi1 exactly."""
    b1 = 0.5 * (X1 + sigma1 * t)
    b3 = 0.5 * (X3 + sigma3 * t)
    if b1 > b3:
        raise WaveSeparationError(
            f"shock midpoints crossed: (X1+s1 t)/2 = {b1} > (X3+s3 t)/2 = {b3} at t={t}"
        )
    if b1 == b3:
        phi1 = (x < b1).astype(float)
    else:
        phi1 = np.clip((b3 - x) / (b3 - b1), 0.0, 1.0)
    return phi1, 1.0 - phi1


def shift_gains(pattern: WavePattern, g: GasParams):
    """(M1, M3) feedback gains tied to the end states of each shock.

    M_i = (3/2) alpha_i / sigma_ref^2 * (1 + 2 kappa (gamma-1)^2/(mu R gamma))
    with alpha_i = gamma (gamma+1) p_ref / (2 sigma_ref v_ref^2), where the
    reference state is the left end of the respective shock and
    sigma_ref = sqrt(gamma p_ref / v_ref).
    """
    common = 1.0 + 2.0 * g.kappa * (g.gamma - 1.0) ** 2 / (g.mu * g.R * g.gamma)

    def gain(state):
        p_ref = pressure(state, g)
        s_ref = math.sqrt(g.gamma * p_ref / state.v)
        alpha = g.gamma * (g.gamma + 1.0) * p_ref / (2.0 * s_ref * state.v ** 2)
        return 1.5 * alpha / s_ref ** 2 * common

    M1 = gain(pattern.left) if pattern.delta1 > 0 else 0.0
    M3 = gain(pattern.mid_right) if pattern.delta3 > 0 else 0.0
    return M1, M3


def shift_rhs(f: Field, comp: CompositeWave, X1: float, X3: float,
              pieces: CompositePieces | None = None):
    """Rates (Xdot1, Xdot3) of the shift system at the given state.

    Each rate is -M_i/delta_i times the weighted projection of the
    perturbation onto the derivative of that family's profile; quadrature
    is trapezoidal on the grid.
    """
    g = comp.gas
    pat = comp.pattern
    x = f.grid.x
    t = f.t
    if pieces is None:
        pieces = comp.pieces(t, x, X1, X3)
    a1, a3, _, _ = weight_arrays(comp, t, x, X1, X3)
    a = a1 + a3 - 1.0
    vbar, ubar, thbar = pieces.v, pieces.u, pieces.th
    pbar = g.R * thbar / vbar
    dv_pert = f.v - vbar
    du_pert = f.u - ubar
    dth_pert = f.theta - thbar
    M1, M3 = shift_gains(pat, g)
    rates = []
    for M, delta, ws in ((M1, pat.delta1, pieces.shock1), (M3, pat.delta3, pieces.shock3)):
        if M == 0.0 or delta == 0.0:
            rates.append(0.0)
            continue
        integrand = a * (
            ws.ux * du_pert
            + ws.vx * pbar / vbar * dv_pert
            + g.R / (g.gamma - 1.0) * ws.thx / thbar * dth_pert
        )
        rates.append(-(M / delta) * float(np.trapezoid(integrand, x)))
    return rates[0], rates[1]


def coupled_step(f: Field, shifts: ShiftState, comp: CompositeWave,
                 g: GasParams, cfg: SolverConfig, dt: float | None = None):
    """Advance (field, shifts) one Heun step with shared stage structure.

    The reference wave is re-sampled from the stage shifts at each of the
    two stages; the PDE stages do not depend on the shifts.
    """
    if dt is None:
        dt = stable_dt(f, g, cfg)
    bc = (cfg.bc_left, cfg.bc_right)
    k1x = shift_rhs(f, comp, shifts.X1, shifts.X3)
    E0 = total_energy_vt(f.v, f.u, f.theta, g)
    r1 = nsf_rhs(f, g, bc)
    u_mid = f.u + dt * r1.u_t
    mid = Field(f.grid, f.t + dt,
                f.v + dt * r1.v_t,
                u_mid,
                theta_from_energy(E0 + dt * r1.E_t, u_mid, g))
    _check_positive(mid.v, mid.theta, mid.t, cfg.positivity_floor)
    k2x = shift_rhs(mid, comp, shifts.X1 + dt * k1x[0], shifts.X3 + dt * k1x[1])
    r2 = nsf_rhs(mid, g, bc)
    u_new = f.u + 0.5 * dt * (r1.u_t + r2.u_t)
    new_field = Field(
        f.grid, f.t + dt,
        f.v + 0.5 * dt * (r1.v_t + r2.v_t),
        u_new,
        theta_from_energy(E0 + 0.5 * dt * (r1.E_t + r2.E_t), u_new, g),
    )
    _check_positive(new_field.v, new_field.theta, new_field.t, cfg.positivity_floor)
    new_shifts = ShiftState(
        X1=shifts.X1 + 0.5 * dt * (k1x[0] + k2x[0]),
        X3=shifts.X3 + 0.5 * dt * (k1x[1] + k2x[1]),
        Xdot1=k2x[0],
        Xdot3=k2x[1],
    )
    return new_field, new_shifts


def _grad(f: np.ndarray, dx: float) -> np.ndarray:
    return np.gradient(f, dx)


def _second(f: np.ndarray, dx: float) -> np.ndarray:
    out = np.zeros_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / (dx * dx)
    return out


def interaction_residuals(pieces: CompositePieces, comp: CompositeWave):
    """Pointwise residuals (Q1, Q2) of the reference wave, split per source.

    Q_i = Q_i^interaction + Q_i^contact; the contact part is the defect of
    the diffusive wave alone, the interaction part collects the nonlinear
    coupling of the three profiles.  All derivatives are analytic.
    """
    g = comp.gas
    w1, wc, w3 = pieces.shock1, pieces.contact, pieces.shock3
    vb, thb = pieces.v, pieces.th
    pb = g.R * thb / vb
    pb_x = g.R * (pieces.thx * vb - thb * pieces.vx) / vb ** 2

    def p_x(ws):
        return g.R * (ws.thx * ws.v - ws.th * ws.vx) / ws.v ** 2

    def visc_term_x(ux, uxx, v, vx):
        return (uxx * v - ux * vx) / v ** 2

    # contact-only defect
    Q1C = wc.u_t - g.mu * visc_term_x(wc.ux, wc.uxx, wc.v, wc.vx)
    Q2C = -g.mu * wc.ux ** 2 / wc.v

    Q1I = (
        pb_x - p_x(w1) - p_x(w3)
        - g.mu * (
            visc_term_x(pieces.ux, pieces.uxx, vb, pieces.vx)
            - visc_term_x(w1.ux, w1.uxx, w1.v, w1.vx)
            - visc_term_x(wc.ux, wc.uxx, wc.v, wc.vx)
            - visc_term_x(w3.ux, w3.uxx, w3.v, w3.vx)
        )
    )
    p1 = g.R * w1.th / w1.v
    p3 = g.R * w3.th / w3.v
    pC = g.R * wc.th / wc.v

    def heat(thx, thxx, v, vx):
        return (thxx * v - thx * vx) / v ** 2

    Q2I = (
        pb * pieces.ux - p1 * w1.ux - pC * wc.ux - p3 * w3.ux
        - g.kappa * (
            heat(pieces.thx, pieces.thxx, vb, pieces.vx)
            - heat(w1.thx, w1.thxx, w1.v, w1.vx)
            - heat(wc.thx, wc.thxx, wc.v, wc.vx)
            - heat(w3.thx, w3.thxx, w3.v, w3.vx)
        )
        - g.mu * (
            pieces.ux ** 2 / vb
            - w1.ux ** 2 / w1.v
            - wc.ux ** 2 / wc.v
            - w3.ux ** 2 / w3.v
        )
    )
    return Q1I + Q1C, Q2I + Q2C


def contact_residual_norms(comp: CompositeWave, t: float, x: np.ndarray):
    """L2 norms of the contact-only defects (Q1^C, Q2^C) at time t."""
    pieces = comp.pieces(t, x, 0.0, 0.0)
    g = comp.gas
    wc = pieces.contact
    Q1C = wc.u_t - g.mu * (wc.uxx * wc.v - wc.ux * wc.vx) / wc.v ** 2
    Q2C = -g.mu * wc.ux ** 2 / wc.v
    dx = x[1] - x[0]
    return (
        math.sqrt(float(np.trapezoid(Q1C ** 2, dx=dx))),
        math.sqrt(float(np.trapezoid(Q2C ** 2, dx=dx))),
    )


def diagnostics(f: Field, comp: CompositeWave, shifts: ShiftState,
                g: GasParams) -> DiagnosticsRecord:
    """All recorded functionals at the current instant (trapezoid + centered
    differences)."""
    pat = comp.pattern
    x = f.grid.x
    dx = f.grid.dx
    t = f.t
    pieces = comp.pieces(t, x, shifts.X1, shifts.X3)
    a1, a3, _, _ = weight_arrays(comp, t, x, shifts.X1, shifts.X3)
    a = a1 + a3 - 1.0
    phi1, phi3 = cutoffs(shifts.X1, shifts.X3, pat.sigma1, pat.sigma3, t, x)

    vb, ub, thb = pieces.v, pieces.u, pieces.th
    dv = f.v - vb
    du = f.u - ub
    dth = f.theta - thb

    eta_w = weighted_relative_entropy_vt(f.v, f.u, f.theta, vb, ub, thb, g)
    E_rel = float(np.trapezoid(a * eta_w, x))

    pert_sq = dv * dv + du * du + dth * dth
    G1S = float(np.trapezoid(np.abs(pieces.shock1.vx) * phi1 ** 2 * pert_sq, x))
    G3S = float(np.trapezoid(np.abs(pieces.shock3.vx) * phi3 ** 2 * pert_sq, x))

    dvx = _grad(dv, dx)
    dux = _grad(du, dx)
    dthx = _grad(dth, dx)
    Dv1 = float(np.trapezoid(dvx * dvx, x))
    Du1 = float(np.trapezoid(dux * dux, x))
    Dth1 = float(np.trapezoid(dthx * dthx, x))
    duxx = _second(du, dx)
    dthxx = _second(dth, dx)
    Du2 = float(np.trapezoid(duxx * duxx, x))
    Dth2 = float(np.trapezoid(dthxx * dthxx, x))

    Q1, Q2 = interaction_residuals(pieces, comp)
    Q1_l2 = math.sqrt(float(np.trapezoid(Q1 * Q1, x)))
    Q2_l2 = math.sqrt(float(np.trapezoid(Q2 * Q2, x)))

    xd1, xd3 = shift_rhs(f, comp, shifts.X1, shifts.X3, pieces=pieces)
    supnorm = float(max(np.max(np.abs(dv)), np.max(np.abs(du)), np.max(np.abs(dth))))
    h1 = math.sqrt(float(
        np.trapezoid(dv * dv + du * du + dth * dth, x)
        + np.trapezoid(dvx * dvx + dux * dux + dthx * dthx, x)
    ))
    return DiagnosticsRecord(
        t=t, E_rel=E_rel, G1S=G1S, G3S=G3S, Dv1=Dv1, Du1=Du1, Dth1=Dth1,
        Du2=Du2, Dth2=Dth2, X1=shifts.X1, X3=shifts.X3, Xdot1=xd1, Xdot3=xd3,
        supnorm=supnorm, h1norm=h1, Q1_l2=Q1_l2, Q2_l2=Q2_l2,
    )


def poincare_check(y: np.ndarray, f: np.ndarray):
    """Both sides of the weighted Poincare inequality for piecewise-linear f
    on [0, 1], by exact segment quadrature.

    Returns (lhs, rhs, passed) with
        lhs = int |f - mean(f)|^2 dy,
        rhs = 1/2 int y(1-y) |f'|^2 dy.
    """
    y = np.asarray(y, dtype=float)
    f = np.asarray(f, dtype=float)
    if y[0] != 0.0 or y[-1] != 1.0 or np.any(np.diff(y) <= 0):
        raise ValueError("y must increase strictly from 0 to 1")
    h = np.diff(y)
    mean = float(np.sum(0.5 * (f[:-1] + f[1:]) * h))
    ga = f[:-1] - mean
    gb = f[1:] - mean
    lhs = float(np.sum(h * (ga * ga + ga * gb + gb * gb) / 3.0))
    slope = (f[1:] - f[:-1]) / h
    w = (y[1:] ** 2 - y[:-1] ** 2) / 2.0 - (y[1:] ** 3 - y[:-1] ** 3) / 3.0
    rhs = 0.5 * float(np.sum(slope * slope * w))
    passed = lhs <= rhs * (1.0 + 1e-8) + 1e-12
    return lhs, rhs, passed
