"""Method-of-lines finite-difference integrator for the viscous gas system.

The conservative unknowns (v, u, E) are advanced with Heun's method
(two-stage SSP-RK2); every right-hand side is a difference of half-node
fluxes, so interior sums telescope and conservation holds to roundoff.
Temperature is recovered from E after each stage.  Far-field Dirichlet
states supply the ghost values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .errors import BoundaryContaminationError, InvalidStateError, PositivityError
from .gas import GasParams, ThermoState, theta_from_energy, total_energy_vt

_SPACE_ORDER = 2
_TIME_ORDER = 2


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise InvalidStateError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.n < 16:
            raise InvalidStateError(f"need at least 16 nodes, got {self.n}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @cached_property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)


@dataclass
class Field:
    """Grid-sampled (v, u, theta) at one instant."""

    grid: Grid
    t: float
    v: np.ndarray
    u: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        for name, arr in (("v", self.v), ("u", self.u), ("theta", self.theta)):
            if arr.shape != (self.grid.n,):
                raise InvalidStateError(f"{name} has shape {arr.shape}, grid has n={self.grid.n}")
        if np.any(self.v <= 0) or np.any(self.theta <= 0):
            j = int(np.argmin(np.minimum(self.v, self.theta)))
            raise PositivityError(
                f"nonpositive v or theta at node {j}, t={self.t}", node=j, time=self.t
            )

    def copy(self) -> "Field":
        return Field(self.grid, self.t, self.v.copy(), self.u.copy(), self.theta.copy())


@dataclass(frozen=True)
class SolverConfig:
    bc_left: ThermoState
    bc_right: ThermoState
    cfl: float = 0.4
    t_end: float = 0.0
    positivity_floor: float = 1e-10
    space_order: int = _SPACE_ORDER
    time_order: int = _TIME_ORDER

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise InvalidStateError(f"cfl must lie in (0, 1), got {self.cfl}")


@dataclass
class RhsEval:
    """Time derivatives of the conservative variables plus boundary fluxes."""

    v_t: np.ndarray
    u_t: np.ndarray
    E_t: np.ndarray
    flux_left: np.ndarray = dc_field(default=None)
    flux_right: np.ndarray = dc_field(default=None)


def _half_fluxes(v, u, theta, g: GasParams, dx: float):
    """Fluxes of (v, u, E) at the n+1 half nodes of the extended arrays."""
    p = g.R * theta / v
    v_h = 0.5 * (v[:-1] + v[1:])
    u_h = 0.5 * (u[:-1] + u[1:])
    du = (u[1:] - u[:-1]) / dx
    dth = (theta[1:] - theta[:-1]) / dx
    f_v = u_h
    f_u = -0.5 * (p[:-1] + p[1:]) + g.mu * du / v_h
    f_E = (
        -0.5 * (p[:-1] * u[:-1] + p[1:] * u[1:])
        + g.kappa * dth / v_h
        + g.mu * u_h * du / v_h
    )
    return f_v, f_u, f_E


def nsf_rhs(f: Field, g: GasParams, bc: tuple[ThermoState, ThermoState]) -> RhsEval:
    """Second-order central semi-discretization with Dirichlet ghost states.

    Returns (v_t, u_t, E_t); recover theta_t as (gamma-1)(E_t - u u_t)/R
    when needed.
    """
    dx = f.grid.dx
    bl, br = bc
    v = np.concatenate(([bl.v], f.v, [br.v]))
    u = np.concatenate(([bl.u], f.u, [br.u]))
    th = np.concatenate(([bl.theta], f.theta, [br.theta]))
    f_v, f_u, f_E = _half_fluxes(v, u, th, g, dx)
    out = RhsEval(
        v_t=(f_v[1:] - f_v[:-1]) / dx,
        u_t=(f_u[1:] - f_u[:-1]) / dx,
        E_t=(f_E[1:] - f_E[:-1]) / dx,
        flux_left=np.array([f_v[0], f_u[0], f_E[0]]),
        flux_right=np.array([f_v[-1], f_u[-1], f_E[-1]]),
    )
    return out


def stable_dt(f: Field, g: GasParams, cfg: SolverConfig) -> float:
    """cfl * min(acoustic, parabolic) step for the current state."""
    dx = f.grid.dx
    lam = np.sqrt(g.gamma * g.R * f.theta) / f.v
    dt_hyp = dx / float(np.max(lam))
    dt_par = dx * dx * float(np.min(f.v)) / (
        2.0 * max(g.mu, g.kappa * (g.gamma - 1.0) / g.R)
    )
    return cfg.cfl * min(dt_hyp, dt_par)


def _check_positive(v, theta, t, floor):
    bad = (v < floor) | (theta < floor)
    if np.any(bad):
        j = int(np.argmax(bad))
        raise PositivityError(
            f"positivity lost at node {j}, t={t:.6g} (v={v[j]:.3e}, theta={theta[j]:.3e})",
            node=j, time=t,
        )


def step_with_fluxes(f: Field, g: GasParams, cfg: SolverConfig,
                     dt: float | None = None):
    """One Heun step; also returns the time-integrated boundary fluxes.

    The flux record is a (3, 2) array [(v,u,E) x (left,right)] such that
    sum(U_new - U_old) * dx == flux_right - flux_left exactly (interior
    conservation audit).
    """
    if dt is None:
        dt = stable_dt(f, g, cfg)
    bc = (cfg.bc_left, cfg.bc_right)
    E0 = total_energy_vt(f.v, f.u, f.theta, g)
    k1 = nsf_rhs(f, g, bc)
    v1 = f.v + dt * k1.v_t
    u1 = f.u + dt * k1.u_t
    E1 = E0 + dt * k1.E_t
    th1 = theta_from_energy(E1, u1, g)
    _check_positive(v1, th1, f.t + dt, cfg.positivity_floor)
    k2 = nsf_rhs(Field(f.grid, f.t + dt, v1, u1, th1), g, bc)
    v2 = f.v + 0.5 * dt * (k1.v_t + k2.v_t)
    u2 = f.u + 0.5 * dt * (k1.u_t + k2.u_t)
    E2 = E0 + 0.5 * dt * (k1.E_t + k2.E_t)
    th2 = theta_from_energy(E2, u2, g)
    _check_positive(v2, th2, f.t + dt, cfg.positivity_floor)
    fluxes = 0.5 * dt * np.stack(
        [k1.flux_left + k2.flux_left, k1.flux_right + k2.flux_right], axis=1
    )
    return Field(f.grid, f.t + dt, v2, u2, th2), fluxes


def step(f: Field, g: GasParams, cfg: SolverConfig, dt: float | None = None) -> Field:
    """Advance one stable Heun step (or a caller-capped dt)."""
    new, _ = step_with_fluxes(f, g, cfg, dt)
    return new


def check_boundary_contamination(f: Field, bc: tuple[ThermoState, ThermoState],
                                 margin_frac: float = 0.05, tol: float = 1e-6) -> None:
    """Error if the margin nodes deviate from the far-field states."""
    m = max(1, int(margin_frac * f.grid.n))
    bl, br = bc
    dev_l = max(
        float(np.max(np.abs(f.v[:m] - bl.v))),
        float(np.max(np.abs(f.u[:m] - bl.u))),
        float(np.max(np.abs(f.theta[:m] - bl.theta))),
    )
    dev_r = max(
        float(np.max(np.abs(f.v[-m:] - br.v))),
        float(np.max(np.abs(f.u[-m:] - br.u))),
        float(np.max(np.abs(f.theta[-m:] - br.theta))),
    )
    if max(dev_l, dev_r) > tol:
        raise BoundaryContaminationError(
            f"far-field deviation {max(dev_l, dev_r):.3e} at the {int(margin_frac*100)}% "
            f"margin nodes, t={f.t:.6g}"
        )


@dataclass(frozen=True)
class PerturbationSpec:
    """Compactly supported smooth bump added to selected components."""

    amplitude: float
    center: float = 0.0
    width: float = 1.0
    components: tuple[str, ...] = ("v", "u", "theta")

    def __post_init__(self):
        if self.width <= 0:
            raise InvalidStateError("perturbation width must be positive")
        bad = set(self.components) - {"v", "u", "theta"}
        if bad:
            raise InvalidStateError(f"unknown perturbation components {sorted(bad)}")


def bump_profile(x: np.ndarray, center: float, width: float) -> np.ndarray:
    """exp(1 - 1/(1 - s^2)) on |s| < 1 with s = (x - center)/width, else 0."""
    s = (np.asarray(x) - center) / width
    out = np.zeros_like(s, dtype=float)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - si * si))
    return out


def make_initial_data(composite, grid: Grid, g: GasParams,
                      perturbation: PerturbationSpec | None = None) -> Field:
    """Composite wave at t = 0 with zero shifts, plus the optional bump."""
    x = grid.x
    v, u, th = composite.sample(0.0, x, 0.0, 0.0)
    v, u, th = np.array(v), np.array(u), np.array(th)
    if perturbation is not None and perturbation.amplitude != 0.0:
        b = perturbation.amplitude * bump_profile(x, perturbation.center, perturbation.width)
        if "v" in perturbation.components:
            v = v + b
        if "u" in perturbation.components:
            u = u + b
        if "theta" in perturbation.components:
            th = th + b
    return Field(grid, 0.0, v, u, th)
