"""Ideal polytropic gas thermodynamics and relative entropy.

All functions are pure.  Pointwise quantities operate on `ThermoState`
values; the `*_vt` helpers take raw arrays and are what the grid code
calls in hot loops.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError

# When enabled, state-based functions re-validate their inputs on every
# call.  Off by default so hot loops pay no checks.
_DEBUG_VALIDATE = False


def set_debug_validation(flag: bool) -> None:
    global _DEBUG_VALIDATE
    _DEBUG_VALIDATE = bool(flag)


@dataclass(frozen=True)
class GasParams:
    """Physical constants of the gas.

    Attributes
    ----------
    R : float
        Gas constant, > 0.
    gamma : float
        Adiabatic exponent, > 1.
    mu : float
        Viscosity coefficient, > 0.
    kappa : float
        Heat-conductivity coefficient, > 0.
    """

    R: float
    gamma: float
    mu: float
    kappa: float

    def __post_init__(self):
        if not (self.R > 0):
            raise InvalidStateError(f"gas constant must be positive, got R={self.R}")
        if not (self.gamma > 1):
            raise InvalidStateError(f"adiabatic exponent must exceed 1, got gamma={self.gamma}")
        if not (self.mu > 0):
            raise InvalidStateError(f"viscosity must be positive, got mu={self.mu}")
        if not (self.kappa > 0):
            raise InvalidStateError(f"heat conductivity must be positive, got kappa={self.kappa}")


@dataclass(frozen=True)
class ThermoState:
    """Pointwise fluid state (specific volume, velocity, temperature)."""

    v: float
    u: float
    theta: float

    def __post_init__(self):
        if not (self.v > 0) or not (self.theta > 0):
            raise InvalidStateError(
                f"state requires v > 0 and theta > 0, got v={self.v}, theta={self.theta}"
            )


def _check(s: ThermoState) -> None:
    if _DEBUG_VALIDATE and (not s.v > 0 or not s.theta > 0):
        raise InvalidStateError(f"invalid state v={s.v}, theta={s.theta}")


def pressure(s: ThermoState, g: GasParams) -> float:
    """p = R theta / v."""
    _check(s)
    return g.R * s.theta / s.v


def internal_energy(s: ThermoState, g: GasParams) -> float:
    """e = R theta / (gamma - 1), additive constant fixed to 0."""
    _check(s)
    return g.R * s.theta / (g.gamma - 1.0)


def total_energy(s: ThermoState, g: GasParams) -> float:
    """E = e + u^2/2."""
    _check(s)
    return g.R * s.theta / (g.gamma - 1.0) + 0.5 * s.u * s.u


def sound_speed(s: ThermoState, g: GasParams) -> float:
    """Lagrangian acoustic speed sqrt(gamma p / v)."""
    _check(s)
    return math.sqrt(g.gamma * pressure(s, g) / s.v)


def phi(z):
    """Entropy kernel z - 1 - ln z, nonnegative with a root only at z = 1.

    Accepts scalars or arrays; raises for nonpositive input.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise InvalidStateError("phi requires a positive argument")
    out = z - 1.0 - np.log(z)
    return float(out) if out.ndim == 0 else out


def relative_entropy_density(s: ThermoState, sbar: ThermoState, g: GasParams) -> float:
    """Relative entropy of s with respect to sbar.

    R*phi(v/vbar) + R/(gamma-1)*phi(theta/thetabar) + (u-ubar)^2/(2 thetabar);
    nonnegative, vanishing only at s == sbar.
    """
    _check(s)
    _check(sbar)
    return float(
        relative_entropy_vt(s.v, s.u, s.theta, sbar.v, sbar.u, sbar.theta, g)
    )


def weighted_relative_entropy_density(s: ThermoState, sbar: ThermoState, g: GasParams) -> float:
    """thetabar-weighted relative entropy: thetabar * eta(s | sbar)."""
    return sbar.theta * relative_entropy_density(s, sbar, g)


# --- array forms used on grids ---

def pressure_vt(v, theta, g: GasParams):
    return g.R * theta / v


def total_energy_vt(v, u, theta, g: GasParams):
    return g.R * theta / (g.gamma - 1.0) + 0.5 * u * u


def theta_from_energy(E, u, g: GasParams):
    """Invert E = R theta/(gamma-1) + u^2/2 for theta."""
    return (g.gamma - 1.0) * (E - 0.5 * u * u) / g.R


def relative_entropy_vt(v, u, theta, vbar, ubar, thetabar, g: GasParams):
    return (
        g.R * phi(v / vbar)
        + g.R / (g.gamma - 1.0) * phi(theta / thetabar)
        + (u - ubar) ** 2 / (2.0 * thetabar)
    )


def weighted_relative_entropy_vt(v, u, theta, vbar, ubar, thetabar, g: GasParams):
    return (
        g.R * thetabar * phi(v / vbar)
        + g.R * thetabar / (g.gamma - 1.0) * phi(theta / thetabar)
        + 0.5 * (u - ubar) ** 2
    )
