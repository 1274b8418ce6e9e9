"""Viscous shock profiles, the viscous contact wave, and the composite wave.

The traveling-wave problem is integrated in its once-integrated form: with
xi the wave coordinate and u slaved through u = u_l - sigma (v - v_l),

    -mu sigma v'/v = sigma^2 (v - v_l) + p - p_l,
    kappa theta'/v = -sigma (E - E_l) + p u - p_l u_l - mu u u'/v,

a 2-D system in (v, theta) whose endpoint equilibria are a saddle and a
node.  The heteroclinic orbit is found by launching along the saddle's
one-dimensional manifold and integrating toward the node (backward in xi
when the saddle sits at +infinity, i.e. for the 1-family).

The contact wave solves the self-similar two-point problem
    -(xi/2) Theta' = alpha (Theta'/Theta)',  alpha = (gamma-1) kappa p_* / (R^2 gamma),
by bisection shooting on ln|Theta'| at the left end, which keeps the
exponentially small launch derivative well conditioned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import solve_bvp, solve_ivp
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import InvalidStateError, NonConvergenceError, StabilityConfigurationError
from .gas import GasParams, ThermoState, pressure
from .riemann import WavePattern, rankine_hugoniot_residuals

_LAUNCH_FRACTION = 1e-6   # launch offset along the unstable eigenvector, times delta
_ARRIVAL_SWITCH = 1e-4    # hand off to the node's linear manifold at this deviation
_TAIL_FLOOR = 1e-10       # tabulated tails reach below this times delta
_ENDPOINT_RH_TOL = 1e-8


class _ShockOde:
    """Once-integrated traveling-wave field and its Jacobian, vectorized."""

    def __init__(self, left: ThermoState, sigma: float, g: GasParams):
        self.g = g
        self.sigma = sigma
        self.vl = left.v
        self.ul = left.u
        self.thl = left.theta
        self.pl = g.R * left.theta / left.v
        self.El = g.R * left.theta / (g.gamma - 1.0) + 0.5 * left.u ** 2

    def slaved_u(self, v):
        return self.ul - self.sigma * (v - self.vl)

    def rhs(self, v, th):
        g, s = self.g, self.sigma
        p = g.R * th / v
        u = self.slaved_u(v)
        E = g.R * th / (g.gamma - 1.0) + 0.5 * u * u
        B = s * s * (v - self.vl) + p - self.pl
        dv = -(v / (g.mu * s)) * B
        G = (E - self.El) + self.pl * (v - self.vl) + s * u * (v - self.vl)
        dth = -(s * v / g.kappa) * G
        return dv, dth

    def jac(self, v, th):
        g, s = self.g, self.sigma
        p = g.R * th / v
        u = self.slaved_u(v)
        E = g.R * th / (g.gamma - 1.0) + 0.5 * u * u
        B = s * s * (v - self.vl) + p - self.pl
        G = (E - self.El) + self.pl * (v - self.vl) + s * u * (v - self.vl)
        j11 = -B / (g.mu * s) - (v / (g.mu * s)) * (s * s - p / v)
        j12 = -g.R / (g.mu * s) * np.ones_like(np.asarray(v, dtype=float))
        j21 = -(s / g.kappa) * G - (s * v / g.kappa) * (self.pl - s * s * (v - self.vl))
        j22 = -(s * v / g.kappa) * g.R / (g.gamma - 1.0)
        return j11, j12, j21, j22


class _ClampedPchip:
    """Monotone cubic interpolant with constant extension outside the table."""

    def __init__(self, x, y):
        self._x0 = x[0]
        self._x1 = x[-1]
        self._interp = PchipInterpolator(x, y, extrapolate=False)

    def __call__(self, x):
        return self._interp(np.clip(x, self._x0, self._x1))


@dataclass
class ShockProfile:
    """Tabulated viscous shock profile in the traveling coordinate xi.

    The table is uniform in xi, covers both tails down to about
    1e-10 * delta, and is phase-fixed by v(0) = (v_l + v_r)/2.
    Derivative tables hold exact field evaluations along the orbit, not
    finite differences.
    """

    family: int
    sigma: float
    left: ThermoState
    right: ThermoState
    xi_grid: np.ndarray
    v_tab: np.ndarray
    u_tab: np.ndarray
    theta_tab: np.ndarray
    dv_tab: np.ndarray
    dtheta_tab: np.ndarray
    centering: float
    gas: GasParams

    @property
    def delta(self) -> float:
        return abs(self.right.v - self.left.v)

    @cached_property
    def _ode(self) -> _ShockOde:
        return _ShockOde(self.left, self.sigma, self.gas)

    @cached_property
    def _iv(self):
        return _ClampedPchip(self.xi_grid, self.v_tab)

    @cached_property
    def _ith(self):
        return _ClampedPchip(self.xi_grid, self.theta_tab)

    @cached_property
    def _idv(self):
        return _ClampedPchip(self.xi_grid, self.dv_tab)

    @cached_property
    def _idth(self):
        return _ClampedPchip(self.xi_grid, self.dtheta_tab)

    def v(self, xi):
        return self._iv(xi)

    def theta(self, xi):
        return self._ith(xi)

    def u(self, xi):
        return self._ode.slaved_u(self._iv(xi))

    def dv(self, xi):
        return self._idv(xi)

    def dtheta(self, xi):
        return self._idth(xi)

    def du(self, xi):
        return -self.sigma * self._idv(xi)

    def second_derivatives(self, xi):
        """(v'', u'', theta'') along the orbit via the chain rule."""
        v = self._iv(xi)
        th = self._ith(xi)
        dv = self._idv(xi)
        dth = self._idth(xi)
        j11, j12, j21, j22 = self._ode.jac(v, th)
        d2v = j11 * dv + j12 * dth
        d2th = j21 * dv + j22 * dth
        return d2v, -self.sigma * d2v, d2th


def shock_profile_from_pattern(pattern: WavePattern, family: int, g: GasParams,
                               **kwargs) -> ShockProfile:
    if family == 1:
        return solve_shock_profile(pattern.left, pattern.mid_left, pattern.sigma1,
                                   1, g, **kwargs)
    if family == 3:
        return solve_shock_profile(pattern.mid_right, pattern.right, pattern.sigma3,
                                   3, g, **kwargs)
    raise ValueError(f"family must be 1 or 3, got {family}")


def solve_shock_profile(left: ThermoState, right: ThermoState, sigma: float,
                        family: int, g: GasParams, tol: float = 1e-8,
                        span: float | None = None, n_tab: int = 8193) -> ShockProfile:
    """Construct the heteroclinic traveling-wave connection.

    Parameters
    ----------
    left, right : ThermoState
        End states at xi -> -inf and +inf; must satisfy the jump conditions
        with `sigma`.
    tol : float
        Bound the returned tabulation must satisfy for the field residual.
    span : float, optional
        Maximum integration length before giving up on a connection.
    """
    delta = abs(right.v - left.v)
    if delta <= 1e-13 * max(left.v, right.v):
        raise InvalidStateError("zero-amplitude pair: endpoints coincide")
    res = rankine_hugoniot_residuals(left, right, sigma, g)
    if max(abs(r) for r in res) > _ENDPOINT_RH_TOL:
        raise InvalidStateError(f"endpoints violate the jump conditions: {res}")

    ode = _ShockOde(left, sigma, g)
    z_left = np.array([left.v, left.theta])
    z_right = np.array([right.v, right.theta])

    def detj(z):
        j11, j12, j21, j22 = ode.jac(z[0], z[1])
        return j11 * j22 - j12 * j21

    saddle_left = detj(z_left) < 0
    saddle_right = detj(z_right) < 0
    if saddle_left == saddle_right:
        raise StabilityConfigurationError(
            "endpoints are not a saddle/node pair; sigma or family is inconsistent"
        )
    # integrate away from the saddle: forward in xi when it sits at -inf,
    # backward (sdir = -1) when it sits at +inf
    if saddle_left:
        saddle, node, sdir = z_left, z_right, 1.0
    else:
        saddle, node, sdir = z_right, z_left, -1.0

    j11, j12, j21, j22 = ode.jac(saddle[0], saddle[1])
    J = sdir * np.array([[j11, j12], [j21, j22]])
    lam, vecs = np.linalg.eig(J)
    if np.iscomplexobj(lam) and np.any(np.abs(lam.imag) > 1e-12 * np.abs(lam.real)):
        raise StabilityConfigurationError("complex eigenvalues at the launch endpoint")
    lam = lam.real
    k = int(np.argmax(lam))
    lam_u = lam[k]
    if lam_u <= 0 or lam[1 - k] >= 0:
        raise StabilityConfigurationError(
            f"launch endpoint is not a saddle in the integration direction: {lam}"
        )
    j11, j12, j21, j22 = ode.jac(node[0], node[1])
    lam_node, vecs_node = np.linalg.eig(sdir * np.array([[j11, j12], [j21, j22]]))
    if np.any(lam_node.real >= 0):
        raise StabilityConfigurationError(
            f"arrival endpoint is not attracting: {lam_node}"
        )
    w = vecs[:, k].real
    w = w / np.linalg.norm(w)
    if np.sign(w[0]) != np.sign(node[0] - saddle[0]):
        w = -w

    eps = _LAUNCH_FRACTION * delta
    z0 = saddle + eps * w
    if span is None:
        span = max(200.0, 120.0 / lam_u)

    def f(eta, z):
        dv, dth = ode.rhs(z[0], z[1])
        return (sdir * dv, sdir * dth)

    # stop the integration while the deviation still dominates the
    # accumulated noise; past this point the fast eigencomponent of the
    # integrator error would pollute the tabulated slopes
    def arrived(eta, z):
        return max(abs(z[0] - node[0]), abs(z[1] - node[1])) - _ARRIVAL_SWITCH * delta
    arrived.terminal = True
    arrived.direction = -1

    # cap the step so the dense-output interpolant (used for tabulation)
    # resolves both eigenscales: the slow tails and the stiff launch
    # transient, whose interpolation error would otherwise pollute the
    # tabulated slopes relative to the tiny tail derivatives
    lam_fast = abs(lam[1 - k])
    step_cap = min(0.1 / lam_u, 1.0 / lam_fast)
    sol = solve_ivp(f, (0.0, span), z0, method="DOP853", rtol=1e-12, atol=1e-14,
                    events=arrived, dense_output=True, max_step=step_cap)
    if sol.status != 1:
        raise NonConvergenceError(
            f"no heteroclinic connection within span {span} (status {sol.status})"
        )
    eta_end = float(sol.t_events[0][0])

    # both tails are completed with the linearized manifolds down to the
    # common floor: exact exponentials with clean signs and slopes
    lam_node = lam_node.real
    ks = int(np.argmax(lam_node))          # slow stable rate (closest to zero)
    lam_s = -lam_node[ks]
    w_node = vecs_node[:, ks].real
    w_node = w_node / np.linalg.norm(w_node)
    d_end = sol.sol(eta_end) - node
    c_end = float(np.linalg.norm(d_end))
    if float(w_node @ d_end) < 0.0:
        w_node = -w_node
    eta_ext = math.log(_LAUNCH_FRACTION / _TAIL_FLOOR) / lam_u
    eta_arr = math.log(c_end / (_TAIL_FLOOR * delta)) / lam_s

    eta_grid = np.linspace(-eta_ext, eta_end + eta_arr, n_tab)
    neg = eta_grid < 0.0
    arr = eta_grid > eta_end
    mid = ~neg & ~arr
    z_tab = np.empty((2, n_tab))
    dz_tab = np.empty((2, n_tab))
    growth = eps * np.exp(lam_u * eta_grid[neg])
    z_tab[:, neg] = saddle[:, None] + w[:, None] * growth
    dz_tab[:, neg] = w[:, None] * (lam_u * growth)
    z_tab[:, mid] = sol.sol(eta_grid[mid])
    dvp, dthp = ode.rhs(z_tab[0, mid], z_tab[1, mid])
    dz_tab[0, mid] = sdir * dvp
    dz_tab[1, mid] = sdir * dthp
    decay = c_end * np.exp(-lam_s * (eta_grid[arr] - eta_end))
    z_tab[:, arr] = node[:, None] + w_node[:, None] * decay
    dz_tab[:, arr] = w_node[:, None] * (-lam_s * decay)

    # phase fix: v crosses the midpoint at xi = 0
    v_mid = 0.5 * (left.v + right.v)
    eta_c = brentq(lambda e: sol.sol(e)[0] - v_mid, 0.0, eta_end, xtol=1e-13)

    xi = sdir * (eta_grid - eta_c)
    dv_dxi = dz_tab[0] * sdir   # d/dxi = sdir * d/deta
    dth_dxi = dz_tab[1] * sdir
    order = np.argsort(xi)
    xi = xi[order]
    v_tab = z_tab[0][order]
    th_tab = z_tab[1][order]
    dv_tab = dv_dxi[order]
    dth_tab = dth_dxi[order]
    u_tab = ode.slaved_u(v_tab)

    profile = ShockProfile(
        family=family, sigma=sigma, left=left, right=right,
        xi_grid=xi, v_tab=v_tab, u_tab=u_tab, theta_tab=th_tab,
        dv_tab=dv_tab, dtheta_tab=dth_tab, centering=0.0, gas=g,
    )
    resid = profile_ode_residual(profile)
    if resid > tol:
        raise NonConvergenceError(f"profile residual {resid:.3e} exceeds {tol}")
    return profile


def _fd_derivative(f: np.ndarray, h: float) -> np.ndarray:
    """Sixth-order central first derivative on a uniform grid (interior)."""
    return (
        -f[:-6] + 9.0 * f[1:-5] - 45.0 * f[2:-4]
        + 45.0 * f[4:-2] - 9.0 * f[5:-1] + f[6:]
    ) / (60.0 * h)


def profile_ode_residual(p: ShockProfile) -> float:
    """Max defect of the once-integrated relations, derivatives by finite
    differences on the tabulation (independent of the stored derivative
    tables)."""
    g = p.gas
    ode = p._ode
    h = p.xi_grid[1] - p.xi_grid[0]
    v = p.v_tab
    th = p.theta_tab
    vi, thi = v[3:-3], th[3:-3]
    dv = _fd_derivative(v, h)
    dth = _fd_derivative(th, h)
    u = ode.slaved_u(vi)
    du = -p.sigma * dv
    pr = g.R * thi / vi
    E = g.R * thi / (g.gamma - 1.0) + 0.5 * u * u
    r1 = -g.mu * p.sigma * dv / vi - (p.sigma ** 2 * (vi - ode.vl) + pr - ode.pl)
    r2 = g.kappa * dth / vi - (
        -p.sigma * (E - ode.El) + pr * u - ode.pl * ode.ul - g.mu * u * du / vi
    )
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))


@dataclass
class TailFit:
    rate_left: float
    r2_left: float
    rate_right: float
    r2_right: float


def _linfit_r2(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    yhat = A @ coef
    ss_res = np.sum((y - yhat) ** 2)
    ss_tot = np.sum((y - np.mean(y)) ** 2)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return coef[0], r2


def tail_decay_fit(p: ShockProfile, lo: float = 1e-8, hi: float = 1e-2) -> TailFit:
    """Least-squares exponential rates of |v - v_end| in both tails.

    Fits log deviation against xi on the window where the deviation lies in
    [lo, hi] * delta, safely inside the linear tail and above roundoff.
    """
    delta = p.delta
    out = []
    for endpoint, side in ((p.left.v, "left"), (p.right.v, "right")):
        dev = np.abs(p.v_tab - endpoint)
        mask = (dev > lo * delta) & (dev < hi * delta)
        mask &= (p.xi_grid < 0) if side == "left" else (p.xi_grid > 0)
        if np.count_nonzero(mask) < 8:
            raise NonConvergenceError(f"too few tail samples on the {side} side")
        slope, r2 = _linfit_r2(p.xi_grid[mask], np.log(dev[mask]))
        rate = slope if side == "left" else -slope
        out.append((rate, r2))
    return TailFit(out[0][0], out[0][1], out[1][0], out[1][1])


def verify_profile_equivalences(p: ShockProfile) -> tuple[float, float]:
    """Max ratios comparing u' and theta' against their leading multiples of v'.

    Returns (max |u' - s v'| / (delta |v'|), max |theta' + (gamma-1) p_l/R v'|
    / (delta |v'|)) with s the acoustic speed of the left end state, sign
    matched to the family.  Evaluated where |v'| is meaningfully above
    roundoff.
    """
    g = p.gas
    pl = pressure(p.left, g)
    s_ref = math.sqrt(g.gamma * pl / p.left.v)
    s_ref = s_ref if p.family == 1 else -s_ref
    delta = p.delta
    dv = p.dv_tab
    mask = np.abs(dv) >= 1e-6 * np.max(np.abs(dv))
    du = -p.sigma * dv
    ratio_u = np.abs(du[mask] - s_ref * dv[mask]) / (delta * np.abs(dv[mask]))
    ratio_th = np.abs(
        p.dtheta_tab[mask] + (g.gamma - 1.0) * pl / g.R * dv[mask]
    ) / (delta * np.abs(dv[mask]))
    return float(np.max(ratio_u)), float(np.max(ratio_th))


# --------------------------------------------------------------------------
# viscous contact wave
# --------------------------------------------------------------------------

def contact_diffusivity(p_star: float, g: GasParams) -> float:
    return (g.gamma - 1.0) * g.kappa * p_star / (g.R * g.R * g.gamma)


@dataclass
class ContactWave:
    """Self-similar temperature profile Theta(xi), xi = x / sqrt(1+t)."""

    theta_left: float
    theta_right: float
    p_star: float
    u_star: float
    alpha: float
    xi_grid: np.ndarray
    Theta_tab: np.ndarray
    dTheta_tab: np.ndarray
    gas: GasParams

    @property
    def amplitude(self) -> float:
        return abs(self.theta_right - self.theta_left)

    @property
    def span(self) -> float:
        return float(self.xi_grid[-1])

    @cached_property
    def _ith(self):
        return _ClampedPchip(self.xi_grid, self.Theta_tab)

    @cached_property
    def _idth(self):
        return _ClampedPchip(self.xi_grid, self.dTheta_tab)

    def Theta(self, xi):
        return self._ith(xi)

    def dTheta(self, xi):
        out = self._idth(xi)
        return np.where(np.abs(xi) > self.span, 0.0, out)

    def d2Theta(self, xi, Theta=None, dTheta=None):
        Th = self._ith(xi) if Theta is None else Theta
        dTh = self.dTheta(xi) if dTheta is None else dTheta
        return dTh * dTh / Th - xi * Th * dTh / (2.0 * self.alpha)

    def d3Theta(self, xi, Theta=None, dTheta=None):
        Th = self._ith(xi) if Theta is None else Theta
        dTh = self.dTheta(xi) if dTheta is None else dTheta
        d2 = self.d2Theta(xi, Th, dTh)
        return (
            2.0 * dTh * d2 / Th
            - dTh ** 3 / Th ** 2
            - (Th * dTh + xi * dTh * dTh + xi * Th * d2) / (2.0 * self.alpha)
        )


def solve_contact_wave(theta_star: float, theta_starstar: float, p_star: float,
                       u_star: float, g: GasParams, span: float | None = None,
                       tol: float = 1e-8, n_tab: int = 8193,
                       method: str = "shooting") -> ContactWave:
    """Solve the self-similar nonlinear-diffusion two-point problem.

    Shooting integrates (Theta, ln|Theta'|) from -L and bisects on the
    launch log-derivative; collocation is used as a fallback.
    """
    if theta_star <= 0 or theta_starstar <= 0:
        raise InvalidStateError("contact end temperatures must be positive")
    alpha = contact_diffusivity(p_star, g)
    amp = abs(theta_starstar - theta_star)
    L = span if span is not None else 12.0 * math.sqrt(
        2.0 * alpha / min(theta_star, theta_starstar)
    )
    xi = np.linspace(-L, L, n_tab)

    if amp <= 1e-13 * theta_star:
        return ContactWave(theta_star, theta_starstar, p_star, u_star, alpha,
                           xi, np.full(n_tab, theta_star), np.zeros(n_tab), g)

    if method == "shooting":
        try:
            Theta, dTheta = _contact_shoot(theta_star, theta_starstar, alpha, L, xi)
        except NonConvergenceError:
            Theta, dTheta = _contact_collocate(theta_star, theta_starstar, alpha, L, xi)
    elif method == "collocation":
        Theta, dTheta = _contact_collocate(theta_star, theta_starstar, alpha, L, xi)
    else:
        raise ValueError(f"unknown contact solver {method!r}")

    # the exact solution is strictly monotone; remove ulp-level noise in the
    # flat tails so the tabulation honors that invariant
    if theta_starstar >= theta_star:
        Theta = np.maximum.accumulate(Theta)
    else:
        Theta = np.minimum.accumulate(Theta)
    cw = ContactWave(theta_star, theta_starstar, p_star, u_star, alpha,
                     xi, Theta, dTheta, g)
    if abs(Theta[0] - theta_star) > 1e-8 * amp or abs(Theta[-1] - theta_starstar) > 1e-8 * amp:
        raise NonConvergenceError("contact endpoints missed beyond tolerance")
    if max(abs(dTheta[0]), abs(dTheta[-1])) > 1e-6 * amp:
        raise NonConvergenceError(
            "contact span too small: endpoint derivative above 1e-6 * amplitude"
        )
    resid = contact_ode_residual(cw)
    if resid > tol:
        raise NonConvergenceError(f"contact residual {resid:.3e} exceeds {tol}")
    return cw


def _contact_shoot(th_l, th_r, alpha, L, xi):
    S = 1.0 if th_r > th_l else -1.0
    amp = abs(th_r - th_l)
    th_min = min(th_l, th_r)
    overshoot_level = max(th_l, th_r) + 2.0 * amp

    def rhs(x, z):
        Th, W = z
        e = math.exp(min(W, 500.0))
        return (S * e, S * e / Th - x * Th / (2.0 * alpha))

    def blow(x, z):
        return (z[0] - overshoot_level) * S
    blow.terminal = True
    blow.direction = 1

    def shot(w0, dense=False):
        sol = solve_ivp(rhs, (-L, L), [th_l, w0], method="DOP853",
                        rtol=1e-12, atol=[1e-14, 1e-9], events=blow,
                        dense_output=dense)
        if sol.status == 1:     # ran away past the far state
            return None, sol
        return float(sol.y[0, -1]), sol

    def fshot(w0):
        end, _ = shot(w0)
        return math.inf * S if end is None else (end - th_r) * S

    sigma_g = math.sqrt(2.0 * alpha / th_min)
    w_hi = math.log(amp / sigma_g) + 3.0
    tries = 0
    while fshot(w_hi) < 0:
        w_hi += 5.0
        tries += 1
        if tries > 40:
            raise NonConvergenceError("contact shooting: no overshoot bracket")
    w_lo = w_hi - 5.0
    tries = 0
    while fshot(w_lo) >= 0:
        w_lo -= 5.0
        tries += 1
        if tries > 80:
            raise NonConvergenceError("contact shooting: no undershoot bracket")
    for _ in range(200):
        if w_hi - w_lo <= 1e-13 * max(1.0, abs(w_lo)):
            break
        mid = 0.5 * (w_lo + w_hi)
        if fshot(mid) < 0:
            w_lo = mid
        else:
            w_hi = mid
    w0 = 0.5 * (w_lo + w_hi)
    end, sol = shot(w0, dense=True)
    if end is None:
        end, sol = shot(w_lo, dense=True)
        if end is None:
            raise NonConvergenceError("contact shooting: bisection failed")
    z = sol.sol(xi)
    Theta = z[0]
    dTheta = S * np.exp(np.minimum(z[1], 500.0))
    return Theta, dTheta


def _contact_collocate(th_l, th_r, alpha, L, xi):
    def rhs(x, z):
        Th, dTh = z
        return np.vstack([dTh, dTh * dTh / Th - x * Th * dTh / (2.0 * alpha)])

    def bc(za, zb):
        return np.array([za[0] - th_l, zb[0] - th_r])

    x0 = np.linspace(-L, L, 401)
    sigma_g = math.sqrt(2.0 * alpha / min(th_l, th_r))
    from scipy.special import erf
    guess_th = th_l + (th_r - th_l) * 0.5 * (1.0 + erf(x0 / (2.0 * sigma_g)))
    guess_dth = np.gradient(guess_th, x0)
    sol = solve_bvp(rhs, bc, x0, np.vstack([guess_th, guess_dth]),
                    tol=1e-12, max_nodes=200000)
    if not sol.success:
        raise NonConvergenceError(f"contact collocation failed: {sol.message}")
    z = sol.sol(xi)
    return z[0], z[1]


def contact_ode_residual(cw: ContactWave) -> float:
    """Defect of -(xi/2) Theta' = alpha (Theta'/Theta)' by finite differences."""
    h = cw.xi_grid[1] - cw.xi_grid[0]
    ratio = cw.dTheta_tab / cw.Theta_tab
    dratio = _fd_derivative(ratio, h)
    lhs = -(cw.xi_grid[3:-3] / 2.0) * cw.dTheta_tab[3:-3]
    return float(np.max(np.abs(lhs - cw.alpha * dratio)))


def contact_tail_fit(cw: ContactWave, lo: float = 1e-11, hi: float = 1e-3):
    """Slope and R^2 of log|Theta - endpoint| against xi^2 in the right tail.

    The window keeps deviations above the roundoff floor; far beyond it the
    tabulated tail is numerically flat and carries no signal.
    """
    amp = cw.amplitude
    dev = np.abs(cw.Theta_tab - cw.theta_right)
    mask = (cw.xi_grid > 0) & (dev > lo * amp) & (dev < hi * amp)
    if np.count_nonzero(mask) < 8:
        raise NonConvergenceError("too few contact tail samples")
    slope, r2 = _linfit_r2(cw.xi_grid[mask] ** 2, np.log(dev[mask]))
    return slope, r2


def sample_contact_fields(cw: ContactWave, t: float, x_grid: np.ndarray,
                          g: GasParams):
    """(v, u, theta) of the diffusive wave at time t on the given grid."""
    s = math.sqrt(1.0 + t)
    xi = np.asarray(x_grid) / s
    Th = cw.Theta(xi)
    dTh = cw.dTheta(xi)
    v = g.R * Th / cw.p_star
    beta = (g.gamma - 1.0) * g.kappa / (g.R * g.gamma)
    u = cw.u_star + beta * (dTh / Th) / s
    return v, u, Th


# --------------------------------------------------------------------------
# composite wave
# --------------------------------------------------------------------------

@dataclass
class WaveSlice:
    """One wave's contribution with enough derivatives for the residual terms."""

    v: np.ndarray
    u: np.ndarray
    th: np.ndarray
    vx: np.ndarray
    ux: np.ndarray
    thx: np.ndarray
    vxx: np.ndarray
    uxx: np.ndarray
    thxx: np.ndarray
    u_t: np.ndarray = None


@dataclass
class CompositePieces:
    """Per-wave slices plus the assembled composite and its derivatives."""

    shock1: WaveSlice
    contact: WaveSlice
    shock3: WaveSlice
    v: np.ndarray
    u: np.ndarray
    th: np.ndarray
    vx: np.ndarray
    ux: np.ndarray
    thx: np.ndarray
    vxx: np.ndarray
    uxx: np.ndarray
    thxx: np.ndarray


class CompositeWave:
    """Superposition of the two shifted shock profiles and the contact wave."""

    def __init__(self, pattern: WavePattern, shock1: ShockProfile | None,
                 shock3: ShockProfile | None, contact: ContactWave,
                 g: GasParams):
        self.pattern = pattern
        self.shock1 = shock1
        self.shock3 = shock3
        self.contact = contact
        self.gas = g
        self._off_v = pattern.mid_left.v + pattern.mid_right.v
        self._off_u = pattern.mid_left.u + pattern.mid_right.u
        self._off_th = pattern.mid_left.theta + pattern.mid_right.theta

    def _shock_fields(self, profile, const_state, x, shift):
        n = np.shape(x)[0]
        if profile is None:
            zero = np.zeros(n)
            return (np.full(n, const_state.v), np.full(n, const_state.u),
                    np.full(n, const_state.theta), zero, zero, zero)
        xi = x - shift
        v = profile.v(xi)
        th = profile.theta(xi)
        dv = profile.dv(xi)
        dth = profile.dtheta(xi)
        u = profile._ode.slaved_u(v)
        du = -profile.sigma * dv
        return v, u, th, dv, du, dth

    def sample(self, t: float, x_grid: np.ndarray, X1: float, X3: float):
        """(vbar, ubar, thetabar) on the grid at time t with the given shifts."""
        pat = self.pattern
        x = np.asarray(x_grid, dtype=float)
        v1, u1, th1, *_ = self._shock_fields(self.shock1, pat.mid_left, x,
                                             pat.sigma1 * t + X1)
        v3, u3, th3, *_ = self._shock_fields(self.shock3, pat.mid_right, x,
                                             pat.sigma3 * t + X3)
        vD, uD, thD = sample_contact_fields(self.contact, t, x, self.gas)
        return (v1 + vD + v3 - self._off_v,
                u1 + uD + u3 - self._off_u,
                th1 + thD + th3 - self._off_th)

    def pieces(self, t: float, x_grid: np.ndarray, X1: float, X3: float) -> CompositePieces:
        """Per-wave fields with first and second derivatives, plus the
        assembled composite (middle constants subtracted)."""
        pat = self.pattern
        g = self.gas
        x = np.asarray(x_grid, dtype=float)
        slices = []
        for profile, const_state, shift in (
            (self.shock1, pat.mid_left, pat.sigma1 * t + X1),
            (self.shock3, pat.mid_right, pat.sigma3 * t + X3),
        ):
            v, u, th, dv, du, dth = self._shock_fields(profile, const_state, x, shift)
            if profile is None:
                z = np.zeros_like(x)
                slices.append(WaveSlice(v, u, th, dv, du, dth, z, z.copy(), z.copy()))
            else:
                d2v, d2u, d2th = profile.second_derivatives(x - shift)
                slices.append(WaveSlice(v, u, th, dv, du, dth, d2v, d2u, d2th))
        w1, w3 = slices

        cw = self.contact
        s = math.sqrt(1.0 + t)
        zeta = x / s
        Th = cw.Theta(zeta)
        dTh = cw.dTheta(zeta)
        d2Th = cw.d2Theta(zeta, Th, dTh)
        d3Th = cw.d3Theta(zeta, Th, dTh)
        G = dTh / Th
        dG = d2Th / Th - G * G
        d2G = d3Th / Th - 3.0 * d2Th * dTh / Th ** 2 + 2.0 * dTh ** 3 / Th ** 3
        beta = (g.gamma - 1.0) * g.kappa / (g.R * g.gamma)
        vD = g.R * Th / cw.p_star
        uD = cw.u_star + beta * G / s
        wc = WaveSlice(
            v=vD, u=uD, th=Th,
            vx=g.R * dTh / (cw.p_star * s), ux=beta * dG / s ** 2, thx=dTh / s,
            vxx=g.R * d2Th / (cw.p_star * s ** 2), uxx=beta * d2G / s ** 3,
            thxx=d2Th / s ** 2,
            u_t=-beta * (G + zeta * dG) / (2.0 * s ** 3),
        )
        return CompositePieces(
            shock1=w1, contact=wc, shock3=w3,
            v=w1.v + wc.v + w3.v - self._off_v,
            u=w1.u + wc.u + w3.u - self._off_u,
            th=w1.th + wc.th + w3.th - self._off_th,
            vx=w1.vx + wc.vx + w3.vx,
            ux=w1.ux + wc.ux + w3.ux,
            thx=w1.thx + wc.thx + w3.thx,
            vxx=w1.vxx + wc.vxx + w3.vxx,
            uxx=w1.uxx + wc.uxx + w3.uxx,
            thxx=w1.thxx + wc.thxx + w3.thxx,
        )


def sample_composite(pattern: WavePattern, shock1: ShockProfile | None,
                     shock3: ShockProfile | None, contact: ContactWave,
                     X1: float, X3: float, t: float, x_grid: np.ndarray,
                     g: GasParams):
    """Composite-wave fields; thin wrapper over CompositeWave.sample."""
    return CompositeWave(pattern, shock1, shock3, contact, g).sample(t, x_grid, X1, X3)
