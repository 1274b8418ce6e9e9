"""Inviscid wave-curve algebra and the two-shock + contact wave pattern.

Shock curves are solved in closed form: eliminating the velocity from the
jump conditions leaves a relation linear in the unknown temperature,

    R/(gamma-1) * (theta_o - theta_a) + (p_o + p_a)/2 * (v_o - v_a) = 0,

after which the speed follows from sigma^2 = -(p_o - p_a)/(v_o - v_a) and
the velocity from u_o = u_a - sigma (v_o - v_a).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidStateError, LaxConditionError, NonConvergenceError
from .gas import GasParams, ThermoState, pressure, sound_speed, total_energy

_RH_TOL = 1e-10
_CONTACT_TOL = 1e-12
# Relative volume gap below which a shock is treated as zero-strength.
_DEGENERATE_REL = 1e-13


def rankine_hugoniot_residuals(left: ThermoState, right: ThermoState,
                               sigma: float, g: GasParams):
    """Residuals of the three jump conditions for a discontinuity of speed sigma."""
    pl, pr = pressure(left, g), pressure(right, g)
    El, Er = total_energy(left, g), total_energy(right, g)
    r1 = -sigma * (right.v - left.v) - (right.u - left.u)
    r2 = sigma * (right.u - left.u) - (pr - pl)
    r3 = -sigma * (Er - El) + (pr * right.u - pl * left.u)
    return r1, r2, r3


def characteristic_speed(s: ThermoState, family: int, g: GasParams) -> float:
    """Acoustic characteristic speed -+ sqrt(gamma p / v) of the given family."""
    c = sound_speed(s, g)
    return -c if family == 1 else c


def _check_family(family: int) -> None:
    if family not in (1, 3):
        raise ValueError(f"family must be 1 or 3, got {family}")


def _check_lax(family: int, side: str, v_anchor: float, v_other: float) -> None:
    """Lax ordering: v_l > v_r for 1-shocks, v_l < v_r for 3-shocks."""
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    v_l, v_r = (v_anchor, v_other) if side == "left" else (v_other, v_anchor)
    ok = v_l >= v_r if family == 1 else v_l <= v_r
    if not ok:
        raise LaxConditionError(
            f"{family}-shock needs v_l {'>' if family == 1 else '<'} v_r, "
            f"got v_l={v_l}, v_r={v_r}"
        )


def hugoniot_theta(anchor: ThermoState, v_other: float, g: GasParams) -> float:
    """Temperature on the shock curve through `anchor` at volume `v_other`."""
    c = g.R / (g.gamma - 1.0)
    p_a = pressure(anchor, g)
    dv = v_other - anchor.v
    num = c * anchor.theta - 0.5 * p_a * dv
    den = c + g.R * dv / (2.0 * v_other)
    if den <= 0.0 or num <= 0.0:
        raise InvalidStateError(
            f"shock curve leaves the positive cone at v={v_other} from v={anchor.v}"
        )
    return num / den


def hugoniot_locus(anchor: ThermoState, v_other: float, family: int, side: str,
                   g: GasParams):
    """Other endpoint and speed of the admissible `family`-shock through `anchor`.

    Parameters
    ----------
    anchor : ThermoState
        Known endpoint.
    v_other : float
        Specific volume of the sought endpoint.
    family : int
        1 or 3.
    side : str
        'left' if the anchor is the left endpoint of the jump, else 'right'.

    Returns
    -------
    (ThermoState, float)
        The other endpoint and the shock speed.  Zero-strength input returns
        the anchor itself with the characteristic speed of the family.
    """
    _check_family(family)
    if not v_other > 0:
        raise InvalidStateError(f"v_other must be positive, got {v_other}")
    _check_lax(family, side, anchor.v, v_other)

    if abs(v_other - anchor.v) <= _DEGENERATE_REL * anchor.v:
        return anchor, characteristic_speed(anchor, family, g)

    theta_o = hugoniot_theta(anchor, v_other, g)
    p_a = pressure(anchor, g)
    p_o = g.R * theta_o / v_other
    q = -(p_o - p_a) / (v_other - anchor.v)
    if q <= 0.0:
        raise LaxConditionError(
            f"undefined shock speed: dp/dv >= 0 between v={anchor.v} and v={v_other}"
        )
    sigma = (-1.0 if family == 1 else 1.0) * math.sqrt(q)
    u_o = anchor.u - sigma * (v_other - anchor.v)
    return ThermoState(v_other, u_o, theta_o), sigma


def contact_partner(anchor: ThermoState, v_other: float, g: GasParams) -> ThermoState:
    """State on the contact curve through `anchor`: equal velocity and pressure."""
    if not v_other > 0:
        raise InvalidStateError(f"v_other must be positive, got {v_other}")
    return ThermoState(v_other, anchor.u, anchor.theta * v_other / anchor.v)


@dataclass(frozen=True)
class WavePattern:
    """Five-state pattern: 1-shock, 2-contact, 3-shock (left to right)."""

    left: ThermoState
    mid_left: ThermoState
    mid_right: ThermoState
    right: ThermoState
    sigma1: float
    sigma3: float
    delta1: float
    deltaC: float
    delta3: float

    def validate(self, g: GasParams) -> None:
        """Check jump conditions, orderings, and amplitude bookkeeping."""
        if not self.sigma1 < 0:
            raise LaxConditionError(f"sigma1 must be negative, got {self.sigma1}")
        if not self.sigma3 > 0:
            raise LaxConditionError(f"sigma3 must be positive, got {self.sigma3}")
        if self.delta1 > 0:
            res = rankine_hugoniot_residuals(self.left, self.mid_left, self.sigma1, g)
            if max(abs(r) for r in res) > _RH_TOL:
                raise LaxConditionError(f"1-shock jump residuals too large: {res}")
            if not self.left.v > self.mid_left.v:
                raise LaxConditionError("1-shock requires v_left > v_mid_left")
        if self.delta3 > 0:
            res = rankine_hugoniot_residuals(self.mid_right, self.right, self.sigma3, g)
            if max(abs(r) for r in res) > _RH_TOL:
                raise LaxConditionError(f"3-shock jump residuals too large: {res}")
            if not self.mid_right.v < self.right.v:
                raise LaxConditionError("3-shock requires v_mid_right < v_right")
        if abs(self.mid_left.u - self.mid_right.u) > _CONTACT_TOL or (
            abs(pressure(self.mid_left, g) - pressure(self.mid_right, g)) > _CONTACT_TOL
        ):
            raise LaxConditionError("contact states must match in velocity and pressure")
        for name, d, a, b in (
            ("delta1", self.delta1, self.left.v, self.mid_left.v),
            ("deltaC", self.deltaC, self.mid_right.v, self.mid_left.v),
            ("delta3", self.delta3, self.right.v, self.mid_right.v),
        ):
            if abs(d - abs(a - b)) > 1e-14 * max(1.0, abs(a)):
                raise LaxConditionError(f"{name} bookkeeping mismatch: {d} vs {abs(a - b)}")

    def as_dict(self) -> dict:
        def st(s: ThermoState) -> dict:
            return {"v": s.v, "u": s.u, "theta": s.theta}

        return {
            "left": st(self.left),
            "mid_left": st(self.mid_left),
            "mid_right": st(self.mid_right),
            "right": st(self.right),
            "sigma1": self.sigma1,
            "sigma3": self.sigma3,
            "delta1": self.delta1,
            "deltaC": self.deltaC,
            "delta3": self.delta3,
        }


def build_pattern(right: ThermoState, delta1: float, deltaC: float, delta3: float,
                  g: GasParams, contact_increasing: bool = True) -> WavePattern:
    """Assemble the pattern from the right state and the three volume gaps.

    Walks right to left: 3-shock curve down to v* = v_+ - delta3, contact
    curve to v_* (below v* by default, above when `contact_increasing` is
    False), then 1-shock curve up to v_- = v_* + delta1.
    """
    if min(delta1, deltaC, delta3) < 0:
        raise InvalidStateError("amplitudes must be nonnegative")
    mid_right, sigma3 = hugoniot_locus(right, right.v - delta3, 3, "right", g)
    v_star = mid_right.v - deltaC if contact_increasing else mid_right.v + deltaC
    if not v_star > 0:
        raise InvalidStateError("contact amplitude drives the volume nonpositive")
    mid_left = contact_partner(mid_right, v_star, g)
    left, sigma1 = hugoniot_locus(mid_left, mid_left.v + delta1, 1, "right", g)
    if delta1 == 0.0:
        sigma1 = characteristic_speed(mid_left, 1, g)
    if delta3 == 0.0:
        sigma3 = characteristic_speed(right, 3, g)
    pattern = WavePattern(
        left=left, mid_left=mid_left, mid_right=mid_right, right=right,
        sigma1=sigma1, sigma3=sigma3,
        delta1=abs(left.v - mid_left.v),
        deltaC=abs(mid_right.v - mid_left.v),
        delta3=abs(right.v - mid_right.v),
    )
    pattern.validate(g)
    return pattern


def _locus_branch(anchor: ThermoState, w: float, family: int, g: GasParams):
    """Locus values (theta, p, sigma, u) and their w-derivatives.

    Used by the Newton solve; the anchor is the left endpoint for family 1
    and the right endpoint for family 3.
    """
    c = g.R / (g.gamma - 1.0)
    p_a = pressure(anchor, g)
    dv = w - anchor.v
    num = c * anchor.theta - 0.5 * p_a * dv
    den = c + g.R * dv / (2.0 * w)
    if den <= 0.0 or num <= 0.0:
        raise InvalidStateError("Newton iterate left the positive cone")
    theta = num / den
    dnum = -0.5 * p_a
    dden = 0.5 * g.R * anchor.v / (w * w)
    dtheta = (dnum * den - num * dden) / (den * den)
    p = g.R * theta / w
    dp = g.R * (dtheta * w - theta) / (w * w)

    if abs(dv) >= 1e-8 * anchor.v:
        q = -(p - p_a) / dv
        dq = (-dp * dv + (p - p_a)) / (dv * dv)
    else:
        # near the zero-strength point, q has a removable singularity;
        # use the characteristic limit and a small finite difference
        q = g.gamma * p_a / anchor.v if abs(dv) < _DEGENERATE_REL * anchor.v \
            else -(p - p_a) / dv
        h = 1e-6 * anchor.v

        def _q(wx):
            thx = hugoniot_theta(anchor, wx, g)
            px = g.R * thx / wx
            return -(px - p_a) / (wx - anchor.v)

        dq = (_q(w + h) - _q(w - h)) / (2.0 * h)
    if q <= 0.0:
        raise LaxConditionError("undefined shock speed along the Newton path")
    s = -1.0 if family == 1 else 1.0
    sigma = s * math.sqrt(q)
    dsigma = s * dq / (2.0 * math.sqrt(q))
    u = anchor.u - sigma * dv
    du = -dsigma * dv - sigma
    return theta, p, sigma, u, dtheta, dp, dsigma, du


def solve_pattern(left: ThermoState, right: ThermoState, g: GasParams,
                  max_iter: int = 50, tol: float = 1e-10) -> WavePattern:
    """Find the two intermediate volumes connecting `left` to `right`.

    Damped Newton on the middle-state matching conditions: equal velocity
    and equal pressure between the 1-shock curve from the left state and
    the 3-shock curve from the right state.
    """
    same = (
        abs(left.v - right.v) <= _DEGENERATE_REL * right.v
        and abs(left.u - right.u) <= _DEGENERATE_REL * max(1.0, abs(right.u))
        and abs(left.theta - right.theta) <= _DEGENERATE_REL * right.theta
    )
    if same:
        return build_pattern(right, 0.0, 0.0, 0.0, g)

    # acoustic initial guess: linearize both curves about their anchors
    p_l, p_r = pressure(left, g), pressure(right, g)
    z_l = math.sqrt(g.gamma * p_l / left.v)
    z_r = math.sqrt(g.gamma * p_r / right.v)
    p_m = (z_l * p_r + z_r * p_l + z_l * z_r * (left.u - right.u)) / (z_l + z_r)
    p_m = max(p_m, 0.1 * min(p_l, p_r))
    w1 = left.v + (p_m - p_l) / (-g.gamma * p_l / left.v)
    w3 = right.v + (p_m - p_r) / (-g.gamma * p_r / right.v)
    w1 = max(w1, 0.2 * left.v)
    w3 = max(w3, 0.2 * right.v)

    def residual(w1x, w3x):
        th1, pp1, sg1, uu1, dth1, dp1, dsg1, du1 = _locus_branch(left, w1x, 1, g)
        th3, pp3, sg3, uu3, dth3, dp3, dsg3, du3 = _locus_branch(right, w3x, 3, g)
        r = (uu1 - uu3, pp1 - pp3)
        J = ((du1, -du3), (dp1, -dp3))
        return r, J

    r, J = residual(w1, w3)
    rnorm = max(abs(r[0]), abs(r[1]))
    # converge well past `tol` so the assembled pattern meets the tighter
    # contact-matching invariant; quadratic convergence makes this cheap
    target = min(tol, 1e-14)
    for _ in range(max_iter):
        if rnorm <= target:
            break
        det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
        if det == 0.0:
            raise NonConvergenceError("singular Jacobian in pattern Newton")
        dw1 = -(r[0] * J[1][1] - r[1] * J[0][1]) / det
        dw3 = -(J[0][0] * r[1] - J[1][0] * r[0]) / det
        step = 1.0
        w1n = w3n = rn = Jn = None
        for _ in range(40):
            cand1, cand3 = w1 + step * dw1, w3 + step * dw3
            if cand1 <= 0 or cand3 <= 0:
                step *= 0.5
                continue
            try:
                rc, Jc = residual(cand1, cand3)
            except (InvalidStateError, LaxConditionError):
                step *= 0.5
                continue
            w1n, w3n, rn, Jn = cand1, cand3, rc, Jc
            if max(abs(rc[0]), abs(rc[1])) < rnorm or step < 1e-6:
                break
            step *= 0.5
        if w1n is None:
            break  # no admissible step at all; report below
        new_norm = max(abs(rn[0]), abs(rn[1]))
        if new_norm >= rnorm and rnorm <= tol:
            break  # at the roundoff floor, good enough
        w1, w3, r, J = w1n, w3n, rn, Jn
        rnorm = new_norm
    if rnorm > tol:
        raise NonConvergenceError(
            f"pattern Newton did not reach residual {tol} in {max_iter} iterations "
            f"(final residual {rnorm:.3e})"
        )

    # clamp roundoff-sized inadmissible amplitudes to zero, reject real ones
    if w1 > left.v:
        if w1 - left.v <= 1e-10 * left.v:
            w1 = left.v
        else:
            raise LaxConditionError("states require a 1-rarefaction, not a 1-shock")
    if w3 > right.v:
        if w3 - right.v <= 1e-10 * right.v:
            w3 = right.v
        else:
            raise LaxConditionError("states require a 3-rarefaction, not a 3-shock")

    mid_left, sigma1 = hugoniot_locus(left, w1, 1, "left", g)
    mid_right, sigma3 = hugoniot_locus(right, w3, 3, "right", g)
    pattern = WavePattern(
        left=left, mid_left=mid_left, mid_right=mid_right, right=right,
        sigma1=sigma1, sigma3=sigma3,
        delta1=abs(left.v - mid_left.v),
        deltaC=abs(mid_right.v - mid_left.v),
        delta3=abs(right.v - mid_right.v),
    )
    pattern.validate(g)
    return pattern
