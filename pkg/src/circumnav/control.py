"""Saturated smooth heading-rate control from range and range-rate measurements.

The law is the sum of an outer part, active for r > r_s, that steers the UAV
toward the tangent of the circle of radius r_s, and an inner part, active for
r < r_s, that pushes it back out:

    u(r, rdot) = -k*rdot - k*V*cos(asin(r_s/r)) * 1{r > r_s}
                         + k*V*cos(asin(r/r_s)) * 1{r < r_s}

The closed loop does not settle on r_s but on the larger radius r_a with
1/k^2 = r_a^2 - r_s^2, so the gain k and desired radius r_d = r_a determine
r_s = sqrt(r_d^2 - 1/k^2).  |u| <= 2*k*V everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class InfeasibleGainError(ValueError):
    """Gain too small for the desired radius (needs k >= 1/r_d)."""


@dataclass(frozen=True)
class ControllerParams:
    """Controller gain, desired orbit radius, speed, and derived singular radius.

    Build through :func:`make_params`, which validates the inputs and derives
    r_s; the dataclass itself is a plain record.
    """

    k: float
    r_d: float
    V: float
    r_s: float

    @property
    def saturation(self) -> float:
        """Hard bound 2*k*V on |u|."""
        return 2.0 * self.k * self.V


def make_params(k: float, r_d: float, V: float) -> ControllerParams:
    """Validate (k, r_d, V) and derive the singular radius r_s.

    Raises InfeasibleGainError for k < 1/r_d and ValueError for nonpositive
    r_d or V.  r_s is computed as sqrt((k*r_d)^2 - 1)/k, which is exact at
    the feasibility boundary k = 1/r_d (r_s = 0).
    """
    for name, v in (("k", k), ("r_d", r_d), ("V", V)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")
    if r_d <= 0.0:
        raise ValueError(f"desired radius must be positive, got {r_d}")
    if V <= 0.0:
        raise ValueError(f"speed must be positive, got {V}")
    if k * r_d < 1.0:
        raise InfeasibleGainError(
            f"gain k={k} infeasible for r_d={r_d}: need k >= 1/r_d = {1.0 / r_d}"
        )
    r_s = math.sqrt(max((k * r_d) ** 2 - 1.0, 0.0)) / k
    return ControllerParams(k=k, r_d=r_d, V=V, r_s=r_s)


def _cos_asin(z: float) -> float:
    # cos(asin(z)) = sqrt(1 - z^2); clamp against rounding at z ~ 1
    return math.sqrt(max(1.0 - z * z, 0.0))


def control_measured(p: ControllerParams, r: float, r_dot_meas: float) -> float:
    """Heading-rate command from the measured range and range rate.

    Noise may push |r_dot_meas| above V; the formula is applied verbatim,
    matching the additive-noise model u(r, rdot + nu) = u(r, rdot) - k*nu.
    At r = r_s exactly both indicator terms vanish.
    """
    if not (r > 0.0):
        raise ValueError(f"range must be positive, got {r}")
    if not math.isfinite(r_dot_meas):
        raise ValueError(f"range-rate measurement must be finite, got {r_dot_meas!r}")
    u = -p.k * r_dot_meas
    if r > p.r_s:
        u -= p.k * p.V * _cos_asin(p.r_s / r)
    elif r < p.r_s:
        u += p.k * p.V * _cos_asin(r / p.r_s)
    return u


def control_bearing(p: ControllerParams, r: float, theta: float) -> float:
    """Same control written in terms of the bearing angle.

    Equals control_measured(p, r, -V*cos(theta)) up to floating rounding;
    this is the form the (r, theta) drift analysis works with.
    """
    if not (r > 0.0):
        raise ValueError(f"range must be positive, got {r}")
    kv = p.k * p.V
    u = kv * math.cos(theta)
    if r > p.r_s:
        u -= kv * math.sqrt(max(r * r - p.r_s * p.r_s, 0.0)) / r
    elif r < p.r_s:
        u += kv * math.sqrt(max(p.r_s * p.r_s - r * r, 0.0)) / p.r_s
    return u
