"""Planar state types and the Cartesian/polar correspondence.

The target sits at the origin of the world frame; every Cartesian state is
target-relative.  The polar picture uses the range r and the bearing angle
theta between the target-to-UAV reference direction and the UAV heading,
linked to the heading psi and the reference angle phi = atan2(y, x) by

    theta = pi - phi + psi        (mod 2*pi)

which gives the range rate rdot = -V*cos(theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Wrap a finite angle (radians) into [0, 2*pi)."""
    if not math.isfinite(a):
        raise ValueError(f"angle must be finite, got {a!r}")
    w = a % TWO_PI
    # a tiny negative input can round the modulo up to exactly 2*pi
    if w >= TWO_PI:
        w -= TWO_PI
    return w


@dataclass(frozen=True)
class CartesianState:
    """UAV planar position and heading, target at the origin.

    psi is measured from the +x axis and is stored wrapped to [0, 2*pi).
    """

    x: float
    y: float
    psi: float

    def __post_init__(self):
        object.__setattr__(self, "psi", wrap_angle(self.psi))


@dataclass(frozen=True)
class PolarState:
    """Reduced state (r, theta): range to the target and bearing angle."""

    r: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0.0):
            raise ValueError(f"range must be positive and finite, got {self.r!r}")
        object.__setattr__(self, "theta", wrap_angle(self.theta))


def cart_to_polar(s: CartesianState) -> PolarState:
    """Convert a Cartesian state to (r, theta).

    Raises ValueError for a zero-range state (UAV on top of the target),
    where the reference angle phi is undefined.
    """
    r = math.hypot(s.x, s.y)
    if r == 0.0:
        raise ValueError("zero range: (x, y) = (0, 0) has no polar image")
    phi = math.atan2(s.y, s.x)
    return PolarState(r, wrap_angle(math.pi - phi + s.psi))


def polar_to_cart(p: PolarState, phi: float = 0.0) -> CartesianState:
    """Place a polar state back in the plane at reference angle phi.

    (r, theta) only fixes the state up to a rotation about the target, so
    the caller picks phi; the default puts the UAV on the +x axis.
    """
    return CartesianState(
        x=p.r * math.cos(phi),
        y=p.r * math.sin(phi),
        psi=wrap_angle(p.theta + phi - math.pi),
    )


def range_rate(theta: float, V: float) -> float:
    """Range rate -V*cos(theta) of a UAV flying at speed V with bearing theta."""
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    if not (math.isfinite(V) and V > 0.0):
        raise ValueError(f"speed must be positive and finite, got {V!r}")
    return -V * math.cos(theta)
