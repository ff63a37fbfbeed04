"""Derived quantities of the closed loop: equilibrium radii, the recurrence
Lyapunov function and its generator drift, recurrent-set boundaries, and the
expected-recurrence-time bound.

Notation used throughout (all derived from ControllerParams):

    r_s              singular radius, sqrt(r_d^2 - 1/k^2)
    r_i-, r_i+       unstable inner circular equilibria, roots in (0, r_s) of
                     k^2 r^4 - k^2 r_s^2 r^2 + r_s^2 = 0 (exist iff k >= sqrt(5)/r_d)
    V(r, theta)      (k/V)|r - r_s| + (theta/V) sgn(r - r_s) + 2 pi / V
    LV(r, theta)     drift of V along the noisy closed loop,
                     sin(theta)/r * sgn(r - r_s)
                       - (k/r)   sqrt(r^2 - r_s^2)  for r > r_s
                       - (k/r_s) sqrt(r_s^2 - r^2)  for r < r_s
    g(r)             worst-case inner drift 1/r - (k/r_s) sqrt(r_s^2 - r^2)

The recurrent set for a drift margin eps collects the regions where LV > -eps
cannot be excluded; outside it LV <= -eps, which bounds the expected hitting
time by V(r0, theta0)/eps.

All root-finding is bracketed bisection with brackets fixed by the analytic
monotonicity of the functions involved; brackets are narrowed essentially to
machine precision (well inside the 1e-10 contract) so that residuals in the
defining polynomials stay below 1e-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .control import ControllerParams
from .geometry import TWO_PI, wrap_angle

_SQRT5 = math.sqrt(5.0)


class NoSolutionError(ValueError):
    """Requested quantity does not exist for these parameters."""


def _bisect(f, lo: float, hi: float, max_iter: int = 200) -> float:
    """Bracketed bisection; the bracket must change sign between lo and hi."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise NoSolutionError(f"no sign change on bracket ({lo}, {hi})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# inner equilibrium radii


@dataclass(frozen=True)
class InnerRadii:
    """The two unstable inner orbit radii, 0 < r_i_minus <= r_i_plus < r_s."""

    r_i_minus: float
    r_i_plus: float


def inner_radii(p: ControllerParams) -> InnerRadii | None:
    """Roots of k^2 r^4 - k^2 r_s^2 r^2 + r_s^2 = 0 in (0, r_s), or None.

    None when the inner region is empty (r_s = 0, i.e. k = 1/r_d) or the
    discriminant is negative (k < sqrt(5)/r_d).  A discriminant within
    rounding of zero is treated as the double root r_i^2 = r_s^2 / 2.
    """
    rs2 = p.r_s * p.r_s
    if rs2 <= 0.0:
        return None
    disc = rs2 * rs2 - 4.0 * rs2 / (p.k * p.k)
    if disc < 0.0:
        if disc < -1e-9 * rs2 * rs2:
            return None
        disc = 0.0
    sq = math.sqrt(disc)
    return InnerRadii(
        r_i_minus=math.sqrt(0.5 * (rs2 - sq)),
        r_i_plus=math.sqrt(0.5 * (rs2 + sq)),
    )


def inner_radius_residual(p: ControllerParams, r: float) -> float:
    """Value of the defining quartic k^2 r^4 - k^2 r_s^2 r^2 + r_s^2 at r."""
    k2 = p.k * p.k
    rs2 = p.r_s * p.r_s
    return k2 * r**4 - k2 * rs2 * r * r + rs2


# ---------------------------------------------------------------------------
# Lyapunov function and generator drift


def lyapunov(p: ControllerParams, r: float, theta: float) -> float:
    """Recurrence Lyapunov function; sgn(0) is taken as 0 at r = r_s."""
    if not (r > 0.0):
        raise ValueError(f"range must be positive, got {r}")
    theta = wrap_angle(theta)
    d = r - p.r_s
    sgn = 0.0 if d == 0.0 else math.copysign(1.0, d)
    return (p.k / p.V) * abs(d) + (theta / p.V) * sgn + TWO_PI / p.V


def generator_lyapunov(p: ControllerParams, r: float, theta: float) -> float:
    """Drift LV of the Lyapunov function along the noisy closed loop.

    The diffusion term contributes nothing (V is linear in theta), so LV does
    not depend on the noise level.  Undefined on the kink r = r_s, which lies
    inside every recurrent set.
    """
    if not (r > 0.0):
        raise ValueError(f"range must be positive, got {r}")
    if r == p.r_s:
        raise ValueError("generator undefined at the singular radius r = r_s")
    rs = p.r_s
    if r > rs:
        return math.sin(theta) / r - p.k * math.sqrt(max(r * r - rs * rs, 0.0)) / r
    return -math.sin(theta) / r - p.k * math.sqrt(max(rs * rs - r * r, 0.0)) / rs


# ---------------------------------------------------------------------------
# epsilon-level boundaries


def r_a_epsilon(p: ControllerParams, eps: float) -> float:
    """Outer recurrent-set radius: worst-case LV equals -eps at this r > r_a.

    Closed form (eps + sqrt(k^2 r_a^2 (k^2 - eps^2) + eps^2)) / (k^2 - eps^2),
    valid for 0 < eps < k.
    """
    if not (eps > 0.0):
        raise ValueError(f"eps must be positive, got {eps}")
    if eps >= p.k:
        raise NoSolutionError(f"no outer boundary: eps={eps} must be below k={p.k}")
    k2 = p.k * p.k
    e2 = eps * eps
    return (eps + math.sqrt(k2 * p.r_d * p.r_d * (k2 - e2) + e2)) / (k2 - e2)


def outer_margin_residual(p: ControllerParams, eps: float, r: float) -> float:
    """(1/r)(1 - k sqrt(r^2 - r_s^2)) + eps; zero at r = r_a_epsilon."""
    return (1.0 - p.k * math.sqrt(max(r * r - p.r_s * p.r_s, 0.0))) / r + eps


def inner_worst_drift(p: ControllerParams, r: float) -> float:
    """g(r) = 1/r - (k/r_s) sqrt(r_s^2 - r^2), the theta = 3pi/2 inner drift."""
    if not (0.0 < r < p.r_s):
        raise ValueError(f"r must lie in (0, r_s) = (0, {p.r_s}), got {r}")
    return 1.0 / r - p.k * math.sqrt(p.r_s * p.r_s - r * r) / p.r_s


def inner_drift_minimum(p: ControllerParams) -> tuple[float, float]:
    """Interior minimizer r_star of g and its value g(r_star).

    r_star^2 is the unique real root of y^3 + (r_s^2/k^2) y - r_s^4/k^2 = 0,
    found by bisection on (0, r_s^2); the cubic is strictly increasing there.
    """
    if p.r_s <= 0.0:
        raise NoSolutionError("inner region empty: r_s = 0")
    s2 = p.r_s * p.r_s
    a = s2 / (p.k * p.k)

    def cubic(y: float) -> float:
        return y * y * y + a * y - a * s2

    y = _bisect(cubic, 0.0, s2)
    r_star = math.sqrt(y)
    return r_star, inner_worst_drift(p, r_star)


def epsilon_max(p: ControllerParams) -> float:
    """Largest usable drift margin, min{|g(r_star)|, 1/r_d}.

    Requires the inner equilibria to exist (k >= sqrt(5)/r_d); at the
    existence boundary the margin is zero.
    """
    if inner_radii(p) is None:
        raise NoSolutionError(
            f"epsilon_max undefined: inner region empty for k={p.k} "
            f"(needs k >= sqrt(5)/r_d = {_SQRT5 / p.r_d})"
        )
    _, g_min = inner_drift_minimum(p)
    return min(abs(g_min), 1.0 / p.r_d)


def inner_radii_epsilon(p: ControllerParams, eps: float) -> tuple[float, float] | None:
    """Roots of g(r) = -eps in (r_i-, r_i+), or None when eps exceeds |g(r_star)|.

    Bisection on g + eps over the brackets (r_i-, r_star) and (r_star, r_i+),
    where g is monotone on each side of its minimum.
    """
    if not (eps > 0.0):
        raise ValueError(f"eps must be positive, got {eps}")
    radii = inner_radii(p)
    if radii is None:
        return None
    r_star, g_min = inner_drift_minimum(p)
    if g_min + eps >= 0.0:
        return None

    def h(r: float) -> float:
        return inner_worst_drift(p, r) + eps

    lo = _bisect(h, radii.r_i_minus, r_star)
    hi = _bisect(h, r_star, radii.r_i_plus)
    return lo, hi


def inner_epsilon_quartic_residual(p: ControllerParams, eps: float, r: float) -> float:
    """Residual of the quartic satisfied by the g(r) = -eps roots.

    Squaring g(r) = -eps gives
        r^4 + (r_s^2/k^2)(eps^2 - k^2) r^2 + 2 eps (r_s^2/k^2) r + r_s^2/k^2 = 0
    (note the linear coefficient comes out positive).
    """
    a = p.r_s * p.r_s / (p.k * p.k)
    return r**4 + a * (eps * eps - p.k * p.k) * r * r + 2.0 * eps * a * r + a


# ---------------------------------------------------------------------------
# recurrent set and recurrence-time bound

VARIANTS = ("full-annulus", "strict-theta")


@dataclass(frozen=True)
class RecurrentSet:
    """Region the noisy loop re-enters in finite expected time.

    Union of an inner piece (0, r_i_minus_eps) x (pi, 2pi) and an outer piece
    around the orbit radius.  The `strict-theta` variant restricts the outer
    piece to theta in (0, pi); the default `full-annulus` variant takes the
    whole annulus (r_i_plus_eps, r_a_eps), which is the version whose
    complement verifiably satisfies LV <= -eps (the strict variant's
    complement does not, as the grid check reports).

    contains() accepts scalars or numpy arrays; theta must be in [0, 2pi).
    """

    epsilon: float
    r_i_minus_eps: float
    r_i_plus_eps: float
    r_a_eps: float
    variant: str = "full-annulus"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")

    def contains(self, r, theta):
        inner = (r > 0.0) & (r < self.r_i_minus_eps) & (theta > math.pi) & (theta < TWO_PI)
        outer = (r > self.r_i_plus_eps) & (r < self.r_a_eps)
        if self.variant == "strict-theta":
            outer = outer & (theta > 0.0) & (theta < math.pi)
        return inner | outer


def recurrent_set(
    p: ControllerParams, eps: float, variant: str = "full-annulus"
) -> RecurrentSet:
    """Assemble the recurrent set for drift margin eps.

    Valid for 0 < eps <= epsilon_max(p) (and eps < k); outside that range a
    NoSolutionError names the computed ceiling.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    e_max = epsilon_max(p)
    if eps > e_max:
        raise NoSolutionError(
            f"eps={eps} too large: epsilon_max={e_max:.6g} for k={p.k}, r_d={p.r_d}"
        )
    r_a_eps = r_a_epsilon(p, eps)
    inner = inner_radii_epsilon(p, eps)
    if inner is None:
        raise NoSolutionError(
            f"eps={eps} leaves no inner bracket (inner drift margin "
            f"{abs(inner_drift_minimum(p)[1]):.6g})"
        )
    return RecurrentSet(
        epsilon=eps,
        r_i_minus_eps=inner[0],
        r_i_plus_eps=inner[1],
        r_a_eps=r_a_eps,
        variant=variant,
    )


def recurrence_bound(
    p: ControllerParams,
    eps: float,
    r0: float,
    theta0: float,
    variant: str = "full-annulus",
) -> tuple[float, bool]:
    """Expected-recurrence-time bound (k|r0 - r_s| + theta0 + 2pi)/(V eps).

    Returns (bound, starts_inside).  A start already inside the recurrent set
    yields (0.0, True) rather than an error.
    """
    if not (r0 > 0.0):
        raise ValueError(f"r0 must be positive, got {r0}")
    theta0 = wrap_angle(theta0)
    target = recurrent_set(p, eps, variant)
    if bool(target.contains(r0, theta0)):
        return 0.0, True
    bound = (p.k * abs(r0 - p.r_s) + theta0 + TWO_PI) / (p.V * eps)
    return bound, False


# ---------------------------------------------------------------------------
# grid verification of the drift inequality


@dataclass(frozen=True)
class GridCheckResult:
    """Outcome of a drift-inequality scan over an (r, theta) grid.

    violations holds one row (r, theta, LV) per grid point outside the set
    where LV > -eps + tol, sorted by decreasing LV.
    """

    violations: np.ndarray
    n_checked: int
    n_outside: int

    @property
    def n_violations(self) -> int:
        return int(self.violations.shape[0])

    @property
    def n_positive(self) -> int:
        """Points where the drift is outright positive, not just above -eps."""
        return int(np.count_nonzero(self.violations[:, 2] > 0.0)) if self.n_violations else 0


def generator_grid_check(
    p: ControllerParams,
    eps: float,
    variant: str = "full-annulus",
    r_start: float = 0.01,
    r_stop: float = 15.0,
    dr: float = 0.01,
    dtheta: float = 0.005,
    singular_margin: float = 1e-6,
    tol: float = 1e-9,
) -> GridCheckResult:
    """Scan LV <= -eps + tol over a grid, skipping points inside the set.

    Grid radii within singular_margin of r_s are excluded (LV is undefined
    there).  Vectorized; the default grid is ~1.9M points.
    """
    target = recurrent_set(p, eps, variant)
    n_r = int(round((r_stop - r_start) / dr))
    r = r_start + dr * np.arange(n_r + 1)
    r = r[np.abs(r - p.r_s) >= singular_margin]
    theta = dtheta * np.arange(int(math.ceil(TWO_PI / dtheta)))
    theta = theta[theta < TWO_PI]

    rc = r[:, None]
    rs = p.r_s
    sgn = np.where(rc > rs, 1.0, -1.0)
    radial = np.where(
        rc > rs,
        -p.k * np.sqrt(np.clip(rc * rc - rs * rs, 0.0, None)) / rc,
        -p.k * np.sqrt(np.clip(rs * rs - rc * rc, 0.0, None)) / rs,
    )
    lv = (sgn / rc) * np.sin(theta)[None, :] + radial

    outside = ~target.contains(rc, theta[None, :])
    bad = outside & (lv > -eps + tol)
    n_bad = int(np.count_nonzero(bad))
    if n_bad:
        i, j = np.nonzero(bad)
        rows = np.column_stack([r[i], theta[j], lv[bad]])
        rows = rows[np.argsort(-rows[:, 2])]
    else:
        rows = np.empty((0, 3))
    return GridCheckResult(
        violations=rows,
        n_checked=int(lv.size),
        n_outside=int(np.count_nonzero(outside)),
    )
