"""Closed-loop time evolution.

Three noise semantics are supported, because the closed loop is studied both
as a sampled-data system and as a diffusion:

* ``none``        - deterministic: the controller sees the exact range and
                    range rate, recomputed every ``dt_control`` and held
                    (zero-order hold); the Cartesian unicycle ODE is advanced
                    by classical RK4 at ``dt_integ``.
* ``measurement`` - identical, except the controller sees rdot + nu with one
                    Gaussian draw nu per control interval.
* ``sde``         - Euler-Maruyama on the reduced (r, theta) diffusion
                    d r     = -V cos(theta) dt
                    d theta = (V sin(theta)/r + u(r, theta)) dt - k sigma dxi
                    with the control recomputed every substep.

A constant wind (speed W_s, direction w_d) adds (W_s cos w_d, W_s sin w_d) to
the Cartesian velocity.  Wind breaks the reduction to (r, theta), so it is
only allowed with the Cartesian modes.

Randomness comes from numpy's counter-based Philox generator seeded through
SeedSequence, with normals produced by the ziggurat method
(``Generator.standard_normal``); draws are made as a single block up front so
a stored (config, seed) pair replays a run bit-for-bit.

The recorded ``u`` is the nominal control u(r, rdot_true): the heading rate
actually applied in the noisy modes is u - k*nu, reconstructible from the
``u`` and ``nu`` columns.  Nominal u obeys the 2kV saturation bound; the
noise contribution is unbounded by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .control import ControllerParams, control_bearing, control_measured
from .geometry import CartesianState, PolarState, cart_to_polar, polar_to_cart, wrap_angle

R_MIN = 1e-6  # collision/singularity floor on the range

NOISE_MODES = ("none", "measurement", "sde")
INNER_POLICIES = ("combined", "zero-inside")


@dataclass(frozen=True)
class NoiseModel:
    """Range-rate measurement noise: std dev sigma, mode, and RNG seed."""

    sigma: float = 0.5
    mode: str = "measurement"
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma >= 0.0):
            raise ValueError(f"sigma must be nonnegative and finite, got {self.sigma!r}")
        if self.mode not in NOISE_MODES:
            raise ValueError(f"unknown noise mode {self.mode!r}, expected one of {NOISE_MODES}")


@dataclass(frozen=True)
class WindModel:
    """Constant wind bias of speed w_speed toward direction w_dir."""

    w_speed: float
    w_dir: float

    def __post_init__(self):
        if not (math.isfinite(self.w_speed) and self.w_speed >= 0.0):
            raise ValueError(f"wind speed must be nonnegative, got {self.w_speed!r}")
        object.__setattr__(self, "w_dir", wrap_angle(self.w_dir))


@dataclass(frozen=True)
class SimConfig:
    """Everything one run depends on; a (config, seed) pair is a full replay key."""

    params: ControllerParams
    noise: NoiseModel
    t_final: float
    dt_control: float = 0.5
    dt_integ: float = 0.01
    initial: CartesianState | PolarState = PolarState(20.0, 0.0)
    wind: WindModel | None = None
    inner_policy: str = "combined"

    def __post_init__(self):
        if not (0.0 < self.dt_integ <= self.dt_control <= self.t_final):
            raise ValueError(
                f"need 0 < dt_integ <= dt_control <= t_final, got "
                f"({self.dt_integ}, {self.dt_control}, {self.t_final})"
            )
        ratio = self.dt_control / self.dt_integ
        if abs(ratio - round(ratio)) > 1e-6:
            raise ValueError(
                f"dt_control={self.dt_control} must be an integer multiple "
                f"of dt_integ={self.dt_integ}"
            )
        if self.inner_policy not in INNER_POLICIES:
            raise ValueError(
                f"unknown inner policy {self.inner_policy!r}, expected one of {INNER_POLICIES}"
            )
        if self.noise.mode == "sde" and self.wind is not None and self.wind.w_speed > 0.0:
            raise ValueError(
                "wind is not supported in sde mode: it breaks the (r, theta) reduction"
            )

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt_integ))

    @property
    def control_stride(self) -> int:
        return int(round(self.dt_control / self.dt_integ))


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled record of one run.

    Sample i is the state at t[i]; u[i] and nu[i] are the nominal control and
    noise draw in effect on [t[i], t[i+1]) (the final sample repeats the last
    applied pair).  Arrays are frozen after construction so trajectories can
    be shared freely.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    psi: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    nu: np.ndarray
    config: SimConfig | None = None
    terminated: bool = False

    def __post_init__(self):
        for name in ("t", "x", "y", "psi", "r", "theta", "u", "nu"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = len(self.t)
        if n == 0:
            raise ValueError("empty trajectory")
        if any(len(getattr(self, name)) != n for name in ("x", "y", "psi", "r", "theta", "u", "nu")):
            raise ValueError("trajectory columns must share one length")

    def __len__(self) -> int:
        return len(self.t)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def _wind_components(wind: WindModel | None) -> tuple[float, float]:
    if wind is None or wind.w_speed == 0.0:
        return 0.0, 0.0
    return wind.w_speed * math.cos(wind.w_dir), wind.w_speed * math.sin(wind.w_dir)


def _rk4_cart(
    x: float, y: float, psi: float, u: float, V: float, wx: float, wy: float, h: float
) -> tuple[float, float, float]:
    # u constant over the step, so the psi stages are linear and k2 == k3
    k1x = V * math.cos(psi) + wx
    k1y = V * math.sin(psi) + wy
    pm = psi + 0.5 * h * u
    k2x = V * math.cos(pm) + wx
    k2y = V * math.sin(pm) + wy
    pe = psi + h * u
    k4x = V * math.cos(pe) + wx
    k4y = V * math.sin(pe) + wy
    return (
        x + h / 6.0 * (k1x + 4.0 * k2x + k4x),
        y + h / 6.0 * (k1y + 4.0 * k2y + k4y),
        psi + h * u,
    )


def step_cartesian(
    s: CartesianState, u: float, V: float, wind: WindModel | None, dt: float
) -> CartesianState:
    """One classical RK4 step of the unicycle ODE with u held constant.

    With constant u the exact solution is available in closed form; the RK4
    step matches it to ~1e-10 for dt <= 0.01 at moderate turn rates.
    """
    if not (dt > 0.0):
        raise ValueError(f"dt must be positive, got {dt}")
    wx, wy = _wind_components(wind)
    x, y, psi = _rk4_cart(s.x, s.y, s.psi, u, V, wx, wy, dt)
    return CartesianState(x, y, wrap_angle(psi))


def _initial_cartesian(cfg: SimConfig) -> CartesianState:
    if isinstance(cfg.initial, PolarState):
        # free rotation about the target fixed by placing the UAV on the +x axis
        return polar_to_cart(cfg.initial, phi=0.0)
    return cfg.initial


def _simulate_cartesian(cfg: SimConfig) -> Trajectory:
    p = cfg.params
    k, V, rs = p.k, p.V, p.r_s
    h = cfg.dt_integ
    n = cfg.n_steps
    m = cfg.control_stride
    wx, wy = _wind_components(cfg.wind)
    zero_inside = cfg.inner_policy == "zero-inside"

    n_intervals = -(-n // m)
    if cfg.noise.mode == "measurement" and cfg.noise.sigma > 0.0:
        draws = cfg.noise.sigma * _rng(cfg.noise.seed).standard_normal(n_intervals)
    else:
        draws = np.zeros(n_intervals)

    t_a = np.empty(n + 1)
    x_a = np.empty(n + 1)
    y_a = np.empty(n + 1)
    psi_a = np.empty(n + 1)
    r_a = np.empty(n + 1)
    th_a = np.empty(n + 1)
    u_a = np.empty(n + 1)
    nu_a = np.empty(n + 1)

    s0 = _initial_cartesian(cfg)
    x, y, psi = s0.x, s0.y, s0.psi
    cos, sin, hypot, atan2 = math.cos, math.sin, math.hypot, math.atan2
    pi = math.pi
    two_pi = 2.0 * pi

    def record(i: int, t: float, r: float) -> None:
        t_a[i] = t
        x_a[i] = x
        y_a[i] = y
        psi_a[i] = psi
        r_a[i] = r
        th = (pi - atan2(y, x) + psi) % two_pi
        th_a[i] = th if th < two_pi else 0.0

    r = hypot(x, y)
    record(0, 0.0, r)
    u_nom = 0.0
    u_applied = 0.0
    nu = 0.0
    last = 0
    terminated = False

    for i in range(n):
        if i % m == 0:
            if r < R_MIN:
                terminated = True
                break
            nu = draws[i // m]
            vx = V * cos(psi) + wx
            vy = V * sin(psi) + wy
            rdot = (x * vx + y * vy) / r
            if zero_inside and r < rs:
                u_nom = 0.0
                u_applied = 0.0
            else:
                u_nom = control_measured(p, r, rdot)
                u_applied = u_nom if nu == 0.0 else control_measured(p, r, rdot + nu)
        u_a[i] = u_nom
        nu_a[i] = nu
        x, y, psi = _rk4_cart(x, y, psi, u_applied, V, wx, wy, h)
        if psi >= two_pi or psi < 0.0:
            psi %= two_pi
        r = hypot(x, y)
        if r < R_MIN:
            terminated = True
            break
        last = i + 1
        record(last, (i + 1) * h, r)

    u_a[last] = u_nom
    nu_a[last] = nu
    end = last + 1
    return Trajectory(
        t=t_a[:end], x=x_a[:end], y=y_a[:end], psi=psi_a[:end],
        r=r_a[:end], theta=th_a[:end], u=u_a[:end], nu=nu_a[:end],
        config=cfg, terminated=terminated,
    )


def _initial_polar(cfg: SimConfig) -> tuple[float, float, float]:
    if isinstance(cfg.initial, PolarState):
        return cfg.initial.r, cfg.initial.theta, 0.0
    pol = cart_to_polar(cfg.initial)
    return pol.r, pol.theta, math.atan2(cfg.initial.y, cfg.initial.x)


def _simulate_sde(cfg: SimConfig) -> Trajectory:
    p = cfg.params
    k, V, rs = p.k, p.V, p.r_s
    h = cfg.dt_integ
    n = cfg.n_steps
    sq = math.sqrt(h)
    zero_inside = cfg.inner_policy == "zero-inside"

    sigma = cfg.noise.sigma
    if sigma > 0.0:
        draws = _rng(cfg.noise.seed).standard_normal(n)
    else:
        draws = np.zeros(n)

    t_a = np.empty(n + 1)
    x_a = np.empty(n + 1)
    y_a = np.empty(n + 1)
    psi_a = np.empty(n + 1)
    r_a = np.empty(n + 1)
    th_a = np.empty(n + 1)
    u_a = np.empty(n + 1)
    nu_a = np.empty(n + 1)

    r, theta, phi = _initial_polar(cfg)
    cos, sin = math.cos, math.sin
    pi = math.pi
    two_pi = 2.0 * pi

    def record(i: int, t: float) -> None:
        t_a[i] = t
        r_a[i] = r
        th_a[i] = theta
        x_a[i] = r * cos(phi)
        y_a[i] = r * sin(phi)
        ps = (theta + phi - pi) % two_pi
        psi_a[i] = ps if ps < two_pi else 0.0

    record(0, 0.0)
    u = 0.0
    z = 0.0
    last = 0
    terminated = False

    for i in range(n):
        if r < R_MIN:
            terminated = True
            break
        if zero_inside and r < rs:
            u = 0.0
        else:
            u = control_bearing(p, r, theta)
        z = draws[i]
        u_a[i] = u
        nu_a[i] = z
        ang = V * sin(theta) / r
        r = r + (-V * cos(theta)) * h
        theta = (theta + (ang + u) * h - k * sigma * sq * z) % two_pi
        if theta >= two_pi:
            theta = 0.0
        phi = phi - ang * h
        if r < R_MIN or not math.isfinite(r):
            terminated = True
            break
        last = i + 1
        record(last, (i + 1) * h)

    u_a[last] = u
    nu_a[last] = z
    end = last + 1
    return Trajectory(
        t=t_a[:end], x=x_a[:end], y=y_a[:end], psi=psi_a[:end],
        r=r_a[:end], theta=th_a[:end], u=u_a[:end], nu=nu_a[:end],
        config=cfg, terminated=terminated,
    )


def simulate(cfg: SimConfig) -> Trajectory:
    """Run the closed loop described by cfg and return its Trajectory.

    Pure function of the config (including the seed): repeated calls return
    bit-identical records.  Terminates early with a flag if the range drops
    below R_MIN.
    """
    if cfg.noise.mode == "sde":
        return _simulate_sde(cfg)
    return _simulate_cartesian(cfg)


def simulate_polar_ode(cfg: SimConfig) -> Trajectory:
    """Deterministic twin of simulate(mode="none") on the reduced polar ODE.

    Integrates (r, theta) (plus the reference angle, to keep a Cartesian
    view) with RK4 under the same zero-order-hold control protocol.  Used to
    verify the Cartesian/polar reduction end to end; requires mode "none"
    and no wind.
    """
    if cfg.noise.mode != "none":
        raise ValueError("polar ODE integration is deterministic: need mode 'none'")
    if cfg.wind is not None and cfg.wind.w_speed > 0.0:
        raise ValueError("wind is not representable in (r, theta)")

    p = cfg.params
    V, rs = p.V, p.r_s
    h = cfg.dt_integ
    n = cfg.n_steps
    m = cfg.control_stride
    zero_inside = cfg.inner_policy == "zero-inside"

    t_a = np.empty(n + 1)
    x_a = np.empty(n + 1)
    y_a = np.empty(n + 1)
    psi_a = np.empty(n + 1)
    r_a = np.empty(n + 1)
    th_a = np.empty(n + 1)
    u_a = np.empty(n + 1)
    nu_a = np.zeros(n + 1)

    r, theta, phi = _initial_polar(cfg)
    cos, sin = math.cos, math.sin
    pi = math.pi
    two_pi = 2.0 * pi

    def record(i: int, t: float) -> None:
        t_a[i] = t
        r_a[i] = r
        th_a[i] = theta % two_pi
        x_a[i] = r * cos(phi)
        y_a[i] = r * sin(phi)
        psi_a[i] = (theta + phi - pi) % two_pi

    record(0, 0.0)
    u = 0.0
    last = 0
    terminated = False

    for i in range(n):
        if r < R_MIN:
            terminated = True
            break
        if i % m == 0:
            if zero_inside and r < rs:
                u = 0.0
            else:
                u = control_measured(p, r, -V * cos(theta))
        u_a[i] = u

        # RK4 on (r, theta, phi); bail out if a stage leaves the domain
        def f(rr: float, th: float) -> tuple[float, float, float] | None:
            if rr <= 0.0:
                return None
            ang = V * sin(th) / rr
            return -V * cos(th), ang + u, -ang

        s1 = f(r, theta)
        s2 = f(r + 0.5 * h * s1[0], theta + 0.5 * h * s1[1]) if s1 else None
        s3 = f(r + 0.5 * h * s2[0], theta + 0.5 * h * s2[1]) if s2 else None
        s4 = f(r + h * s3[0], theta + h * s3[1]) if s3 else None
        if s4 is None:
            terminated = True
            break
        r = r + h / 6.0 * (s1[0] + 2.0 * s2[0] + 2.0 * s3[0] + s4[0])
        theta = theta + h / 6.0 * (s1[1] + 2.0 * s2[1] + 2.0 * s3[1] + s4[1])
        phi = phi + h / 6.0 * (s1[2] + 2.0 * s2[2] + 2.0 * s3[2] + s4[2])
        theta %= two_pi
        if r < R_MIN:
            terminated = True
            break
        last = i + 1
        record(last, (i + 1) * h)

    u_a[last] = u
    end = last + 1
    return Trajectory(
        t=t_a[:end], x=x_a[:end], y=y_a[:end], psi=psi_a[:end],
        r=r_a[:end], theta=th_a[:end], u=u_a[:end], nu=nu_a[:end],
        config=cfg, terminated=terminated,
    )


def replay_noise(traj: Trajectory) -> Trajectory:
    """Re-simulate a trajectory from its stored config; bit-identical result."""
    if traj.config is None:
        raise ValueError("trajectory carries no config metadata to replay from")
    return simulate(traj.config)


def with_seed(cfg: SimConfig, seed: int) -> SimConfig:
    """Copy of cfg with the noise seed replaced."""
    return replace(cfg, noise=replace(cfg.noise, seed=seed))
