"""Range-only UAV circumnavigation of a stationary target.

Simulation and analysis toolkit for a smooth saturated heading-rate
controller driven by noisy range/range-rate measurements: deterministic,
measurement-noise, and SDE closed-loop simulation (plus constant wind),
recurrent-set geometry, and Monte Carlo recurrence statistics.
"""

from .analysis import (
    GridCheckResult,
    InnerRadii,
    NoSolutionError,
    RecurrentSet,
    epsilon_max,
    generator_grid_check,
    generator_lyapunov,
    inner_drift_minimum,
    inner_radii,
    inner_radii_epsilon,
    lyapunov,
    r_a_epsilon,
    recurrence_bound,
    recurrent_set,
)
from .control import (
    ControllerParams,
    InfeasibleGainError,
    control_bearing,
    control_measured,
    make_params,
)
from .dynamics import (
    NoiseModel,
    SimConfig,
    Trajectory,
    WindModel,
    replay_noise,
    simulate,
    simulate_polar_ode,
    step_cartesian,
)
from .experiments import (
    RecurrenceStats,
    SweepResult,
    SweepRow,
    fit_orbit_circle,
    hitting_time,
    k_sweep,
    mse_stats,
    recurrence_trial,
    run_seed,
)
from .geometry import CartesianState, PolarState, cart_to_polar, polar_to_cart, range_rate, wrap_angle

__version__ = "0.1.0"

__all__ = [
    "CartesianState",
    "ControllerParams",
    "GridCheckResult",
    "InfeasibleGainError",
    "InnerRadii",
    "NoSolutionError",
    "NoiseModel",
    "PolarState",
    "RecurrenceStats",
    "RecurrentSet",
    "SimConfig",
    "SweepResult",
    "SweepRow",
    "Trajectory",
    "WindModel",
    "cart_to_polar",
    "control_bearing",
    "control_measured",
    "epsilon_max",
    "fit_orbit_circle",
    "generator_grid_check",
    "generator_lyapunov",
    "hitting_time",
    "inner_drift_minimum",
    "inner_radii",
    "inner_radii_epsilon",
    "k_sweep",
    "lyapunov",
    "make_params",
    "mse_stats",
    "polar_to_cart",
    "r_a_epsilon",
    "range_rate",
    "recurrence_bound",
    "recurrence_trial",
    "recurrent_set",
    "replay_noise",
    "run_seed",
    "simulate",
    "simulate_polar_ode",
    "step_cartesian",
    "wrap_angle",
]
