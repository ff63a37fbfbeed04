"""Monte Carlo harness: gain sweeps, recurrence-time estimation, circle fits.

Every run's seed derives deterministically from (base seed, indices) through
SeedSequence, so any single cell of a sweep can be reproduced in isolation
and aggregate statistics do not depend on execution order.  Per-run work can
be spread over worker processes with the ``jobs`` argument; aggregation is a
deterministic fold over the canonically ordered result list.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .analysis import RecurrentSet, recurrence_bound, recurrent_set
from .control import make_params
from .dynamics import SimConfig, Trajectory, simulate, with_seed
from .geometry import PolarState, cart_to_polar


def run_seed(base_seed: int, *indices: int) -> int:
    """Collision-resistant per-run seed from a base seed and cell indices.

    Uses SeedSequence spawn keys, which disambiguate both index values and
    index-tuple lengths.
    """
    ss = np.random.SeedSequence(int(base_seed), spawn_key=tuple(int(i) for i in indices))
    return int(ss.generate_state(1, np.uint64)[0])


def _resolve_jobs(jobs: int | None) -> int:
    if jobs is None:
        return os.cpu_count() or 1
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    return jobs


def _map_runs(fn, payloads: list, jobs: int | None):
    jobs = _resolve_jobs(jobs)
    if jobs == 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=min(jobs, len(payloads))) as pool:
        return list(pool.map(fn, payloads, chunksize=max(1, len(payloads) // (4 * jobs))))


# ---------------------------------------------------------------------------
# per-trajectory statistics


def mse_stats(traj: Trajectory, r_a: float, V: float | None = None) -> tuple[float, float]:
    """Time-averaged (r - r_a)^2 and rdot^2 over the full record.

    rdot is -V cos(theta) from the true state, never the noisy measurement.
    V defaults to the trajectory's own config.
    """
    if V is None:
        if traj.config is None:
            raise ValueError("no config on trajectory: pass V explicitly")
        V = traj.config.params.V
    mse_r = float(np.mean((traj.r - r_a) ** 2))
    mse_rdot = float(np.mean((V * np.cos(traj.theta)) ** 2))
    return mse_r, mse_rdot


# ---------------------------------------------------------------------------
# gain sweep


@dataclass(frozen=True)
class SweepRow:
    k: float
    r_s: float
    mse_r: float
    mse_rdot: float
    runs: int
    terminated: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def __len__(self) -> int:
        return len(self.rows)


def _sweep_cell(payload: tuple[SimConfig, float]) -> tuple[float, float, bool]:
    cfg, r_a = payload
    traj = simulate(cfg)
    mr, md = mse_stats(traj, r_a)
    return mr, md, traj.terminated


def k_sweep(
    base: SimConfig,
    k_start: float,
    k_step: float,
    n_k: int,
    runs_per_k: int,
    jobs: int | None = 1,
) -> SweepResult:
    """runs_per_k seeded simulations at each gain k_start + j*k_step.

    Each cell's seed is run_seed(base seed, k index, run index); rerunning a
    single cell reproduces its contribution exactly.  Infeasible gains raise
    before any simulation starts.
    """
    if n_k < 1:
        raise ValueError(f"n_k must be >= 1, got {n_k}")
    if runs_per_k < 1:
        raise ValueError(f"runs_per_k must be >= 1, got {runs_per_k}")
    r_a = base.params.r_d
    V = base.params.V
    per_k = []
    payloads = []
    for j in range(n_k):
        k = k_start + j * k_step
        params = make_params(k, r_a, V)
        per_k.append(params)
        for i in range(runs_per_k):
            cfg = replace(
                with_seed(base, run_seed(base.noise.seed, j, i)), params=params
            )
            payloads.append((cfg, r_a))

    results = _map_runs(_sweep_cell, payloads, jobs)

    rows = []
    for j, params in enumerate(per_k):
        cell = results[j * runs_per_k : (j + 1) * runs_per_k]
        rows.append(
            SweepRow(
                k=params.k,
                r_s=params.r_s,
                mse_r=float(np.mean([c[0] for c in cell])),
                mse_rdot=float(np.mean([c[1] for c in cell])),
                runs=runs_per_k,
                terminated=sum(1 for c in cell if c[2]),
            )
        )
    return SweepResult(rows=tuple(rows))


# ---------------------------------------------------------------------------
# recurrence-time estimation


def hitting_time(traj: Trajectory, target: RecurrentSet) -> float | None:
    """First sample time with (r, theta) in the target set; None if censored.

    Detection is at sample resolution (dt_integ), no interpolation; a start
    inside the set hits at t = 0.
    """
    mask = np.asarray(target.contains(traj.r, traj.theta))
    idx = np.nonzero(mask)[0]
    if idx.size == 0:
        return None
    return float(traj.t[idx[0]])


@dataclass(frozen=True)
class RecurrenceStats:
    """Monte Carlo hitting times against the analytic expected-time bound.

    Censored runs (no hit before the horizon) are excluded from mean/std but
    always counted in n_censored.
    """

    seeds: tuple[int, ...]
    hit_times: tuple[float | None, ...]
    mean: float
    std: float
    bound: float
    starts_inside: bool
    epsilon: float
    horizon: float
    n_censored: int

    @property
    def within_bound(self) -> bool:
        return not math.isnan(self.mean) and self.mean <= self.bound


def _recurrence_cell(payload: tuple[SimConfig, RecurrentSet]) -> float | None:
    cfg, target = payload
    return hitting_time(simulate(cfg), target)


def recurrence_trial(
    cfg: SimConfig,
    eps: float,
    n_seeds: int,
    horizon: float,
    variant: str = "full-annulus",
    jobs: int | None = 1,
) -> RecurrenceStats:
    """Estimate the mean time to reach the recurrent set over n_seeds runs."""
    if n_seeds < 1:
        raise ValueError(f"n_seeds must be >= 1, got {n_seeds}")
    target = recurrent_set(cfg.params, eps, variant)
    if isinstance(cfg.initial, PolarState):
        start = cfg.initial
    else:
        start = cart_to_polar(cfg.initial)
    bound, starts_inside = recurrence_bound(cfg.params, eps, start.r, start.theta, variant)

    base = replace(cfg, t_final=horizon)
    seeds = tuple(run_seed(cfg.noise.seed, i) for i in range(n_seeds))
    payloads = [(with_seed(base, s), target) for s in seeds]
    hits = _map_runs(_recurrence_cell, payloads, jobs)

    observed = [h for h in hits if h is not None]
    mean = float(np.mean(observed)) if observed else math.nan
    std = float(np.std(observed)) if observed else math.nan
    return RecurrenceStats(
        seeds=seeds,
        hit_times=tuple(hits),
        mean=mean,
        std=std,
        bound=bound,
        starts_inside=starts_inside,
        epsilon=eps,
        horizon=horizon,
        n_censored=sum(1 for h in hits if h is None),
    )


# ---------------------------------------------------------------------------
# orbit-center fit (wind bias quantification)


def fit_orbit_circle(traj: Trajectory, t_burn: float = 0.0) -> tuple[float, float, float]:
    """Algebraic (Kasa) least-squares circle through the post-burn-in path.

    Requires the segment to span at least one revolution about the target
    (total |d phi| >= 2 pi); returns (center_x, center_y, radius).
    """
    mask = traj.t >= t_burn
    x = traj.x[mask]
    y = traj.y[mask]
    if x.size < 3:
        raise ValueError(f"only {x.size} samples after t_burn={t_burn}")
    phi = np.unwrap(np.arctan2(y, x))
    arc = float(np.sum(np.abs(np.diff(phi))))
    if arc < 2.0 * math.pi:
        raise ValueError(
            f"insufficient arc after burn-in: |d phi| total {arc:.3f} < 2 pi"
        )
    A = np.column_stack([x, y, np.ones_like(x)])
    b = -(x * x + y * y)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    cx = -0.5 * sol[0]
    cy = -0.5 * sol[1]
    radius = math.sqrt(max(cx * cx + cy * cy - sol[2], 0.0))
    return float(cx), float(cy), radius
