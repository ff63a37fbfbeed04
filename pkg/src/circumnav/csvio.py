"""Canonical CSV emission.

Every file starts with ``# section.key=value`` comment lines echoing the
effective configuration (so outputs are self-describing and replayable),
followed by a fixed header row.  Floats are serialized with 17 significant
digits, which round-trips 64-bit values exactly; newlines are always ``\\n``.
"""

from __future__ import annotations

from .config import RunConfig, config_items
from .dynamics import Trajectory
from .experiments import RecurrenceStats, SweepResult

TRAJECTORY_HEADER = "t,x,y,psi,r,theta,u,nu"
SWEEP_HEADER = "k,r_s,mse_r,mse_rdot,runs,terminated"
RECURRENCE_HEADER = "seed,hit_time,censored"


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def _comment_lines(cfg: RunConfig) -> list[str]:
    lines = []
    for section, key, value in config_items(cfg):
        text = fmt(value) if isinstance(value, float) else str(value)
        lines.append(f"# {section}.{key}={text}")
    return lines


def write_trajectory_csv(traj: Trajectory, path: str, cfg: RunConfig) -> None:
    lines = _comment_lines(cfg)
    lines.append(f"# terminated={int(traj.terminated)}")
    lines.append(TRAJECTORY_HEADER)
    cols = (traj.t, traj.x, traj.y, traj.psi, traj.r, traj.theta, traj.u, traj.nu)
    for i in range(len(traj)):
        lines.append(",".join(fmt(c[i]) for c in cols))
    _write(path, lines)


def write_sweep_csv(result: SweepResult, path: str, cfg: RunConfig) -> None:
    lines = _comment_lines(cfg)
    lines.append(SWEEP_HEADER)
    for row in result.rows:
        lines.append(
            ",".join(
                [fmt(row.k), fmt(row.r_s), fmt(row.mse_r), fmt(row.mse_rdot),
                 str(row.runs), str(row.terminated)]
            )
        )
    _write(path, lines)


def write_recurrence_csv(stats: RecurrenceStats, path: str, cfg: RunConfig) -> None:
    lines = _comment_lines(cfg)
    lines.append(RECURRENCE_HEADER)
    for seed, hit in zip(stats.seeds, stats.hit_times):
        censored = hit is None
        lines.append(f"{seed},{'' if censored else fmt(hit)},{int(censored)}")
    # trailing summary: mean/std over uncensored runs and the analytic bound
    lines.append(f"# summary.mean={fmt(stats.mean)}")
    lines.append(f"# summary.std={fmt(stats.std)}")
    lines.append(f"# summary.bound={fmt(stats.bound)}")
    lines.append(f"# summary.censored={stats.n_censored}")
    lines.append(f"# summary.starts_inside={int(stats.starts_inside)}")
    _write(path, lines)


def _write(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
