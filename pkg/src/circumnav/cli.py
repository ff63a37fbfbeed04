"""Command-line surface: analyze, simulate, sweep, recurrence.

Exit codes: 0 success, 2 configuration error, 3 runtime error (including
early termination at the collision floor), 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from . import analysis, csvio, experiments
from .analysis import NoSolutionError
from .config import ConfigError, RunConfig, load_config, to_params, to_sim_config
from .dynamics import simulate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circumnav",
        description="Range-only UAV circumnavigation: simulation and recurrence analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, out_required: bool) -> None:
        p.add_argument("--config", help="INI config file (defaults used when omitted)")
        p.add_argument("--out", required=out_required, help="output path")
        p.add_argument("--seed", type=int, help="override noise.seed")
        p.add_argument("--jobs", type=int, default=None,
                       help="worker processes (default: all available)")
        p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                       help="override a single config value (repeatable)")

    common(sub.add_parser("analyze", help="report derived radii and bounds"), False)
    common(sub.add_parser("simulate", help="run one trajectory to CSV"), True)
    common(sub.add_parser("sweep", help="gain sweep with MSE statistics to CSV"), True)
    common(sub.add_parser("recurrence", help="Monte Carlo hitting times to CSV"), True)
    return parser


def _analysis_report(cfg: RunConfig) -> str:
    p = to_params(cfg)
    g = lambda v: format(v, ".6g")
    lines = [
        f"controller: k={g(cfg.k)} r_d={g(cfg.r_d)} V={g(cfg.V)}",
        f"r_s = {g(p.r_s)}",
        f"saturation bound 2kV = {g(p.saturation)}",
    ]
    radii = analysis.inner_radii(p)
    if radii is None:
        lines.append("inner radii: none")
    else:
        lines.append(f"inner radii: r_i- = {g(radii.r_i_minus)}, r_i+ = {g(radii.r_i_plus)}")
    try:
        lines.append(f"epsilon_max = {g(analysis.epsilon_max(p))}")
    except NoSolutionError as e:
        lines.append(f"epsilon_max: undefined ({e})")
    eps = cfg.epsilon
    try:
        target = analysis.recurrent_set(p, eps)
        lines.append(
            f"epsilon = {g(eps)}: r_i-_eps = {g(target.r_i_minus_eps)}, "
            f"r_i+_eps = {g(target.r_i_plus_eps)}, r_a_eps = {g(target.r_a_eps)}"
        )
        bound, inside = analysis.recurrence_bound(p, eps, cfg.initial_r, cfg.initial_theta)
        start = f"(r0={g(cfg.initial_r)}, theta0={g(cfg.initial_theta)})"
        if inside:
            lines.append(f"recurrence bound from {start}: 0 (start inside the set)")
        else:
            lines.append(f"recurrence bound from {start}: {g(bound)} s")
    except (NoSolutionError, ValueError) as e:
        lines.append(f"epsilon = {g(eps)}: no recurrent set ({e})")
    return "\n".join(lines) + "\n"


def _cmd_analyze(cfg: RunConfig, args: argparse.Namespace) -> int:
    report = _analysis_report(cfg)
    sys.stdout.write(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report)
    return EXIT_OK


def _cmd_simulate(cfg: RunConfig, args: argparse.Namespace) -> int:
    traj = simulate(to_sim_config(cfg))
    csvio.write_trajectory_csv(traj, args.out, cfg)
    if traj.terminated:
        print(
            f"warning: terminated early at t={traj.t[-1]:.6g}s "
            f"(range below {1e-6:g})",
            file=sys.stderr,
        )
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_sweep(cfg: RunConfig, args: argparse.Namespace) -> int:
    result = experiments.k_sweep(
        to_sim_config(cfg),
        k_start=cfg.k_start,
        k_step=cfg.k_step,
        n_k=cfg.n_k,
        runs_per_k=cfg.runs_per_k,
        jobs=args.jobs,
    )
    csvio.write_sweep_csv(result, args.out, cfg)
    return EXIT_OK


def _cmd_recurrence(cfg: RunConfig, args: argparse.Namespace) -> int:
    stats = experiments.recurrence_trial(
        to_sim_config(cfg),
        eps=cfg.epsilon,
        n_seeds=cfg.runs_per_k,
        horizon=cfg.horizon,
        jobs=args.jobs,
    )
    csvio.write_recurrence_csv(stats, args.out, cfg)
    return EXIT_OK


_COMMANDS = {
    "analyze": _cmd_analyze,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "recurrence": _cmd_recurrence,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set or [], seed=args.seed)
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, ValueError) as e:
        # NoSolutionError and infeasible-gain errors are config problems too
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
