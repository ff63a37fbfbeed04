"""plot trajectory|sweep --in <csv> --out <img> [--circles r_s,r_a]"""

from __future__ import annotations

import argparse
import sys

from .figures import FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot", description="Figures from circumnavigation CSV outputs"
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in ("trajectory", "sweep"):
        p = sub.add_parser(kind)
        p.add_argument("--in", dest="inputs", action="append", required=True,
                       metavar="CSV", help="input CSV (repeatable for trajectory overlays)")
        p.add_argument("--out", required=True, help="output image (suffix picks the format)")
        p.add_argument("--circles", default="",
                       help="comma-separated overlay radii, e.g. 9.95,10")
        if kind == "sweep":
            p.add_argument("--metrics", default="mse_r,mse_rdot",
                           help="metric columns to chart (one panel each)")
            p.add_argument("--marker", type=float, default=None,
                           help="vertical line at this gain (default: pi/(2V) from CSV meta)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        circles = tuple(float(c) for c in args.circles.split(",") if c.strip())
        spec = FigureSpec(
            inputs=tuple(args.inputs),
            kind=args.kind,
            out=args.out,
            circles=circles,
            metrics=tuple(
                m.strip() for m in getattr(args, "metrics", "mse_r,mse_rdot").split(",") if m.strip()
            ),
            marker=getattr(args, "marker", None),
        )
        render(spec)
        return 0
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
