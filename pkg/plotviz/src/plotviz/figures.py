"""Trajectory and sweep figures from simulator CSVs.

Vector output (SVG) by default so figures embed cleanly in documentation.
Overlay artists carry SVG ids (``overlay-circle``, ``threshold-marker``) so
emitted files can be checked mechanically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvdata import MissingColumnsError, read_table

KINDS = ("trajectory", "sweep")


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSV path(s), figure kind, overlays, output path."""

    inputs: tuple[str, ...]
    kind: str
    out: str
    circles: tuple[float, ...] = ()
    metrics: tuple[str, ...] = ("mse_r", "mse_rdot")
    marker: float | None = None  # sweep: vertical line at this k; None = from CSV meta

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}, expected one of {KINDS}")
        if not self.inputs:
            raise ValueError("at least one input CSV required")


def plot_trajectory(spec: FigureSpec) -> str:
    """Planar path with the target at the origin and optional radius circles."""
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    for path in spec.inputs:
        table = read_table(path)
        x, y = table.require("x", "y")
        (line,) = ax.plot(x, y, linewidth=0.8)
        ax.plot(
            x[0], y[0], marker="o", markersize=6,
            color=line.get_color(), linestyle="none", label="start",
        )
    ax.plot(0.0, 0.0, marker="*", markersize=12, color="black", linestyle="none",
            label="target")
    angles = np.linspace(0.0, 2.0 * math.pi, 361)
    for radius in spec.circles:
        (circ,) = ax.plot(
            radius * np.cos(angles), radius * np.sin(angles),
            linestyle="--", linewidth=1.0, color="gray",
        )
        circ.set_gid(f"overlay-circle-{radius:g}")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.grid(True, alpha=0.3)
    fig.savefig(spec.out)
    plt.close(fig)
    return spec.out


def plot_sweep(spec: FigureSpec) -> str:
    """Metric-vs-gain chart; one panel per available metric column."""
    table = read_table(spec.inputs[0])
    (k,) = table.require("k")
    present = [m for m in spec.metrics if m in table.columns]
    if not present:
        raise MissingColumnsError(spec.metrics, table.path)

    marker = spec.marker
    if marker is None:
        v = table.meta_float("controller.V")
        if v is not None and v > 0.0:
            marker = math.pi / (2.0 * v)  # saturation 2kV crosses pi here

    fig, axes = plt.subplots(
        len(present), 1, figsize=(6.0, 3.0 * len(present)), sharex=True, squeeze=False
    )
    for ax, metric in zip(axes[:, 0], present):
        ax.plot(k, table.columns[metric], marker="o", markersize=3, linewidth=1.0)
        ax.set_ylabel(metric)
        ax.grid(True, alpha=0.3)
        if marker is not None:
            vline = ax.axvline(marker, linestyle="--", linewidth=1.0, color="firebrick")
            vline.set_gid("threshold-marker")
    axes[-1, 0].set_xlabel("gain k")
    fig.tight_layout()
    fig.savefig(spec.out)
    plt.close(fig)
    return spec.out


def render(spec: FigureSpec) -> str:
    if spec.kind == "trajectory":
        return plot_trajectory(spec)
    return plot_sweep(spec)
