"""Offline figure generation from circumnavigation CSV outputs.

Pure reader of the simulator's CSV files; carries no dependency on the
simulation package itself.
"""

from .csvdata import CsvTable, MissingColumnsError, read_table
from .figures import KINDS, FigureSpec, plot_sweep, plot_trajectory, render

__version__ = "0.1.0"

__all__ = [
    "CsvTable",
    "FigureSpec",
    "KINDS",
    "MissingColumnsError",
    "plot_sweep",
    "plot_trajectory",
    "read_table",
    "render",
]
