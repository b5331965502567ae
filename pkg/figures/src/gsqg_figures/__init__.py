"""Deterministic publication figures for gsqg reports."""

from gsqg_figures.loading import FigureDataError, load_report, load_series, load_snapshot
from gsqg_figures.render import KINDS, FigureSpec, render, save

__version__ = "0.1.0"

__all__ = ["FigureDataError", "load_report", "load_series", "load_snapshot",
           "KINDS", "FigureSpec", "render", "save"]
