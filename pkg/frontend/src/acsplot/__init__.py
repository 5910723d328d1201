"""Figures for sum-rate sweep reports."""

from .render import BoundSeries, PlotSpec, ReportFormatError, aggregate, load_rows, render

__version__ = "0.1.0"
