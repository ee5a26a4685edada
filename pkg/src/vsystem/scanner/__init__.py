"""Spectrum scans, peak reports, regime reports, figure data and the CLI."""

from .peaks import Peak, PeakReport, find_peaks
from .report import bisect_border, border_table, regime_report
from .scan import OBSERVABLES, SpectrumScan, default_grid, scan

__all__ = ["OBSERVABLES", "Peak", "PeakReport", "SpectrumScan", "bisect_border", "border_table",
           "default_grid", "find_peaks", "regime_report", "scan"]
