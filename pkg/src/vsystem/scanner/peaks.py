"""Local extrema, prominences and full widths of sampled line shapes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NoPeaks


@dataclass(frozen=True)
class Peak:
    position: float
    height: float
    fwhm: float
    orientation: str
    value: float
    prominence: float

    def as_dict(self) -> dict:
        return {"position": self.position, "height": self.height, "fwhm": self.fwhm,
                "orientation": self.orientation, "value": self.value,
                "prominence": self.prominence}


@dataclass(frozen=True)
class PeakReport:
    peaks: list[Peak]
    baseline: float

    def maxima(self) -> list[Peak]:
        return [pk for pk in self.peaks if pk.orientation == "maximum"]

    def minima(self) -> list[Peak]:
        return [pk for pk in self.peaks if pk.orientation == "minimum"]

    def as_dict(self) -> dict:
        return {"baseline": self.baseline, "peaks": [pk.as_dict() for pk in self.peaks]}


def _vertex(x, y):
    """Vertex of the parabola through three points (x need not be uniform)."""
    x0, x1, x2 = x
    y0, y1, y2 = y
    d0 = (x0 - x1) * (x0 - x2)
    d1 = (x1 - x0) * (x1 - x2)
    d2 = (x2 - x0) * (x2 - x1)
    a = y0 / d0 + y1 / d1 + y2 / d2
    b = -(y0 * (x1 + x2) / d0 + y1 * (x0 + x2) / d1 + y2 * (x0 + x1) / d2)
    c = y0 * x1 * x2 / d0 + y1 * x0 * x2 / d1 + y2 * x0 * x1 / d2
    if a == 0:
        return x1, y1
    xv = -b / (2 * a)
    if not x0 <= xv <= x2:
        return x1, y1
    return xv, c - b * b / (4 * a)


def _crossing(x, y, i, level, direction):
    """Interpolated position where y crosses ``level`` walking from index i."""
    j = i
    n = len(y)
    above = y[i] > level
    while 0 <= j + direction < n:
        k = j + direction
        if (y[k] > level) != above:
            t = (level - y[j]) / (y[k] - y[j])
            return x[j] + t * (x[k] - x[j])
        j = k
    return None


def _base(y, i, direction, sign, tol=0.0):
    """Extreme opposite-side value reached before the signal passes y[i].

    Values within ``tol`` of y[i] count as passing, so two mirror extrema
    that differ only by rounding see the same base.
    """
    n = len(y)
    j = i
    best = y[i]
    while 0 <= j + direction < n:
        j += direction
        if sign * (y[j] - y[i]) >= -tol:
            break
        best = min(best, y[j]) if sign > 0 else max(best, y[j])
    return best


def find_peaks(scan_or_x, y=None, column: str = "rho11", min_prominence: float = 1e-6) -> PeakReport:
    """Extrema of a sampled curve with prominence-based FWHM.

    Accepts a :class:`SpectrumScan` (using ``column``) or explicit ``x, y``
    arrays.  Each extremum is located by a three-point test and refined with
    a parabola through its neighbours.  The FWHM is measured at half the
    prominence (depth relative to the higher of the two flanking bases), so a
    narrow peak sitting inside a broad dip gets its own width.  ``height`` is
    reported against the global baseline, the mean of the two outermost
    samples on each side.  Extrema with prominence below
    ``min_prominence`` times the full signal range are ignored.
    """
    if y is None:
        x = np.asarray(scan_or_x.grid, dtype=float)
        y = np.asarray(scan_or_x.column(column), dtype=float)
    else:
        x = np.asarray(scan_or_x, dtype=float)
        y = np.asarray(y, dtype=float)
    if x.size < 5:
        raise ValueError("peak finding needs at least 5 grid points")
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    baseline = float(np.mean([y[0], y[1], y[-2], y[-1]]))
    span = float(y.max() - y.min())
    if span == 0:
        raise NoPeaks("scan is flat")

    peaks = []
    for i in range(1, x.size - 1):
        if y[i] > y[i - 1] and y[i] >= y[i + 1]:
            sign, orientation = 1, "maximum"
        elif y[i] < y[i - 1] and y[i] <= y[i + 1]:
            sign, orientation = -1, "minimum"
        else:
            continue
        left = _base(y, i, -1, sign, 1e-12 * span)
        right = _base(y, i, +1, sign, 1e-12 * span)
        ref = max(left, right) if sign > 0 else min(left, right)
        prominence = abs(y[i] - ref)
        if prominence < min_prominence * span:
            continue
        xv, yv = _vertex(x[i - 1:i + 2], y[i - 1:i + 2])
        level = y[i] - sign * prominence / 2
        xl = _crossing(x, y, i, level, -1)
        xr = _crossing(x, y, i, level, +1)
        if xl is None and xr is None:
            continue
        if xl is None:
            xl = 2 * xv - xr
        if xr is None:
            xr = 2 * xv - xl
        fwhm = float(xr - xl)
        if not fwhm > 0:
            continue
        peaks.append(Peak(float(xv), float(yv - baseline), fwhm, orientation,
                          float(yv), float(prominence)))
    if not peaks:
        raise NoPeaks("no extrema above the prominence threshold")
    return PeakReport(peaks, baseline)
