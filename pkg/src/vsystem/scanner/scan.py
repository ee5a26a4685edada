"""Spectra over δ₂ grids."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import closedform, poleatlas
from ..core import SystemParams
from ..errors import NumericalError, ParameterError
from ..master import steady_state_grid

OBSERVABLES = ("rho11", "rho22", "rho33", "re_rho12", "im_rho12",
               "re_rho13", "im_rho13", "re_rho23", "im_rho23")
METHODS = ("numeric", "closedform")


@dataclass(frozen=True, eq=False)
class SpectrumScan:
    grid: np.ndarray
    rows: np.ndarray
    method: str
    params: SystemParams
    grid_spec: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, OBSERVABLES.index(name)]

    def __len__(self):
        return self.grid.size


def default_threads() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def _line_scales(p: SystemParams):
    try:
        return poleatlas.physical_poles(p).upper
    except NumericalError:
        return np.array([], dtype=complex)


def default_grid(p: SystemParams, n: int = 400, refine: int = 200) -> tuple[np.ndarray, dict]:
    """Uniform grid over ±3·(largest line scale), refined around every line.

    The line scale is the largest of Γ₁, ε₁, |δ₁| and the positions of the
    physical poles.  Lines sitting at the centre contribute their widths, the
    broadest one included, so a CIC depression is covered whole.  Each
    physical pole adds ``refine`` points spaced logarithmically out to ten
    half-widths on both sides of its position.
    """
    poles = _line_scales(p)
    scale = max(p.gamma1, p.eps1, abs(p.delta1))
    if poles.size:
        scale = max(scale, float(np.abs(poles.real).max()))
        central = poles[np.abs(poles.real) < poles.imag]
        if central.size:
            scale = max(scale, float(central.imag.max()))
    half = 3.0 * scale
    parts = [np.linspace(-half, half, n)]
    per_side = refine // 2
    for z in poles:
        w = z.imag
        offsets = w * np.geomspace(1e-2, 10.0, per_side)
        parts.append(z.real + np.concatenate([-offsets[::-1], [0.0], offsets]))
    grid = np.unique(np.concatenate(parts))
    grid = grid[(grid >= -half) & (grid <= half)]
    spec = {"kind": "default", "half_width": half, "uniform_points": n,
            "refined_points_per_line": refine, "lines": [[z.real, z.imag] for z in poles]}
    return grid, spec


def scan(p: SystemParams, grid=None, method: str = "numeric", threads: int | None = None) -> SpectrumScan:
    """Steady-state observables at every δ₂ of ``grid`` (the default grid if None)."""
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if grid is None:
        grid, spec = default_grid(p)
    else:
        grid = np.asarray(grid, dtype=float).ravel()
        spec = {"kind": "explicit", "points": int(grid.size)}
    rows = np.full((grid.size, len(OBSERVABLES)), np.nan)
    if method == "closedform":
        if p.delta1 != 0:
            raise ParameterError(f"closedform scans need delta1 == 0, got {p.delta1}")
        rows[:, 0] = closedform.rho11_closed(p, grid)
        return SpectrumScan(grid, rows, method, p, spec)

    threads = default_threads() if threads is None else max(1, int(threads))
    if threads > 1 and grid.size >= 64:
        chunks = np.array_split(grid, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            x = np.concatenate(list(pool.map(lambda g: steady_state_grid(p, g), chunks)))
    else:
        x = steady_state_grid(p, grid)
    rows[:, 0] = x[:, 0]
    rows[:, 1] = x[:, 1]
    rows[:, 2] = 1.0 - x[:, 0] - x[:, 1]
    rows[:, 3:] = x[:, 2:]
    return SpectrumScan(grid, rows, method, p, spec)


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:n`` for a uniform grid, ``log:start:stop:n`` for a geometric one."""
    parts = text.split(":")
    log = parts[0] == "log"
    if log:
        parts = parts[1:]
    if len(parts) != 3:
        raise ValueError(f"grid spec must be [log:]start:stop:n, got {text!r}")
    start, stop, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1:
        raise ValueError("grid needs at least one point")
    return np.geomspace(start, stop, n) if log else np.linspace(start, stop, n)
