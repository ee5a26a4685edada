"""Data behind each published figure panel, written as CSV + JSON sidecar.

Caption parameters are applied on top of In⁺-like defaults (ν = 2.28e-6,
γ_l = 1e-4); user overrides are applied last.  Panels 1b and 1c do not quote
Rabi frequencies, so they reuse the ATS (ε₁ = 10, ε₂ = 1e-3) and CIC
(ε₁ = 0.8, ε₂ = 0.2) settings of the off-resonant panels at δ₁ = 0.
Panel 1d has no stated ε₁ range; we use ε₁ ∈ [0.1, 5].
"""

from __future__ import annotations

import warnings
from pathlib import Path

import numpy as np

from .. import closedform, poleatlas
from ..core import DEFAULT_GAMMA_L, DEFAULT_NU, SystemParams
from ..errors import TrajectoryJump, UnknownFigure
from ..master import steady_state_grid
from . import io
from .report import border_table
from .scan import OBSERVABLES, default_threads, scan

ATS = {"eps1": 10.0, "eps2": 1e-3}
CIC = {"eps1": 0.8, "eps2": 0.2}

CAPTIONS = {
    "1b": {**ATS, "delta1": 0.0},
    "1c": {**CIC, "delta1": 0.0},
    "1d": {"eps2": 0.1, "delta1": 0.0},
    "2": {"eps1": 2.0, "delta1": 0.0},
    "3": {"delta1": 0.0},
    "4": {"eps1": 0.8, "eps2": 0.2, "delta1": 0.0},
    "5a": {**ATS, "delta1": 7.0},
    "5b": {**CIC, "delta1": 7.0},
    "6a": dict(ATS),
    "6b": dict(CIC),
}

SWEEP_POINTS = 100
GRID_1D = 100


def figure_params(cmd: str, overrides: dict | None = None) -> SystemParams:
    if cmd not in CAPTIONS:
        raise UnknownFigure(f"unknown figure {cmd!r}; choose from {sorted(CAPTIONS)}")
    values = {"nu": DEFAULT_NU, "gamma_l": DEFAULT_GAMMA_L, **CAPTIONS[cmd], **(overrides or {})}
    return SystemParams(**values)


def _meta(p, method, grid_spec, notes=()):
    return {"params": p.as_dict(), "method": method, "grid": grid_spec, "warnings": list(notes)}


def _scan_panel(cmd, p, outdir, threads):
    s = scan(p, method="numeric", threads=threads)
    rows = np.column_stack([s.grid, s.rows])
    path = outdir / f"fig{cmd}.csv"
    return [io.write_csv(path, ("delta2",) + OBSERVABLES, rows, _meta(p, s.method, s.grid_spec))]


def _fig1d(cmd, p, outdir, threads):
    eps1 = np.linspace(0.1, 5.0, GRID_1D)
    half = 3.0 * max(p.gamma1, eps1.max())
    d2 = np.linspace(-half, half, GRID_1D)
    rows = []
    for e1 in eps1:
        x = steady_state_grid(p.replace(eps1=e1), d2)
        rows.extend(zip(np.full(d2.size, e1), d2, x[:, 0]))
    spec = {"kind": "2d", "eps1": [0.1, 5.0, GRID_1D], "delta2": [-half, half, GRID_1D]}
    path = outdir / "fig1d.csv"
    return [io.write_csv(path, ("eps1", "delta2", "rho11"), rows, _meta(p, "numeric", spec))]


def _fig2(cmd, p, outdir, threads):
    e2c = closedform.critical_eps2(p)
    grid = np.geomspace(0.1 * e2c, 10 * e2c, SWEEP_POINTS)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        closed = [closedform.lambdas(p.replace(eps2=e)) for e in grid]
        sets = poleatlas.track(p, "eps2", grid, threads=threads)
    numeric = poleatlas.upper_pair_trajectories(sets)
    notes = sorted({str(w.message) for w in caught})
    spec = {"kind": "log", "variable": "eps2", "start": grid[0], "stop": grid[-1],
            "points": SWEEP_POINTS, "eps2_c": e2c}
    header = ("eps2", "lambda1_closed", "lambda2_closed", "lambda1_numeric", "lambda2_numeric")
    paths = []
    for name, part in (("re_lambda.csv", np.real), ("im_lambda.csv", np.imag)):
        rows = [(e, part(c.lambda1), part(c.lambda2), part(n[0]), part(n[1]))
                for e, c, n in zip(grid, closed, numeric)]
        paths.append(io.write_csv(outdir / name, header, rows, _meta(p, "closedform+poleatlas", spec, notes)))
    return paths


def _fig3(cmd, p, outdir, threads):
    grid = np.geomspace(0.1, 100.0, SWEEP_POINTS)
    rows = border_table(grid, p)
    spec = {"kind": "log", "variable": "eps1", "start": 0.1, "stop": 100.0, "points": SWEEP_POINTS}
    return [io.write_csv(outdir / "fig3.csv", ("eps1", "eps2_c", "eps2_c_strong"), rows,
                         _meta(p, "closedform", spec))]


def pole_table(sweep_values, sets):
    header = ["sweep_value"]
    for k in range(1, 5):
        header += [f"re_pole_{k}", f"im_pole_{k}", f"re_residue_{k}", f"im_residue_{k}"]
    rows = []
    for v, ps in zip(sweep_values, sets):
        row = [v]
        for z, r, cancelled in zip(ps.poles, ps.residues, ps.cancelled):
            row += [None] * 4 if cancelled else [z.real, z.imag, r.real, r.imag]
        row += [None] * (len(header) - len(row))
        rows.append(row)
    return header, rows


def _fig6(cmd, p, outdir, threads):
    grid = np.linspace(-7.0, 7.0, SWEEP_POINTS)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TrajectoryJump)
        sets = poleatlas.track(p, "delta1", grid, threads=threads)
    header, rows = pole_table(grid, sets)
    spec = {"kind": "linear", "variable": "delta1", "start": -7.0, "stop": 7.0, "points": SWEEP_POINTS}
    notes = sorted({str(w.message) for w in caught})
    return [io.write_csv(outdir / f"fig{cmd}.csv", header, rows, _meta(p, "poleatlas", spec, notes))]


_BUILDERS = {
    "1b": _scan_panel, "1c": _scan_panel, "1d": _fig1d, "2": _fig2, "3": _fig3,
    "4": _scan_panel, "5a": _scan_panel, "5b": _scan_panel, "6a": _fig6, "6b": _fig6,
}


def figure(cmd: str, overrides: dict | None = None, outdir=".", threads: int | None = None) -> list[Path]:
    """Compute one figure panel and write its CSV file(s) into ``outdir``."""
    p = figure_params(cmd, overrides)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    threads = default_threads() if threads is None else threads
    return _BUILDERS[cmd](cmd, p, outdir, threads)
