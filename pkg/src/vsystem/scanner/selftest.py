"""Fast numerical self-checks behind ``vsystem selftest``."""

from __future__ import annotations

import numpy as np

from .. import closedform
from .._backend import BACKEND, compiled_kernels, python_kernels
from ..core import SystemParams, reconstruct
from ..master import build_generator, steady_state
from .report import bisect_border


def _two_level(rng):
    worst = 0.0
    for _ in range(20):
        e1, d1 = rng.uniform(0, 5), rng.uniform(-5, 5)
        s = steady_state(build_generator(SystemParams(eps1=e1, eps2=0.0, gamma_l=0.0, delta1=d1, nu=1e-3)))
        worst = max(worst, abs(s.rho11 - e1**2 / (2 * e1**2 + 1 + d1**2)))
    return worst < 1e-10, f"max |error| {worst:.2e}"


def _physical(rng):
    worst = 0.0
    for _ in range(20):
        p = SystemParams(eps1=rng.uniform(0, 5), eps2=rng.uniform(0, 1), nu=10 ** rng.uniform(-5, -1),
                         gamma_l=rng.uniform(0, 0.1), delta1=rng.uniform(-5, 5), delta2=rng.uniform(-5, 5))
        rho = reconstruct(steady_state(build_generator(p)))
        worst = max(worst, -np.linalg.eigvalsh(rho).min())
    return worst < 1e-9, f"most negative eigenvalue {-worst:.2e}"


def _backends(rng):
    if compiled_kernels is None:
        return True, "compiled kernels not built; only the numpy path is active"
    d = np.linspace(-20, 20, 101)
    args = (1.0, 1e-4, 1e-3, 2.0, 0.05, 0.7)
    a = python_kernels.steady_scan(*args, d)[0]
    b = compiled_kernels.steady_scan(*args, d)[0]
    diff = float(np.abs(a - b).max())
    return diff < 1e-12, f"max backend difference {diff:.2e}"


def _border(rng):
    worst = 0.0
    for e1 in (0.3, 2.0, 30.0):
        p = SystemParams(eps1=e1, nu=1e-5)
        worst = max(worst, abs(bisect_border(p) / closedform.critical_eps2(p) - 1))
    return worst < 1e-9, f"max relative border error {worst:.2e}"


CHECKS = [("two-level closure", _two_level), ("physical steady states", _physical),
          ("kernel backends agree", _backends), ("border bisection", _border)]


def run(echo=print) -> bool:
    rng = np.random.default_rng(20001)
    echo(f"backend: {BACKEND}")
    ok = True
    for name, check in CHECKS:
        passed, detail = check(rng)
        ok &= passed
        echo(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    return ok
