"""Regime reports and border tables."""

from __future__ import annotations

import warnings

import numpy as np

from .. import closedform, poleatlas
from ..core import Regime, SystemParams, check_limit_hierarchy
from ..errors import NumericalError


def _pair(z):
    return [float(np.real(z)), float(np.imag(z))]


def regime_report(p: SystemParams, factor: float = 10.0) -> dict:
    """Border values, regime tag, line poles and limit-hierarchy warnings.

    At δ₁ = 0 the tag is the sign of b²; otherwise it is read from the
    numerically extracted poles of the same parameter set at δ₁ = 0.
    """
    notes = [str(w) for w in check_limit_hierarchy(p, factor)]
    out = {"params": p.as_dict()}
    if p.eps1 > 0:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            out["eps2_c"] = closedform.critical_eps2(p)
            out["eps2_c_strong"] = closedform.critical_eps2_strong(p)
        notes += [str(w.message) for w in caught]
    else:
        out["eps2_c"] = out["eps2_c_strong"] = 0.0

    try:
        ps = poleatlas.physical_poles(p)
        out["poles"] = [_pair(z) for z in ps.upper]
        numeric_tag = poleatlas.parameter_regime(p) if p.delta1 != 0 else poleatlas.pole_regime(ps)
    except NumericalError as exc:
        notes.append(f"pole extraction failed: {exc}")
        out["poles"] = []
        numeric_tag = None

    if p.delta1 == 0:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            pair = closedform.lambdas(p)
        notes += [str(w.message) for w in caught]
        out["regime"] = pair.regime.value
        out["source"] = "closedform"
        out["a"] = pair.a
        out["b_squared"] = pair.b_squared
        out["lambda1"] = _pair(pair.lambda1)
        out["lambda2"] = _pair(pair.lambda2)
        if pair.regime is Regime.ATS:
            out["lambda0"] = pair.lambda0
            out["Gamma0"] = pair.Gamma0
    else:
        out["regime"] = numeric_tag.value if numeric_tag is not None else "undetermined"
        out["source"] = "poleatlas at delta1 = 0"
    out["warnings"] = notes
    return out


def border_table(eps1_grid, p: SystemParams) -> list[tuple[float, float, float]]:
    """(ε₁, ε₂ᶜ, linear-law ε₂ᶜ) for each ε₁ in the grid."""
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for e1 in np.asarray(eps1_grid, dtype=float):
            q = p.replace(eps1=e1)
            rows.append((e1, closedform.critical_eps2(q), closedform.critical_eps2_strong(q)))
    return rows


def bisect_border(p: SystemParams, rtol: float = 1e-12, maxiter: int = 200) -> float:
    """Upper zero of b²(ε₂) located by bisection on its sign alone.

    The bracket is set from the b² factor structure: the point where the
    clock term equals the mean of the two η-terms lies strictly inside the
    ATS window, and twice the upper η-term lies beyond the border.
    """
    D = 2 * p.eps1**2 + p.gamma1**2
    eta1, eta2 = closedform.eta_pair(p)
    to_eps2 = lambda X: np.sqrt(X / (p.eps1**2 * p.gamma1))  # noqa: E731
    lo = to_eps2(D * p.nu * 0.5 * (eta1 + max(eta2, 0.0)))
    hi = to_eps2(2 * D * p.nu * eta1)
    sign = lambda e2: closedform.ab(p.replace(eps2=e2))[1] > 0  # noqa: E731
    if sign(lo) or not sign(hi):
        raise ValueError("border bracket does not straddle the sign change")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if sign(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= rtol * hi:
            break
    return 0.5 * (lo + hi)
