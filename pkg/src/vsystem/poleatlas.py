"""Poles of ρ₁₁(δ₂) for arbitrary pump detuning.

δ₂ enters the generator in four rows only, so det A(δ₂) is a quartic in δ₂.
The quartic is recovered by interpolating the determinant at Chebyshev
nodes; its roots (from a companion matrix, then Newton-polished against the
exact determinant) are the candidate poles.  Residues are integrated
numerically on a small circle around each root using Cramer's rule for ρ₁₁,
and roots whose residue vanishes (shared with the numerator) are dropped.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._backend import kernels
from .core import Regime, SystemParams
from .errors import IllConditionedFit, TrajectoryJump

FIT_TOL = 1e-8
CANCEL_TOL = 1e-10
N_CIRCLE = 64
_HELD_OUT = 0.3141592653589793


@dataclass(frozen=True)
class _Fit:
    coeffs: np.ndarray      # descending, leading coefficient 1
    lead: float             # raw δ₂⁴ coefficient of det A
    even: bool              # δ₁ = 0: odd coefficients vanish identically


def _generator_parts(p: SystemParams):
    A, c = kernels.assemble(p.gamma1, p.nu, p.gamma_l, p.eps1, p.eps2, p.delta1,
                            np.array([0.0, 1.0]))
    return A[0], A[1] - A[0], c


def fit_span(p: SystemParams) -> float:
    return max(10.0, 3.0 * p.eps1)


def _fit(p: SystemParams) -> _Fit:
    span = fit_span(p)
    t = np.cos((2 * np.arange(5) + 1) * np.pi / 10)
    nodes = np.append(t, _HELD_OUT) * span
    A, _ = kernels.assemble(p.gamma1, p.nu, p.gamma_l, p.eps1, p.eps2, p.delta1, nodes)
    dets = np.linalg.det(A)
    scaled = np.linalg.solve(np.vander(t, 5, increasing=True), dets[:5])
    predicted = np.polynomial.polynomial.polyval(_HELD_OUT, scaled)
    scale = np.abs(dets).max()
    if scale == 0 or abs(predicted - dets[5]) > FIT_TOL * scale:
        raise IllConditionedFit(
            f"held-out determinant misfit {abs(predicted - dets[5]):.3g} vs scale {scale:.3g}")
    ascending = scaled / span ** np.arange(5)
    lead = ascending[4]
    if lead == 0:
        raise IllConditionedFit("quartic leading coefficient vanished")
    coeffs = ascending[::-1] / lead
    even = p.delta1 == 0
    if even:
        coeffs = coeffs.copy()
        coeffs[1] = coeffs[3] = 0.0
    return _Fit(coeffs, lead, even)


def denominator_poly(p: SystemParams) -> np.ndarray:
    """Five coefficients of det A(δ₂), highest power first, leading coefficient 1."""
    return _fit(p).coeffs


def companion_roots(coeffs) -> np.ndarray:
    """Roots of a monic polynomial (descending coefficients) via its companion matrix."""
    coeffs = np.asarray(coeffs)
    n = coeffs.size - 1
    C = np.zeros((n, n), dtype=coeffs.dtype)
    C[0, :] = -coeffs[1:]
    C[np.arange(1, n), np.arange(n - 1)] = 1.0
    return np.linalg.eigvals(C)


def _log_derivative(A0, B, z):
    """f'/f for f(z) = det(A0 + zB)."""
    M = A0 + z * B
    return np.trace(np.linalg.solve(M, B))


def _polish(A0, B, z, others, maxiter=8):
    """Newton on the exact determinant; reverts if it wanders toward another root."""
    guard = 0.25 * min((abs(z - o) for o in others), default=np.inf)
    w = z
    for _ in range(maxiter):
        try:
            step = -1.0 / _log_derivative(A0, B, w)
        except np.linalg.LinAlgError:
            break
        if not np.isfinite(step):
            break
        w = w + step
        if abs(w - z) > guard:
            return z
        if abs(step) <= 4e-16 * max(abs(w), 1.0):
            break
    return w


def _polish_even(A0, B, s, others, maxiter=8):
    """Newton in s = δ₂² for the even quartic, preserving the ±δ₂ structure."""
    guard = 0.25 * min((abs(s - o) for o in others), default=np.inf)
    w = s
    for _ in range(maxiter):
        root = np.sqrt(w)
        if root == 0:
            break
        try:
            step = -2.0 * root / _log_derivative(A0, B, root)
        except np.linalg.LinAlgError:
            break
        if not np.isfinite(step):
            break
        w = w + step
        if abs(w - s) > guard:
            return s
        if abs(step) <= 4e-16 * max(abs(w), 1.0):
            break
    return w


def _roots(p: SystemParams, fit: _Fit, A0, B) -> np.ndarray:
    if fit.even:
        s = companion_roots(np.array([1.0, fit.coeffs[2], fit.coeffs[4]])).astype(complex)
        if s[0].imag != 0:
            # complex-conjugate pair in s: polish one, mirror the other exactly
            top = s[0] if s[0].imag > 0 else s[1]
            top = _polish_even(A0, B, top, [top.conjugate()])
            s = np.array([top, top.conjugate()])
        else:
            s = np.array([_polish_even(A0, B, s[k], [s[1 - k]]) for k in range(2)])
        r = np.sqrt(s)
        # principal root has Re ≥ 0; the pair ±r covers both half-planes
        return np.concatenate([r, -r])
    z = companion_roots(fit.coeffs).astype(complex)
    return np.array([_polish(A0, B, z[k], np.delete(z, k)) for k in range(z.size)])


def _rho11_cramer(A0, B, c, z):
    """ρ₁₁ numerator det(A(z) with column 0 replaced by −c), vectorized over z."""
    z = np.asarray(z, dtype=complex)
    M = A0[None] + z[:, None, None] * B[None]
    M[:, :, 0] = -c[None, :]
    return np.linalg.det(M)


@dataclass(frozen=True, eq=False)
class PoleSet:
    """All four quartic roots with their residues in ρ₁₁(δ₂).

    ``cancelled`` marks roots shared with the numerator; they carry no
    spectral weight and are excluded from :attr:`physical`.
    """
    poles: np.ndarray
    residues: np.ndarray
    cancelled: np.ndarray
    denom_coeffs: np.ndarray
    params: SystemParams = field(repr=False)

    @property
    def physical(self) -> np.ndarray:
        return self.poles[~self.cancelled]

    @property
    def upper(self) -> np.ndarray:
        """Physical poles with Im > 0, sorted by real part."""
        ph = self.physical
        up = ph[ph.imag > 0]
        return up[np.lexsort((up.imag, up.real))]

    def heights(self) -> np.ndarray:
        """|residue|/|Im pole|: the peak size of the Lorentzian each pole produces."""
        return np.abs(self.residues) / np.maximum(np.abs(self.poles.imag), 1e-300)

    def reordered(self, order) -> "PoleSet":
        order = np.asarray(order)
        return PoleSet(self.poles[order], self.residues[order], self.cancelled[order],
                       self.denom_coeffs, self.params)


def physical_poles(p: SystemParams, cancel_tol: float = CANCEL_TOL) -> PoleSet:
    fit = _fit(p)
    A0, B, c = _generator_parts(p)
    roots = _roots(p, fit, A0, B)

    radius = 1e-3 * np.abs(roots) + 1e-6
    theta = 2 * np.pi * np.arange(N_CIRCLE) / N_CIRCLE
    unit = np.exp(1j * theta)
    residues = np.empty(roots.size, dtype=complex)
    for k, (z0, r) in enumerate(zip(roots, radius)):
        z = z0 + r * unit
        f = _rho11_cramer(A0, B, c, z) / (fit.lead * np.polyval(fit.coeffs, z))
        residues[k] = np.mean(f * r * unit)

    # spectral scale: |ρ11| at the line positions and across the fit window
    span = fit_span(p)
    sample = np.concatenate([roots.real, np.linspace(-span, span, 9)])
    x, _ = kernels.steady_scan(p.gamma1, p.nu, p.gamma_l, p.eps1, p.eps2, p.delta1, sample)
    scale = np.nanmax(np.abs(x[:, 0]))
    heights = np.abs(residues) / np.maximum(np.abs(roots.imag), 1e-300)
    cancelled = heights <= cancel_tol * scale
    return PoleSet(roots, residues, cancelled, fit.coeffs, p)


def pole_regime(ps: PoleSet, tol: float = 1e-9) -> Regime | None:
    """CIC when both upper poles sit on the imaginary axis, ATS otherwise.

    This reading is exact for a resonant pump.  Off resonance every line
    shifts with δ₁, so use :func:`parameter_regime` to label a parameter set.
    Returns None when fewer than two physical upper poles survive.
    """
    up = ps.upper
    if up.size < 2:
        return None
    scale = max(abs(up[0]), abs(up[1]), 1e-300)
    if abs(up[1] - up[0]) <= tol * scale:
        return Regime.CRITICAL
    if max(abs(up[0].real), abs(up[1].real)) <= tol * scale:
        return Regime.CIC
    return Regime.ATS


def parameter_regime(p: SystemParams, tol: float = 1e-9) -> Regime | None:
    """Regime of the (ε₁, ε₂, ν, γ_l) set, read from its poles at δ₁ = 0.

    ATS and CIC are defined for a resonant pump; an off-resonant spectrum
    belongs to the regime its parameter set has at δ₁ = 0.
    """
    return pole_regime(physical_poles(p.replace(delta1=0.0)), tol)


def _sweep_params(p: SystemParams, variable: str, value: float) -> SystemParams:
    if variable not in ("eps2", "delta1", "eps1", "nu", "gamma_l"):
        raise ValueError(f"cannot sweep {variable!r}")
    return p.replace(**{variable: float(value)})


def track(p: SystemParams, variable: str, grid, threads: int | None = None,
          jump_factor: float = 10.0) -> list[PoleSet]:
    """Pole sets along a sweep of ``variable``, relabelled into continuous trajectories.

    Adjacent grid points are matched by the assignment minimising the total
    complex displacement.  A step much larger than the previous one triggers
    :class:`TrajectoryJump`; this is expected where two poles collide on the
    regime border and exchange character.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("sweep grid is empty")
    if np.any(np.diff(grid) < 0):
        raise ValueError("sweep grid must be sorted")
    plist = [_sweep_params(p, variable, v) for v in grid]
    if threads and threads > 1 and len(plist) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            sets = list(pool.map(physical_poles, plist))
    else:
        sets = [physical_poles(q) for q in plist]

    out = [sets[0]]
    prev_step = None
    for j in range(1, len(sets)):
        prev, cur = out[-1], sets[j]
        cost = np.abs(prev.poles[:, None] - cur.poles[None, :])
        rows, cols = linear_sum_assignment(cost)
        order = cols[np.argsort(rows)]
        cur = cur.reordered(order)
        disp = np.abs(cur.poles - prev.poles)
        step = float(disp.max())
        if prev_step is not None and prev_step > 0:
            h_prev = grid[j - 1] - grid[j - 2]
            h = grid[j] - grid[j - 1]
            expected = prev_step * (h / h_prev if h_prev > 0 else 1.0)
            if step > jump_factor * expected and step > 1e-12 * (1 + np.abs(cur.poles).max()):
                warnings.warn(f"pole jump of {step:.3g} at {variable}={grid[j]:.6g} "
                              f"(expected ~{expected:.3g}); trajectories may swap here",
                              TrajectoryJump, stacklevel=2)
        prev_step = step
        out.append(cur)
    return out


def closest_match(ps: PoleSet, targets) -> float:
    """Largest distance from each target to its nearest physical pole."""
    ph = ps.physical
    return max(float(np.min(np.abs(ph - t))) for t in targets)


def narrow_and_broad(ps: PoleSet) -> tuple[complex, complex]:
    """The two upper poles ordered by |Im| (narrower line first)."""
    up = ps.upper
    if up.size < 2:
        raise ValueError("fewer than two physical poles in the upper half-plane")
    up = up[np.argsort(np.abs(up.imag))]
    return complex(up[0]), complex(up[1])


def upper_pair_trajectories(sets: list[PoleSet]) -> np.ndarray:
    """(n, 2) array of upper-half-plane poles per sweep point, by real part."""
    out = np.full((len(sets), 2), np.nan + 1j * np.nan)
    for i, ps in enumerate(sets):
        up = ps.upper
        out[i, :min(2, up.size)] = up[:2]
    return out


__all__ = ["PoleSet", "denominator_poly", "physical_poles", "track", "pole_regime", "parameter_regime",
           "companion_roots", "narrow_and_broad", "upper_pair_trajectories", "closest_match"]
