"""Analytic results for a resonant pump (δ₁ = 0).

In the limit Γ₁, ε₁ ≫ γ_l, ε₂ ≫ ν the excited-state population takes the form

    ρ₁₁(δ₂) = B · [1 − K (δ₂² + Γ₁²) / ((δ₂² − λ₁²)(δ₂² − λ₂²))],
    B = ε₁²/D,  K = ε₁²ε₂²Γ₁/(D ν),  D = 2ε₁² + Γ₁²,

with λ₁,₂² = a ± b.  The sign of b² separates the Autler-Townes regime
(b² < 0: λ₁ = λ₂*, two equal-width lines at ±Re λ₁) from the clock-laser
induced coherence regime (b² > 0: both λ imaginary, two lines of different
width centred at δ₂ = 0).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import Regime, SystemParams
from .errors import DegenerateCritical, NegativeRadicand, RegimeWarning, WrongBranch

CRITICAL_TOL = 1e-12


def _require_resonant_pump(p: SystemParams):
    if p.delta1 != 0:
        raise WrongBranch(f"closed forms need delta1 == 0, got {p.delta1}")


def _d(p):
    return 2 * p.eps1**2 + p.gamma1**2


def eta_pair(p: SystemParams) -> tuple[float, float]:
    """η₁,₂ = 3D ± 2√(9ε₁⁴ + 10ε₁²Γ₁² + 2Γ₁⁴), with η₁ ≥ η₂."""
    e2, g2 = p.eps1**2, p.gamma1**2
    root = math.sqrt(9 * e2**2 + 10 * e2 * g2 + 2 * g2**2)
    return 3 * (2 * e2 + g2) + 2 * root, 3 * (2 * e2 + g2) - 2 * root


def ab(p: SystemParams) -> tuple[float, float]:
    """Return ``(a, b_squared)``; b² is kept signed so the regime is a sign test."""
    if not p.nu > 0:
        raise ValueError("nu must be > 0")
    D = _d(p)
    X = p.eps1**2 * p.eps2**2 * p.gamma1
    eta1, eta2 = eta_pair(p)
    denom = 2 * D * p.nu
    a = ((4 * p.eps1**4 - p.gamma1**4) * p.nu - X) / denom
    b_squared = (X - D * p.nu * eta1) * (X - D * p.nu * eta2) / denom**2
    return a, b_squared


def regime(p: SystemParams, tol: float = CRITICAL_TOL) -> Regime:
    return Regime.from_b_squared(ab(p)[1], tol)


@dataclass(frozen=True)
class LambdaPair:
    lambda1: complex
    lambda2: complex
    a: float
    b_squared: float
    regime: Regime
    lambda0: float | None = None
    Gamma0: float | None = None

    def upper_poles(self) -> tuple[complex, complex]:
        """The two δ₂-plane poles with positive imaginary part, sorted by real part."""
        if self.regime is Regime.CIC:
            pair = (self.lambda1, self.lambda2)
        else:
            pair = (self.lambda1, -self.lambda2)
        return tuple(sorted(pair, key=lambda z: (z.real, z.imag)))


def lambdas(p: SystemParams, tol: float = CRITICAL_TOL) -> LambdaPair:
    a, b2 = ab(p)
    tag = Regime.from_b_squared(b2, tol)
    if tag is Regime.CRITICAL:
        warnings.warn(f"b^2 = {b2:.3g} within {tol:g} of zero: regime border",
                      DegenerateCritical, stacklevel=2)
        lam = cmath.sqrt(a)
        if lam.imag < 0 or (lam.imag == 0 and lam.real < 0):
            lam = -lam
        return LambdaPair(lam, lam, a, b2, tag)
    if tag is Regime.ATS:
        lam1 = cmath.sqrt(complex(a, math.sqrt(-b2)))
        return LambdaPair(lam1, lam1.conjugate(), a, b2, tag,
                          lambda0=lam1.real, Gamma0=lam1.imag)
    b = math.sqrt(b2)
    if a + b >= 0 or a - b >= 0:
        warnings.warn(f"a ± b < 0 does not hold (a={a:.6g}, b={b:.6g})",
                      RegimeWarning, stacklevel=2)
    return LambdaPair(1j * math.sqrt(abs(a + b)), 1j * math.sqrt(abs(a - b)), a, b2, tag)


def _baseline(p):
    return p.eps1**2 / _d(p)


def _strength(p):
    return p.eps1**2 * p.eps2**2 * p.gamma1 / (_d(p) * p.nu)


def rho11_closed(p: SystemParams, delta2):
    """Excited-state population in the limit form, independent of γ_l."""
    _require_resonant_pump(p)
    pair = lambdas(p)
    d = np.asarray(delta2, dtype=float)
    s = d * d
    poles = (s - pair.lambda1**2) * (s - pair.lambda2**2)
    out = _baseline(p) * (1 - _strength(p) * (s + p.gamma1**2) / poles.real)
    return float(out) if out.ndim == 0 else out


def rho11_ats_form(p: SystemParams, delta2):
    """Double-Lorentzian form at ±λ₀ with common width Γ₀ (ATS regime only)."""
    _require_resonant_pump(p)
    pair = lambdas(p)
    if pair.regime is not Regime.ATS:
        raise ValueError(f"parameters are in the {pair.regime.value} regime")
    d = np.asarray(delta2, dtype=float)
    l0, g0 = pair.lambda0, pair.Gamma0
    den = ((d - l0)**2 + g0**2) * ((d + l0)**2 + g0**2)
    return _baseline(p) * (1 - _strength(p) * (d * d + p.gamma1**2) / den)


def rho11_cic_form(p: SystemParams, delta2):
    """Two Lorentzians centred at δ₂ = 0 with widths |λ₁|, |λ₂| (CIC regime only)."""
    _require_resonant_pump(p)
    pair = lambdas(p)
    if pair.regime is not Regime.CIC:
        raise ValueError(f"parameters are in the {pair.regime.value} regime")
    d = np.asarray(delta2, dtype=float)
    den = (d * d + abs(pair.lambda1)**2) * (d * d + abs(pair.lambda2)**2)
    return _baseline(p) * (1 - _strength(p) * (d * d + p.gamma1**2) / den)


def ats_position(p: SystemParams) -> float:
    """Approximate line position λ₀ in the Autler-Townes regime.

    Unlike :func:`rho11_closed` this expression carries an explicit γ_l/Γ₁
    term; both are kept as derived.
    """
    _require_resonant_pump(p)
    if regime(p) is not Regime.ATS:
        warnings.warn("ats_position evaluated outside the ATS regime", RegimeWarning, stacklevel=2)
    r = p.gamma1 / p.eps1
    inner = 1 + 2 * r**2 + (p.eps2 / p.eps1)**2 * p.gamma1 / p.nu
    outer = math.sqrt(inner) - p.gamma_l / p.gamma1 - r**2
    if outer < 0:
        raise NegativeRadicand(f"outer radicand {outer:.3g} < 0: ATS position undefined")
    return p.eps1 * math.sqrt(outer)


def critical_eps2(p: SystemParams) -> float:
    """Clock Rabi frequency at which b² = 0 on the upper branch."""
    if not p.eps1 > 0 or not p.nu > 0:
        raise ValueError("critical_eps2 needs eps1 > 0 and nu > 0")
    r2 = (p.gamma1 / p.eps1)**2
    radical = math.sqrt(9 + 10 * r2 + 2 * r2**2)
    return p.eps1 * math.sqrt((2 + r2) * (6 + 3 * r2 + 2 * radical) * p.nu / p.gamma1)


def critical_eps2_strong(p: SystemParams) -> float:
    """Linear border ε₁·√24·√(ν/Γ₁), valid for ε₁ ≫ Γ₁."""
    if p.eps1 < 10 * p.gamma1:
        warnings.warn("linear border law used with eps1 < 10 gamma1", RegimeWarning, stacklevel=2)
    return p.eps1 * math.sqrt(24.0) * math.sqrt(p.nu / p.gamma1)


def lower_critical_eps2(p: SystemParams) -> float | None:
    """Second zero of b² (from the η₂ factor), present only when ε₁ < Γ₁/2.

    Below it b² turns positive again although the lines are unresolved; the
    ATS regime is the window between this value and :func:`critical_eps2`.
    """
    eta2 = eta_pair(p)[1]
    if eta2 <= 0:
        return None
    return math.sqrt(_d(p) * p.nu * eta2 / (p.eps1**2 * p.gamma1))


@dataclass(frozen=True)
class CicDecomposition:
    """ρ₁₁ ≈ baseline + coherence peak − transfer dip, each a Lorentzian in δ₂.

    ``coherence_term`` (width √(2(ε₁² + Γ₁²))) is the positive contribution
    that does not depend on the clock power; ``transfer_term`` (width
    √(ε₁²ε₂²Γ₁/(Dν)), growing linearly with ε₂) is the negative one
    describing population pumped into |2⟩.
    """
    baseline: float
    coherence_amplitude: float
    coherence_width: float
    transfer_amplitude: float
    transfer_width: float
    width_ratio_estimate: float

    def coherence_term(self, delta2):
        d = np.asarray(delta2, dtype=float)
        return self.coherence_amplitude / (d * d + self.coherence_width**2)

    def transfer_term(self, delta2):
        d = np.asarray(delta2, dtype=float)
        return -self.transfer_amplitude / (d * d + self.transfer_width**2)

    def total(self, delta2):
        return self.baseline + self.coherence_term(delta2) + self.transfer_term(delta2)

    @property
    def width_ratio(self) -> float:
        """Exact transfer/coherence width ratio of the two terms."""
        return self.transfer_width / self.coherence_width


def cic_decomposition(p: SystemParams) -> CicDecomposition:
    _require_resonant_pump(p)
    if regime(p) is not Regime.CIC:
        warnings.warn("CIC decomposition used outside the CIC regime", RegimeWarning, stacklevel=2)
    D = _d(p)
    e1sq = p.eps1**2
    return CicDecomposition(
        baseline=e1sq / D,
        coherence_amplitude=e1sq,
        coherence_width=math.sqrt(2 * (e1sq + p.gamma1**2)),
        transfer_amplitude=e1sq**2 * p.eps2**2 * p.gamma1 / (D**2 * p.nu),
        transfer_width=math.sqrt(e1sq * p.eps2**2 * p.gamma1 / (D * p.nu)),
        width_ratio_estimate=math.sqrt(6) * p.eps2 / critical_eps2(p),
    )
