"""Exact treatment of the V-system optical Bloch equations.

With ρ₃₃ = 1 − ρ₁₁ − ρ₂₂ substituted, the five independent equations of
motion split into eight real ones, dx/dt = A·x + c.  The damping rates are
kept exactly as written in the model: γ_l dephases ρ₁₃ and ρ₂₃, while ρ₁₂
decays at Γ₁ + ν only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .core import BlochState, SystemParams
from .errors import SingularGenerator, UnstableStep

#: Reciprocal condition numbers below this are treated as singular.
RCOND_MIN = 1e-14
DIVERGENCE_BOUND = 10.0


@dataclass(frozen=True, eq=False)
class AffineGenerator:
    A: np.ndarray
    c: np.ndarray
    params: SystemParams | None = None

    def __post_init__(self):
        A = np.array(self.A, dtype=float).reshape(8, 8)
        c = np.array(self.c, dtype=float).reshape(8)
        A.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", c)

    def rhs(self, x: np.ndarray) -> np.ndarray:
        return self.A @ x + self.c

    def residual(self, s: BlochState) -> float:
        return float(np.abs(self.rhs(s.x)).max())


def build_generator(p: SystemParams, delta2: float | None = None) -> AffineGenerator:
    """Generator at the parameters' own δ₂, or at ``delta2`` when given."""
    d2 = p.delta2 if delta2 is None else float(delta2)
    A, c = kernels.assemble(p.gamma1, p.nu, p.gamma_l, p.eps1, p.eps2, p.delta1, d2)
    if delta2 is not None:
        p = p.replace(delta2=d2)
    return AffineGenerator(A[0], c, p)


def delta2_derivative(p: SystemParams) -> np.ndarray:
    """dA/dδ₂, constant because δ₂ enters the generator affinely."""
    A, _ = kernels.assemble(p.gamma1, p.nu, p.gamma_l, p.eps1, p.eps2, p.delta1,
                            np.array([0.0, 1.0]))
    return A[1] - A[0]


def steady_state(g: AffineGenerator) -> BlochState:
    """Fixed point of the generator, found by a partial-pivot dense solve."""
    x, rcond = kernels.solve_batch(g.A[None], g.c[None])
    if not rcond[0] > RCOND_MIN:
        d2 = g.params.delta2 if g.params is not None else None
        raise SingularGenerator(f"generator is numerically singular (rcond={rcond[0]:.3g})",
                                delta2=d2, rcond=float(rcond[0]))
    return BlochState(x[0])


def steady_state_grid(p: SystemParams, delta2) -> np.ndarray:
    """Steady states for every δ₂ in ``delta2`` as an (n, 8) array."""
    d2 = np.atleast_1d(np.asarray(delta2, dtype=float))
    x, rcond = kernels.steady_scan(p.gamma1, p.nu, p.gamma_l, p.eps1, p.eps2, p.delta1, d2)
    bad = np.flatnonzero(~(rcond > RCOND_MIN))
    if bad.size:
        i = int(bad[0])
        raise SingularGenerator(f"generator is numerically singular at delta2={float(d2[i])!r}",
                                delta2=float(d2[i]), rcond=float(rcond[i]))
    return x


def max_step(g: AffineGenerator) -> float:
    """Largest step allowed by the stability guard dt ≤ 0.1/‖A‖∞."""
    return 0.1 / np.abs(g.A).sum(axis=1).max()


def evolve(g: AffineGenerator, x0: BlochState, t_final: float, dt: float | None = None) -> BlochState:
    """Integrate dx/dt = A·x + c from ``x0`` to ``t_final`` with fixed-step RK4.

    ``dt`` defaults to the stability bound; the step is shrunk slightly so
    that a whole number of steps lands exactly on ``t_final``.
    """
    return evolve_many(g, [x0], t_final, dt)[0]


def evolve_many(g: AffineGenerator, x0s, t_final: float, dt: float | None = None) -> list[BlochState]:
    if t_final < 0:
        raise ValueError(f"t_final must be >= 0, got {t_final}")
    X0 = np.array([s.x if isinstance(s, BlochState) else np.asarray(s, dtype=float)
                   for s in x0s], dtype=float).reshape(-1, 8)
    if t_final == 0:
        return [BlochState(x) for x in X0]
    limit = max_step(g)
    if dt is None:
        dt = limit
    if not 0 < dt <= limit * (1 + 1e-12):
        raise ValueError(f"dt={dt} violates the stability guard dt <= {limit:.6g}")
    nsteps = max(1, math.ceil(t_final / dt - 1e-9))
    X, failed = kernels.rk4(g.A, g.c, X0, t_final / nsteps, nsteps, DIVERGENCE_BOUND)
    if failed >= 0:
        raise UnstableStep(f"state left |x| <= {DIVERGENCE_BOUND} at step {failed}")
    return [BlochState(x) for x in X]
