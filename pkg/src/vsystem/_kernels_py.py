"""Numpy implementation of the hot kernels.

Mirrors ``_kernels.pyx`` function for function; used when the compiled
extension is unavailable or ``VSYSTEM_PURE_PYTHON`` is set.
"""

import numpy as np

NAME = "python"


def assemble(gamma1, nu, gamma_l, eps1, eps2, delta1, delta2):
    """Generators A(δ₂) for every δ₂ in ``delta2``; returns (A[n,8,8], c[8])."""
    d2 = np.atleast_1d(np.asarray(delta2, dtype=float))
    n = d2.shape[0]
    A = np.zeros((n, 8, 8))
    c = np.zeros(8)
    g13 = gamma1 + gamma_l
    g12 = gamma1 + nu
    g23 = nu + gamma_l
    diff = delta1 - d2
    # ρ11
    A[:, 0, 0] = -2.0 * gamma1
    A[:, 0, 5] = 2.0 * eps1
    # ρ22
    A[:, 1, 1] = -2.0 * nu
    A[:, 1, 7] = 2.0 * eps2
    # Re ρ12, Im ρ12
    A[:, 2, 2] = -g12
    A[:, 2, 3] = diff
    A[:, 2, 5] = eps2
    A[:, 2, 7] = eps1
    A[:, 3, 2] = -diff
    A[:, 3, 3] = -g12
    A[:, 3, 4] = -eps2
    A[:, 3, 6] = eps1
    # Re ρ13, Im ρ13
    A[:, 4, 3] = eps2
    A[:, 4, 4] = -g13
    A[:, 4, 5] = delta1
    A[:, 5, 0] = -2.0 * eps1
    A[:, 5, 1] = -eps1
    A[:, 5, 2] = -eps2
    A[:, 5, 4] = -delta1
    A[:, 5, 5] = -g13
    c[5] = eps1
    # Re ρ23, Im ρ23
    A[:, 6, 3] = -eps1
    A[:, 6, 6] = -g23
    A[:, 6, 7] = d2
    A[:, 7, 0] = -eps2
    A[:, 7, 1] = -2.0 * eps2
    A[:, 7, 2] = -eps1
    A[:, 7, 6] = -d2
    A[:, 7, 7] = -g23
    c[7] = eps2
    return A, c


def solve_batch(A, c):
    """Solve A x = -c for a stack of 8×8 systems with one refinement step.

    Returns (x[n,8], rcond[n]) where rcond is the reciprocal 1-norm
    condition number; singular members come back as NaN with rcond 0.
    """
    A = np.asarray(A, dtype=float)
    c = np.broadcast_to(np.asarray(c, dtype=float), A.shape[:-1])
    try:
        return _solve_stack(A, c)
    except np.linalg.LinAlgError:
        pass
    n = A.shape[0]
    x = np.full((n, 8), np.nan)
    rcond = np.zeros(n)
    for i in range(n):
        try:
            x[i], rcond[i] = (r[0] for r in _solve_stack(A[i:i + 1], c[i:i + 1]))
        except np.linalg.LinAlgError:
            continue
    return x, rcond


def _solve_stack(A, c):
    inv = np.linalg.inv(A)
    x = np.linalg.solve(A, -c[..., None])[..., 0]
    r = np.einsum("nij,nj->ni", A, x) + c
    x -= np.einsum("nij,nj->ni", inv, r)
    norm_a = np.abs(A).sum(axis=1).max(axis=1)
    norm_inv = np.abs(inv).sum(axis=1).max(axis=1)
    return x, 1.0 / (norm_a * norm_inv)


def steady_scan(gamma1, nu, gamma_l, eps1, eps2, delta1, delta2):
    A, c = assemble(gamma1, nu, gamma_l, eps1, eps2, delta1, delta2)
    return solve_batch(A, np.broadcast_to(c, (A.shape[0], 8)))


BLOCK = 1024


def rk4(A, c, X0, dt, nsteps, bound):
    """Classical RK4 on dx/dt = A x + c for every row of X0.

    For an autonomous linear system the four stages collapse into one
    propagator step x ← P x + q, with P and q the degree-4 Taylor
    polynomials of exp(hA); this is algebraically the same method.  Long
    runs advance BLOCK steps at a time with P^BLOCK and the matching
    accumulated offset, so divergence is detected to within one block.
    Returns (X, failed_step) with failed_step = -1 on success.
    """
    A = np.asarray(A, dtype=float)
    c = np.asarray(c, dtype=float)
    X = np.array(X0, dtype=float, copy=True)
    hA = dt * A
    eye = np.eye(8)
    hA2 = hA @ hA
    hA3 = hA2 @ hA
    P = eye + hA + hA2 / 2.0 + hA3 / 6.0 + hA3 @ hA / 24.0
    q = dt * (eye + hA / 2.0 + hA2 / 6.0 + hA3 / 24.0) @ c

    nsteps = int(nsteps)
    step = 0
    if nsteps >= BLOCK:
        # doubling: (P, q) applied twice is (P², Pq + q)
        PB, qB = P, q
        for _ in range(BLOCK.bit_length() - 1):
            qB = PB @ qB + qB
            PB = PB @ PB
        PBT = PB.T.copy()
        while step + BLOCK <= nsteps:
            X = X @ PBT
            X += qB
            step += BLOCK
            if np.abs(X).max() > bound:
                return X, step - 1
    PT = P.T.copy()
    while step < nsteps:
        X = X @ PT
        X += q
        if np.abs(X).max() > bound:
            return X, step
        step += 1
    return X, -1
