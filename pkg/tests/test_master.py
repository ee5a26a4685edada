import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import dense_steady_state, two_level_rho11
from vsystem import _backend
from vsystem.core import BlochState, SystemParams, random_physical_state, reconstruct
from vsystem.errors import SingularGenerator
from vsystem.master import (AffineGenerator, build_generator, delta2_derivative, evolve, evolve_many,
                            max_step, steady_state, steady_state_grid)

params = st.builds(
    SystemParams,
    nu=st.floats(1e-6, 0.1),
    gamma_l=st.floats(0, 0.5),
    eps1=st.floats(0, 20),
    eps2=st.floats(0, 5),
    delta1=st.floats(-20, 20),
    delta2=st.floats(-20, 20),
)


def test_in_plus_point_matches_dense_oracle():
    p = SystemParams(eps1=2, eps2=0.03, nu=2.28e-6, gamma_l=1e-4)
    s = steady_state(build_generator(p))
    assert np.abs(reconstruct(s) - dense_steady_state(p)).max() < 1e-10
    # tabulated from the 9-variable solve
    assert s.rho11 == pytest.approx(0.40032139489505, abs=1e-13)


@settings(max_examples=100)
@given(params)
def test_matches_dense_oracle(p):
    s = steady_state(build_generator(p))
    assert np.abs(reconstruct(s) - dense_steady_state(p)).max() < 1e-10


def test_no_drive_gives_ground_state():
    g = build_generator(SystemParams(eps1=0, eps2=0, delta1=1.3, delta2=-0.4))
    assert not g.c.any()
    # populations and the three coherences do not couple
    blocks = [[0], [1], [2, 3], [4, 5], [6, 7]]
    mask = np.zeros((8, 8), bool)
    for b in blocks:
        mask[np.ix_(b, b)] = True
    assert not g.A[~mask].any()
    assert steady_state(g) == BlochState.ground()


def test_saturated_two_level():
    s = steady_state(build_generator(SystemParams(eps1=1, eps2=0, gamma_l=0)))
    assert s.rho11 == pytest.approx(1 / 3, abs=1e-15)
    assert abs(s.rho22) < 1e-15


@given(st.floats(0, 10), st.floats(-10, 10), st.floats(-10, 10))
def test_two_level_closure(e1, d1, d2):
    s = steady_state(build_generator(SystemParams(eps1=e1, eps2=0, gamma_l=0, delta1=d1, delta2=d2)))
    assert abs(s.rho11 - two_level_rho11(e1, d1)) < 1e-10
    assert abs(s.rho22) < 1e-15


def test_delta2_enters_four_rows_affinely():
    p = SystemParams(eps1=2, eps2=0.3, delta1=0.7)
    B = delta2_derivative(p)
    assert set(np.flatnonzero(np.abs(B).sum(axis=1))) == {2, 3, 6, 7}
    A0, A5 = build_generator(p, 0.0).A, build_generator(p, 5.0).A
    assert np.array_equal(A5, A0 + 5.0 * B)


@settings(max_examples=200)
@given(params)
def test_steady_state_physical(p):
    g = build_generator(p)
    s = steady_state(g)
    assert g.residual(s) < 1e-12 * max(1.0, np.abs(g.c).max())
    assert np.linalg.eigvalsh(reconstruct(s)).min() >= -1e-10
    assert -1e-10 <= s.rho11 and -1e-10 <= s.rho22 and s.rho11 + s.rho22 <= 1 + 1e-10


def test_grid_matches_pointwise():
    p = SystemParams(eps1=3, eps2=0.2, nu=1e-4, gamma_l=1e-3, delta1=-1)
    d = np.linspace(-8, 8, 33)
    rows = steady_state_grid(p, d)
    for dk, row in zip(d, rows):
        assert np.allclose(row, steady_state(build_generator(p, dk)).x, rtol=0, atol=1e-14)


@given(st.floats(0, 10), st.floats(0, 2), st.floats(-10, 10), st.floats(0, 20))
def test_resonant_pump_symmetry(e1, e2, gl, d2):
    p = SystemParams(eps1=e1, eps2=e2, nu=1e-3, gamma_l=gl % 1)
    plus, minus = steady_state_grid(p, [d2, -d2])
    assert abs(plus[0] - minus[0]) < 1e-12
    assert abs(plus[1] - minus[1]) < 1e-12
    assert abs(plus[3] + minus[3]) < 1e-12


def test_singular_generator_raises():
    with pytest.raises(SingularGenerator) as info:
        steady_state(AffineGenerator(np.zeros((8, 8)), np.ones(8)))
    assert info.value.rcond == 0.0


def test_evolve_zero_time_is_identity():
    x0 = random_physical_state(np.random.default_rng(1))
    assert evolve(build_generator(SystemParams(eps1=1, eps2=0.2)), x0, 0.0) == x0


def test_evolve_free_decay():
    g = build_generator(SystemParams(eps1=0, eps2=0))
    s = evolve(g, BlochState(np.eye(8)[0]), 1.0, dt=0.01)
    assert abs(s.rho11 - math.exp(-2.0)) < 1e-8


def test_evolve_reaches_steady_state():
    p = SystemParams(eps1=1.5, eps2=0.4, nu=1e-3, gamma_l=1e-2, delta1=0.3, delta2=-0.2)
    g = build_generator(p)
    rng = np.random.default_rng(7)
    starts = [random_physical_state(rng) for _ in range(10)]
    target = steady_state(g).x
    t = 20 / min(p.nu, p.gamma_l + p.nu)
    for s in evolve_many(g, starts, t):
        assert np.abs(s.x - target).max() < 1e-6


@settings(max_examples=30, deadline=None)
@given(params.filter(lambda p: p.eps1 < 5 and p.eps2 < 2), st.integers(0, 2**32 - 1), st.floats(0.1, 20))
def test_evolve_stays_physical(p, seed, t):
    g = build_generator(p)
    s = evolve(g, random_physical_state(np.random.default_rng(seed)), t)
    assert np.linalg.eigvalsh(reconstruct(s)).min() >= -1e-9


def test_evolve_rejects_bad_arguments():
    g = build_generator(SystemParams(eps1=1))
    with pytest.raises(ValueError):
        evolve(g, BlochState.ground(), -1.0)
    with pytest.raises(ValueError):
        evolve(g, BlochState.ground(), 1.0, dt=10 * max_step(g))


def test_generator_is_immutable():
    g = build_generator(SystemParams(eps1=1))
    with pytest.raises(ValueError):
        g.A[0, 0] = 0.0


needs_ext = pytest.mark.skipif(_backend.compiled_kernels is None, reason="compiled kernels not built")


@needs_ext
@settings(max_examples=50)
@given(params)
def test_backends_agree(p):
    py, cy = _backend.python_kernels, _backend.compiled_kernels
    args = (p.gamma1, p.nu, p.gamma_l, p.eps1, p.eps2, p.delta1)
    d = np.linspace(-30, 30, 17)
    Ap, cp = py.assemble(*args, d)
    Ac, cc = cy.assemble(*args, d)
    assert np.array_equal(Ap, Ac) and np.array_equal(cp, cc)
    xp, _ = py.steady_scan(*args, d)
    xc, _ = cy.steady_scan(*args, d)
    assert np.abs(xp - xc).max() < 1e-12


@needs_ext
def test_backends_agree_on_rk4():
    g = build_generator(SystemParams(eps1=2, eps2=0.3, nu=1e-3, gamma_l=1e-2, delta1=0.5))
    X0 = np.array([random_physical_state(np.random.default_rng(k)).x for k in range(3)])
    for n in (1, 7, 5000):
        a, fa = _backend.python_kernels.rk4(g.A, g.c, X0, max_step(g), n, 10.0)
        b, fb = _backend.compiled_kernels.rk4(g.A, g.c, X0, max_step(g), n, 10.0)
        assert fa == fb == -1
        assert np.abs(a - b).max() < 1e-12


def test_rk4_divergence_reported():
    A = np.eye(8)
    for k in (_backend.python_kernels, _backend.compiled_kernels):
        if k is None:
            continue
        _, failed = k.rk4(A, np.zeros(8), np.ones((1, 8)), 0.1, 5000, 10.0)
        assert 0 <= failed < 5000
