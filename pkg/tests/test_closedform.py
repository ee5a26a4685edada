import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from vsystem import closedform as cf
from vsystem.core import Regime, SystemParams, check_limit_hierarchy
from vsystem.errors import DegenerateCritical, RegimeWarning, WrongBranch
from vsystem.master import steady_state_grid
from vsystem.scanner.report import bisect_border

quiet = pytest.mark.filterwarnings("ignore::UserWarning")


def P(**kw):
    return SystemParams(**kw)


# --- eta, a, b -------------------------------------------------------------

def test_eta_vanishing_decay_limit():
    eta1, eta2 = cf.eta_pair(P(gamma1=1e-9, eps1=1.0))
    assert eta1 == pytest.approx(12.0, rel=1e-12)
    assert abs(eta2) < 1e-12


def test_eta_without_pump():
    eta1, eta2 = cf.eta_pair(P(eps1=0))
    assert eta1 == pytest.approx(3 + 2 * math.sqrt(2), rel=1e-15)
    assert eta2 == pytest.approx(3 - 2 * math.sqrt(2), rel=1e-14)


def test_eta_unit_pump():
    eta1, eta2 = cf.eta_pair(P(eps1=1))
    assert eta1 == pytest.approx(9 + 2 * math.sqrt(21), rel=1e-15)
    assert eta1 == pytest.approx(18.1652, abs=1e-4)
    assert eta2 == pytest.approx(-0.1652, abs=1e-4)
    assert eta1 * eta2 == pytest.approx(-3, rel=1e-12)


@given(st.floats(0, 100))
def test_eta_product(e1):
    eta1, eta2 = cf.eta_pair(P(eps1=e1))
    assert eta1 >= eta2
    assert eta1 * eta2 == pytest.approx(1 - 4 * e1**2, rel=1e-9, abs=1e-9)


def test_b_squared_without_clock_laser():
    # ε₂ = 0: b² = η₁η₂ D²ν² / (2Dν)² = η₁η₂/4 = (Γ⁴ − 4ε₁²Γ²)/4
    a, b2 = cf.ab(P(eps1=2, eps2=0, nu=1e-5))
    assert b2 == pytest.approx(-15 / 4, rel=1e-12)
    assert b2 < 0
    assert a == pytest.approx(63 / 18, rel=1e-12)


def test_strong_clock_is_cic():
    p = P(eps1=2, nu=1e-5)
    assert cf.ab(p.replace(eps2=10 * cf.critical_eps2(p)))[1] > 0


def test_ab_rejects_zero_nu():
    p = P(eps1=1)
    object.__setattr__(p, "nu", 0.0)
    with pytest.raises(ValueError):
        cf.ab(p)


# --- lambdas ---------------------------------------------------------------

@pytest.mark.xfail(strict=True, reason=(
    "the printed position formula is a strong-pump limit: at eps1 = 2 it sits 2.3% "
    "above Re lambda1 even as eps2 -> 0 and gamma_l -> 0"))
def test_ats_example_matches_position_formula():
    pair = cf.lambdas(P(eps1=2, nu=1e-5, eps2=1e-3))
    assert pair.regime is Regime.ATS
    assert pair.lambda0 == pytest.approx(cf.ats_position(P(eps1=2, nu=1e-5, eps2=1e-3)), rel=0.01)


def test_ats_position_converges_with_pump():
    errors = []
    for e1 in (2, 5, 10, 30, 100):
        p = P(eps1=e1, nu=1e-5, eps2=1e-3, gamma_l=0)
        assert cf.regime(p) is Regime.ATS
        errors.append(abs(cf.ats_position(p) / cf.lambdas(p).lambda0 - 1))
    assert errors[0] < 0.025
    assert all(e <= 0.01 for e in errors[1:])
    assert np.all(np.diff(errors) < 0)


def test_cic_example():
    pair = cf.lambdas(P(eps1=2, nu=1e-5, eps2=0.1))
    assert pair.regime is Regime.CIC
    assert pair.lambda1.real == 0 and pair.lambda2.real == 0
    assert abs(pair.lambda1) != pytest.approx(abs(pair.lambda2))


@quiet
@settings(max_examples=300)
@given(st.floats(0.05, 100), st.floats(1e-7, 1e-2), st.floats(-6, 1))
def test_lambda_pair_invariants(e1, nu, log_ratio):
    p = P(eps1=e1, nu=nu)
    p = p.replace(eps2=cf.critical_eps2(p) * 10**log_ratio)
    pair = cf.lambdas(p)
    if pair.regime is Regime.ATS:
        assert pair.lambda1 == pair.lambda2.conjugate()
        assert pair.lambda0 >= 0 and pair.Gamma0 >= 0
    elif pair.regime is Regime.CIC:
        assert abs(pair.lambda1.real) < 1e-12 and abs(pair.lambda2.real) < 1e-12
        assert pair.lambda1.imag >= 0 and pair.lambda2.imag >= 0
    if pair.regime is Regime.CRITICAL:
        return
    for lam, sq in ((pair.lambda1, pair.a + cmath_sqrt(pair.b_squared)),
                    (pair.lambda2, pair.a - cmath_sqrt(pair.b_squared))):
        assert lam**2 == pytest.approx(sq, rel=1e-9, abs=1e-12 * (1 + abs(pair.a)))


def cmath_sqrt(x):
    return complex(0, math.sqrt(-x)) if x < 0 else math.sqrt(x)


def test_critical_point_warns_and_tags():
    p = P(eps1=2, nu=1e-5)
    p = p.replace(eps2=cf.critical_eps2(p))
    with pytest.warns(DegenerateCritical):
        pair = cf.lambdas(p)
    assert pair.regime is Regime.CRITICAL
    assert pair.lambda1 == pair.lambda2


def test_a_plus_minus_b_negative_on_cic_grid():
    # the relation a ± b < 0 is asserted without a domain; check it here
    with warnings.catch_warnings():
        warnings.simplefilter("error", RegimeWarning)
        for e1 in np.geomspace(0.6, 100, 25):
            for nu in (1e-3, 1e-5, 2.28e-6):
                p = P(eps1=e1, nu=nu)
                for f in (1.01, 3, 30, 300):
                    cf.lambdas(p.replace(eps2=f * cf.critical_eps2(p)))


# --- border ----------------------------------------------------------------

def test_border_example():
    assert cf.critical_eps2(P(eps1=2, nu=1e-5)) == pytest.approx(0.035, abs=1e-4)
    assert cf.critical_eps2(P(eps1=2, nu=1e-5)) == pytest.approx(
        2 * math.sqrt(2.25 * (6.75 + 2 * math.sqrt(11.625)) * 1e-5), rel=1e-14)


def test_border_scales_with_root_nu():
    a = cf.critical_eps2(P(eps1=3.3, nu=1e-6))
    b = cf.critical_eps2(P(eps1=3.3, nu=4e-6))
    assert abs(b / a - 2) < 1e-12


@quiet
def test_linear_border_law():
    assert cf.critical_eps2_strong(P(eps1=100, nu=1e-5)) == pytest.approx(1.549, abs=5e-4)
    a = cf.critical_eps2_strong(P(eps1=40, nu=1e-5))
    assert cf.critical_eps2_strong(P(eps1=80, nu=1e-5)) == 2 * a
    p = P(eps1=1000, nu=1e-5)
    assert abs(cf.critical_eps2_strong(p) / cf.critical_eps2(p) - 1) < 1e-3
    p = P(eps1=100, nu=1e-5)
    assert abs(cf.critical_eps2_strong(p) / cf.critical_eps2(p) - 1) < 0.01


def test_linear_border_warns_for_weak_pump():
    with pytest.warns(RegimeWarning):
        cf.critical_eps2_strong(P(eps1=2, nu=1e-5))


def test_border_needs_pump():
    with pytest.raises(ValueError):
        cf.critical_eps2(P(eps1=0))


@pytest.mark.parametrize("nu", [1e-3, 1e-5])
def test_bisection_reproduces_border(nu):
    for e1 in np.geomspace(0.1, 100, 50):
        p = P(eps1=e1, nu=nu)
        assert abs(bisect_border(p) / cf.critical_eps2(p) - 1) < 1e-9


@pytest.mark.parametrize("nu", [1e-3, 1e-5])
def test_regime_dichotomy(nu):
    for e1 in np.geomspace(0.1, 100, 50):
        p = P(eps1=e1, nu=nu)
        hi = cf.critical_eps2(p)
        lo = cf.lower_critical_eps2(p) or 0.0
        window = np.geomspace(max(lo * (1 + 1e-6), hi * 1e-3), hi * (1 - 1e-6), 7)
        assert all(cf.regime(p.replace(eps2=e)) is Regime.ATS for e in window)
        above = hi * np.geomspace(1 + 1e-6, 1e3, 7)
        assert all(cf.regime(p.replace(eps2=e)) is Regime.CIC for e in above)
        if lo:
            below = lo * np.geomspace(1e-3, 1 - 1e-6, 5)
            assert all(cf.regime(p.replace(eps2=e)) is Regime.CIC for e in below)


def test_lower_border_only_for_weak_pump():
    assert cf.lower_critical_eps2(P(eps1=0.5, nu=1e-5)) is None
    assert cf.lower_critical_eps2(P(eps1=2, nu=1e-5)) is None
    p = P(eps1=0.3, nu=1e-5)
    lo = cf.lower_critical_eps2(p)
    assert 0 < lo < cf.critical_eps2(p)
    assert abs(cf.ab(p.replace(eps2=lo))[1]) < 1e-9


def _border_curve(lo, hi):
    return np.array([cf.critical_eps2(P(eps1=e, nu=2.28e-6)) for e in np.linspace(lo, hi, 200)])


def test_border_shape():
    # ε₂ᶜ ~ Γ₁²/ε₁ for a weak pump and ~ ε₁ for a strong one, with a minimum near ε₁ = 0.70
    assert np.all(np.diff(_border_curve(0.1, 0.69)) < 0)
    assert np.all(np.diff(_border_curve(0.71, 10)) > 0)


@pytest.mark.xfail(strict=True, reason="the border formula has a minimum near eps1 = 0.70 Gamma1")
def test_border_increases_with_pump():
    assert np.all(np.diff(_border_curve(0.1, 10)) > 0)


# --- rho11 -----------------------------------------------------------------

def test_weak_clock_limit_is_two_level():
    p = P(eps1=1.7, eps2=1e-9, nu=1e-3)
    d = np.linspace(-50, 50, 101)
    assert np.allclose(cf.rho11_closed(p, d), 1.7**2 / (2 * 1.7**2 + 1), rtol=1e-9)


def test_far_detuned_limit_is_baseline():
    p = P(eps1=1.7, eps2=0.05, nu=1e-4)
    assert cf.rho11_closed(p, 1e7) == pytest.approx(1.7**2 / (2 * 1.7**2 + 1), rel=1e-9)
    assert cf.rho11_closed(p, -1e7) == cf.rho11_closed(p, 1e7)


def test_closed_forms_need_resonant_pump():
    for fn in (cf.rho11_closed, cf.rho11_ats_form, cf.rho11_cic_form):
        with pytest.raises(WrongBranch):
            fn(P(eps1=1, delta1=0.1), 0.0)
    with pytest.raises(WrongBranch):
        cf.cic_decomposition(P(eps1=1, delta1=0.1))


@settings(max_examples=100)
@given(st.floats(0.6, 50), st.floats(1e-7, 1e-3), st.floats(0.01, 0.95))
def test_ats_form_equivalence(e1, nu, frac):
    p = P(eps1=e1, nu=nu)
    p = p.replace(eps2=frac * cf.critical_eps2(p))
    assume(cf.regime(p) is Regime.ATS)
    d = np.linspace(-3 * e1, 3 * e1, 100)
    a, b = cf.rho11_closed(p, d), cf.rho11_ats_form(p, d)
    assert np.abs(a / b - 1).max() < 1e-10


@settings(max_examples=100)
@given(st.floats(0.6, 50), st.floats(1e-7, 1e-3), st.floats(1.05, 100))
def test_cic_form_equivalence(e1, nu, f):
    p = P(eps1=e1, nu=nu)
    p = p.replace(eps2=f * cf.critical_eps2(p))
    d = np.linspace(-3 * e1, 3 * e1, 100)
    a, b = cf.rho11_closed(p, d), cf.rho11_cic_form(p, d)
    assert np.abs(a / b - 1).max() < 1e-10


def test_forms_reject_wrong_regime():
    p = P(eps1=2, nu=1e-5, eps2=1e-3)
    with pytest.raises(ValueError):
        cf.rho11_cic_form(p, 0.0)
    with pytest.raises(ValueError):
        cf.rho11_ats_form(p.replace(eps2=1.0), 0.0)


@given(st.floats(0.1, 50), st.floats(0, 1), st.floats(1e-7, 1e-2))
def test_closed_form_ignores_linewidth(e1, e2, nu):
    d = np.linspace(-20, 20, 81)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ref = cf.rho11_closed(P(eps1=e1, eps2=e2, nu=nu, gamma_l=0.0), d)
        for gl in (1e-4, 1e-2, 0.3):
            assert np.array_equal(cf.rho11_closed(P(eps1=e1, eps2=e2, nu=nu, gamma_l=gl), d), ref)


def test_ats_position_carries_linewidth():
    p = P(eps1=10, eps2=1e-3, nu=2.28e-6, gamma_l=0)
    assert cf.ats_position(p.replace(gamma_l=1e-2)) < cf.ats_position(p)


def test_ats_position_fig1b_point():
    p = P(eps1=10, eps2=1e-3, nu=2.28e-6, gamma_l=0)
    inner = 1 + 2 * 0.01 + (1e-4) ** 2 / 2.28e-6
    assert cf.ats_position(p) == pytest.approx(10 * math.sqrt(math.sqrt(inner) - 0.01), rel=1e-14)
    assert cf.ats_position(p) == pytest.approx(10.0106, abs=1e-4)


def test_closed_form_resonances_at_ats_position():
    from vsystem.scanner.peaks import find_peaks

    p = P(eps1=10, eps2=1e-3, nu=2.28e-6, gamma_l=0)
    d = np.linspace(-15, 15, 30001)
    dips = find_peaks(d, cf.rho11_closed(p, d)).minima()
    assert len(dips) == 2
    lam0 = cf.ats_position(p)
    for dip, sign in zip(sorted(dips, key=lambda k: k.position), (-1, 1)):
        assert abs(dip.position - sign * lam0) <= 0.02 * lam0


def test_ats_position_outside_regime():
    with pytest.warns(RegimeWarning):
        cf.ats_position(P(eps1=2, eps2=1.0, nu=1e-5, gamma_l=0))


def test_ats_position_strong_pump_limit():
    assert cf.ats_position(P(eps1=1000, eps2=1e-9, nu=1e-3, gamma_l=0)) == pytest.approx(1000, rel=1e-6)


def _hierarchy_sample(rng, factor, gamma_l):
    while True:
        p = P(eps1=10 ** rng.uniform(-1, 2), eps2=10 ** rng.uniform(-5, 0),
              nu=10 ** rng.uniform(-8, -2), gamma_l=gamma_l(rng))
        if not check_limit_hierarchy(p, factor):
            return p


def _max_closed_form_error(p):
    d = np.linspace(-10, 10, 400)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return np.abs(cf.rho11_closed(p, d) / steady_state_grid(p, d)[:, 0] - 1).max()


@pytest.mark.parametrize("factor,bound", [(100, 0.02), (10, 0.10)])
def test_closed_form_fidelity_without_linewidth(factor, bound):
    rng = np.random.default_rng(factor)
    worst = max(_max_closed_form_error(_hierarchy_sample(rng, factor, lambda r: 0.0)) for _ in range(150))
    assert worst <= bound


@pytest.mark.xfail(strict=True, reason=(
    "gamma_l dephases the clock coherence and pumps |2> off resonance at a rate "
    "~ eps2^2 gamma_l / delta2^2 that only 2 nu empties; the closed form drops "
    "gamma_l, so a weak pump (eps1 ~ 0.1) misses by several percent even at factor 100"))
def test_closed_form_fidelity_with_linewidth():
    rng = np.random.default_rng(1)
    worst = max(_max_closed_form_error(_hierarchy_sample(rng, 100, lambda r: 10 ** r.uniform(-6, -1)))
                for _ in range(300))
    assert worst <= 0.02


# --- CIC decomposition -----------------------------------------------------

def test_decomposition_baseline():
    with pytest.warns(RegimeWarning):
        dec = cf.cic_decomposition(P(eps1=2, eps2=1e-3, nu=1e-5))
    assert dec.baseline == 4 / 9


def test_transfer_width_linear_in_clock_power():
    p = P(eps1=10, eps2=0.2, nu=1e-5)
    w1 = cf.cic_decomposition(p).transfer_width
    w2 = cf.cic_decomposition(p.replace(eps2=0.4)).transfer_width
    assert w2 / w1 == 2.0


@given(st.floats(1, 100), st.floats(1.5, 100), st.floats(-1e3, 1e3))
def test_decomposition_term_signs(e1, f, d2):
    p = P(eps1=e1, nu=1e-5)
    dec = cf.cic_decomposition(p.replace(eps2=f * cf.critical_eps2(p)))
    assert dec.coherence_term(d2) > 0
    assert dec.transfer_term(d2) < 0
    assert dec.width_ratio > 1


def test_decomposition_at_line_centre():
    for e1 in (5, 10, 30):
        for f in (3, 10, 30):
            p = P(eps1=e1, nu=2.28e-6)
            p = p.replace(eps2=f * cf.critical_eps2(p))
            dec = cf.cic_decomposition(p)
            assert abs(dec.total(0.0) / cf.rho11_closed(p, 0.0) - 1) <= 0.01


def test_width_ratio_estimate_for_strong_pump():
    p = P(eps1=100, nu=1e-5)
    dec = cf.cic_decomposition(p.replace(eps2=7 * cf.critical_eps2(p)))
    assert dec.width_ratio == pytest.approx(dec.width_ratio_estimate, rel=1e-3)
    assert dec.width_ratio_estimate == pytest.approx(7 * math.sqrt(6))
