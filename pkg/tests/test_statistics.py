import math
import warnings

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as hst
from scipy.special import beta as beta_fn

from coulomb_counts import statistics as st
from coulomb_counts.ensembles import (
    make_ginibre,
    make_mittag_leffler,
    make_potential,
    make_product,
    make_trunc_weak,
)
from coulomb_counts.errors import DomainError
from coulomb_counts.moments import occupation_probs
from coulomb_counts.specfun import reg_inc_gamma

# 1/2 - e^{-1} + e^{-2}/2, the integral of (1 - e^{-u}) e^{-u} over [0, 1]
WEAK_EDGE_C0_S1 = 0.199788200446864

SUITABLE = [
    ("ginibre", {}),
    ("mittag_leffler", {"b": 1.5, "c": 0.5}),
    ("product", {"m": 3}),
    ("trunc_strong", {"c_tilde": 0.8}),
]


def stats(pot, N, a, dist=False):
    return st.finite_n_stats(occupation_probs(pot, N, a), with_distribution=dist)


# finite-N statistics


def test_single_particle_variance():
    a = 0.9
    s = stats(make_ginibre(2), 1, a)
    assert s.variance == pytest.approx((1 - math.exp(-a * a)) * math.exp(-a * a), rel=1e-14)


def test_saturated_disc_has_no_fluctuations():
    s = stats(make_trunc_weak(2, 1.0, 12), 12, 1.0, dist=True)
    assert s.mean == 12 and s.variance == 0
    assert s.distribution[-1] == 1.0


@pytest.mark.parametrize("name,params", SUITABLE + [("trunc_weak", {"c": 2.0})])
@pytest.mark.parametrize("beta", [2, 4])
def test_distribution_moments_and_gap_probability(name, params, beta):
    N = 30
    pot = make_potential(name, beta, N, **params)
    occ = occupation_probs(pot, N, 0.6)
    s = st.finite_n_stats(occ, with_distribution=True)
    d = s.distribution
    k = np.arange(N + 1)
    assert d.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.all(d >= -1e-300)
    first = float(np.dot(k, d))
    assert first == pytest.approx(s.mean, abs=1e-8)
    assert float(np.dot((k - first) ** 2, d)) == pytest.approx(s.variance, abs=1e-8)
    assert d[0] == pytest.approx(float(np.prod(occ.complements)), rel=1e-12, abs=1e-300)
    assert 0 <= s.mean <= N and 0 <= s.variance <= min(s.mean, N - s.mean) + 1e-12


@settings(max_examples=50, deadline=None)
@given(hst.lists(hst.floats(0.0, 1.0), min_size=1, max_size=25))
def test_poisson_binomial_matches_brute_force(p):
    d = st.poisson_binomial_pmf(p)
    # brute force over all outcomes is too slow; compare the generating polynomial
    poly = np.array([1.0])
    for x in p:
        poly = np.convolve(poly, [1 - x, x])
    assert np.allclose(d, poly, atol=1e-14)


@pytest.mark.parametrize("name,params", SUITABLE)
def test_variance_bounded_by_mean_and_complement(name, params):
    for beta, N in ((2, 60), (4, 30)):
        pot = make_potential(name, beta, N, **params)
        for a in (0.1, 0.5, 0.9, 1.2):
            s = stats(pot, N, a)
            assert s.variance <= min(s.mean, N - s.mean) + 1e-12


# Ginibre closed forms


@pytest.mark.parametrize("a", [0.3, 1.0, 2.0])
def test_ginibre_single_particle_mean(a):
    assert st.ginibre_mean_closed(2, 1, a) == pytest.approx(1 - math.exp(-a * a), rel=1e-14)


@pytest.mark.parametrize("beta", [2, 4])
def test_ginibre_closed_form_equals_sum(beta):
    N, a = 200, 0.6
    total = math.fsum(occupation_probs(make_ginibre(beta), N, a).probs)
    assert st.ginibre_mean_closed(beta, N, a) == pytest.approx(total, rel=1e-10)


@pytest.mark.parametrize("beta", [2, 4])
@pytest.mark.parametrize("N,a", [(10, 0.5), (50, 0.8), (30, 1.1), (200, 0.95)])
def test_stable_excess_equals_difference(beta, N, a):
    exact = math.fsum(occupation_probs(make_ginibre(beta), N, a).probs) - N * a * a
    got = st.ginibre_mean_excess(beta, N, a)
    assert got == pytest.approx(exact, rel=1e-9, abs=1e-12 * N)


def test_excess_survives_where_the_mean_cannot_show_it():
    # at N = 400, a = 0.5 the excess is below 1e-50 and invisible in E itself
    log_excess = st.ginibre_log_excess(400, 0.5)
    assert log_excess < math.log(1e-50)
    assert st.ginibre_mean_closed(2, 400, 0.5) == 100.0
    assert math.log(-st.ginibre_mean_excess(2, 400, 0.5)) == pytest.approx(log_excess, rel=1e-14)


@pytest.mark.parametrize("T", [0.5, 1.0, 2.0])
def test_symplectic_ginibre_micro_limit(T):
    N = 4000
    e = st.ginibre_mean_closed(4, N, T / math.sqrt(N))
    assert e == pytest.approx(T * T - 0.25 * (1 - math.exp(-4 * T * T)), rel=1e-3)


def test_expansion_prefactor_is_exponentially_small():
    a = np.linspace(0.01, 0.99, 99)
    assert np.all(2 * np.log(a) + 1 - a * a < 0)


def test_expansion_matches_exact_mean():
    N, a = 100, 0.5
    exact = st.ginibre_mean_closed(2, N, a)
    assert st.ginibre_mean_expansion(2, N, a, 3) == pytest.approx(exact, rel=1e-6)


@pytest.mark.parametrize("N,a", [(100, 0.5), (60, 0.7), (200, 0.6)])
def test_expansion_captures_the_exponentially_small_excess(N, a):
    exact = st.ginibre_mean_excess(2, N, a)
    errors = [abs(st.ginibre_expansion_excess(2, N, a, k) / exact - 1) for k in (1, 2, 3)]
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-2


def test_symplectic_expansion():
    N, a = 60, 0.6
    got = st.ginibre_mean_expansion(4, N, a, 3)
    assert got == pytest.approx(st.ginibre_mean_closed(4, N, a), rel=1e-12)


def test_expansion_warns_near_unit_radius():
    with pytest.warns(RuntimeWarning, match="grow"):
        st.ginibre_mean_expansion(2, 20, 0.97, 4)


def test_expansion_warns_on_underflow_and_returns_leading_term():
    with pytest.warns(RuntimeWarning, match="underflows"):
        got = st.ginibre_mean_expansion(2, 20000, 0.5, 3)
    assert got == 5000.0


def test_expansion_is_quiet_in_its_range():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        st.ginibre_mean_expansion(2, 100, 0.5, 3)


def test_expansion_domain():
    with pytest.raises(DomainError):
        st.ginibre_mean_expansion(2, 10, 1.0, 2)
    with pytest.raises(DomainError):
        st.ginibre_mean_closed(3, 10, 0.5)


# bulk and edge laws


@pytest.mark.parametrize("beta", [2, 4])
def test_bulk_prediction_ginibre(beta):
    N, a = 300, 0.4
    assert st.bulk_prediction(make_ginibre(beta), N, a) == pytest.approx(
        a * math.sqrt(2 * N / (beta * math.pi)), rel=1e-14)


def test_bulk_prediction_mittag_leffler():
    beta, b, N, a = 2, 1.5, 200, 0.6
    pot = make_mittag_leffler(beta, b, 0.5, N)
    ref = 2 * a / math.sqrt(math.pi) * math.sqrt(N * beta * b * a ** (2 * b - 2) / 2) / beta
    assert st.bulk_prediction(pot, N, a) == pytest.approx(ref, rel=1e-14)
    assert st.bulk_scale(pot, N, a) * st.bulk_prediction(pot, N, a) == pytest.approx(
        2 * a / math.sqrt(math.pi), rel=1e-14)


@pytest.mark.parametrize("name,params", SUITABLE)
@pytest.mark.parametrize("beta", [2, 4])
def test_scaled_bulk_variance_converges(name, params, beta):
    a = 0.5
    devs = []
    for N in (100, 200, 400, 800):
        pot = make_potential(name, beta, N, **params)
        scaled = st.bulk_scale(pot, N, a) * stats(pot, N, a).variance
        devs.append(abs(scaled - 2 * a / math.sqrt(math.pi)))
    assert all(y < x for x, y in zip(devs, devs[1:])), devs


def test_edge_profile_values():
    assert st.edge_profile_f(0.0) == pytest.approx(0.5, abs=1e-16)
    assert st.edge_profile_f(-4.0) <= 1e-6
    assert st.edge_profile_f(12.0) == pytest.approx(1.0, abs=1e-15)
    # strictly increasing until f rounds to 1
    s = np.linspace(-6, 3.5, 96)
    assert np.all(np.diff(st.edge_profile_f(s)) > 0)


@settings(max_examples=40, deadline=None)
@given(hst.floats(-8.0, 8.0))
@example(2.2250738585e-313)
@example(-8.0)
def test_edge_profile_closed_form_equals_integral(s):
    assert st.edge_profile_f(s) == pytest.approx(st.edge_profile_f_integral(s), abs=1e-10)


def test_edge_profile_derivative():
    h = 1e-5
    for s in (-1.5, 0.0, 0.7, 2.0):
        d = (st.edge_profile_f(s + h) - st.edge_profile_f(s - h)) / (2 * h)
        assert d == pytest.approx(st.edge_profile_density(s), rel=1e-8)


def test_edge_prediction_at_zero_and_infinity():
    pot = make_ginibre(2)
    N = 500
    a, v = st.edge_prediction(pot, N, 0.0)
    assert a == 1.0
    assert v == pytest.approx(math.sqrt(N) / math.sqrt(math.pi) / 2, rel=1e-14)
    # as S grows the edge law approaches the bulk law at a = 1
    _, v_far = st.edge_prediction(pot, 10**8, 30.0)
    bulk_at_one = 2 / math.sqrt(math.pi) * math.sqrt(10**8 * 1.0) / 2
    assert v_far == pytest.approx(bulk_at_one, rel=1e-12)


def test_edge_prediction_domain():
    with pytest.raises(DomainError):
        st.edge_prediction(make_ginibre(2), 50, 20.0)


@pytest.mark.parametrize("S", [-1.0, 0.0, 1.0, 2.0])
def test_edge_consistency_improves_with_n(S):
    pot = make_ginibre(2)
    errs = []
    for N in (100, 400, 1600):
        a = st.edge_radius(pot, N, S)
        scaled = st.edge_scale(pot, N) * stats(pot, N, a).variance
        errs.append(abs(scaled - 2 / math.sqrt(math.pi) * st.edge_profile_f(S)))
    assert errs[0] > errs[1] > errs[2]
    # the leading deviation is O(N^{-1/2}): halving per quadrupling of N
    assert errs[2] / errs[1] == pytest.approx(0.5, abs=0.1)


def test_lln_fraction():
    assert st.lln_fraction(make_ginibre(4), 0.7) == pytest.approx(0.49, rel=1e-14)
    assert st.lln_fraction(make_mittag_leffler(2, 1.5, 0.3, 10), 0.7) == pytest.approx(
        0.7**3, rel=1e-14)
    for name, params in SUITABLE:
        assert st.lln_fraction(make_potential(name, 2, 10, **params), 1.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        st.lln_fraction(make_ginibre(2), 1.5)


# frozen once from N in {100, ..., 1600}; worst observed C is about 0.03
LLN_C = 0.1


@pytest.mark.parametrize("name,params", SUITABLE)
def test_mean_law_of_large_numbers(name, params):
    a = 0.6
    for beta in (2, 4):
        for N in (100, 400, 1600):
            pot = make_potential(name, beta, N, **params)
            dev = abs(stats(pot, N, a).mean / N - st.lln_fraction(pot, a))
            assert dev <= LLN_C / math.sqrt(N)


# origin limits


@pytest.mark.parametrize("T", [0.3, 1.0, 2.5])
def test_ml_origin_identities(T):
    e2, _ = st.origin_limit_ml(2, 1.0, 0.0, T)
    assert e2 == pytest.approx(T * T, rel=1e-13)
    e4, _ = st.origin_limit_ml(4, 1.0, 0.0, T)
    assert e4 == pytest.approx(T * T - 0.25 * (1 - math.exp(-4 * T * T)), rel=1e-13)
    assert st.origin_limit_trunc_strong(2, 1.0)[0] == pytest.approx(1.0, rel=1e-14)


def test_ml_origin_variance_by_direct_summation():
    beta, b, c, T = 4, 1.5, 0.5, 1.3
    x = beta / (2 * b) * T ** (2 * b)
    total = 0.0
    for j in range(1, 400):
        p, q = reg_inc_gamma((beta * j + 2 * c) / (2 * b), x)
        total += p * q
    assert st.origin_limit_ml(beta, b, c, T)[1] == pytest.approx(total, rel=1e-13)


@pytest.mark.parametrize("beta", [2, 4])
@pytest.mark.parametrize("T", [0.5, 1.0, 2.0])
def test_universality_triple_point(beta, T):
    ml = st.origin_limit_ml(beta, 1.0, 0.0, T)
    assert st.origin_limit_product(beta, 1, T) == pytest.approx(ml, abs=1e-10)
    assert st.origin_limit_trunc_strong(beta, T) == pytest.approx(ml, abs=1e-10)


@pytest.mark.parametrize("beta", [2, 4])
@pytest.mark.parametrize("b,c", [(1.0, 0.0), (1.5, 0.5), (0.5, 2.0)])
def test_ml_small_t(beta, b, c):
    T = 1e-5
    e, v = st.origin_limit_ml(beta, b, c, T)
    ref = st.ml_small_t(beta, b, c, T)
    assert e / ref == pytest.approx(1, abs=1e-3)
    assert v / ref == pytest.approx(1, abs=1e-3)


@pytest.mark.parametrize("beta", [2, 4])
@pytest.mark.parametrize("m", [2, 3])
def test_product_small_t_ratio_tends_to_one(beta, m):
    # the log corrections decay like 1/log T, so the approach is slow
    ratios = [st.origin_limit_product(beta, m, T)[0] / st.product_small_t(beta, m, T)
              for T in (1e-2, 1e-5, 1e-10, 1e-30, 1e-60)]
    assert all(y > x for x, y in zip(ratios, ratios[1:])), ratios
    assert abs(ratios[-1] - 1) < 0.03


def test_product_small_t_reduces_to_ml_at_m1():
    for beta in (2, 4):
        assert st.product_small_t(beta, 1, 0.1) == pytest.approx(
            st.ml_small_t(beta, 1.0, 0.0, 0.1), rel=1e-14)


def test_product_origin_approaches_linear_law():
    # V(T) against the bulk law written in T: (2/sqrt pi) T^{1/m} / sqrt(2 m beta)
    beta, m = 2, 2
    devs = []
    for T in (10.0, 30.0, 100.0):
        _, v = st.origin_limit_product(beta, m, T)
        lin = 2 / math.sqrt(math.pi) * T ** (1 / m) / math.sqrt(2 * m * beta)
        devs.append(abs(v / lin - 1))
    assert devs[0] > devs[1] > devs[2]


def test_origin_domains():
    with pytest.raises(DomainError):
        st.origin_limit_ml(2, 0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        st.origin_limit_product(2, 2, 0.0)
    with pytest.raises(DomainError):
        st.origin_limit_trunc_strong(3, 1.0)


# weak non-unitarity


def test_weak_bulk_c0_geometric_series():
    for a in (0.2, 0.5, 0.8):
        e, _ = st.weak_bulk_limit(2, 0.0, a)
        assert e == pytest.approx(a * a / (1 - a * a), rel=1e-13)


def test_weak_bulk_small_a():
    c, a = 1.5, 1e-3
    e, _ = st.weak_bulk_limit(2, c, a)
    assert e == pytest.approx(a * a / beta_fn(1, c + 1), rel=1e-4)


def test_weak_bulk_small_a_symplectic():
    # the j = 1 term I_{a^2}(2, c+1) starts at a^4 / (2 B(2, c+1)), so a^2 / B
    # is the beta = 2 law only
    c, a = 1.5, 1e-3
    e, _ = st.weak_bulk_limit(4, c, a)
    assert e == pytest.approx(a**4 / (2 * beta_fn(2, c + 1)), rel=1e-4)


@pytest.mark.parametrize("beta", [2, 4])
def test_weak_limits_vanish_as_c_tends_to_minus_one(beta):
    vs = [st.weak_bulk_limit(beta, c, 0.5)[1] for c in (-0.9, -0.99, -0.999)]
    assert vs[0] > vs[1] > vs[2] and vs[2] <= 1e-2
    es = [st.weak_edge_limit(beta, c, 2.0) for c in (-0.9, -0.99, -0.999)]
    assert es[0] > es[1] > es[2] and es[2] <= 1e-2


@pytest.mark.parametrize("beta", [2, 4])
def test_weak_edge_elementary_value(beta):
    assert st.weak_edge_limit(beta, 0.0, 1.0) == pytest.approx(WEAK_EDGE_C0_S1, abs=1e-12)
    exact = 0.5 - math.exp(-1) + 0.5 * math.exp(-2)
    assert exact == pytest.approx(WEAK_EDGE_C0_S1, abs=1e-15)


def test_weak_edge_vanishes_at_zero():
    assert st.weak_edge_limit(2, 1.0, 1e-6) < 1e-5


@pytest.mark.parametrize("beta,N", [(2, 500), (4, 250)])
def test_weak_edge_finite_n(beta, N):
    c = 5.0
    pot = make_trunc_weak(beta, c, N)
    for a in (0.95, 0.97, 0.99, 0.999):
        S = N * beta * (1 - a)
        v = stats(pot, N, a).variance / N
        assert v == pytest.approx(st.weak_edge_limit(beta, c, S), abs=0.02)


def test_weak_domains():
    with pytest.raises(DomainError):
        st.weak_bulk_limit(2, -1.0, 0.5)
    with pytest.raises(DomainError):
        st.weak_edge_limit(2, 0.0, 0.0)


def test_scan_curve_requires_increasing_abscissae():
    rec = [st.ScanRecord(x, 0.0, 0.0, 0.0) for x in (0.1, 0.2, 0.2)]
    with pytest.raises(ValueError):
        st.ScanCurve("bulk", tuple(rec))
    with pytest.raises(ValueError):
        st.ScanCurve("sideways", ())
