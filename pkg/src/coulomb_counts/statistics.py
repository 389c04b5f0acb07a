"""Counting statistics: exact finite-N values and their large-N limits.

The count of eigenvalues in the disc is a sum of independent Bernoulli(p_j)
indicators, so E = sum p_j, V = sum p_j (1 - p_j) and the full law is
Poisson-binomial. Everything else here is an asymptotic prediction to
compare against those exact values.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConvergenceError, DomainError
from .quadrature import adaptive_gauss_legendre
from .specfun import (
    DEFAULT_TOLERANCE,
    bk_polynomials,
    erf_erfc,
    gamma_product_cdf,
    gamma_product_sf,
    log_gamma,
    reg_inc_beta,
    reg_inc_gamma,
)
from .specfun.incgamma import log_gamma_prefactor

SQRT_PI = math.sqrt(math.pi)
SERIES_CAP = 100_000

REGIMES = ("bulk", "edge", "origin", "weak_bulk", "weak_edge")


@dataclass(frozen=True)
class CountStatistics:
    mean: float
    variance: float
    beta: int
    N: int
    a: float
    path: str
    distribution: Optional[np.ndarray] = None


@dataclass(frozen=True)
class ScanRecord:
    abscissa: float
    finite_n: float
    asymptotic: float
    scaled_finite_n: float
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ScanCurve:
    """Finite-N values against an asymptotic law along one abscissa."""

    regime: str
    records: tuple
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        xs = [r.abscissa for r in self.records]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("scan abscissae must be strictly increasing")


def poisson_binomial_pmf(probs, complements=None):
    """Law of a sum of independent Bernoulli(p_j), by O(N^2) convolution."""
    p = np.asarray(probs, dtype=float)
    q = 1.0 - p if complements is None else np.asarray(complements, dtype=float)
    dist = np.zeros(len(p) + 1)
    dist[0] = 1.0
    for k, (pk, qk) in enumerate(zip(p, q)):
        head = dist[:k + 2].copy()
        dist[:k + 2] = head * qk
        dist[1:k + 2] += head[:k + 1] * pk
    return dist


def finite_n_stats(occ, with_distribution=False):
    """Mean, variance and optionally the count law from an OccupationVector."""
    p = np.asarray(occ.probs)
    q = np.asarray(occ.complements)
    mean = float(math.fsum(p))
    variance = float(math.fsum(p * q))
    dist = poisson_binomial_pmf(p, q) if with_distribution else None
    return CountStatistics(mean, variance, occ.beta, occ.N, occ.a, occ.path, dist)


# Ginibre closed forms


def _check_beta(beta):
    if beta not in (2, 4):
        raise DomainError("beta must be 2 or 4")


def _log_t(n, x):
    # ln( x^n e^{-x} / (n-1)! )
    return float(log_gamma_prefactor(n, x)) + math.log(n)


def _odd_poisson_mass(N, x):
    # sum_{k<N} x^{2k+1} e^{-x} / (2k+1)!
    if x == 0:
        return 0.0
    k = np.arange(N)
    terms = (2 * k + 1) * math.log(x) - x - log_gamma(2.0 * k + 2)
    return float(math.fsum(np.exp(terms)))


def ginibre_mean_closed(beta, N, a):
    """E_N(a) for the Ginibre ensembles in closed form.

    beta = 2: N a^2 + N (1 - a^2) P(N, N a^2) - (N a^2)^N e^{-N a^2} / (N-1)!.
    beta = 4: N a^2 + N (1 - a^2) P(2N, 2N a^2) - T/2 - (odd Poisson mass)/2
    with T = (2N a^2)^{2N} e^{-2N a^2} / (2N-1)!.
    """
    _check_beta(beta)
    if not a > 0:
        raise DomainError("a must be positive")
    x = (beta / 2) * N * a * a
    n = N if beta == 2 else 2 * N
    p, _ = reg_inc_gamma(n, x)
    t = math.exp(_log_t(n, x))
    if beta == 2:
        return N * a * a + N * (1 - a * a) * p - t
    return N * a * a + N * (1 - a * a) * p - 0.5 * t - 0.5 * _odd_poisson_mass(N, x)


def _log_excess_two(N, a):
    """ln |E_N(a) - N a^2| at beta = 2, written without cancellation.

    E - N a^2 = -(x^N e^{-x} / N!) N a^2 sum_{n>=0} t_n (n+1)/(N+n+1), with
    x = N a^2, t_0 = 1, t_n = t_{n-1} x / (N+n); every term has one sign.
    """
    x = N * a * a
    total = 0.0
    t = 1.0
    for n in range(SERIES_CAP):
        term = t * (n + 1) / (N + n + 1)
        total += term
        if term <= 1e-17 * total and x < N + n + 1:
            break
        t *= x / (N + n + 1)
    else:
        raise ConvergenceError("Ginibre excess series did not converge")
    return float(log_gamma_prefactor(N, x)) + math.log(N) + 2 * math.log(a) + math.log(total)


def ginibre_mean_excess(beta, N, a):
    """E_N(a) - N a^2 for Ginibre, accurate even when exponentially small."""
    _check_beta(beta)
    if not a > 0:
        raise DomainError("a must be positive")
    if beta == 2:
        return -math.exp(_log_excess_two(N, a))
    # E^{(4)}_N = E^{(2)}_{2N}/2 - (odd Poisson mass)/2 at the same a
    half = -0.5 * math.exp(_log_excess_two(2 * N, a))
    return half - 0.5 * _odd_poisson_mass(N, 2 * N * a * a)


def ginibre_log_excess(N, a):
    """ln |E_N(a) - N a^2| for beta = 2; finite where the excess underflows."""
    if not a > 0:
        raise DomainError("a must be positive")
    return _log_excess_two(N, a)


def ginibre_expansion_excess(beta, N, a, k_max):
    """The b_k correction to N a^2, i.e. the expansion of E_N(a) - N a^2.

    beta = 2: T sum_{k=1}^{k_max} (-1)^k b_k(a^2) / ((1-a^2)^{2k} N^k) with
    T = (N a^2)^N e^{-N a^2} / (N-1)!. beta = 4 uses the same series at 2N
    with weight 1/2 and subtracts half the odd Poisson mass.
    """
    _check_beta(beta)
    if not 0 < a < 1:
        raise DomainError("the expansion needs 0 < a < 1")
    if int(k_max) != k_max or k_max < 0:
        raise DomainError("k_max must be a nonnegative integer")
    n = N if beta == 2 else 2 * N
    lam = a * a
    log_t = _log_t(n, n * lam)
    polys = bk_polynomials(int(k_max))
    terms = [(-1) ** k * polys[k](lam) / ((1 - lam) ** (2 * k) * float(n) ** k)
             for k in range(1, int(k_max) + 1)]
    if any(abs(t1) > abs(t0) for t0, t1 in zip(terms, terms[1:])):
        warnings.warn("b_k series terms grow: a is too close to 1 for this N", RuntimeWarning,
                      stacklevel=2)
    if log_t < -745.0:
        warnings.warn("exponential prefactor underflows; returning the leading term",
                      RuntimeWarning, stacklevel=2)
        correction = 0.0
    else:
        correction = math.exp(log_t) * math.fsum(terms)
    if beta == 2:
        return correction
    return 0.5 * correction - 0.5 * _odd_poisson_mass(N, n * lam)


def ginibre_mean_expansion(beta, N, a, k_max):
    """Large-N expansion of the Ginibre mean: N a^2 plus the b_k corrections."""
    return N * a * a + ginibre_expansion_excess(beta, N, a, k_max)


# bulk and edge laws for suitable potentials


def bulk_prediction(potential, N, a):
    """(2a / sqrt(pi)) sqrt(N Laplacian(a)) / beta, in raw variance units."""
    if not 0 < a < 1:
        raise DomainError("bulk prediction needs 0 < a < 1")
    lap = float(potential.limit_laplacian(a))
    return 2 * a / SQRT_PI * math.sqrt(N * lap) / potential.beta


def bulk_scale(potential, N, a):
    """beta / sqrt(N Laplacian(a)); multiplies V_N into the universal scale."""
    return potential.beta / math.sqrt(N * float(potential.limit_laplacian(a)))


def edge_profile_f(S):
    """Universal edge profile f(S), rising from 0 to 1 across the boundary.

    f(S) = erfc(-sqrt2 S)/2 - e^{-S^2} erf(S)/sqrt2
           + sqrt(pi/2) S erfc(S) erfc(-S) / 2.
    """
    s = np.asarray(S, dtype=float)
    erf_s, erfc_s = erf_erfc(s)
    _, erfc_neg = erf_erfc(-s)
    _, erfc_r2 = erf_erfc(-math.sqrt(2) * s)
    val = (np.asarray(erfc_r2) / 2 - np.exp(-s * s) * np.asarray(erf_s) / math.sqrt(2)
           + math.sqrt(math.pi / 2) * s * np.asarray(erfc_s) * np.asarray(erfc_neg) / 2)
    return float(val) if val.ndim == 0 else val


def edge_profile_density(S):
    """f'(S) = sqrt(2 pi) erfc(S) erfc(-S) / 4."""
    s = np.asarray(S, dtype=float)
    _, c1 = erf_erfc(s)
    _, c2 = erf_erfc(-s)
    val = math.sqrt(2 * math.pi) * np.asarray(c1) * np.asarray(c2) / 4
    return float(val) if val.ndim == 0 else val


def edge_profile_f_integral(S, tol=DEFAULT_TOLERANCE):
    """f(S) as the integral of f' from -infinity; an independent route."""
    S = float(S)
    lo = min(-40.0, S - 1.0)
    # knots closer to S than rounding would leave a degenerate last panel
    knots = [k for k in (lo, -8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0)
             if k < S - 1e-8 * max(1.0, abs(S))]
    edges = np.array(knots + [S])
    value, _ = adaptive_gauss_legendre(edge_profile_density, edges, tol)
    return value


def edge_radius(potential, N, S):
    """a = 1 - S / sqrt(2 Laplacian(1) N)."""
    lap1 = float(potential.limit_laplacian(1.0))
    a = 1 - S / math.sqrt(2 * lap1 * N)
    if not a > 0:
        raise DomainError(f"S={S} puts the radius at a={a:.3g} <= 0")
    return a


def edge_scale(potential, N):
    """beta / sqrt(N Laplacian(1))."""
    return potential.beta / math.sqrt(N * float(potential.limit_laplacian(1.0)))


def edge_prediction(potential, N, S):
    """(a, V): edge radius and (2/sqrt pi) f(S) sqrt(N Laplacian(1)) / beta."""
    a = edge_radius(potential, N, S)
    v = 2 / SQRT_PI * edge_profile_f(S) / edge_scale(potential, N)
    return a, v


def lln_fraction(potential, a):
    """Limit of (count in the disc)/N: a g'(a) / beta for the limiting g."""
    if not 0 < a <= 1:
        raise DomainError("lln_fraction needs 0 < a <= 1")
    return a * float(potential.limit_g_prime(a)) / potential.beta


# series over j >= 1 with a tail bound


def _sum_decreasing_series(block, first_block=64, tol=DEFAULT_TOLERANCE):
    """Sum E = sum_j e_j and V = sum_j v_j for j >= 1.

    ``block(j)`` returns (e_j, v_j) arrays for an index array j. The e_j must
    eventually decrease with ratios that also decrease, so the tail after the
    last computed term is bounded by the geometric series with the last
    ratio. Stops once that bound is below abs_eps; raises after SERIES_CAP
    terms.
    """
    e_parts, v_parts = [], []
    start, size = 1, first_block
    while True:
        j = np.arange(start, start + size, dtype=float)
        e, v = block(j)
        e_parts.append(np.asarray(e, float))
        v_parts.append(np.asarray(v, float))
        last, prev = e_parts[-1][-1], e_parts[-1][-2]
        if last == 0.0:
            break
        ratio = last / prev if prev > 0 else 1.0
        if ratio < 1.0 and last * ratio / (1.0 - ratio) < tol.abs_eps:
            break
        start += size
        if start > SERIES_CAP:
            raise ConvergenceError("limit series needs more than 1e5 terms")
        size = min(2 * size, SERIES_CAP + 1 - start)
    e_all = np.concatenate(e_parts)
    v_all = np.concatenate(v_parts)
    return float(math.fsum(e_all)), float(math.fsum(v_all))


def origin_limit_ml(beta, b, c, T, tol=DEFAULT_TOLERANCE):
    """Origin limit of (E, V) for the Mittag-Leffler ensemble at a = T / N^{1/(2b)}.

    E = sum_{j>=1} P((beta j + 2c)/(2b), (beta/(2b)) T^{2b}) and V the
    matching sum of P Q.
    """
    _check_beta(beta)
    if not b > 0 or not c > -1 or not T > 0:
        raise DomainError("origin_limit_ml needs b > 0, c > -1, T > 0")
    x = beta / (2 * b) * T ** (2 * b)

    def block(j):
        p, q = reg_inc_gamma((beta * j + 2 * c) / (2 * b), x, tol)
        return p, p * q

    return _sum_decreasing_series(block, tol=tol)


def origin_limit_product(beta, m, T, tol=DEFAULT_TOLERANCE):
    """Origin limit of (E, V) for the product of m Ginibres at a = T / N^{m/2}.

    Gamma-product shapes (beta/2) j, argument (beta/2)^m T^2.
    """
    _check_beta(beta)
    if int(m) != m or m < 1 or not T > 0:
        raise DomainError("origin_limit_product needs integer m >= 1 and T > 0")
    x = (beta / 2) ** m * T * T

    def block(j):
        shapes = (beta / 2) * j
        p = np.array([gamma_product_cdf(m, s, x, tol) for s in shapes])
        q = np.array([gamma_product_sf(m, s, x, tol) for s in shapes])
        return p, p * q

    return _sum_decreasing_series(block, first_block=32, tol=tol)


def origin_limit_trunc_strong(beta, T, tol=DEFAULT_TOLERANCE):
    """Origin limit of (E, V) at strong non-unitarity, a = sqrt((1+c~)/(N c~)) T.

    E = sum_{j>=1} P((beta/2) j, (beta/2) T^2); the c~ dependence drops out.
    """
    _check_beta(beta)
    if not T > 0:
        raise DomainError("origin_limit_trunc_strong needs T > 0")
    x = beta / 2 * T * T

    def block(j):
        p, q = reg_inc_gamma(beta / 2 * j, x, tol)
        return p, p * q

    return _sum_decreasing_series(block, tol=tol)


def ginibre_origin_mean(beta, T):
    """Closed forms of the Ginibre origin mean: T^2, or T^2 - (1 - e^{-4T^2})/4."""
    _check_beta(beta)
    if beta == 2:
        return T * T
    return T * T - 0.25 * (-math.expm1(-4 * T * T))


def ml_small_t(beta, b, c, T):
    """Leading small-T behaviour of origin E and V for Mittag-Leffler.

    ((beta/2b)^{s} / Gamma(s + 1)) T^{beta + 2c} with s = (beta + 2c)/(2b).
    """
    s = (beta + 2 * c) / (2 * b)
    return math.exp(s * math.log(beta / (2 * b)) - log_gamma(s + 1) + (beta + 2 * c) * math.log(T))


def product_small_t(beta, m, T):
    """Leading small-T behaviour of origin E and V for m-fold products.

    ((-1)^{m-1}/(m-1)!) 2^{m-1} (beta/2)^{m beta/2 - 1} (log T)^{m-1} T^beta.
    """
    return ((-1) ** (m - 1) / math.factorial(m - 1) * 2 ** (m - 1)
            * (beta / 2) ** (m * beta / 2 - 1) * math.log(T) ** (m - 1) * T**beta)


# truncated ensembles at weak non-unitarity


def weak_bulk_limit(beta, c, a, tol=DEFAULT_TOLERANCE):
    """Large-N (E, V) at fixed a in (0, 1) for the weakly non-unitary ensemble.

    E = sum_{j>=1} I_{a^2}(beta j/2, c+1), V = sum I_{a^2}(.) I_{1-a^2}(c+1, beta j/2).
    """
    _check_beta(beta)
    if not c > -1 or not 0 < a < 1:
        raise DomainError("weak_bulk_limit needs c > -1 and 0 < a < 1")
    x = a * a

    def block(j):
        p = reg_inc_beta(x, beta * j / 2, c + 1, tol)
        q = reg_inc_beta(1 - x, c + 1, beta * j / 2, tol)
        return p, p * q

    return _sum_decreasing_series(block, tol=tol)


def weak_edge_radius(beta, N, S):
    """a = 1 - S / (N beta)."""
    return 1 - S / (N * beta)


def weak_edge_limit(beta, c, S, tol=DEFAULT_TOLERANCE):
    """Limit of V_N(1 - S/(N beta)) / N: (1/S) int_0^S P(c+1,u) Q(c+1,u) du.

    The limit does not depend on beta once the radius is scaled this way.
    """
    _check_beta(beta)
    if not c > -1 or not S > 0:
        raise DomainError("weak_edge_limit needs c > -1 and S > 0")

    # in w = log u the endpoint behaviour u^{c+1} log(1/u) becomes a smooth
    # exponential tail; the part below log S - 40 is under S e^{-40} / 4
    def integrand(w):
        u = np.exp(w)
        p, q = reg_inc_gamma(c + 1, u, tol)
        return np.asarray(p) * np.asarray(q) * u

    top = math.log(S)
    knots = sorted({top - 40.0, min(top, max(top - 40.0, math.log(c + 1))), top})
    value, _ = adaptive_gauss_legendre(integrand, knots, tol)
    return value / S
