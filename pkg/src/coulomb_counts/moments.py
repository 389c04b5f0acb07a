"""Occupation probabilities p_j = h_{j,1}(a) / h_j.

p_j is the probability that the j-th independent radius falls inside the
disc of radius a. For beta = 2 the moment is r^{2j+1} e^{-N g(r)}; for
beta = 4 only odd orders 2j+1 enter, so the moment is r^{4j+3} e^{-N g(r)}.
Built-in ensembles use closed forms; anything else goes through log-domain
quadrature.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, QuadratureError
from .quadrature import adaptive_gauss_legendre
from .specfun import (
    DEFAULT_TOLERANCE,
    gamma_product_cdf,
    gamma_product_sf,
    reg_inc_beta,
    reg_inc_gamma,
)

# the log-integrand is followed out to this drop below its local maximum
_LOG_DROP = 50.0
_U_MIN = -700.0
_U_MAX = 40.0
# on a finite support, R - r is only resolved while e^{-u} >> machine epsilon;
# past this point the integrand is a pure exponential tail, added in closed form
_U_WALL = 25.0


@dataclass(frozen=True)
class OccupationVector:
    """p_0 .. p_{N-1} and their complements 1 - p_j, each computed directly."""

    beta: int
    N: int
    a: float
    probs: np.ndarray
    complements: np.ndarray
    path: str
    saturated: bool = False

    def __post_init__(self):
        for arr in (self.probs, self.complements):
            arr.setflags(write=False)
        if len(self.probs) != self.N:
            raise ValueError("probs must have length N")


def _check_args(potential, N, a):
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer")
    if not a > 0:
        raise DomainError("disc radius a must be positive")
    if potential.n is not None and potential.n != N:
        raise DomainError(f"potential was built for N={potential.n}, asked for N={N}")
    return int(N), float(a)


def _saturated(potential, N, a):
    return OccupationVector(potential.beta, N, a, np.ones(N), np.zeros(N), "closed_form", True)


def closed_form_available(potential):
    return potential.dispatch_tag != "custom"


def occupation_probs(potential, N, a, tol=DEFAULT_TOLERANCE):
    """Occupation probabilities for ``potential`` at disc radius ``a``.

    Built-ins use their closed forms, the rest use quadrature. For
    a >= support_radius every p_j is 1 and the vector is flagged saturated.
    """
    N, a = _check_args(potential, N, a)
    if a >= potential.support_radius:
        return _saturated(potential, N, a)
    tag = potential.dispatch_tag
    if tag == "custom":
        return occupation_probs_quadrature(potential, N, a, tol)
    beta = potential.beta
    j = np.arange(N, dtype=float)
    shape = j + 1 if beta == 2 else 2 * j + 2
    if tag == "ginibre":
        p, q = reg_inc_gamma(shape, (beta / 2) * N * a * a, tol)
    elif tag == "mittag_leffler":
        b, c = potential.param("b"), potential.param("c")
        if beta == 2:
            p, q = reg_inc_gamma((j + c + 1) / b, a ** (2 * b) * N / b, tol)
        else:
            p, q = reg_inc_gamma((2 * j + c + 2) / b, 2 * a ** (2 * b) * N / b, tol)
    elif tag == "product":
        m = potential.param("m")
        x = ((beta / 2) * N) ** m * a * a
        p = np.empty(N)
        q = np.empty(N)
        for i, s in enumerate(shape):
            p[i] = gamma_product_cdf(m, s, x, tol)
            q[i] = gamma_product_sf(m, s, x, tol)
    elif tag == "trunc_weak":
        c = potential.param("c")
        p = reg_inc_beta(a * a, shape, c + 1, tol)
        q = reg_inc_beta(1 - a * a, c + 1, shape, tol)
    elif tag == "trunc_strong":
        ct = potential.param("c_tilde")
        x = a * a / (1 + ct)
        second = (beta / 2) * ct * N + 1
        p = reg_inc_beta(x, shape, second, tol)
        q = reg_inc_beta(1 - x, second, shape, tol)
    else:
        raise DomainError(f"no closed form for dispatch tag {tag!r}")
    return OccupationVector(beta, N, a, np.asarray(p, float), np.asarray(q, float), "closed_form")


class _RadialIntegrand:
    """log of r^k e^{-N g(r)} dr in a variable u with exponential tails.

    Infinite support: r = e^u. Finite support R: r = R / (1 + e^{-u}), which
    turns an integrable (R - r)^c endpoint into an exponential tail.
    """

    def __init__(self, potential, N):
        self.g = potential.g
        self.N = N
        self.R = potential.support_radius
        self.finite = math.isfinite(self.R)
        self.u_hi = _U_WALL if self.finite else _U_MAX

    def r_of(self, u):
        u = np.asarray(u, dtype=float)
        if self.finite:
            return self.R / (1.0 + np.exp(-u))
        return np.exp(u)

    def u_of(self, r):
        if self.finite:
            return math.log(r / (self.R - r))
        return math.log(r)

    def log_jacobian(self, u):
        u = np.asarray(u, dtype=float)
        if self.finite:
            return math.log(self.R) - np.logaddexp(0.0, -u) - np.logaddexp(0.0, u)
        return u

    def log_r(self, u):
        u = np.asarray(u, dtype=float)
        if self.finite:
            return math.log(self.R) - np.logaddexp(0.0, -u)
        return u

    def __call__(self, u, k):
        u = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            gv = np.asarray(self.g(self.r_of(u)), dtype=float)
            val = k * self.log_r(u) - self.N * gv + self.log_jacobian(u)
        return np.where(np.isnan(val), -np.inf, val)


def _find_peak(f, j, u_hi):
    grid = np.linspace(_U_MIN, u_hi, 1451)
    vals = f(grid)
    i = int(np.argmax(vals))
    if not np.isfinite(vals[i]):
        raise QuadratureError("integrand is not finite anywhere", j)
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda u: -float(f(u)), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    u0 = float(res.x) if -res.fun >= vals[i] else float(grid[i])
    return u0, float(f(u0))


def _width(f, u0):
    h = 1e-4
    curv = float(f(u0 + h) - 2 * f(u0) + f(u0 - h)) / (h * h)
    if np.isfinite(curv) and curv < 0:
        return min(1.0, 1.0 / math.sqrt(-curv))
    return 0.1


def _breakpoints(f, start, fmax, direction, limit, width):
    # march away from the local maximum until the integrand is negligible
    points = [start]
    step = width
    u = start
    while True:
        nxt = u + direction * step
        if (direction > 0 and nxt >= limit) or (direction < 0 and nxt <= limit):
            points.append(limit)
            break
        points.append(nxt)
        if f(nxt) < fmax - _LOG_DROP:
            break
        u = nxt
        step *= 2
    return points if direction > 0 else points[::-1]


def _wall_tail(f, hi, start=None):
    """ln of the integral of exp(f) over [start, inf), start >= hi.

    Beyond ``hi`` the integrand is extrapolated as the exponential through
    f(hi - 1) and f(hi).
    """
    f_hi = float(f(hi))
    if not np.isfinite(f_hi):
        return -math.inf
    slope = f_hi - float(f(hi - 1.0))
    if not slope < 0:
        raise QuadratureError("integrand does not decay toward the support edge")
    start = hi if start is None else max(start, hi)
    return f_hi + slope * (start - hi) - math.log(-slope)


def _log_integral(f, lo, hi, peak, width, tol, j, wall=False):
    """ln of the integral of exp(f) over [lo, hi] in the transformed variable.

    With ``wall`` set, the exponential tail beyond ``hi`` is added.
    """
    if hi <= lo:
        return -math.inf
    if wall:
        body = _log_integral(f, lo, hi, peak, width, tol, j)
        return float(np.logaddexp(body, _wall_tail(f, hi)))
    top = min(max(peak, lo), hi)
    fmax = float(f(top))
    if not np.isfinite(fmax):
        # the local maximum sits on an endpoint where the integrand vanishes
        # (e.g. a hard wall); pull it inside
        top = lo + 1e-9 * (hi - lo) if top == lo else hi - 1e-9 * (hi - lo)
        fmax = float(f(top))
        if not np.isfinite(fmax):
            return -math.inf
    left = _breakpoints(f, top, fmax, -1, lo, width) if top > lo else [top]
    right = _breakpoints(f, top, fmax, +1, hi, width) if top < hi else [top]
    edges = np.array(left[:-1] + right)
    value, _ = adaptive_gauss_legendre(lambda u: np.exp(f(u) - fmax), edges, tol, j)
    if not value > 0:
        return -math.inf
    return math.log(value) + fmax


def _split_integrals(f, f0, ua, peak, width, tol, j):
    """(ln inner, ln outer) moments split at the transformed radius ua."""
    hi = f0.u_hi
    if ua < hi:
        return (_log_integral(f, _U_MIN, ua, peak, width, tol, j),
                _log_integral(f, ua, hi, peak, width, tol, j, f0.finite))
    if not f0.finite:
        return _log_integral(f, _U_MIN, hi, peak, width, tol, j), -math.inf
    # a is within R e^{-u_hi} of the wall: only part of the tail is outside
    body = _log_integral(f, _U_MIN, hi, peak, width, tol, j)
    inside_tail = _wall_tail(f, hi)
    outside = _wall_tail(f, hi, ua)
    inner = np.logaddexp(body, inside_tail + math.log(-math.expm1(outside - inside_tail)))
    return float(inner), outside


def occupation_log_moments(potential, N, a, j, tol=DEFAULT_TOLERANCE):
    """(ln h_{j,1}(a), ln h_{j,2}(a), ln h_j) by quadrature.

    The three integrals are computed independently, so exp(L1 - L) +
    exp(L2 - L) = 1 is a genuine check on the quadrature.
    """
    N, a = _check_args(potential, N, a)
    if potential.g is None:
        raise DomainError(f"{potential.label} exposes no finite-N g; use the closed form")
    f0 = _RadialIntegrand(potential, N)
    k = 2 * j + 1 if potential.beta == 2 else 4 * j + 3

    def f(u):
        return f0(u, k)

    peak, _ = _find_peak(f, j, f0.u_hi)
    width = _width(f, peak)
    lo, hi = _U_MIN, f0.u_hi
    if a >= potential.support_radius:
        l1 = _log_integral(f, lo, hi, peak, width, tol, j, f0.finite)
        return l1, -math.inf, l1
    l1, l2 = _split_integrals(f, f0, f0.u_of(a), peak, width, tol, j)
    lt = _log_integral(f, lo, hi, peak, width, tol, j, f0.finite)
    return l1, l2, lt


def occupation_probs_quadrature(potential, N, a, tol=DEFAULT_TOLERANCE):
    """Occupation probabilities from log-domain quadrature of the radial moments.

    p_j = exp(L1 - logaddexp(L1, L2)) with L1, L2 the logs of the inner and
    outer truncated moments; nothing is formed outside the log domain.
    """
    N, a = _check_args(potential, N, a)
    if a >= potential.support_radius:
        return _saturated(potential, N, a)
    if potential.g is None:
        raise DomainError(f"{potential.label} exposes no finite-N g; use the closed form")
    f0 = _RadialIntegrand(potential, N)
    hi = f0.u_hi
    ua = f0.u_of(a)
    probs = np.empty(N)
    comps = np.empty(N)
    for j in range(N):
        k = 2 * j + 1 if potential.beta == 2 else 4 * j + 3

        def f(u, k=k):
            return f0(u, k)

        peak, _ = _find_peak(f, j, hi)
        width = _width(f, peak)
        l1, l2 = _split_integrals(f, f0, ua, peak, width, tol, j)
        total = np.logaddexp(l1, l2)
        if not np.isfinite(total):
            raise QuadratureError("radial moment vanished", j)
        probs[j] = math.exp(l1 - total)
        comps[j] = math.exp(l2 - total)
    return OccupationVector(potential.beta, N, a, probs, comps, "quadrature")
