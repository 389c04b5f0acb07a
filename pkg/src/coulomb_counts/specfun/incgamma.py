"""Regularized incomplete gamma functions P and Q.

The lower series is used for x < alpha + 1 and a modified-Lentz continued
fraction for Q otherwise. Prefactors are built in the log domain, with a
Stirling-difference form for large alpha so that x near alpha does not lose
digits to cancellation.
"""

import numpy as np

from ..errors import ConvergenceError, DomainError
from .loggamma import HALF_LOG_2PI, log_gamma, stirling_correction
from .tolerance import DEFAULT_TOLERANCE

_TINY = 1e-300
_EPS = np.finfo(float).eps
_LOG_UNDERFLOW = -760.0


def log_gamma_prefactor(alpha, x):
    """ln( x^alpha e^{-x} / Gamma(alpha + 1) ) for alpha > 0, x > 0."""
    alpha = np.asarray(alpha, dtype=float)
    x = np.asarray(x, dtype=float)
    alpha, x = np.broadcast_arrays(alpha, x)
    out = np.empty(alpha.shape)
    big = alpha >= 10.0
    if big.any():
        a = alpha[big]
        d = (x[big] - a) / a
        with np.errstate(divide="ignore"):
            out[big] = (a * (np.log1p(d) - d) - 0.5 * np.log(a) - HALF_LOG_2PI
                        - stirling_correction(a))
    small = ~big
    if small.any():
        a = alpha[small]
        out[small] = a * np.log(x[small]) - x[small] - log_gamma(a + 1.0)
    return out


def _series_p(alpha, x, tol):
    # P = pref * sum_{n>=0} x^n / ((alpha+1)...(alpha+n))
    total = np.ones_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    denom = alpha.copy()
    for _ in range(tol.max_terms):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        denom[idx] += 1.0
        term[idx] *= x[idx] / denom[idx]
        total[idx] += term[idx]
        done = np.abs(term[idx]) <= _EPS * np.abs(total[idx])
        active[idx[done]] = False
    if active.any():
        rel = np.abs(term[active]) / np.abs(total[active])
        if np.any(rel > tol.rel_eps):
            raise ConvergenceError("incomplete gamma series did not converge")
    return total


def _contfrac_q(alpha, x, tol):
    # Q = pref * alpha / x-type continued fraction (modified Lentz)
    b = x + 1.0 - alpha
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    delta = np.zeros_like(x)
    for i in range(1, tol.max_terms + 1):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        an = -i * (i - alpha[idx])
        b[idx] += 2.0
        dd = an * d[idx] + b[idx]
        dd = np.where(np.abs(dd) < _TINY, _TINY, dd)
        cc = b[idx] + an / c[idx]
        cc = np.where(np.abs(cc) < _TINY, _TINY, cc)
        dd = 1.0 / dd
        dl = dd * cc
        d[idx] = dd
        c[idx] = cc
        h[idx] *= dl
        delta[idx] = dl
        done = np.abs(dl - 1.0) <= _EPS
        active[idx[done]] = False
    if active.any():
        if np.any(np.abs(delta[active] - 1.0) > tol.rel_eps):
            raise ConvergenceError("incomplete gamma continued fraction did not converge")
    return h


def reg_inc_gamma(alpha, x, tol=DEFAULT_TOLERANCE):
    """Regularized incomplete gamma functions (P, Q) at (alpha, x).

    P(alpha, x) = gamma(alpha, x) / Gamma(alpha) and Q = 1 - P, each computed
    directly so that tiny tails keep full relative accuracy. Arguments
    broadcast; scalar inputs give a pair of floats.
    """
    a_in = np.asarray(alpha, dtype=float)
    x_in = np.asarray(x, dtype=float)
    if np.any(~(a_in > 0)) or np.any(np.isinf(a_in)):
        raise DomainError("reg_inc_gamma requires finite alpha > 0")
    if np.any(~(x_in >= 0)):
        raise DomainError("reg_inc_gamma requires x >= 0")
    a_b, x_b = np.broadcast_arrays(a_in, x_in)
    shape = a_b.shape
    a = a_b.ravel().astype(float)
    xs = x_b.ravel().astype(float)
    p = np.zeros_like(xs)
    q = np.ones_like(xs)

    inf = np.isinf(xs)
    p[inf] = 1.0
    q[inf] = 0.0

    pos = (xs > 0) & ~inf
    ser = pos & (xs < a + 1.0)
    if ser.any():
        lp = log_gamma_prefactor(a[ser], xs[ser])
        s = _series_p(a[ser], xs[ser], tol)
        val = np.exp(lp + np.log(s))
        p[ser] = val
        q[ser] = 1.0 - val
    cf = pos & ~ser
    if cf.any():
        # x^a e^-x / Gamma(a) = alpha * x^a e^-x / Gamma(a + 1)
        lp = log_gamma_prefactor(a[cf], xs[cf]) + np.log(a[cf])
        # the fraction is below 1 here, so Q underflows once lp does
        live = lp > _LOG_UNDERFLOW
        val = np.zeros_like(lp)
        if live.any():
            h = _contfrac_q(a[cf][live], xs[cf][live], tol)
            val[live] = np.exp(lp[live] + np.log(h))
        q[cf] = val
        p[cf] = 1.0 - val

    p = np.clip(p, 0.0, 1.0).reshape(shape)
    q = np.clip(q, 0.0, 1.0).reshape(shape)
    if p.ndim == 0:
        return float(p), float(q)
    return p, q

