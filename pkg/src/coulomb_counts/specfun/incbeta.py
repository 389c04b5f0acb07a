"""Regularized incomplete beta function I_x(a, b).

Continued fraction (modified Lentz) with the usual symmetry switch at
x > (a + 1) / (a + b + 2). The prefactor x^a (1-x)^b / B(a, b) is taken in
logs, using Stirling differences when both shapes are large.
"""

import numpy as np

from ..errors import ConvergenceError, DomainError
from .loggamma import HALF_LOG_2PI, log_gamma, stirling_correction
from .tolerance import DEFAULT_TOLERANCE

_TINY = 1e-300
_EPS = np.finfo(float).eps


def log_beta_prefactor(x, a, b):
    """ln( x^a (1-x)^b / B(a, b) ) for 0 < x < 1."""
    x, a, b = np.broadcast_arrays(np.asarray(x, float), np.asarray(a, float),
                                  np.asarray(b, float))
    out = np.empty(x.shape)
    big = (a >= 10.0) & (b >= 10.0)
    if big.any():
        ab, bb, xb = a[big], b[big], x[big]
        x0 = ab / (ab + bb)
        dx = xb - x0
        out[big] = (ab * np.log1p(dx / x0) + bb * np.log1p(-dx / (1.0 - x0))
                    + 0.5 * np.log(ab * bb / (ab + bb)) - HALF_LOG_2PI
                    - stirling_correction(ab) - stirling_correction(bb)
                    + stirling_correction(ab + bb))
    a_only = (a >= 10.0) & ~big
    if a_only.any():
        aa, bs, xs = a[a_only], b[a_only], x[a_only]
        out[a_only] = (aa * np.log(xs) + bs * np.log1p(-xs) - log_gamma(bs)
                       + _log_gamma_shift(aa, bs))
    b_only = (b >= 10.0) & ~big
    if b_only.any():
        as_, bb, xs = a[b_only], b[b_only], x[b_only]
        out[b_only] = (as_ * np.log(xs) + bb * np.log1p(-xs) - log_gamma(as_)
                       + _log_gamma_shift(bb, as_))
    small = (a < 10.0) & (b < 10.0)
    if small.any():
        as_, bs, xs = a[small], b[small], x[small]
        out[small] = (as_ * np.log(xs) + bs * np.log1p(-xs)
                      - log_gamma(as_) - log_gamma(bs) + log_gamma(as_ + bs))
    return out


def _log_gamma_shift(big, s):
    # ln Gamma(big + s) - ln Gamma(big) for big >= 10, without cancellation
    return ((big - 0.5) * np.log1p(s / big) + s * np.log(big + s) - s
            + stirling_correction(big + s) - stirling_correction(big))


def _betacf(x, a, b, tol):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _TINY, _TINY, d)
    d = 1.0 / d
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    last = np.zeros_like(x)
    for m in range(1, tol.max_terms + 1):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        xi, ai, bi = x[idx], a[idx], b[idx]
        m2 = 2 * m
        aa = m * (bi - m) * xi / ((qam[idx] + m2) * (ai + m2))
        di = 1.0 + aa * d[idx]
        di = np.where(np.abs(di) < _TINY, _TINY, di)
        ci = 1.0 + aa / c[idx]
        ci = np.where(np.abs(ci) < _TINY, _TINY, ci)
        di = 1.0 / di
        hi = h[idx] * di * ci
        aa = -(ai + m) * (qab[idx] + m) * xi / ((ai + m2) * (qap[idx] + m2))
        di = 1.0 + aa * di
        di = np.where(np.abs(di) < _TINY, _TINY, di)
        ci = 1.0 + aa / ci
        ci = np.where(np.abs(ci) < _TINY, _TINY, ci)
        di = 1.0 / di
        dl = di * ci
        h[idx] = hi * dl
        d[idx] = di
        c[idx] = ci
        last[idx] = dl
        done = np.abs(dl - 1.0) <= _EPS
        active[idx[done]] = False
    if active.any() and np.any(np.abs(last[active] - 1.0) > tol.rel_eps):
        raise ConvergenceError("incomplete beta continued fraction did not converge")
    return h


def reg_inc_beta(x, alpha, b, tol=DEFAULT_TOLERANCE):
    """Regularized incomplete beta I_x(alpha, b) for 0 <= x <= 1.

    Arguments broadcast; scalar inputs give a float.
    """
    x_in = np.asarray(x, dtype=float)
    a_in = np.asarray(alpha, dtype=float)
    b_in = np.asarray(b, dtype=float)
    if np.any(~((x_in >= 0) & (x_in <= 1))):
        raise DomainError("reg_inc_beta requires 0 <= x <= 1")
    if np.any(~(a_in > 0)) or np.any(~(b_in > 0)):
        raise DomainError("reg_inc_beta requires alpha > 0 and b > 0")
    if np.any(np.isinf(a_in)) or np.any(np.isinf(b_in)):
        raise DomainError("reg_inc_beta requires finite shapes")
    xb, ab, bb = np.broadcast_arrays(x_in, a_in, b_in)
    shape = xb.shape
    xs, a, bs = (v.ravel().astype(float) for v in (xb, ab, bb))
    out = np.where(xs >= 1.0, 1.0, 0.0)

    inner = (xs > 0) & (xs < 1)
    direct = inner & (xs <= (a + 1.0) / (a + bs + 2.0))
    if direct.any():
        lp = log_beta_prefactor(xs[direct], a[direct], bs[direct])
        cf = _betacf(xs[direct], a[direct], bs[direct], tol)
        out[direct] = np.exp(lp + np.log(cf)) / a[direct]
    flip = inner & ~direct
    if flip.any():
        y = 1.0 - xs[flip]
        lp = log_beta_prefactor(y, bs[flip], a[flip])
        cf = _betacf(y, bs[flip], a[flip], tol)
        out[flip] = 1.0 - np.exp(lp + np.log(cf)) / bs[flip]
    out = np.clip(out, 0.0, 1.0).reshape(shape)
    return float(out) if out.ndim == 0 else out


def reg_inc_beta_complement(x, alpha, b, tol=DEFAULT_TOLERANCE):
    """1 - I_x(alpha, b), computed as I_{1-x}(b, alpha) to keep small tails."""
    x = np.asarray(x, dtype=float)
    return reg_inc_beta(1.0 - x, b, alpha, tol)
