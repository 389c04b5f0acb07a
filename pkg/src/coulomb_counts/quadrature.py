"""Adaptive Gauss-Legendre quadrature, plain and in the log domain.

A panel is accepted when the n-point rule on it agrees with the sum of the
n-point rules on its two halves; otherwise both halves are queued. The
integrand is called once per refinement sweep on all pending nodes.
"""

import numpy as np

from .errors import QuadratureError
from .specfun.tolerance import DEFAULT_TOLERANCE

_ORDER = 20
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_ORDER)


def _rule_many(f, lo, hi):
    # n-point rule on many panels at once
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    return half * (vals @ _WEIGHTS)


def adaptive_gauss_legendre(f, breakpoints, tol=DEFAULT_TOLERANCE, index=None):
    """Integrate a vectorized f over consecutive intervals of ``breakpoints``.

    Returns (value, error_estimate). Raises QuadratureError when the panel
    count would exceed 2**max_quad_refinements or a panel becomes narrower
    than rounding allows.
    """
    edges = np.asarray(breakpoints, dtype=float)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) < 0):
        raise ValueError("breakpoints must be a nondecreasing sequence of length >= 2")
    lo = edges[:-1]
    hi = edges[1:]
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    if lo.size == 0:
        return 0.0, 0.0
    whole = _rule_many(f, lo, hi)
    total = 0.0
    err = 0.0
    budget = 2**min(tol.max_quad_refinements, 24)
    for _ in range(tol.max_quad_refinements + 1):
        mid = 0.5 * (lo + hi)
        halves = _rule_many(f, np.concatenate([lo, mid]), np.concatenate([mid, hi]))
        n = lo.size
        fine = halves[:n] + halves[n:]
        diff = np.abs(fine - whole)
        scale = np.abs(total + fine.sum())
        # per-panel share of the global tolerance
        width = (hi - lo) / (edges[-1] - edges[0])
        thresh = np.maximum(tol.rel_eps * scale * width, tol.abs_eps * width)
        ok = (diff <= thresh) | (diff <= 64 * np.finfo(float).eps * np.abs(fine))
        total += fine[ok].sum()
        err += diff[ok].sum()
        if ok.all():
            return float(total), float(err)
        bad = ~ok
        if np.any((hi[bad] - lo[bad]) <= 1e-13 * np.maximum(1.0, np.abs(lo[bad]))):
            raise QuadratureError("quadrature panel collapsed before convergence", index)
        lo_b, mid_b, hi_b = lo[bad], mid[bad], hi[bad]
        lo = np.concatenate([lo_b, mid_b])
        hi = np.concatenate([mid_b, hi_b])
        whole = np.concatenate([halves[:n][bad], halves[n:][bad]])
        if lo.size > budget:
            break
    raise QuadratureError("adaptive quadrature did not converge", index)


def log_integrate(logf, breakpoints, log_scale, tol=DEFAULT_TOLERANCE, index=None):
    """ln of the integral of exp(logf) over the breakpoint range.

    ``log_scale`` should be near the maximum of logf; the integrand is
    evaluated as exp(logf - log_scale) so nothing overflows.
    """
    value, _ = adaptive_gauss_legendre(lambda u: np.exp(logf(u) - log_scale),
                                       breakpoints, tol, index)
    if not value > 0:
        raise QuadratureError("log-domain integral vanished", index)
    return float(np.log(value) + log_scale)
