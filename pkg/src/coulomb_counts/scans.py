"""Scans of finite-N statistics against their asymptotic laws.

Each scan returns a ScanCurve whose records carry a full row of named
columns in ``extra``; ``curve.meta["columns"]`` fixes the column order.
"""

import math

import numpy as np

from . import statistics as st
from .errors import DomainError
from .moments import occupation_probs
from .sampler import monte_carlo_stats

MC_COLUMNS = ("mc_variance", "mc_se_variance")


def make_grid(lo, hi, points, log=False):
    if not lo < hi or points < 2:
        raise DomainError("grid needs min < max and at least 2 points")
    if log:
        if lo <= 0:
            raise DomainError("log grid needs min > 0")
        return np.geomspace(lo, hi, int(points))
    return np.linspace(lo, hi, int(points))


def _finite(potential, N, a):
    return st.finite_n_stats(occupation_probs(potential, N, a))


def _mc(potential, N, a, trials, seed):
    if not trials:
        return {}
    batch = monte_carlo_stats(potential, N, a, trials, seed)
    return {"mc_variance": batch.emp_variance, "mc_se_variance": batch.se_variance}


def _curve(regime, columns, rows, abscissa, finite, asymptotic, scaled, meta):
    records = tuple(
        st.ScanRecord(r[abscissa], r[finite], r[asymptotic], r[scaled], r) for r in rows)
    return st.ScanCurve(regime, records, dict(meta, columns=tuple(columns)))


def variance_curve(potential, N, grid, trials=0, seed=0):
    """Raw and bulk-scaled V_N(a) with the bulk line and the edge curve."""
    if potential.dispatch_tag == "trunc_weak":
        return weak_bulk_curve(potential, N, grid, trials, seed)
    beta = potential.beta
    lap1 = float(potential.limit_laplacian(1.0))
    columns = ["a", "E_N", "V_N", "scaled_V", "bulk_prediction", "edge_prediction"]
    if trials:
        columns += MC_COLUMNS
    rows = []
    for a in grid:
        a = float(a)
        s = _finite(potential, N, a)
        lap = float(potential.limit_laplacian(a))
        scale = beta / math.sqrt(N * lap)
        # edge curve in the same bulk scaling: (2/sqrt pi) f(S) sqrt(dQ(1)/dQ(a))
        S = (1 - a) * math.sqrt(2 * lap1 * N)
        edge = 2 / st.SQRT_PI * st.edge_profile_f(S) * math.sqrt(lap1 / lap)
        row = {"a": a, "E_N": s.mean, "V_N": s.variance, "scaled_V": scale * s.variance,
               "bulk_prediction": 2 * a / st.SQRT_PI, "edge_prediction": edge}
        mc = _mc(potential, N, a, trials, seed)
        row.update({k: scale * v for k, v in mc.items()})
        rows.append(row)
    return _curve("bulk", columns, rows, "a", "V_N", "bulk_prediction", "scaled_V",
                  {"ensemble": potential.label, "beta": beta, "N": N})


def weak_bulk_curve(potential, N, grid, trials=0, seed=0):
    """E_N, V_N of the weakly non-unitary ensemble against their N -> infinity limits."""
    beta, c = potential.beta, potential.param("c")
    columns = ["a", "E_N", "V_N", "limit_E", "limit_V"]
    if trials:
        columns += MC_COLUMNS
    rows = []
    for a in grid:
        a = float(a)
        if not 0 < a < 1:
            raise DomainError("weak bulk scan needs 0 < a < 1")
        s = _finite(potential, N, a)
        e, v = st.weak_bulk_limit(beta, c, a)
        row = {"a": a, "E_N": s.mean, "V_N": s.variance, "limit_E": e, "limit_V": v}
        row.update(_mc(potential, N, a, trials, seed))
        rows.append(row)
    return _curve("weak_bulk", columns, rows, "a", "V_N", "limit_V", "V_N",
                  {"ensemble": potential.label, "beta": beta, "N": N})


def edge_curve(potential, N, grid, trials=0, seed=0):
    """Scaled V_N near the droplet edge against the universal edge law.

    Suitable ensembles use a = 1 - S/sqrt(2 dQ(1) N) and the (2/sqrt pi) f(S)
    law; the weakly non-unitary ensemble uses a = 1 - S/(N beta), V_N/N and
    its integral law.
    """
    beta = potential.beta
    weak = potential.dispatch_tag == "trunc_weak"
    columns = ["S", "a", "V_N", "scaled_V", "prediction"]
    if trials:
        columns += MC_COLUMNS
    rows = []
    for S in grid:
        S = float(S)
        if weak:
            a = st.weak_edge_radius(beta, N, S)
            scale = 1.0 / N
            pred = st.weak_edge_limit(beta, potential.param("c"), S)
        else:
            a = st.edge_radius(potential, N, S)
            scale = st.edge_scale(potential, N)
            pred = 2 / st.SQRT_PI * st.edge_profile_f(S)
        if not a > 0:
            raise DomainError(f"S={S} gives radius {a} <= 0")
        s = _finite(potential, N, a)
        row = {"S": S, "a": a, "V_N": s.variance, "scaled_V": scale * s.variance,
               "prediction": pred}
        row.update({k: scale * v for k, v in _mc(potential, N, a, trials, seed).items()})
        rows.append(row)
    return _curve("weak_edge" if weak else "edge", columns, rows, "S", "V_N", "prediction",
                  "scaled_V", {"ensemble": potential.label, "beta": beta, "N": N})


def origin_radius(potential, N, T):
    """The rescaled radius that keeps O(1) eigenvalues in the disc."""
    tag = potential.dispatch_tag
    if tag == "ginibre":
        return T / math.sqrt(N)
    if tag == "mittag_leffler":
        return T / N ** (1 / (2 * potential.param("b")))
    if tag == "product":
        return T / N ** (potential.param("m") / 2)
    if tag == "trunc_strong":
        ct = potential.param("c_tilde")
        return math.sqrt((1 + ct) / (N * ct)) * T
    raise DomainError(f"no origin regime for {tag}")


def origin_limits(potential, T):
    """(E, V, small-T asymptote) of the origin limit."""
    beta, tag = potential.beta, potential.dispatch_tag
    if tag in ("ginibre", "trunc_strong"):
        e, v = (st.origin_limit_ml(beta, 1.0, 0.0, T) if tag == "ginibre"
                else st.origin_limit_trunc_strong(beta, T))
        return e, v, st.ml_small_t(beta, 1.0, 0.0, T)
    if tag == "mittag_leffler":
        b, c = potential.param("b"), potential.param("c")
        e, v = st.origin_limit_ml(beta, b, c, T)
        return e, v, st.ml_small_t(beta, b, c, T)
    if tag == "product":
        m = int(potential.param("m"))
        e, v = st.origin_limit_product(beta, m, T)
        return e, v, st.product_small_t(beta, m, T)
    raise DomainError(f"no origin regime for {tag}")


def origin_curve(potential, N, grid, trials=0, seed=0):
    """Finite-N E and V at the origin scaling against the limiting E(T), V(T)."""
    columns = ["T", "a", "E_N", "V_N", "limit_E", "limit_V", "small_T"]
    if trials:
        columns += MC_COLUMNS
    rows = []
    for T in grid:
        T = float(T)
        if not T > 0:
            raise DomainError("origin scan needs T > 0")
        a = origin_radius(potential, N, T)
        s = _finite(potential, N, a)
        e, v, small = origin_limits(potential, T)
        row = {"T": T, "a": a, "E_N": s.mean, "V_N": s.variance, "limit_E": e, "limit_V": v,
               "small_T": small}
        row.update(_mc(potential, N, a, trials, seed))
        rows.append(row)
    return _curve("origin", columns, rows, "T", "V_N", "limit_V", "V_N",
                  {"ensemble": potential.label, "beta": potential.beta, "N": N})
