"""Acceptance checks reproducing the large-N claims at desk scale.

Each check returns a CheckResult with the measured quantities. The quick
level covers the identity and closed-form checks; full adds the
convergence scans, the quadrature oracle and Monte Carlo.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2

from . import statistics as st
from .ensembles import make_custom, make_ginibre, make_potential
from .moments import occupation_probs, occupation_probs_quadrature
from .sampler import monte_carlo_stats
from .specfun import (
    bk_polynomials,
    gamma_product_cdf,
    gamma_product_sf,
    reg_inc_beta,
    reg_inc_gamma,
)

SEED = 20240521


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    summary: str
    details: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} [{status}] {self.name}: {self.summary}"


def _rel(x, ref):
    return abs(x - ref) / abs(ref) if ref != 0 else abs(x)


def check_identities():
    worst = {}
    alphas = np.array([0.3, 1.0, 2.5, 7.0, 30.0, 150.0, 1000.0])
    xs = np.array([1e-3, 0.2, 1.0, 3.0, 9.0, 40.0, 170.0, 1100.0])
    A, X = np.meshgrid(alphas, xs)
    p, q = reg_inc_gamma(A, X)
    worst["P+Q"] = float(np.max(np.abs(p + q - 1)))
    x = np.array([1e-4, 0.05, 0.3, 0.5, 0.77, 0.95, 0.9999])
    dev = 0.0
    for a in (0.5, 1.0, 3.0, 20.0, 200.0):
        for b in (0.2, 1.0, 6.0, 60.0):
            lhs = np.asarray(reg_inc_beta(x, a, b))
            rhs = np.asarray(reg_inc_beta(1 - x, b, a))
            dev = max(dev, float(np.max(np.abs(lhs + rhs - 1))))
    worst["I_x reflection"] = dev
    dev = 0.0
    for m in (1, 2, 3):
        for j in range(1, 11):
            for z in (1e-3, 0.1, 1.0, 5.0, 30.0, 300.0):
                dev = max(dev, abs(gamma_product_cdf(m, j, z) + gamma_product_sf(m, j, z) - 1))
    worst["gamma product cdf+sf"] = dev
    worst["f closed vs integral"] = max(
        abs(st.edge_profile_f(s) - st.edge_profile_f_integral(s))
        for s in np.linspace(-6, 6, 25))
    ok = all(v <= 1e-9 for v in worst.values())
    return ok, "max abs deviation " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()), []


def check_ginibre_closed():
    worst = 0.0
    details = []
    for beta in (2, 4):
        for N in (10, 100, 500):
            pot = make_ginibre(beta)
            for a in (0.3, 0.7, 0.95):
                s = st.finite_n_stats(occupation_probs(pot, N, a)).mean
                c = st.ginibre_mean_closed(beta, N, a)
                worst = max(worst, _rel(c, s))
                details.append(f"beta={beta} N={N} a={a}: sum {s!r} closed {c!r}")
    return worst <= 1e-10, f"max rel deviation {worst:.1e} (tol 1e-10)", details


def check_bk_expansion():
    N, a = 200, 0.5
    exact = st.ginibre_mean_closed(2, N, a)
    approx = st.ginibre_mean_expansion(2, N, a, 3)
    err = _rel(approx, exact)
    polys = bk_polynomials(2)
    b_ok = polys[1].coeffs == (0, 1) and polys[2].coeffs == (0, 1, 2)
    excess_err = _rel(st.ginibre_expansion_excess(2, N, a, 3), st.ginibre_mean_excess(2, N, a))
    ok = err <= 1e-5 and b_ok
    summary = (f"rel error of mean {err:.1e} (tol 1e-5); b_1, b_2 exact: {b_ok}; "
               f"rel error of the exponentially small excess {excess_err:.1e}")
    return ok, summary, []


BULK_CASES = (
    ("ginibre", 2, 500, {}),
    ("ginibre", 4, 250, {}),
    ("mittag_leffler", 2, 500, {"b": 1.5, "c": 0.5}),
    ("product", 2, 500, {"m": 3}),
    ("trunc_strong", 2, 500, {"c_tilde": 0.8}),
)


def check_bulk():
    worst = 0.0
    details = []
    for name, beta, N, params in BULK_CASES:
        pot = make_potential(name, beta, N, **params)
        for a in (0.3, 0.5, 0.7):
            v = st.finite_n_stats(occupation_probs(pot, N, a)).variance
            scaled = st.bulk_scale(pot, N, a) * v
            dev = abs(scaled - 2 * a / st.SQRT_PI)
            worst = max(worst, dev)
            details.append(f"{pot.label} beta={beta} N={N} a={a}: scaled {scaled:.5f} dev {dev:.1e}")
    return worst <= 0.03, f"max abs deviation {worst:.2e} (tol 0.03)", details


def check_edge():
    pot = make_ginibre(2)
    errs = {}
    details = []
    for N in (200, 800):
        for S in (-1.0, 0.0, 1.0, 2.0):
            a = st.edge_radius(pot, N, S)
            v = st.finite_n_stats(occupation_probs(pot, N, a)).variance
            scaled = st.edge_scale(pot, N) * v
            pred = 2 / st.SQRT_PI * st.edge_profile_f(S)
            errs[N, S] = scaled - pred
            # diagnostic: the same law with the bulk factor a kept
            details.append(f"N={N} S={S:+.0f}: scaled {scaled:.5f} prediction {pred:.5f} "
                           f"error {scaled - pred:+.4f}; with factor a: {scaled - a * pred:+.1e}")
    within = (all(abs(errs[200, S]) <= 0.05 for S in (-1.0, 0.0, 1.0, 2.0))
              and all(abs(errs[800, S]) <= 0.03 for S in (-1.0, 0.0, 1.0, 2.0)))
    decreasing = all(abs(errs[800, S]) < abs(errs[200, S]) for S in (-1.0, 0.0, 1.0, 2.0))
    w200 = max(abs(errs[200, S]) for S in (-1.0, 0.0, 1.0, 2.0))
    w800 = max(abs(errs[800, S]) for S in (-1.0, 0.0, 1.0, 2.0))
    summary = (f"max |error| N=200 {w200:.4f} (tol 0.05), N=800 {w800:.4f} (tol 0.03), "
               f"decreasing in N: {decreasing}")
    return within and decreasing, summary, details


def check_origin():
    N = 2000
    worst = 0.0
    details = []
    for beta in (2, 4):
        for b, c in ((1.0, 0.0), (1.5, 0.5)):
            pot = make_potential("mittag_leffler", beta, N, b=b, c=c)
            for T in (0.5, 1.0, 2.0):
                a = T / N ** (1 / (2 * b))
                v = st.finite_n_stats(occupation_probs(pot, N, a)).variance
                _, v_lim = st.origin_limit_ml(beta, b, c, T)
                worst = max(worst, _rel(v, v_lim))
                details.append(f"ML beta={beta} b={b} c={c} T={T}: V_N {v:.6f} limit {v_lim:.6f}")
    pot = make_ginibre(4)
    for T in (0.5, 1.0, 2.0):
        e = st.finite_n_stats(occupation_probs(pot, N, T / math.sqrt(N))).mean
        lim = st.ginibre_origin_mean(4, T)
        worst = max(worst, _rel(e, lim))
        details.append(f"Ginibre beta=4 T={T}: E_N {e:.6f} limit {lim:.6f}")
    return worst <= 0.01, f"max rel deviation {worst:.2e} (tol 1e-2)", details


def check_triple_point():
    worst = 0.0
    for beta in (2, 4):
        for T in (0.5, 1.0, 2.0):
            ml = st.origin_limit_ml(beta, 1.0, 0.0, T)
            pr = st.origin_limit_product(beta, 1, T)
            ts = st.origin_limit_trunc_strong(beta, T)
            for x, y in ((ml, pr), (ml, ts)):
                worst = max(worst, abs(x[0] - y[0]), abs(x[1] - y[1]))
    return worst <= 1e-10, f"max abs deviation {worst:.1e} (tol 1e-10)", []


def check_small_t():
    details = []
    ml_ok = prod_ok = True
    for beta in (2, 4):
        for b, c in ((1.0, 0.0), (1.5, 0.5)):
            e, v = st.origin_limit_ml(beta, b, c, 0.05)
            ref = st.ml_small_t(beta, b, c, 0.05)
            re, rv = e / ref, v / ref
            ml_ok &= 0.95 <= re <= 1.05 and 0.95 <= rv <= 1.05
            details.append(f"ML beta={beta} b={b} c={c} T=0.05: E ratio {re:.4f} V ratio {rv:.4f}")
    prod_fail = []
    for beta in (2, 4):
        for m in (2, 3):
            e, v = st.origin_limit_product(beta, m, 0.02)
            ref = st.product_small_t(beta, m, 0.02)
            re, rv = e / ref, v / ref
            good = 0.9 <= re <= 1.1 and 0.9 <= rv <= 1.1
            prod_ok &= good
            if not good:
                prod_fail.append(f"beta={beta} m={m}")
            details.append(f"product beta={beta} m={m} T=0.02: E ratio {re:.4f} V ratio {rv:.4f}")
    summary = f"ML ratios in [0.95, 1.05]: {ml_ok}; product ratios in [0.9, 1.1]: {prod_ok}"
    if prod_fail:
        summary += " (outside: " + ", ".join(prod_fail) + ")"
    return ml_ok and prod_ok, summary, details


def check_weak():
    details = []
    v_small = max(st.weak_bulk_limit(beta, -0.999, 0.5)[1] for beta in (2, 4))
    exact = 0.5 - math.exp(-1) + 0.5 * math.exp(-2)
    edge_err = max(abs(st.weak_edge_limit(beta, 0.0, 1.0) - exact) for beta in (2, 4))
    N, beta, c = 500, 2, 5.0
    pot = make_potential("trunc_weak", beta, N, c=c)
    worst = 0.0
    for a in np.linspace(0.95, 0.999, 50):
        S = N * beta * (1 - a)
        v = st.finite_n_stats(occupation_probs(pot, N, a)).variance / N
        lim = st.weak_edge_limit(beta, c, S)
        worst = max(worst, abs(v - lim))
    details.append(f"c=-0.999 a=0.5 bulk V {v_small:.2e}; edge c=0 S=1 error {edge_err:.1e}")
    ok = v_small <= 1e-2 and edge_err <= 1e-10 and worst <= 0.02
    summary = (f"V(c=-0.999) {v_small:.1e} (tol 1e-2); edge identity error {edge_err:.1e} "
               f"(tol 1e-10); finite-N window max |dev| {worst:.4f} (tol 0.02)")
    return ok, summary, details


QUADRATURE_FAMILIES = (
    ("ginibre", {}),
    ("mittag_leffler", {"b": 1.5, "c": 0.5}),
    ("trunc_weak", {"c": 1.0}),
    ("trunc_strong", {"c_tilde": 0.8}),
)


def check_quadrature_oracle():
    worst = 0.0
    details = []
    for beta in (2, 4):
        for name, params in QUADRATURE_FAMILIES:
            for N in (20, 100):
                pot = make_potential(name, beta, N, **params)
                custom = make_custom(pot.g, pot.g_prime, beta, support_radius=pot.support_radius)
                for a in (0.3, 0.7, 0.95):
                    ref = occupation_probs(pot, N, a)
                    got = occupation_probs_quadrature(custom, N, a)
                    live = ref.probs > 1e-290
                    err = float(np.max(np.abs(got.probs[live] / ref.probs[live] - 1)))
                    worst = max(worst, err)
                    details.append(f"{pot.label} beta={beta} N={N} a={a}: max rel {err:.1e}")
    return worst <= 1e-8, f"max rel deviation {worst:.1e} (tol 1e-8)", details


MC_CASES = (
    ("ginibre", {}),
    ("mittag_leffler", {"b": 1.5, "c": 0.5}),
    ("product", {"m": 3}),
    ("trunc_weak", {"c": 1.0}),
    ("trunc_strong", {"c_tilde": 0.8}),
)


def _chi_square_pvalue(counts, pmf):
    trials = len(counts)
    observed = np.bincount(counts, minlength=len(pmf)).astype(float)
    expected = pmf * trials
    # merge sparse bins so every expected count is at least 5
    obs_bins, exp_bins = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(observed, expected):
        o_acc += o
        e_acc += e
        if e_acc >= 5:
            obs_bins.append(o_acc)
            exp_bins.append(e_acc)
            o_acc = e_acc = 0.0
    obs_bins[-1] += o_acc
    exp_bins[-1] += e_acc
    obs_bins, exp_bins = np.array(obs_bins), np.array(exp_bins)
    stat = float(np.sum((obs_bins - exp_bins) ** 2 / exp_bins))
    return float(chi2.sf(stat, len(obs_bins) - 1))


def check_monte_carlo():
    details = []
    worst_z = 0.0
    for beta, N in ((2, 100), (4, 50)):
        for name, params in MC_CASES:
            pot = make_potential(name, beta, N, **params)
            v = st.finite_n_stats(occupation_probs(pot, N, 0.5)).variance
            batch = monte_carlo_stats(pot, N, 0.5, 10_000, SEED)
            z = abs(batch.emp_variance - v) / batch.se_variance
            worst_z = max(worst_z, z)
            details.append(f"{pot.label} beta={beta} N={N}: V {v:.5f} MC {batch.emp_variance:.5f} "
                           f"+- {batch.se_variance:.5f} ({z:.2f} se)")
    min_p = 1.0
    N = 30
    for name, params in MC_CASES:
        pot = make_potential(name, 2, N, **params)
        occ = occupation_probs(pot, N, 0.5)
        pmf = st.finite_n_stats(occ, with_distribution=True).distribution
        batch = monte_carlo_stats(pot, N, 0.5, 100_000, SEED + 1)
        pval = _chi_square_pvalue(batch.counts, pmf)
        min_p = min(min_p, pval)
        details.append(f"{pot.label} beta=2 N=30 chi-squared p-value {pval:.3f}")
    ok = worst_z <= 3 and min_p >= 1e-3
    return ok, f"max |V error| {worst_z:.2f} se (tol 3); min chi-squared p {min_p:.3f} (tol 1e-3)", details


def check_lln():
    details = []
    ok = True
    a = 0.6
    for beta in (2, 4):
        cases = [("ginibre", make_ginibre(beta), None)]
        cases.append(("mittag_leffler", None, {"b": 1.5, "c": 0.5}))
        for name, pot, params in cases:
            devs = []
            for N in (100, 400, 1600):
                if name == "ginibre":
                    # E_N / N - a^2 is exponentially small at beta = 2; use the stable form
                    devs.append(abs(st.ginibre_mean_excess(beta, N, a)) / N)
                else:
                    p = make_potential(name, beta, N, **params)
                    e = st.finite_n_stats(occupation_probs(p, N, a)).mean
                    devs.append(abs(e / N - st.lln_fraction(p, a)))
            dec = all(y < x for x, y in zip(devs, devs[1:]))
            ok &= dec
            details.append(f"{name} beta={beta}: " + ", ".join(f"{d:.3e}" for d in devs))
    return ok, f"|E_N/N - a g'(a)/beta| decreasing along N=100,400,1600: {ok}", details


# number: (name, check, runtime limit in seconds or None)
CHECKS = {
    1: ("identity suite", check_identities, 5.0),
    2: ("Ginibre closed forms", check_ginibre_closed, 5.0),
    3: ("b_k expansion", check_bk_expansion, None),
    4: ("bulk universality", check_bulk, 120.0),
    5: ("edge universality", check_edge, None),
    6: ("origin limits", check_origin, None),
    7: ("universality triple point", check_triple_point, None),
    8: ("small-T asymptotes", check_small_t, None),
    9: ("weak non-unitarity", check_weak, None),
    10: ("quadrature vs closed form", check_quadrature_oracle, 60.0),
    11: ("Monte Carlo", check_monte_carlo, 180.0),
    12: ("law of large numbers", check_lln, None),
}

QUICK = (1, 2, 3, 7)


def run_check(number):
    name, fn, limit = CHECKS[number]
    t0 = time.perf_counter()
    ok, summary, details = fn()
    seconds = time.perf_counter() - t0
    if limit is not None:
        in_time = seconds < limit
        summary += f"; runtime {seconds:.1f} s (limit {limit:.0f} s)"
        ok = ok and in_time
    return CheckResult(number, name, bool(ok), summary, details, seconds)


def run_checks(level="quick"):
    if level not in ("quick", "full"):
        raise ValueError("level must be quick or full")
    numbers = QUICK if level == "quick" else tuple(CHECKS)
    return [run_check(n) for n in numbers]
