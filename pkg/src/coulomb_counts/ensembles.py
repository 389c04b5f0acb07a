"""Radial potentials Q_N(z) = g_N(|z|) for the built-in ensembles.

Each potential carries its finite-N functions (g, g', Laplacian) and the
N -> infinity limits used by the asymptotic laws. ``dispatch_tag`` tells the
moments module which closed form applies; ``custom`` routes to quadrature.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError

BUILTIN_TAGS = ("ginibre", "mittag_leffler", "product", "trunc_weak", "trunc_strong")

# central-difference step for numeric second derivatives
_DIFF_STEP = 1e-5


def _check_beta(beta):
    if beta not in (2, 4):
        raise DomainError(f"beta must be 2 or 4, got {beta!r}")
    return int(beta)


def _check_n(n):
    if n is None or int(n) != n or n < 1:
        raise DomainError(f"N must be a positive integer, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class RadialPotential:
    """A rotationally invariant potential and its N -> infinity limit.

    ``g``, ``g_prime`` and ``laplacian`` are the finite-N functions (None for
    the product ensemble, whose weight is a Meijer G-function and is never
    evaluated). The ``limit_*`` functions describe Q = lim Q_N and are what
    bulk, edge and LLN predictions use. ``n`` is the N the finite-N
    functions were built for, or None when g does not depend on N.
    """

    beta: int
    dispatch_tag: str
    params: tuple
    g: Optional[Callable]
    g_prime: Optional[Callable]
    laplacian: Optional[Callable]
    limit_g: Callable
    limit_g_prime: Callable
    limit_laplacian: Callable
    support_radius: float = math.inf
    n: Optional[int] = None
    flags: tuple = field(default_factory=tuple)

    @property
    def n_dependent(self):
        return self.n is not None

    @property
    def finite_support(self):
        return math.isfinite(self.support_radius)

    def param(self, name):
        return dict(self.params)[name]

    @property
    def label(self):
        if not self.params:
            return self.dispatch_tag
        inner = ",".join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.dispatch_tag}({inner})"


def _arr(r):
    return np.asarray(r, dtype=float)


def _out(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


def make_ginibre(beta):
    """Gaussian potential (beta/2) r^2; density (2/beta) Laplacian = 1 on the disc."""
    beta = _check_beta(beta)

    def g(r):
        return _out(beta / 2 * _arr(r) ** 2)

    def gp(r):
        return _out(beta * _arr(r))

    def lap(r):
        return _out(np.full_like(_arr(r), beta / 2))

    return RadialPotential(beta, "ginibre", (), g, gp, lap, g, gp, lap)


def make_mittag_leffler(beta, b, c, N):
    """(beta/2b) r^{2b} - (2c/N) log r, a point charge c at the origin.

    The log term is harmonic away from 0, so the Laplacian is
    (beta/2) b r^{2b-2} at every N.
    """
    beta = _check_beta(beta)
    N = _check_n(N)
    if not b > 0:
        raise DomainError("Mittag-Leffler requires b > 0")
    if not c > -1:
        raise DomainError("Mittag-Leffler requires c > -1")
    b = float(b)
    c = float(c)

    def lim_g(r):
        return _out(beta / (2 * b) * _arr(r) ** (2 * b))

    def lim_gp(r):
        return _out(beta * _arr(r) ** (2 * b - 1))

    def lap(r):
        return _out(beta / 2 * b * _arr(r) ** (2 * b - 2))

    if c == 0:
        g, gp = lim_g, lim_gp
    else:
        def g(r):
            r = _arr(r)
            return _out(beta / (2 * b) * r ** (2 * b) - 2 * c / N * np.log(r))

        def gp(r):
            r = _arr(r)
            return _out(beta * r ** (2 * b - 1) - 2 * c / (N * r))

    flags = ("c near -1: mass concentrates away from the origin",) if c < -0.99 else ()
    return RadialPotential(beta, "mittag_leffler", (("b", b), ("c", c)), g, gp, lap,
                           lim_g, lim_gp, lap, n=N, flags=flags)


def product_effective_ml(m):
    """Large-N Mittag-Leffler parameters (b, c) matching the product of m Ginibres."""
    return 1.0 / m, (1.0 - m) / (2.0 * m)


def make_product(beta, m, N):
    """Product of m independent Ginibre matrices.

    Only the N -> infinity potential (beta m / 2) r^{2/m} is exposed; finite-N
    statistics go through gamma-product CDFs. For m = 1 the finite-N
    functions are the Ginibre ones.
    """
    beta = _check_beta(beta)
    N = _check_n(N)
    if int(m) != m or m < 1:
        raise DomainError("product ensemble requires a positive integer m")
    m = int(m)

    def lim_g(r):
        return _out(beta * m / 2 * _arr(r) ** (2.0 / m))

    def lim_gp(r):
        return _out(beta * _arr(r) ** (2.0 / m - 1))

    def lap(r):
        return _out(beta / (2 * m) * _arr(r) ** (2.0 / m - 2))

    if m == 1:
        gin = make_ginibre(beta)
        g, gp, flap = gin.g, gin.g_prime, gin.laplacian
    else:
        g = gp = flap = None
    return RadialPotential(beta, "product", (("m", m),), g, gp, flap,
                           lim_g, lim_gp, lap, n=N)


def make_trunc_weak(beta, c, N):
    """Truncated unitary at weak non-unitarity: -(c/N) log(1 - r^2) on r < 1.

    The N -> infinity potential is identically zero inside the disc, so this
    ensemble is outside the suitable class.
    """
    beta = _check_beta(beta)
    N = _check_n(N)
    if not c > -1:
        raise DomainError("truncated ensemble requires c > -1")
    c = float(c)

    def g(r):
        r = _arr(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(r < 1, -c / N * np.log1p(-np.minimum(r, 1) ** 2), np.inf)
        return _out(v)

    def gp(r):
        r = _arr(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(r < 1, 2 * c * r / (N * (1 - r**2)), np.inf)
        return _out(v)

    def lap(r):
        r = _arr(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(r < 1, c / (N * (1 - r**2) ** 2), np.inf)
        return _out(v)

    def zero(r):
        return _out(np.zeros_like(_arr(r)))

    flags = ()
    if c < -0.99:
        flags = ("c near -1: eigenvalues collapse onto the unit circle",)
    return RadialPotential(beta, "trunc_weak", (("c", c),), g, gp, lap,
                           zero, zero, zero, support_radius=1.0, n=N, flags=flags)


def make_trunc_strong(beta, c_tilde):
    """Truncated unitary at strong non-unitarity, c = c_tilde N.

    g(r) = -(beta c~/2) log(1 - r^2/(1+c~)) on r < sqrt(1+c~); the same at
    every N.
    """
    beta = _check_beta(beta)
    if not c_tilde > 0 or math.isinf(c_tilde):
        raise DomainError("strong non-unitarity requires finite c_tilde > 0")
    ct = float(c_tilde)
    big_r = math.sqrt(1 + ct)

    def g(r):
        r = _arr(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(r < big_r, -beta * ct / 2 * np.log1p(-np.minimum(r, big_r) ** 2 / (1 + ct)),
                         np.inf)
        return _out(v)

    def gp(r):
        r = _arr(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(r < big_r, beta * ct * r / (1 + ct - r**2), np.inf)
        return _out(v)

    def lap(r):
        r = _arr(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(r < big_r, beta / 2 * ct * (1 + ct) / (1 + ct - r**2) ** 2, np.inf)
        return _out(v)

    flags = ("c_tilde near 0: approaching the weak non-unitarity regime",) if ct < 1e-3 else ()
    return RadialPotential(beta, "trunc_strong", (("c_tilde", ct),), g, gp, lap,
                           g, gp, lap, support_radius=big_r, flags=flags)


def numeric_laplacian(g_prime, h=_DIFF_STEP):
    """(g'(r)/r + g''(r))/4 with g'' by central differences of g'."""

    def lap(r):
        r = _arr(r)
        gpp = (np.asarray(g_prime(r + h)) - np.asarray(g_prime(r - h))) / (2 * h)
        return _out((np.asarray(g_prime(r)) / r + gpp) / 4)

    return lap


def make_custom(g, g_prime, beta, laplacian=None, support_radius=math.inf, name="custom"):
    """User potential from closures; N-independent, evaluated by quadrature."""
    beta = _check_beta(beta)
    if not support_radius > 0:
        raise DomainError("support_radius must be positive")
    lap = laplacian if laplacian is not None else numeric_laplacian(g_prime)
    return RadialPotential(beta, "custom", (), g, g_prime, lap, g, g_prime, lap,
                           support_radius=float(support_radius), flags=(f"name={name}",))


def load_tabulated_potential(path, beta):
    """Read ``r g(r)`` lines and interpolate with a monotone cubic.

    Lines starting with '#' are comments; r must be strictly increasing and
    positive. Below the first radius g is held constant; beyond the last the
    potential is a hard wall, so the support ends at the largest radius.
    """
    from scipy.interpolate import PchipInterpolator

    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise DomainError(f"{path}:{lineno}: expected two columns")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from None
    if len(rows) < 3:
        raise DomainError("tabulated potential needs at least three rows")
    table = np.array(rows)
    r_tab, g_tab = table[:, 0], table[:, 1]
    if np.any(np.diff(r_tab) <= 0):
        raise DomainError("tabulated radii must be strictly increasing")
    if r_tab[0] <= 0 or not np.all(np.isfinite(table)):
        raise DomainError("tabulated radii must be positive and values finite")
    spline = PchipInterpolator(r_tab, g_tab, extrapolate=False)
    d1 = spline.derivative(1)
    d2 = spline.derivative(2)
    r_min, r_max = r_tab[0], r_tab[-1]

    def g(r):
        r = _arr(r)
        v = np.where(r < r_min, g_tab[0], spline(np.clip(r, r_min, r_max)))
        return _out(np.where(r > r_max, np.inf, v))

    def gp(r):
        r = _arr(r)
        v = np.where(r < r_min, 0.0, d1(np.clip(r, r_min, r_max)))
        return _out(np.where(r > r_max, np.inf, v))

    def lap(r):
        r = _arr(r)
        rc = np.clip(r, r_min, r_max)
        v = np.where(r < r_min, 0.0, (d1(rc) / rc + d2(rc)) / 4)
        return _out(np.where(r > r_max, np.inf, v))

    return RadialPotential(_check_beta(beta), "custom", (), g, gp, lap, g, gp, lap,
                           support_radius=float(r_max), flags=(f"table={path}",))


def make_potential(name, beta, N=None, **params):
    """Build a built-in potential by name; used by the CLI and scans."""
    if name == "ginibre":
        return make_ginibre(beta)
    if name == "mittag_leffler":
        return make_mittag_leffler(beta, params.get("b", 1.0), params.get("c", 0.0), N)
    if name == "product":
        return make_product(beta, params.get("m", 1), N)
    if name == "trunc_weak":
        return make_trunc_weak(beta, params.get("c", 0.0), N)
    if name == "trunc_strong":
        return make_trunc_strong(beta, params.get("c_tilde", 1.0))
    raise DomainError(f"unknown ensemble {name!r}")


@dataclass(frozen=True)
class SuitabilityCheck:
    condition: int
    passed: bool
    evidence: str
    worst_violation: float


@dataclass(frozen=True)
class SuitabilityReport:
    passed: bool
    checks: tuple
    flags: tuple = ()

    def failed_conditions(self):
        return [c.condition for c in self.checks if not c.passed]


def check_suitability(potential, grid=None):
    """Probe the four suitability conditions on the N -> infinity potential.

    (1) growth: g(10^3)/log(10^3) >= 10, or for a finite support radius R,
        g must blow up at R (g(R(1-1e-12)) - g(R(1-1e-6)) > 1e-3);
    (2) g and g' finite on the grid in (0, 1];
    (3) Laplacian > 0 and r g'(r) strictly increasing on the grid;
    (4) r g'(r) decreasing to 0 as r -> 0, and g'(1) = beta.
    """
    g, gp, lap = potential.limit_g, potential.limit_g_prime, potential.limit_laplacian
    beta = potential.beta
    if grid is None:
        grid = np.linspace(0.01, 1.0, 100)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing")
    if grid[0] <= 0 or grid[-1] > potential.support_radius:
        raise DomainError("grid must lie in (0, support_radius]")
    checks = []

    with np.errstate(all="ignore"):
        if potential.finite_support:
            big_r = potential.support_radius
            jump = float(g(big_r * (1 - 1e-12)) - g(big_r * (1 - 1e-6)))
            ok1 = bool(jump > 1e-3)
            checks.append(SuitabilityCheck(1, ok1, f"wall growth g(R-)-g(R-1e-6 R)={jump:.3g}",
                                           max(0.0, 1e-3 - jump)))
        else:
            ratio = float(g(1e3) / math.log(1e3))
            ok1 = bool(ratio >= 10)
            checks.append(SuitabilityCheck(1, ok1, f"g(1e3)/log(1e3)={ratio:.3g}",
                                           max(0.0, 10 - ratio)))

        inner = grid[grid <= 1.0]
        gv = np.asarray(g(inner), dtype=float)
        gpv = np.asarray(gp(inner), dtype=float)
        bad = ~(np.isfinite(gv) & np.isfinite(gpv))
        checks.append(SuitabilityCheck(2, not bad.any(), f"{int(bad.sum())} non-finite values on (0,1]",
                                       float(bad.sum())))

        lv = np.asarray(lap(grid), dtype=float)
        rg = grid * np.asarray(gp(grid), dtype=float)
        steps = np.diff(rg)
        worst3 = float(max(0.0, -np.nanmin(lv), -np.nanmin(steps)))
        ok3 = bool(np.all(lv > 0) and np.all(steps > 0))
        checks.append(SuitabilityCheck(3, ok3, f"min Laplacian={np.nanmin(lv):.3g}, "
                                       f"min step of r g'={np.nanmin(steps):.3g}", worst3))

        probes = np.array([1e-4, 1e-8, 1e-12])
        rg0 = probes * np.asarray(gp(probes), dtype=float)
        shrinking = bool(np.all(np.isfinite(rg0)) and np.all(np.diff(np.abs(rg0)) < 0)
                         and abs(rg0[-1]) < 0.05 * beta)
        gp1 = float(gp(1.0))
        dev = abs(gp1 - beta)
        ok4 = shrinking and dev <= 1e-8 * beta
        checks.append(SuitabilityCheck(4, ok4, f"r g'(1e-12)={rg0[-1]:.3g}, g'(1)={gp1:.12g}",
                                       dev if shrinking else max(dev, float(abs(rg0[-1])))))

    checks = tuple(checks)
    return SuitabilityReport(all(c.passed for c in checks), checks, potential.flags)
