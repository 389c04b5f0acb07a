"""Monte Carlo sampling of the disc count through the independent radii.

For a radial ensemble the moduli of the eigenvalues are distributed as N
independent radii, the j-th with density proportional to r^{2j+1} e^{-N g(r)}
(beta = 2) or r^{4j+3} e^{-N g(r)} (beta = 4). Counts in centered discs
depend on the eigenvalues only through their moduli, so sampling these radii
reproduces the exact count law without building matrices.

Every trial gets its own Philox stream keyed by the seed with the trial
index in the counter, so results do not depend on how trials are split
across workers.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InverseCDFError, QuadratureError
from .moments import (
    _U_MIN,
    _RadialIntegrand,
    _breakpoints,
    _find_peak,
    _wall_tail,
    _width,
)

_POINTS_PER_PANEL = 256


# eq=False: counts is an array, compare batches field by field
@dataclass(frozen=True, eq=False)
class SampleBatch:
    seed: int
    trials: int
    N: int
    a: float
    counts: np.ndarray
    emp_mean: float
    emp_variance: float
    se_mean: float
    se_variance: float

    def __post_init__(self):
        self.counts.setflags(write=False)


def trial_generator(seed, trial):
    """The Philox stream of one trial: key = seed, counter carries the trial."""
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, int(trial), 0]))


class _InverseCDF:
    """Tabulated inverse CDF of one radius of a custom potential, in u."""

    def __init__(self, f0, k, j):
        def f(u):
            return f0(u, k)

        try:
            peak, fmax = _find_peak(f, j, f0.u_hi)
        except QuadratureError as exc:
            raise InverseCDFError(str(exc)) from None
        width = _width(f, peak)
        left = _breakpoints(f, peak, fmax, -1, _U_MIN, width)
        right = _breakpoints(f, peak, fmax, +1, f0.u_hi, width)
        edges = left[:-1] + right
        grid = np.unique(np.concatenate(
            [np.linspace(x0, x1, _POINTS_PER_PANEL) for x0, x1 in zip(edges, edges[1:])]))
        w = np.exp(f(grid) - fmax)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(grid))])
        body = cdf[-1]
        tail, slope = 0.0, -1.0
        if f0.finite and right[-1] == f0.u_hi:
            log_tail = _wall_tail(f, f0.u_hi)
            tail = math.exp(log_tail - fmax) if np.isfinite(log_tail) else 0.0
            slope = float(f(f0.u_hi)) - float(f(f0.u_hi - 1.0))
        total = body + tail
        if not (np.isfinite(total) and total > 0) or np.any(np.diff(cdf) < 0):
            raise InverseCDFError(f"radial CDF of index j={j} is not a valid distribution")
        self.grid, self.cdf, self.body, self.tail, self.slope = grid, cdf, body, tail, slope
        self.total = total
        self.hi = f0.u_hi

    def __call__(self, uniform):
        mass = np.asarray(uniform, dtype=float) * self.total
        body = np.interp(np.minimum(mass, self.body), self.cdf, self.grid)
        if self.tail == 0.0:
            return body
        excess = np.clip(mass - self.body, 0.0, self.tail * (1 - 1e-16))
        tail = self.hi + np.log1p(-excess / self.tail) / self.slope
        return np.where(mass <= self.body, body, tail)


class RadialSampler:
    """Draws the N independent radii of one potential at one N."""

    def __init__(self, potential, N):
        if int(N) != N or N < 1:
            raise DomainError("N must be a positive integer")
        if potential.n is not None and potential.n != N:
            raise DomainError(f"potential was built for N={potential.n}, asked for N={N}")
        self.potential = potential
        self.N = int(N)
        beta = potential.beta
        j = np.arange(self.N, dtype=float)
        self.shape = j + 1 if beta == 2 else 2 * j + 2
        self._inverse = None
        if potential.dispatch_tag == "custom":
            f0 = _RadialIntegrand(potential, self.N)
            self._f0 = f0
            self._inverse = [_InverseCDF(f0, 2 * i + 1 if beta == 2 else 4 * i + 3, i)
                             for i in range(self.N)]

    def draw(self, rng):
        """One configuration: the N radii, index j in position j."""
        if self._inverse is not None:
            u = rng.random(self.N)
            return self._f0.r_of(np.array([inv(x) for inv, x in zip(self._inverse, u)]))
        return self._transform(rng, self.shape)

    def draw_index(self, rng, j, size):
        """``size`` independent draws of radius j alone."""
        if self._inverse is not None:
            return self._f0.r_of(self._inverse[j](rng.random(size)))
        return self._transform(rng, np.full(size, self.shape[j]))

    def _transform(self, rng, shape):
        p = self.potential
        tag, beta, N = p.dispatch_tag, p.beta, self.N
        if tag == "ginibre":
            return np.sqrt(rng.standard_gamma(shape) / (beta / 2 * N))
        if tag == "mittag_leffler":
            b, c = p.param("b"), p.param("c")
            r2b = rng.standard_gamma((shape + c) / b) * b / (beta / 2 * N)
            return r2b ** (1 / (2 * b))
        if tag == "product":
            m = int(p.param("m"))
            logs = np.zeros(len(shape))
            for _ in range(m):
                logs += np.log(rng.standard_gamma(shape))
            return np.exp(0.5 * (logs - m * math.log(beta / 2 * N)))
        if tag == "trunc_weak":
            return np.sqrt(rng.beta(shape, p.param("c") + 1))
        if tag == "trunc_strong":
            ct = p.param("c_tilde")
            return np.sqrt((1 + ct) * rng.beta(shape, beta / 2 * ct * N + 1))
        raise DomainError(f"no sampler for dispatch tag {tag!r}")


def sample_radii(potential, N, rng):
    """N independent radii; ``rng`` is a numpy Generator or an integer seed.

    Closed-form transforms of gamma and beta draws cover the built-ins; a
    custom potential goes through a tabulated inverse CDF of its radial law.
    """
    if not isinstance(rng, np.random.Generator):
        rng = trial_generator(rng, 0)
    return RadialSampler(potential, N).draw(rng)


def _count_block(sampler, a, seed, trials):
    return np.array([np.count_nonzero(sampler.draw(trial_generator(seed, t)) < a) for t in trials],
                    dtype=np.int64)


def monte_carlo_stats(potential, N, a, trials, seed, workers=1):
    """Empirical mean and variance of the disc count over ``trials`` samples.

    se_variance uses the fourth central moment:
    Var(s^2) ~ (mu_4 - (n-3)/(n-1) s^4) / n.
    """
    if int(trials) != trials or trials < 100:
        raise DomainError("monte_carlo_stats needs at least 100 trials")
    if not a > 0:
        raise DomainError("disc radius a must be positive")
    trials = int(trials)
    sampler = RadialSampler(potential, N)
    blocks = np.array_split(np.arange(trials), max(1, int(workers)) * 4)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            parts = list(pool.map(lambda b: _count_block(sampler, a, seed, b), blocks))
    else:
        parts = [_count_block(sampler, a, seed, b) for b in blocks]
    counts = np.concatenate(parts)
    n = trials
    x = counts.astype(float)
    mean = math.fsum(x) / n
    dev = x - mean
    m2 = math.fsum(dev**2) / n
    m4 = math.fsum(dev**4) / n
    var = m2 * n / (n - 1)
    se_var = math.sqrt(max(m4 - (n - 3) / (n - 1) * var * var, 0.0) / n)
    return SampleBatch(int(seed), n, sampler.N, float(a), counts, mean, var,
                       math.sqrt(var / n), se_var)
