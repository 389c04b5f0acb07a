"""Integer polynomials b_k from the uniform asymptotics of the Ginibre mean."""

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class BkPolynomial:
    """b_k(lam) stored as integer coefficients in ascending powers of lam."""

    k: int
    coeffs: tuple

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if any(not isinstance(c, int) for c in self.coeffs):
            raise ValueError("coefficients must be integers")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        acc = np.zeros_like(lam)
        for c in reversed(self.coeffs):
            acc = acc * lam + c
        return float(acc) if acc.ndim == 0 else acc


def _step(prev, k):
    # b_k = lam (1 - lam) b'_{k-1} + (2k - 1) lam b_{k-1}
    deriv = [i * c for i, c in enumerate(prev)][1:]
    out = [0] * (len(prev) + 1)
    for i, c in enumerate(deriv):
        out[i + 1] += c
        out[i + 2] -= c
    for i, c in enumerate(prev):
        out[i + 1] += (2 * k - 1) * c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def bk_polynomials(k_max):
    """b_0 .. b_{k_max} with exact integer coefficients."""
    if int(k_max) != k_max or k_max < 0:
        raise DomainError("k_max must be a nonnegative integer")
    polys = [BkPolynomial(0, (1,))]
    coeffs = [1]
    for k in range(1, int(k_max) + 1):
        coeffs = _step(coeffs, k)
        polys.append(BkPolynomial(k, tuple(coeffs)))
    return polys
