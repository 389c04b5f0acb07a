"""Special functions used by the counting statistics."""

from .bk import BkPolynomial, bk_polynomials
from .erf import erf_erfc
from .gamma_product import gamma_product_cdf, gamma_product_sf, meijer_small_z_leading
from .incbeta import reg_inc_beta, reg_inc_beta_complement
from .incgamma import reg_inc_gamma
from .loggamma import log_gamma
from .tolerance import DEFAULT_TOLERANCE, Tolerance

__all__ = [
    "BkPolynomial",
    "DEFAULT_TOLERANCE",
    "Tolerance",
    "bk_polynomials",
    "erf_erfc",
    "gamma_product_cdf",
    "gamma_product_sf",
    "log_gamma",
    "meijer_small_z_leading",
    "reg_inc_beta",
    "reg_inc_beta_complement",
    "reg_inc_gamma",
]
