"""Counting statistics of eigenvalues in centered discs for radial 2D Coulomb gases.

The disc count is a sum of independent Bernoulli variables whose success
probabilities are ratios of truncated to full radial moments. This package
computes those probabilities, the exact finite-N mean, variance and count
law, the bulk, edge and origin limits, and a Monte Carlo cross-check.
"""

from .ensembles import (
    RadialPotential,
    SuitabilityReport,
    check_suitability,
    load_tabulated_potential,
    make_custom,
    make_ginibre,
    make_mittag_leffler,
    make_potential,
    make_product,
    make_trunc_strong,
    make_trunc_weak,
)
from .errors import ConvergenceError, DomainError, InverseCDFError, QuadratureError
from .moments import OccupationVector, occupation_probs, occupation_probs_quadrature
from .sampler import SampleBatch, monte_carlo_stats, sample_radii
from .statistics import (
    CountStatistics,
    ScanCurve,
    bulk_prediction,
    edge_prediction,
    edge_profile_f,
    finite_n_stats,
    ginibre_mean_closed,
    ginibre_mean_expansion,
    lln_fraction,
    origin_limit_ml,
    origin_limit_product,
    origin_limit_trunc_strong,
    poisson_binomial_pmf,
    weak_bulk_limit,
    weak_edge_limit,
)

__all__ = [
    "ConvergenceError",
    "CountStatistics",
    "DomainError",
    "InverseCDFError",
    "OccupationVector",
    "QuadratureError",
    "RadialPotential",
    "SampleBatch",
    "ScanCurve",
    "SuitabilityReport",
    "bulk_prediction",
    "check_suitability",
    "edge_prediction",
    "edge_profile_f",
    "finite_n_stats",
    "ginibre_mean_closed",
    "ginibre_mean_expansion",
    "lln_fraction",
    "load_tabulated_potential",
    "make_custom",
    "make_ginibre",
    "make_mittag_leffler",
    "make_potential",
    "make_product",
    "make_trunc_strong",
    "make_trunc_weak",
    "monte_carlo_stats",
    "occupation_probs",
    "occupation_probs_quadrature",
    "origin_limit_ml",
    "origin_limit_product",
    "origin_limit_trunc_strong",
    "poisson_binomial_pmf",
    "sample_radii",
    "weak_bulk_limit",
    "weak_edge_limit",
]
