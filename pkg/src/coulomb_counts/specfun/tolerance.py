from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerance:
    """Accuracy targets for series, continued fractions and quadrature."""

    rel_eps: float = 1e-10
    abs_eps: float = 1e-14
    max_terms: int = 10**6
    max_quad_refinements: int = 40

    def __post_init__(self):
        if not self.rel_eps > 0:
            raise ValueError("rel_eps must be positive")
        if not self.abs_eps >= 0:
            raise ValueError("abs_eps must be nonnegative")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")
        if self.max_quad_refinements < 1:
            raise ValueError("max_quad_refinements must be at least 1")


DEFAULT_TOLERANCE = Tolerance()
