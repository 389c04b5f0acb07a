"""Error function pair via the incomplete gamma at shape 1/2."""

import numpy as np

from .incgamma import reg_inc_gamma


def erf_erfc(t):
    """Return (erf(t), erfc(t)).

    Uses erf(|t|) = P(1/2, t^2) and erfc(|t|) = Q(1/2, t^2), then odd
    symmetry for negative t. Scalar input gives a pair of floats.
    """
    t = np.asarray(t, dtype=float)
    if np.any(np.isnan(t)):
        raise ValueError("erf_erfc got NaN")
    p, q = reg_inc_gamma(0.5, t * t)
    p = np.asarray(p)
    q = np.asarray(q)
    neg = t < 0
    erf = np.where(neg, -p, p)
    erfc = np.where(neg, 1.0 + p, q)
    if erf.ndim == 0:
        return float(erf), float(erfc)
    return erf, erfc
