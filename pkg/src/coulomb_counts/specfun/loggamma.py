"""Log-gamma on the positive real axis.

Three regimes: Stirling with its correction series for x >= 10, a Taylor
series of ln Gamma around 2 (coefficients zeta(n) - 1) on [0.5, 2.5], and
recurrence to move everything else into one of those two windows.
"""

import math

import numpy as np

from ..errors import DomainError

EULER_GAMMA = 0.5772156649015328606
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# zeta(n) - 1 for n = 2..41
_ZETA_M1 = np.array([
    0.64493406684822643647, 0.2020569031595942854, 0.082323233711138191516,
    0.036927755143369926331, 0.017343061984449139715, 0.0083492773819228268398,
    0.0040773561979443393787, 0.0020083928260822144179, 0.00099457512781808533715,
    0.0004941886041194645587, 0.00024608655330804829864, 0.00012271334757848914675,
    0.000061248135058704829259, 0.000030588236307020493552, 0.000015282259408651871733,
    7.6371976378997622736e-6, 3.8172932649998398565e-6, 1.9082127165539389256e-6,
    9.5396203387279611316e-7, 4.7693298678780646311e-7, 2.3845050272773299001e-7,
    1.1921992596531107308e-7, 5.9608189051259479606e-8, 2.9803503514652280187e-8,
    1.4901554828365041233e-8, 7.4507117898354294923e-9, 3.7253340247884570506e-9,
    1.8626597235130490129e-9, 9.3132743241966819147e-10, 4.6566290650337841745e-10,
    2.3283118336765055944e-10, 1.1641550172700519311e-10, 5.8207720879027001577e-11,
    2.9103850444971000053e-11, 1.4551921891041988125e-11, 7.2759598350574914898e-12,
    3.6379795473786565172e-12, 1.8189896503070680902e-12, 9.094947840263983323e-13,
    4.5474737830421855203e-13,
])
_N = np.arange(2, 2 + len(_ZETA_M1))
# coefficient of delta^n in ln Gamma(2 + delta), n >= 2
_TAYLOR2 = ((-1.0) ** _N) * _ZETA_M1 / _N

# B_{2k} / (2k (2k-1)) for k = 1..8
_STIRLING = np.array([
    1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188,
    -691.0 / 360360, 1.0 / 156, -3617.0 / 122400,
])


def stirling_correction(x):
    """ln Gamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2], accurate for x >= 10."""
    x = np.asarray(x, dtype=float)
    inv = 1.0 / x
    inv2 = inv * inv
    acc = np.zeros_like(x)
    for c in _STIRLING[::-1]:
        acc = acc * inv2 + c
    return acc * inv


def _lgamma_near2(delta):
    # ln Gamma(2 + delta) for |delta| <= 0.5
    acc = np.zeros_like(delta)
    for c in _TAYLOR2[::-1]:
        acc = acc * delta + c
    return delta * ((1.0 - EULER_GAMMA) + acc * delta)


def _lgamma_array(x):
    out = np.empty_like(x)

    big = x >= 10.0
    if big.any():
        xb = x[big]
        out[big] = (xb - 0.5) * np.log(xb) - xb + HALF_LOG_2PI + stirling_correction(xb)

    mid = (x > 2.5) & ~big
    if mid.any():
        xm = x[mid].copy()
        logprod = np.zeros_like(xm)
        while True:
            step = xm > 2.5
            if not step.any():
                break
            xm[step] -= 1.0
            logprod[step] += np.log(xm[step])
        out[mid] = _lgamma_near2(xm - 2.0) + logprod

    core = (x >= 1.5) & (x <= 2.5)
    if core.any():
        out[core] = _lgamma_near2(x[core] - 2.0)

    low = (x >= 0.5) & (x < 1.5)
    if low.any():
        eps = x[low] - 1.0
        out[low] = _lgamma_near2(eps) - np.log1p(eps)

    tiny = x < 0.5
    if tiny.any():
        xt = x[tiny]
        # Gamma(x) = Gamma(x + 2) / (x (x + 1)), and x + 2 lands in (2, 2.5)
        out[tiny] = _lgamma_near2(xt) - np.log(xt) - np.log1p(xt)
    return out


def log_gamma(x):
    """Natural log of Gamma(x) for x > 0.

    Accepts scalars or arrays; returns a float for scalar input.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("log_gamma requires x > 0")
    if np.any(np.isinf(arr)):
        raise DomainError("log_gamma requires finite x")
    out = _lgamma_array(np.atleast_1d(arr).ravel()).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out
