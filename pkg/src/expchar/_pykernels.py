"""Pure-Python quadrature kernels (fallback for ``_ckernels``).

Signatures and algorithms mirror ``_ckernels.pyx`` one-to-one: every
function takes ``(code, scale, shape, x, ...)`` with ``code`` the family
tag from :attr:`Family.code` and returns ``(value, error, converged)``.
"""

import math

from scipy.special import gammainc, gammaincc

from .quadrature import adaptive_simpson

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def _pdf(code, s, k, x):
    if code == 0:
        return math.exp(-x / s) / s
    if code == 1:
        if x <= 0.0:
            return math.inf if k < 1 else (1.0 / s if k == 1 else 0.0)
        z = x / s
        return (k / s) * z ** (k - 1.0) * math.exp(-z ** k)
    if code == 2:
        if x <= 0.0:
            return math.inf if k < 1 else (1.0 / s if k == 1 else 0.0)
        z = x / s
        return math.exp((k - 1.0) * math.log(z) - z - math.lgamma(k)) / s
    if code == 3:
        if x <= 0.0:
            return 0.0
        lz = math.log(x / s) / k
        return math.exp(-0.5 * lz * lz) / (x * k * _SQRT2PI)
    return 1.0 / s if x < s else 0.0


def _cdf(code, s, k, x):
    if code == 0:
        return -math.expm1(-x / s)
    if code == 1:
        return -math.expm1(-(x / s) ** k)
    if code == 2:
        return float(gammainc(k, x / s))
    if code == 3:
        if x <= 0.0:
            return 0.0
        return 0.5 * math.erfc(-math.log(x / s) / (k * _SQRT2))
    return min(x / s, 1.0)


def _sf(code, s, k, x):
    if code == 0:
        return math.exp(-x / s)
    if code == 1:
        return math.exp(-(x / s) ** k)
    if code == 2:
        return float(gammaincc(k, x / s))
    if code == 3:
        if x <= 0.0:
            return 1.0
        return 0.5 * math.erfc(math.log(x / s) / (k * _SQRT2))
    return max(1.0 - x / s, 0.0)


def pdf(code, s, k, x):
    return _pdf(code, s, k, x)


def cdf(code, s, k, x):
    return _cdf(code, s, k, x)


def sf(code, s, k, x):
    return _sf(code, s, k, x)


def _uniform_cuts(code, s, *points):
    return points if code == 4 else ()


def max2_third_density(code, s, k, x, tol, max_depth):
    """Density of ``max(X1, X2) + X3/3`` at ``x``."""
    if x <= 0.0:
        return 0.0, 0.0, True

    def g(y):
        w = x - y
        return 6.0 * _pdf(code, s, k, 3.0 * y) * _cdf(code, s, k, w) * _pdf(code, s, k, w)

    r = adaptive_simpson(g, 0.0, x, tol, max_depth,
                         _uniform_cuts(code, s, s / 3.0, x - s), strict=False)
    return r.value, r.error, r.converged


def scaled_sum2_density(code, s, k, x, tol, max_depth):
    """Density of ``X1 + X2/2`` at ``x``."""
    if x <= 0.0:
        return 0.0, 0.0, True

    def g(u):
        return _pdf(code, s, k, x - u) * 2.0 * _pdf(code, s, k, 2.0 * u)

    r = adaptive_simpson(g, 0.0, x, tol, max_depth,
                         _uniform_cuts(code, s, s / 2.0, x - s), strict=False)
    return r.value, r.error, r.converged


def _inner3(code, s, k, z, tol, max_depth):
    # density of X2/2 + X3/3 at z
    if z <= 0.0:
        return 0.0, 0.0, True

    def g(u):
        return 2.0 * _pdf(code, s, k, 2.0 * u) * 3.0 * _pdf(code, s, k, 3.0 * (z - u))

    r = adaptive_simpson(g, 0.0, z, tol, max_depth,
                         _uniform_cuts(code, s, s / 2.0, z - s / 3.0), strict=False)
    return r.value, r.error, r.converged


def scaled_sum3_density(code, s, k, x, inner_tol, outer_tol, max_depth):
    """Density of ``X1 + X2/2 + X3/3`` at ``x`` by nested adaptive Simpson."""
    if x <= 0.0:
        return 0.0, 0.0, True
    inner_ok = [True]
    inner_err = [0.0]

    def g(z):
        v, e, ok = _inner3(code, s, k, z, inner_tol, max_depth)
        if not ok:
            inner_ok[0] = False
        inner_err[0] = max(inner_err[0], e)
        return _pdf(code, s, k, x - z) * v

    r = adaptive_simpson(
        g, 0.0, x, outer_tol, max_depth,
        _uniform_cuts(code, s, x - s, s / 3.0, s / 2.0, 5.0 * s / 6.0),
        strict=False,
    )
    # inner errors propagate through a probability-weighted outer integral
    return r.value, r.error + inner_err[0], r.converged and inner_ok[0]
