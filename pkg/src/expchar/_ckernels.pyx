# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled quadrature kernels.

Same signatures and algorithms as ``_pykernels``; the integrands and the
adaptive Simpson recursion run without touching Python objects.
"""

from libc.math cimport exp, expm1, log, lgamma, erfc, sqrt, fabs, fmin, isfinite, INFINITY, NAN, pow

cdef double SQRT2 = sqrt(2.0)
cdef double SQRT2PI = sqrt(2.0 * 3.141592653589793)
cdef double CUT_NUDGE = 4.0 * 2.220446049250313e-16
cdef int MIN_DEPTH = 3


cdef struct Dist:
    int code
    double s
    double k
    double lgk


# ---------------------------------------------------------------------------
# regularized incomplete gamma P(a, x) and Q(a, x)

cdef double _gser(double a, double x) noexcept nogil:
    cdef double ap = a, dsum = 1.0 / a, d = dsum
    cdef int n
    for n in range(1000):
        ap += 1.0
        d *= x / ap
        dsum += d
        if fabs(d) < fabs(dsum) * 1e-17:
            break
    return dsum * exp(-x + a * log(x) - lgamma(a))


cdef double _gcf(double a, double x) noexcept nogil:
    # modified Lentz continued fraction for Q(a, x)
    cdef double tiny = 1e-300
    cdef double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d
    cdef double an, delta
    cdef int i
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if fabs(d) < tiny:
            d = tiny
        c = b + an / c
        if fabs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < 1e-17:
            break
    return exp(-x + a * log(x) - lgamma(a)) * h


cdef double _gammainc(double a, double x) noexcept nogil:
    if x <= 0.0:
        return 0.0
    if x < a + 1.0:
        return _gser(a, x)
    return 1.0 - _gcf(a, x)


cdef double _gammaincc(double a, double x) noexcept nogil:
    if x <= 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gser(a, x)
    return _gcf(a, x)


# ---------------------------------------------------------------------------
# family functions

cdef double _pdf(const Dist* d, double x) noexcept nogil:
    cdef double z, lz
    if d.code == 0:
        return exp(-x / d.s) / d.s
    if d.code == 1:
        if x <= 0.0:
            if d.k < 1.0:
                return INFINITY
            return 1.0 / d.s if d.k == 1.0 else 0.0
        z = x / d.s
        return (d.k / d.s) * pow(z, d.k - 1.0) * exp(-pow(z, d.k))
    if d.code == 2:
        if x <= 0.0:
            if d.k < 1.0:
                return INFINITY
            return 1.0 / d.s if d.k == 1.0 else 0.0
        z = x / d.s
        return exp((d.k - 1.0) * log(z) - z - d.lgk) / d.s
    if d.code == 3:
        if x <= 0.0:
            return 0.0
        lz = log(x / d.s) / d.k
        return exp(-0.5 * lz * lz) / (x * d.k * SQRT2PI)
    return 1.0 / d.s if x < d.s else 0.0


cdef double _cdf(const Dist* d, double x) noexcept nogil:
    if d.code == 0:
        return -expm1(-x / d.s)
    if d.code == 1:
        return -expm1(-pow(x / d.s, d.k))
    if d.code == 2:
        return _gammainc(d.k, x / d.s)
    if d.code == 3:
        if x <= 0.0:
            return 0.0
        return 0.5 * erfc(-log(x / d.s) / (d.k * SQRT2))
    return x / d.s if x < d.s else 1.0


cdef double _sf(const Dist* d, double x) noexcept nogil:
    if d.code == 0:
        return exp(-x / d.s)
    if d.code == 1:
        return exp(-pow(x / d.s, d.k))
    if d.code == 2:
        return _gammaincc(d.k, x / d.s)
    if d.code == 3:
        if x <= 0.0:
            return 1.0
        return 0.5 * erfc(log(x / d.s) / (d.k * SQRT2))
    return 1.0 - x / d.s if x < d.s else 0.0


cdef Dist _make(int code, double s, double k):
    cdef Dist d
    d.code = code
    d.s = s
    d.k = k
    d.lgk = lgamma(k) if code == 2 else 0.0
    return d


def pdf(int code, double s, double k, double x):
    cdef Dist d = _make(code, s, k)
    return _pdf(&d, x)


def cdf(int code, double s, double k, double x):
    cdef Dist d = _make(code, s, k)
    return _cdf(&d, x)


def sf(int code, double s, double k, double x):
    cdef Dist d = _make(code, s, k)
    return _sf(&d, x)


# ---------------------------------------------------------------------------
# adaptive Simpson

ctypedef double (*integrand_t)(void* ctx, double t) noexcept nogil

cdef struct Quad:
    double value
    double error
    int failed


cdef void _panel(integrand_t f, void* ctx, double a, double fa, double b, double fb,
                 double m, double fm, double whole, double tol, int depth,
                 int max_depth, Quad* q) noexcept nogil:
    cdef double lm = 0.5 * (a + m), rm = 0.5 * (m + b)
    cdef double flm = f(ctx, lm), frm = f(ctx, rm)
    cdef double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    cdef double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    cdef double delta = left + right - whole
    if not isfinite(delta):
        q.failed = 1
        q.value = NAN
        q.error = INFINITY
        return
    if depth >= MIN_DEPTH and fabs(delta) <= 15.0 * tol:
        q.value += left + right + delta / 15.0
        q.error += fabs(delta) / 15.0
        return
    if depth >= max_depth:
        q.failed = 1
        q.value += left + right + delta / 15.0
        q.error += fabs(delta) / 15.0
        return
    _panel(f, ctx, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1, max_depth, q)
    _panel(f, ctx, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1, max_depth, q)


cdef Quad _integrate(integrand_t f, void* ctx, double a, double b, double tol,
                     int max_depth, double* cuts, int ncuts) noexcept nogil:
    # cuts: unsorted candidate breakpoints; those outside (a, b) are dropped
    cdef Quad q
    cdef double edges[8]
    cdef int n = 0, i, j
    cdef double tmp, lo, hi, fa, fb, m, fm, whole, span = b - a
    q.value = 0.0
    q.error = 0.0
    q.failed = 0
    if b <= a:
        return q
    edges[n] = a
    n += 1
    for i in range(ncuts):
        if a < cuts[i] < b:
            edges[n] = cuts[i]
            n += 1
    edges[n] = b
    n += 1
    # insertion sort + dedup
    for i in range(1, n):
        tmp = edges[i]
        j = i - 1
        while j >= 0 and edges[j] > tmp:
            edges[j + 1] = edges[j]
            j -= 1
        edges[j + 1] = tmp
    for i in range(n - 1):
        lo = edges[i]
        hi = edges[i + 1]
        if hi <= lo:
            continue
        # one-sided values at cuts, see the pure-Python twin
        fa = f(ctx, lo + fmin(CUT_NUDGE * fabs(lo), 0.25 * (hi - lo))) if i > 0 else f(ctx, lo)
        fb = f(ctx, hi - fmin(CUT_NUDGE * fabs(hi), 0.25 * (hi - lo))) if i < n - 2 else f(ctx, hi)
        m = 0.5 * (lo + hi)
        fm = f(ctx, m)
        whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)
        _panel(f, ctx, lo, fa, hi, fb, m, fm, whole, tol * (hi - lo) / span, 1, max_depth, &q)
    return q


# ---------------------------------------------------------------------------
# integrands

cdef struct PointCtx:
    const Dist* d
    double x


cdef double _max2_third_f(void* ctx, double y) noexcept nogil:
    cdef PointCtx* c = <PointCtx*> ctx
    cdef double w = c.x - y
    return 6.0 * _pdf(c.d, 3.0 * y) * _cdf(c.d, w) * _pdf(c.d, w)


cdef double _sum2_f(void* ctx, double u) noexcept nogil:
    cdef PointCtx* c = <PointCtx*> ctx
    return _pdf(c.d, c.x - u) * 2.0 * _pdf(c.d, 2.0 * u)


cdef double _inner3_f(void* ctx, double u) noexcept nogil:
    cdef PointCtx* c = <PointCtx*> ctx
    return 2.0 * _pdf(c.d, 2.0 * u) * 3.0 * _pdf(c.d, 3.0 * (c.x - u))


cdef struct OuterCtx:
    const Dist* d
    double x
    double inner_tol
    int max_depth
    int inner_failed
    double inner_err


cdef double _outer3_f(void* ctx, double z) noexcept nogil:
    cdef OuterCtx* c = <OuterCtx*> ctx
    cdef PointCtx ic
    cdef double cuts[2]
    cdef Quad q
    if z <= 0.0:
        return 0.0
    ic.d = c.d
    ic.x = z
    cuts[0] = c.d.s / 2.0
    cuts[1] = z - c.d.s / 3.0
    q = _integrate(_inner3_f, &ic, 0.0, z, c.inner_tol, c.max_depth,
                   cuts, 2 if c.d.code == 4 else 0)
    if q.failed:
        c.inner_failed = 1
    if q.error > c.inner_err:
        c.inner_err = q.error
    return _pdf(c.d, c.x - z) * q.value


def max2_third_density(int code, double s, double k, double x, double tol, int max_depth):
    """Density of ``max(X1, X2) + X3/3`` at ``x``."""
    cdef Dist d = _make(code, s, k)
    cdef PointCtx c
    cdef double cuts[2]
    cdef Quad q
    if x <= 0.0:
        return 0.0, 0.0, True
    c.d = &d
    c.x = x
    cuts[0] = s / 3.0
    cuts[1] = x - s
    with nogil:
        q = _integrate(_max2_third_f, &c, 0.0, x, tol, max_depth, cuts, 2 if code == 4 else 0)
    return q.value, q.error, not q.failed


def scaled_sum2_density(int code, double s, double k, double x, double tol, int max_depth):
    """Density of ``X1 + X2/2`` at ``x``."""
    cdef Dist d = _make(code, s, k)
    cdef PointCtx c
    cdef double cuts[2]
    cdef Quad q
    if x <= 0.0:
        return 0.0, 0.0, True
    c.d = &d
    c.x = x
    cuts[0] = s / 2.0
    cuts[1] = x - s
    with nogil:
        q = _integrate(_sum2_f, &c, 0.0, x, tol, max_depth, cuts, 2 if code == 4 else 0)
    return q.value, q.error, not q.failed


def scaled_sum3_density(int code, double s, double k, double x, double inner_tol,
                        double outer_tol, int max_depth):
    """Density of ``X1 + X2/2 + X3/3`` at ``x`` by nested adaptive Simpson."""
    cdef Dist d = _make(code, s, k)
    cdef OuterCtx c
    cdef double cuts[4]
    cdef Quad q
    if x <= 0.0:
        return 0.0, 0.0, True
    c.d = &d
    c.x = x
    c.inner_tol = inner_tol
    c.max_depth = max_depth
    c.inner_failed = 0
    c.inner_err = 0.0
    cuts[0] = x - s
    cuts[1] = s / 3.0
    cuts[2] = s / 2.0
    cuts[3] = 5.0 * s / 6.0
    with nogil:
        q = _integrate(_outer3_f, &c, 0.0, x, outer_tol, max_depth, cuts, 4 if code == 4 else 0)
    return q.value, q.error + c.inner_err, not (q.failed or c.inner_failed)
