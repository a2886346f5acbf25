"""Parametric families on (0, inf): closed-form evaluation and seeded sampling.

Every family is described by a scale and, where needed, a shape:

============  =======================  ============================
family        scale                    shape
============  =======================  ============================
exponential   mean ``s``               --
weibull       ``s``                    ``k``
gamma         ``s``                    ``k``
lognormal     median ``exp(mu)``       ``sigma``
uniform       support bound ``b``      --
============  =======================  ============================

The exponential uses the *scale* (mean) parameterization, so its Laplace
transform is ``1 / (1 + s t)``.

Random streams come from numpy's counter-based Philox generator keyed by
``(seed, domain)``; different domains of the same seed never share bits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import special

from .errors import DataError, DomainError, ParameterError
from .quadrature import adaptive_simpson

ArrayLike = Union[float, np.ndarray]

LAPLACE_TOL = 1e-10

# Philox key words separating the uses of one seed.
DOMAIN_SAMPLE = 0
DOMAIN_SPLIT = 1

_U64 = (1 << 64) - 1


class Family(str, enum.Enum):
    EXPONENTIAL = "exponential"
    WEIBULL = "weibull"
    GAMMA = "gamma"
    LOGNORMAL = "lognormal"
    UNIFORM = "uniform"

    @property
    def code(self) -> int:
        # integer tag understood by the numeric kernels
        return _FAMILY_CODES[self]

    @property
    def has_shape(self) -> bool:
        return self in (Family.WEIBULL, Family.GAMMA, Family.LOGNORMAL)


_FAMILY_CODES = {
    Family.EXPONENTIAL: 0,
    Family.WEIBULL: 1,
    Family.GAMMA: 2,
    Family.LOGNORMAL: 3,
    Family.UNIFORM: 4,
}


@dataclass(frozen=True)
class DistributionSpec:
    """A member of one of the supported families.

    Use the named constructors (:meth:`exponential`, :meth:`weibull`, ...)
    rather than the raw initializer.
    """

    family: Family
    scale: float = 1.0
    shape: float | None = None

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if not (isinstance(self.scale, (int, float)) and math.isfinite(self.scale)
                and self.scale > 0):
            raise ParameterError(f"scale must be a positive finite number, got {self.scale!r}")
        object.__setattr__(self, "scale", float(self.scale))
        if fam.has_shape:
            if self.shape is None or not math.isfinite(self.shape) or self.shape <= 0:
                raise ParameterError(
                    f"{fam.value} needs a positive finite shape, got {self.shape!r}")
            object.__setattr__(self, "shape", float(self.shape))
        elif self.shape is not None:
            raise ParameterError(f"{fam.value} takes no shape parameter")

    @classmethod
    def exponential(cls, scale: float = 1.0) -> "DistributionSpec":
        return cls(Family.EXPONENTIAL, scale)

    @classmethod
    def weibull(cls, shape: float, scale: float = 1.0) -> "DistributionSpec":
        return cls(Family.WEIBULL, scale, shape)

    @classmethod
    def gamma(cls, shape: float, scale: float = 1.0) -> "DistributionSpec":
        return cls(Family.GAMMA, scale, shape)

    @classmethod
    def lognormal(cls, sigma: float, scale: float = 1.0) -> "DistributionSpec":
        return cls(Family.LOGNORMAL, scale, sigma)

    @classmethod
    def uniform(cls, bound: float = 1.0) -> "DistributionSpec":
        return cls(Family.UNIFORM, bound)

    @property
    def bound(self) -> float | None:
        return self.scale if self.family is Family.UNIFORM else None

    @property
    def kernel_args(self) -> tuple[int, float, float]:
        return self.family.code, self.scale, self.shape if self.shape is not None else 0.0

    def to_dict(self) -> dict:
        d = {"family": self.family.value, "scale": self.scale}
        if self.shape is not None:
            d["shape"] = self.shape
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DistributionSpec":
        return cls(Family(d["family"]), d["scale"], d.get("shape"))

    def mean(self) -> float:
        s, k = self.scale, self.shape
        fam = self.family
        if fam is Family.EXPONENTIAL:
            return s
        if fam is Family.WEIBULL:
            return s * math.gamma(1.0 + 1.0 / k)
        if fam is Family.GAMMA:
            return s * k
        if fam is Family.LOGNORMAL:
            return s * math.exp(0.5 * k * k)
        return 0.5 * s

    def variance(self) -> float:
        s, k = self.scale, self.shape
        fam = self.family
        if fam is Family.EXPONENTIAL:
            return s * s
        if fam is Family.WEIBULL:
            g1 = math.gamma(1.0 + 1.0 / k)
            return s * s * (math.gamma(1.0 + 2.0 / k) - g1 * g1)
        if fam is Family.GAMMA:
            return s * s * k
        if fam is Family.LOGNORMAL:
            return s * s * math.expm1(k * k) * math.exp(k * k)
        return s * s / 12.0

    # thin method wrappers so specs can be used as distribution objects
    def pdf(self, x):
        return pdf(self, x)

    def cdf(self, x):
        return cdf(self, x)

    def survival(self, x):
        return survival(self, x)

    def laplace(self, t):
        return laplace(self, t)


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("distribution functions are evaluated at x >= 0")
    return arr


def _out(arr, x):
    return float(arr) if np.ndim(x) == 0 else arr


def pdf(spec: DistributionSpec, x: ArrayLike) -> ArrayLike:
    """Density at ``x >= 0``; at the origin the right limit ``f(0+)``."""
    xa = _as_array(x)
    s, k = spec.scale, spec.shape
    fam = spec.family
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if fam is Family.EXPONENTIAL:
            out = np.exp(-xa / s) / s
        elif fam is Family.WEIBULL:
            z = xa / s
            out = np.where(
                xa > 0,
                (k / s) * np.power(z, k - 1.0) * np.exp(-np.power(z, k)),
                np.inf if k < 1 else (1.0 / s if k == 1 else 0.0),
            )
        elif fam is Family.GAMMA:
            z = xa / s
            out = np.where(
                xa > 0,
                np.exp(special.xlogy(k - 1.0, z) - z - special.gammaln(k)) / s,
                np.inf if k < 1 else (1.0 / s if k == 1 else 0.0),
            )
        elif fam is Family.LOGNORMAL:
            lz = np.log(np.where(xa > 0, xa, 1.0) / s)
            out = np.where(
                xa > 0,
                np.exp(-0.5 * (lz / k) ** 2) / (np.where(xa > 0, xa, 1.0) * k * math.sqrt(2 * math.pi)),
                0.0,
            )
        else:
            out = np.where(xa < s, 1.0 / s, 0.0)
    return _out(out, x)


def cdf(spec: DistributionSpec, x: ArrayLike) -> ArrayLike:
    xa = _as_array(x)
    s, k = spec.scale, spec.shape
    fam = spec.family
    with np.errstate(divide="ignore"):
        if fam is Family.EXPONENTIAL:
            out = -np.expm1(-xa / s)
        elif fam is Family.WEIBULL:
            out = -np.expm1(-np.power(xa / s, k))
        elif fam is Family.GAMMA:
            out = special.gammainc(k, xa / s)
        elif fam is Family.LOGNORMAL:
            out = np.where(xa > 0, special.ndtr(np.log(xa / s) / k), 0.0)
        else:
            out = np.minimum(xa / s, 1.0)
    return _out(out, x)


def survival(spec: DistributionSpec, x: ArrayLike) -> ArrayLike:
    """``1 - cdf(x)``, evaluated directly so the upper tail keeps precision."""
    xa = _as_array(x)
    s, k = spec.scale, spec.shape
    fam = spec.family
    with np.errstate(divide="ignore"):
        if fam is Family.EXPONENTIAL:
            out = np.exp(-xa / s)
        elif fam is Family.WEIBULL:
            out = np.exp(-np.power(xa / s, k))
        elif fam is Family.GAMMA:
            out = special.gammaincc(k, xa / s)
        elif fam is Family.LOGNORMAL:
            out = np.where(xa > 0, special.ndtr(-np.log(xa / s) / k), 1.0)
        else:
            out = np.maximum(1.0 - xa / s, 0.0)
    return _out(out, x)


def laplace(spec: DistributionSpec, t: float) -> float:
    """Laplace transform ``E[exp(-t X)]``.

    Closed form for the exponential, gamma, uniform and unit-shape Weibull.
    Lognormal and general Weibull are integrated numerically (tolerance
    ``1e-10``) and only accept ``t >= 0``.
    """
    t = float(t)
    s, k = spec.scale, spec.shape
    fam = spec.family
    if not math.isfinite(t):
        raise DomainError("t must be finite")
    if fam is Family.EXPONENTIAL or (fam is Family.WEIBULL and k == 1.0):
        if 1.0 + s * t <= 0:
            raise DomainError(f"Laplace transform diverges for t <= {-1.0 / s}")
        return 1.0 / (1.0 + s * t)
    if fam is Family.GAMMA:
        if 1.0 + s * t <= 0:
            raise DomainError(f"Laplace transform diverges for t <= {-1.0 / s}")
        return (1.0 + s * t) ** (-k)
    if fam is Family.UNIFORM:
        bt = s * t
        return 1.0 if bt == 0 else -math.expm1(-bt) / bt
    if t < 0:
        raise DomainError(f"{fam.value} Laplace transform is only supported for t >= 0")
    if t == 0:
        return 1.0
    if fam is Family.LOGNORMAL:
        # x = s * exp(k u) with u standard normal
        def integrand(u):
            return math.exp(-t * s * math.exp(k * u) - 0.5 * u * u)
        res = adaptive_simpson(integrand, -12.0, 12.0, tol=LAPLACE_TOL * math.sqrt(2 * math.pi))
        return res.value / math.sqrt(2 * math.pi)

    if k < 1.0:
        # x = s * v**(1/k) with v ~ Exp(1); smooth since 1/k > 1
        def integrand(v):
            return math.exp(-v - t * s * v ** (1.0 / k))
        return adaptive_simpson(integrand, 0.0, 60.0, tol=LAPLACE_TOL).value
    # k > 1: by parts with u = t x, E[exp(-tX)] = int exp(-u) (1 - S(u / t)) du,
    # which avoids the cancellation of 1 - t * int exp(-tx) S(x) dx
    ts = t * s

    def integrand(u):
        return -math.exp(-u) * math.expm1(-((u / ts) ** k))
    # anchor panels where the mass sits (u ~ k for large ts, u ~ ts for small)
    marks = {0.5 * 2.0 ** j for j in range(7)} | {ts * m for m in (0.5, 1.0, 2.0)}
    marks = sorted(m for m in marks if 0.0 < m < 60.0)
    return adaptive_simpson(integrand, 0.0, 60.0, tol=LAPLACE_TOL, breakpoints=marks).value


def survival_quantile(spec: DistributionSpec, level: float) -> float:
    """Smallest ``x`` (to bisection precision) with ``survival(x) < level``."""
    if spec.family is Family.UNIFORM:
        return spec.scale * (1.0 - level) if level > 0 else spec.scale
    lo, hi = 0.0, spec.scale
    while survival(spec, hi) >= level:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if survival(spec, mid) >= level:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class Sample:
    """A positive sample together with its provenance."""

    values: np.ndarray
    seed: Union[int, str] = "external"
    source: Union[DistributionSpec, str] = "file"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise DataError("a sample needs at least one value")
        bad = np.flatnonzero(~np.isfinite(vals) | (vals <= 0))
        if bad.size:
            i = int(bad[0])
            raise DataError(f"value #{i + 1} ({vals[i]!r}) is not a positive finite number")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size


_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    """SplitMix64 finalizer (Steele, Lea & Flood); a bijective 64-bit avalanche mix."""
    z = (z + _GOLDEN) & _U64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return z ^ (z >> 31)


def substream_seed(master_seed: int, index: int) -> int:
    """Seed of substream ``index``; depends only on ``(master_seed, index)``."""
    return splitmix64(splitmix64(master_seed & _U64) ^ (index & _U64))


def generator(seed: int, domain: int = DOMAIN_SAMPLE) -> np.random.Generator:
    """Counter-based generator for ``seed`` in a given stream domain."""
    if not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) <= _U64:
        raise ParameterError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return np.random.Generator(np.random.Philox(key=np.array([int(seed), domain], dtype=np.uint64)))


def open_uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniforms strictly inside (0, 1) on the 2**-52 lattice."""
    k = rng.integers(0, 1 << 52, size=n, dtype=np.int64)
    return (k.astype(float) + 0.5) * 2.0 ** -52


def _gamma_unit(rng: np.random.Generator, k: float, n: int) -> np.ndarray:
    # Marsaglia-Tsang squeeze/rejection, shape >= 1
    d = k - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n)
    filled = 0
    while filled < n:
        need = n - filled
        batch = need + need // 4 + 16
        z = rng.standard_normal(batch)
        u = open_uniform(rng, batch)
        v = (1.0 + c * z) ** 3
        ok = v > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            accept = ok & (np.log(u) < 0.5 * z * z + d - d * v + d * np.log(np.where(ok, v, 1.0)))
        got = (d * v)[accept][:need]
        out[filled:filled + got.size] = got
        filled += got.size
    return out


def sample(spec: DistributionSpec, n: int, seed: int) -> Sample:
    """Draw ``n`` i.i.d. values; identical arguments give identical output."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ParameterError(f"sample size must be a positive integer, got {n!r}")
    n = int(n)
    rng = generator(seed)
    s, k = spec.scale, spec.shape
    fam = spec.family
    if fam is Family.EXPONENTIAL:
        vals = -s * np.log(open_uniform(rng, n))
    elif fam is Family.WEIBULL:
        vals = s * (-np.log(open_uniform(rng, n))) ** (1.0 / k)
    elif fam is Family.GAMMA:
        if k >= 1.0:
            vals = s * _gamma_unit(rng, k, n)
        else:
            # boost: G(k) = G(k + 1) * U**(1/k)
            g = _gamma_unit(rng, k + 1.0, n)
            vals = s * g * open_uniform(rng, n) ** (1.0 / k)
    elif fam is Family.LOGNORMAL:
        vals = s * np.exp(k * rng.standard_normal(n))
    else:
        vals = s * open_uniform(rng, n)
    return Sample(vals, seed=int(seed), source=spec)
