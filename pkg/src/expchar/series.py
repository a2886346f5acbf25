"""Exact rational power series and the coefficient identities behind the
characterizations.

Everything in this module is exact: coefficients are
:class:`fractions.Fraction` and identities are compared with ``==``.
No floating point is used.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Sequence, Union

from .errors import DomainError, ParameterError

Rational = Union[int, Fraction]

C2_SIGN_NOTE = (
    "c_2 sign check: the forward-solved maximum-density recursion gives "
    "c_2 = -delta^3/2, in agreement with c_k = (-1)^(k-1) delta^(2k-1)/k!; "
    "a stated value of +delta^3/2 is inconsistent with both and is treated as a typo"
)


def _q(v) -> Fraction:
    if isinstance(v, float):
        raise TypeError("floats are not accepted; pass int, Fraction or a 'p/q' string")
    return Fraction(v)


@dataclass(frozen=True)
class RationalSeries:
    """Truncated power series ``sum_{k=0}^{K} c_k t**k`` with exact coefficients."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(_q(c) for c in self.coefficients)
        if not coeffs:
            raise ParameterError("a series needs at least one coefficient")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def of(cls, coeffs: Iterable[Rational], order: int | None = None) -> "RationalSeries":
        """Build from ``coeffs``, zero-padded or truncated to ``order``."""
        c = [_q(v) for v in coeffs]
        if order is not None:
            c = (c + [Fraction(0)] * (order + 1))[: order + 1]
        return cls(tuple(c))

    @classmethod
    def unit(cls, order: int) -> "RationalSeries":
        return cls.of([1], order)

    @classmethod
    def exponential_laplace(cls, scale: Rational, order: int) -> "RationalSeries":
        """Taylor coefficients ``(-s)**k`` of ``1 / (1 + s t)``."""
        s = _q(scale)
        return cls(tuple((-s) ** k for k in range(order + 1)))

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coefficients[k]

    def __len__(self) -> int:
        return len(self.coefficients)

    def __iter__(self):
        return iter(self.coefficients)

    def evaluate(self, t: Rational) -> Fraction:
        t = _q(t)
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc

    def scaled(self, factor: Rational) -> "RationalSeries":
        """Coefficients of ``t -> factor * series(t)``."""
        f = _q(factor)
        return RationalSeries(tuple(f * c for c in self.coefficients))

    def __add__(self, other: "RationalSeries") -> "RationalSeries":
        _same_order(self, other)
        return RationalSeries(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: "RationalSeries") -> "RationalSeries":
        _same_order(self, other)
        return RationalSeries(tuple(a - b for a, b in zip(self, other)))


def _same_order(a: RationalSeries, b: RationalSeries):
    if a.order != b.order:
        raise ParameterError(f"series orders differ ({a.order} vs {b.order})")


def cauchy_product(a: RationalSeries, b: RationalSeries,
                   p: Rational = 1, q: Rational = 1) -> RationalSeries:
    """Coefficients of ``a(t/p) * b(t/q)`` truncated at the common order.

    Coefficient ``k`` is ``sum_j a_j b_{k-j} / (p**j q**(k-j))``.
    """
    _same_order(a, b)
    p, q = _q(p), _q(q)
    if p == 0 or q == 0:
        raise DomainError("p and q must be nonzero")
    K = a.order
    ap = [a[j] / p ** j for j in range(K + 1)]
    bq = [b[j] / q ** j for j in range(K + 1)]
    return RationalSeries(tuple(
        sum((ap[j] * bq[k - j] for j in range(k + 1)), Fraction(0)) for k in range(K + 1)
    ))


def reciprocal_series(phi: RationalSeries) -> RationalSeries:
    """Series ``alpha`` with ``alpha * phi = 1`` up to the order of ``phi``."""
    if phi[0] == 0:
        raise DomainError("series with zero constant term has no reciprocal")
    inv0 = 1 / phi[0]
    alpha = [inv0]
    for k in range(1, phi.order + 1):
        s = sum((phi[j] * alpha[k - j] for j in range(1, k + 1)), Fraction(0))
        alpha.append(-s * inv0)
    return RationalSeries(tuple(alpha))


# ---------------------------------------------------------------------------
# recursions


def reciprocal_weight(k: int, j: int) -> Fraction:
    """Weight of ``a_j a_{k-j}`` in the order-``k`` equation of
    ``alpha(t)alpha(t/2) - 3 alpha(t)alpha(t/3) + 3 alpha(t/2)alpha(t/3) = 1``."""
    return (Fraction(1, 2 ** (k - j)) - Fraction(3, 3 ** (k - j))
            + Fraction(3, 2 ** j * 3 ** (k - j)))


def reciprocal_equation(a: Sequence[Rational], k: int) -> Fraction:
    """Left side of the order-``k`` (k >= 1) coefficient equation; zero when satisfied."""
    return sum((reciprocal_weight(k, j) * _q(a[j]) * _q(a[k - j]) for j in range(k + 1)), Fraction(0))


def solve_thm1_recursion(lam: Rational, K: int) -> RationalSeries:
    """Forward-solve the reciprocal-Laplace recursion with ``a_0 = 1``, ``a_1 = lam``.

    The order-``k`` equation contains ``a_k`` only through ``a_0 a_k`` and
    ``a_k a_0`` with total weight ``2**(2-k) - 2``, nonzero for ``k >= 2``.
    """
    lam = _q(lam)
    if K < 2:
        raise ParameterError("K must be at least 2")
    if lam <= 0:
        raise ParameterError("lambda must be positive")
    a = [Fraction(1), lam]
    for k in range(2, K + 1):
        rest = sum((reciprocal_weight(k, j) * a[j] * a[k - j] for j in range(1, k)), Fraction(0))
        a.append(-rest / (Fraction(4, 2 ** k) - 2))
    return RationalSeries(tuple(a))


def reciprocal_residual_series(alpha: RationalSeries) -> RationalSeries:
    """``alpha(t)alpha(t/2) - 3alpha(t)alpha(t/3) + 3alpha(t/2)alpha(t/3) - 1`` via Cauchy products."""
    lhs = (cauchy_product(alpha, alpha, 1, 2)
           - cauchy_product(alpha, alpha, 1, 3).scaled(3)
           + cauchy_product(alpha, alpha, 2, 3).scaled(3))
    return lhs - RationalSeries.unit(alpha.order)


def _cube_term(c: Sequence[Fraction], k: int) -> Fraction:
    # coefficient of x**k in F(x)**2 f(x)
    total = Fraction(0)
    for i in range(k + 1):
        if k + 1 - i >= len(c):
            continue
        f_coef = (k + 1 - i) * c[k + 1 - i]
        if f_coef == 0:
            continue
        sq = sum((c[j] * c[i - j] for j in range(i + 1)), Fraction(0))
        total += sq * f_coef
    return total


def max_density_equation(c: Sequence[Rational], k: int) -> Fraction:
    """Left side of the order-``k`` equation of ``F^2 f + F(x) - 2F(2x) + F(3x) = 0``.

    Requires coefficients up to index ``k + 1``.
    """
    cq = [_q(v) for v in c]
    return _cube_term(cq, k) + cq[k] * (1 - 2 ** (k + 1) + 3 ** k)


def solve_thm2_recursion(delta: Rational, K: int) -> RationalSeries:
    """Forward-solve the maximum-density recursion with ``c_0 = 0``, ``c_1 = delta``.

    With ``c_0 = 0`` the cubic term of the order-``k`` equation involves only
    ``c_1 .. c_{k-1}``, so the equation pins ``c_k`` through its linear
    coefficient ``1 - 2**(k+1) + 3**k`` (nonzero for ``k >= 2``).
    """
    if K < 2:
        raise ParameterError("K must be at least 2")
    c = [Fraction(0), _q(delta)]
    for k in range(2, K + 1):
        cube = _cube_term(c + [Fraction(0)], k)
        c.append(-cube / (1 - 2 ** (k + 1) + 3 ** k))
    return RationalSeries(tuple(c))


def max_density_closed_form(delta: Rational, K: int) -> RationalSeries:
    """``c_0 = 0`` and ``c_k = (-1)**(k-1) delta**(2k-1) / k!``."""
    d = _q(delta)
    return RationalSeries((Fraction(0),) + tuple(
        (-1) ** (k - 1) * d ** (2 * k - 1) / factorial(k) for k in range(1, K + 1)
    ))


# ---------------------------------------------------------------------------
# identity witnesses


class IdentityId(str, enum.Enum):
    FACTORIAL_SUM = "factorial_sum"
    BINOMIAL_A = "binomial_A"
    BINOMIAL_B = "binomial_B"
    LAPLACE = "laplace"
    DERIVATIVE_I = "derivative_matching_i"
    DERIVATIVE_II = "derivative_matching_ii"


@dataclass(frozen=True)
class IdentityWitness:
    identity: IdentityId
    parameter: object
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    def to_dict(self) -> dict:
        return {
            "identity": self.identity.value,
            "parameter": self.parameter if isinstance(self.parameter, int)
            else [str(p) for p in self.parameter],
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "holds": self.holds,
        }


def factorial_sum_identity(k: int) -> IdentityWitness:
    """``sum_{i=2}^{k+1} sum_{j=1}^{i-1} 1/(j!(i-j)!(k+1-i)!)`` against
    ``(3**(k+1) - 2**(k+2) + 1) / (k+1)!``."""
    if k < 1:
        raise ParameterError("k must be at least 1")
    lhs = Fraction(0)
    for i in range(2, k + 2):
        for j in range(1, i):
            lhs += Fraction(1, factorial(j) * factorial(i - j) * factorial(k + 1 - i))
    rhs = Fraction(3 ** (k + 1) - 2 ** (k + 2) + 1, factorial(k + 1))
    return IdentityWitness(IdentityId.FACTORIAL_SUM, k, lhs, rhs)


def binomial_identity_A(n: int) -> IdentityWitness:
    """``3**(n-2) - C(n,2) = sum_{i=3}^n [C(n,i) - 3**(n-i)] (2**(i-1) - 1)``."""
    if n < 4:
        raise ParameterError("n must be at least 4")
    lhs = 3 ** (n - 2) - comb(n, 2)
    rhs = sum((comb(n, i) - 3 ** (n - i)) * (2 ** (i - 1) - 1) for i in range(3, n + 1))
    return IdentityWitness(IdentityId.BINOMIAL_A, n, Fraction(lhs), Fraction(rhs))


def binomial_identity_B(n: int) -> IdentityWitness:
    """``1 - C(n,2) = sum_{i=3}^n [C(n,i)(2**(i-1) - 1) - (3**(i-1) - 2**(i-1))]``."""
    if n < 4:
        raise ParameterError("n must be at least 4")
    lhs = 1 - comb(n, 2)
    rhs = sum(comb(n, i) * (2 ** (i - 1) - 1) - (3 ** (i - 1) - 2 ** (i - 1))
              for i in range(3, n + 1))
    return IdentityWitness(IdentityId.BINOMIAL_B, n, Fraction(lhs), Fraction(rhs))


def laplace_identity_check(lam: Rational, t: Rational) -> IdentityWitness:
    """``phi(t)phi(t/2)phi(t/3) = 3phi(t) - 3phi(t/2) + phi(t/3)`` for
    ``phi(t) = 1/(1 + lam t)``."""
    lam, t = _q(lam), _q(t)
    if t < 0:
        raise DomainError("t must be nonnegative")
    if lam <= 0:
        raise ParameterError("lambda must be positive")

    def phi(u):
        return 1 / (1 + lam * u)

    lhs = phi(t) * phi(t / 2) * phi(t / 3)
    rhs = 3 * phi(t) - 3 * phi(t / 2) + phi(t / 3)
    return IdentityWitness(IdentityId.LAPLACE, (lam, t), lhs, rhs)


def exp_derivatives(scale: Rational, order: int) -> list[Fraction]:
    """``f^(m)(0)`` for ``f(x) = exp(-x/s)/s``, m = 0..order."""
    s = _q(scale)
    return [Fraction(1) / s * (Fraction(-1) / s) ** m for m in range(order + 1)]


def leibniz_G_derivatives(f_derivs: Sequence[Fraction]) -> list[Fraction]:
    """``G^(j)(0)`` for ``G = F f`` from derivatives of ``f`` at 0 (``F(0) = 0``)."""
    # F^(i)(0) = f^(i-1)(0) for i >= 1
    F = [Fraction(0)] + list(f_derivs[:-1])
    return [sum((comb(j, i) * F[i] * f_derivs[j - i] for i in range(j + 1)), Fraction(0))
            for j in range(len(f_derivs))]


def convolution_H_derivatives(f_derivs: Sequence[Fraction]) -> list[Fraction]:
    """``H^(n)(0)`` for ``H(z) = int_0^z f(2x) f(3(z-x)) dx``:
    ``sum_{i=1}^n 2**(n-i) f^(n-i)(0) 3**(i-1) f^(i-1)(0)``."""
    out = [Fraction(0)]
    for n in range(1, len(f_derivs)):
        out.append(sum((2 ** (n - i) * f_derivs[n - i] * 3 ** (i - 1) * f_derivs[i - 1]
                        for i in range(1, n + 1)), Fraction(0)))
    return out


def G_closed_form(f0: Fraction, ratio: Fraction, j: int) -> Fraction:
    """``f(0)**2 ratio**(j-1) (2**j - 1)``; zero at ``j = 0``."""
    return Fraction(0) if j == 0 else f0 ** 2 * ratio ** (j - 1) * (2 ** j - 1)


def H_closed_form(f0: Fraction, ratio: Fraction, j: int) -> Fraction:
    """``f(0)**2 ratio**(j-1) (3**j - 2**j)``; zero at ``j = 0``."""
    return Fraction(0) if j == 0 else f0 ** 2 * ratio ** (j - 1) * (3 ** j - 2 ** j)


def derivative_identity_check_thm4(n: int, scale: Rational = 1, part: str = "i"
                                   ) -> IdentityWitness:
    """Derivative matching at the origin under the exponential ansatz.

    part ``"i"``::

        sum_{i=1}^n 3**(n-i) f^(n-i)(0) G^(i-1)(0) = sum_{i=1}^n C(n,i) f^(n-i)(0) G^(i-1)(0)

    part ``"ii"``::

        sum_{i=1}^{n-1} f^(n-1-i)(0) H^(i)(0) = sum_{i=1}^{n-1} C(n,i+1) f^(n-1-i)(0) G^(i)(0)

    ``G`` and ``H`` derivatives come from the Leibniz rule and the
    convolution derivative formula applied to the ansatz derivatives of
    ``f``; :func:`G_closed_form` and :func:`H_closed_form` are checked
    against them separately.
    """
    if n < 3:
        raise ParameterError("n must be at least 3")
    if part not in ("i", "ii"):
        raise ParameterError("part must be 'i' or 'ii'")
    fd = exp_derivatives(scale, n)
    G = leibniz_G_derivatives(fd)
    if part == "i":
        lhs = sum((3 ** (n - i) * fd[n - i] * G[i - 1] for i in range(1, n + 1)), Fraction(0))
        rhs = sum((comb(n, i) * fd[n - i] * G[i - 1] for i in range(1, n + 1)), Fraction(0))
        return IdentityWitness(IdentityId.DERIVATIVE_I, n, lhs, rhs)
    H = convolution_H_derivatives(fd)
    lhs = sum((fd[n - 1 - i] * H[i] for i in range(1, n)), Fraction(0))
    rhs = sum((comb(n, i + 1) * fd[n - 1 - i] * G[i] for i in range(1, n)), Fraction(0))
    return IdentityWitness(IdentityId.DERIVATIVE_II, n, lhs, rhs)


def laplace_grid() -> list[tuple[Fraction, Fraction]]:
    """Fixed 20-point ``(lambda, t)`` grid of positive rationals."""
    lams = [Fraction(1), Fraction(2), Fraction(1, 3), Fraction(5, 2), Fraction(7, 3)]
    ts = [Fraction(1), Fraction(3, 7), Fraction(5), Fraction(1, 11)]
    return [(lam, t) for lam in lams for t in ts]
