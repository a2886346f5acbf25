"""Density objects of the sample-size-three characterizations.

Everything here is a function of a :class:`DistributionSpec` and a point
(or array of points) ``x > 0``.  Closed-form objects are vectorized with
numpy; convolution densities go through the quadrature kernels in
:mod:`expchar.kernels` or, for four and five summands, a trapezoid grid
convolution refined by Romberg extrapolation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import fftconvolve

from . import kernels
from .distributions import DistributionSpec, cdf, pdf, survival, survival_quantile
from .errors import DomainError, NumericError, ParameterError
from .quadrature import MAX_DEPTH

MAX2_THIRD_TOL = 1e-8
SUM2_TOL = 1e-8
SUM3_INNER_TOL = 1e-10
SUM3_OUTER_TOL = 1e-8
GRID_TOL = 1e-6
GRID_BASE_STEPS = 1024
GRID_MAX_LEVELS = 6

DEFAULT_POINTS = 400
DEFAULT_LOWER = 1e-3
DEFAULT_TAIL = 1e-8


class Symbol(str, enum.Enum):
    PDF = "pdf"
    CDF = "cdf"
    SURVIVAL = "survival"

    @property
    def letter(self) -> str:
        return {"pdf": "f", "cdf": "F", "survival": "S"}[self.value]


@dataclass(frozen=True)
class MixedForm:
    """Alternating combination ``sum_j C(n,j) (-1)**(j-1) j g_j(j x)``.

    ``symbols[j-1]`` selects ``g_j`` among pdf, cdf and survival.
    """

    symbols: tuple[Symbol, ...]

    def __post_init__(self):
        syms = tuple(Symbol(s) for s in self.symbols)
        if len(syms) < 2:
            raise ParameterError("a mixed form needs n >= 2 symbols")
        object.__setattr__(self, "symbols", syms)

    @property
    def n(self) -> int:
        return len(self.symbols)

    @classmethod
    def all_pdf(cls, n: int = 3) -> "MixedForm":
        return cls((Symbol.PDF,) * n)

    @classmethod
    def all_survival(cls, n: int = 3) -> "MixedForm":
        return cls((Symbol.SURVIVAL,) * n)

    @classmethod
    def parse(cls, text: str) -> "MixedForm":
        """Parse a string such as ``"fFS"`` or ``"pdf,survival,pdf"``."""
        letters = {"f": Symbol.PDF, "F": Symbol.CDF, "S": Symbol.SURVIVAL}
        if "," in text:
            return cls(tuple(Symbol(t.strip()) for t in text.split(",")))
        try:
            return cls(tuple(letters[c] for c in text))
        except KeyError as exc:
            raise ParameterError(f"unknown form symbol {exc.args[0]!r}") from None

    def label(self) -> str:
        parts = []
        for j, sym in enumerate(self.symbols, start=1):
            coef = math.comb(self.n, j) * j
            sign = "+" if j % 2 == 1 else "-"
            arg = "x" if j == 1 else f"{j}x"
            parts.append(f"{sign}{coef}{sym.letter}({arg})")
        return "".join(parts).lstrip("+")


_P, _C, _S = Symbol.PDF, Symbol.CDF, Symbol.SURVIVAL

# The seven alternative forms for n = 3, in printed order.  Form 5 carries the
# cdf in its first slot as printed; that combination is not a density, so the
# default reading substitutes the survival function.
SEVEN_FORMS_LITERAL = (
    MixedForm((_P, _P, _S)),
    MixedForm((_P, _S, _P)),
    MixedForm((_S, _P, _P)),
    MixedForm((_P, _S, _S)),
    MixedForm((_C, _P, _S)),
    MixedForm((_S, _S, _P)),
    MixedForm((_S, _S, _S)),
)
SEVEN_FORMS = tuple(
    MixedForm((_S, _P, _S)) if i == 4 else f for i, f in enumerate(SEVEN_FORMS_LITERAL)
)
FORM5_NOTE = (
    "mixed-5 default mode reads 3F(x)-6f(2x)+3S(3x) as 3S(x)-6f(2x)+3S(3x): "
    "with the cdf in the first slot the combination does not integrate to 1; "
    "use --mode literal for the form as written"
)


def seven_form(index: int, mode: str = "default") -> MixedForm:
    """The ``index``-th (1-based) alternative form under ``mode``."""
    if not 1 <= index <= 7:
        raise ParameterError("mixed form index must be in 1..7")
    if mode not in ("default", "literal"):
        raise ParameterError("mode must be 'default' or 'literal'")
    table = SEVEN_FORMS if mode == "default" else SEVEN_FORMS_LITERAL
    return table[index - 1]


def _positive_points(x):
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise DomainError("density objects are evaluated at x > 0")
    return xa


def _ret(arr, x):
    return float(arr) if np.ndim(x) == 0 else np.asarray(arr, dtype=float)


_EVAL = {Symbol.PDF: pdf, Symbol.CDF: cdf, Symbol.SURVIVAL: survival}


def combination_density(form: MixedForm, spec: DistributionSpec, x):
    """Alternating-sign combination of ``form`` evaluated at ``x``."""
    xa = _positive_points(x)
    total = np.zeros_like(xa)
    n = form.n
    for j, sym in enumerate(form.symbols, start=1):
        coef = math.comb(n, j) * j * (1 if j % 2 == 1 else -1)
        total = total + coef * _EVAL[sym](spec, j * xa)
    return _ret(total, x)


def max_density(n: int, spec: DistributionSpec, x):
    """Density ``n F(x)**(n-1) f(x)`` of the maximum of ``n`` draws."""
    if n < 2:
        raise ParameterError("n must be at least 2")
    xa = _positive_points(x)
    return _ret(n * cdf(spec, xa) ** (n - 1) * pdf(spec, xa), x)


def _check(value, err, ok, what, x):
    if not ok:
        raise NumericError(f"{what} at x={x:g} did not converge (error estimate {err:g})",
                           achieved=err)
    return value


def max2_plus_third_density(spec: DistributionSpec, x, tol: float = MAX2_THIRD_TOL):
    """Density of ``max(X1, X2) + X3/3``:

    ``6 * int_0^x f(3y) F(x-y) f(x-y) dy``.
    """
    xa = _positive_points(x)
    code, s, k = spec.kernel_args
    out = np.empty(xa.shape)
    for idx, xi in np.ndenumerate(xa):
        v, e, ok = kernels.max2_third_density(code, s, k, float(xi), tol, MAX_DEPTH)
        out[idx] = _check(v, e, ok, "max2-plus-third quadrature", xi)
    return _ret(out, x)


def _trap_chain(spec: DistributionSpec, n: int, x: float, steps: int) -> float:
    """Trapezoid iterated convolution of ``j f(j u)``, j = 1..n, at ``x``."""
    h = x / steps
    u = np.arange(steps + 1) * h
    acc = pdf(spec, u)
    # an infinite pdf(0) propagates as nan and is reported by the caller
    with np.errstate(invalid="ignore", over="ignore"):
        for j in range(2, n + 1):
            g = j * pdf(spec, j * u)
            full = fftconvolve(acc, g)[: steps + 1]
            acc = h * (full - 0.5 * (acc[0] * g + acc * g[0]))
            acc[0] = 0.0
    return float(acc[-1])


def _grid_sum_density(spec: DistributionSpec, n: int, x: float, tol: float) -> float:
    # Romberg table over step halvings; trapezoid error is even in h
    rows: list[list[float]] = []
    steps = GRID_BASE_STEPS
    err = math.inf
    for level in range(GRID_MAX_LEVELS):
        row = [_trap_chain(spec, n, x, steps)]
        for m in range(1, level + 1):
            fac = 4.0 ** m
            row.append((fac * row[m - 1] - rows[-1][m - 1]) / (fac - 1.0))
        if rows:
            err = abs(row[-1] - rows[-1][-1])
            if not math.isfinite(err):
                break
            if err <= tol and level >= 2:
                return row[-1]
        rows.append(row)
        steps *= 2
    raise NumericError(
        f"grid convolution for n={n} at x={x:g} did not reach {tol:g} (achieved {err:g})",
        achieved=err,
    )


def scaled_sum_density(n: int, spec: DistributionSpec, x):
    """Density of ``X1 + X2/2 + ... + Xn/n`` for ``n`` in 2..5."""
    if n not in (2, 3, 4, 5):
        raise ParameterError("scaled_sum_density supports n in {2, 3, 4, 5}")
    xa = _positive_points(x)
    code, s, k = spec.kernel_args
    out = np.empty(xa.shape)
    for idx, xi in np.ndenumerate(xa):
        xi = float(xi)
        if n == 2:
            v, e, ok = kernels.scaled_sum2_density(code, s, k, xi, SUM2_TOL, MAX_DEPTH)
            out[idx] = _check(v, e, ok, "scaled-sum quadrature", xi)
        elif n == 3:
            v, e, ok = kernels.scaled_sum3_density(code, s, k, xi, SUM3_INNER_TOL,
                                                   SUM3_OUTER_TOL, MAX_DEPTH)
            out[idx] = _check(v, e, ok, "nested scaled-sum quadrature", xi)
        else:
            out[idx] = _grid_sum_density(spec, n, xi, GRID_TOL)
    return _ret(out, x)


def q_function(spec: DistributionSpec, y):
    """``Q(y) = f(y) - survival(y)``; identically zero only for the unit exponential."""
    ya = _positive_points(y)
    return _ret(pdf(spec, ya) - survival(spec, ya), y)


# ---------------------------------------------------------------------------
# discrepancy reports


@dataclass(frozen=True)
class DiscrepancyReport:
    grid: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    sup_residual: float
    l2_residual: float
    argmax_x: float

    @classmethod
    def build(cls, grid, lhs, rhs) -> "DiscrepancyReport":
        grid = np.asarray(grid, dtype=float)
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        if not (grid.shape == lhs.shape == rhs.shape):
            raise ParameterError("grid, lhs and rhs must have equal length")
        diff = np.abs(lhs - rhs)
        i = int(np.argmax(diff))
        l2 = math.sqrt(float(trapezoid(diff ** 2, grid))) if grid.size > 1 else 0.0
        return cls(grid, lhs, rhs, float(diff[i]), l2, float(grid[i]))

    @property
    def residual(self) -> np.ndarray:
        return self.lhs - self.rhs

    def to_dict(self) -> dict:
        return {
            "points": int(self.grid.size),
            "sup_residual": self.sup_residual,
            "l2_residual": self.l2_residual,
            "argmax_x": self.argmax_x,
        }


def default_grid(spec: DistributionSpec, points: int = DEFAULT_POINTS,
                 lower: float = DEFAULT_LOWER, tail: float = DEFAULT_TAIL) -> np.ndarray:
    """Log-spaced grid from ``lower`` to where survival first drops below ``tail``."""
    upper = survival_quantile(spec, tail)
    if upper <= lower:
        raise ParameterError("grid upper end does not exceed the lower end")
    return np.geomspace(lower, upper, points)


def _validate_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size < 1:
        raise ParameterError("grid must be a nonempty 1-d sequence")
    if np.any(g <= 0) or np.any(np.diff(g) <= 0):
        raise ParameterError("grid must be strictly increasing and positive")
    return g


@dataclass(frozen=True)
class DensityExpr:
    """A named density-like object ``(spec, xs) -> values``."""

    name: str
    fn: Callable[[DistributionSpec, np.ndarray], np.ndarray]
    closed_form: bool = True

    def __call__(self, spec: DistributionSpec, xs) -> np.ndarray:
        return np.asarray(self.fn(spec, np.asarray(xs, dtype=float)), dtype=float)


def combination_expr(form: MixedForm) -> DensityExpr:
    return DensityExpr(f"comb[{form.label()}]", lambda sp, xs: combination_density(form, sp, xs))


def max_expr(n: int) -> DensityExpr:
    return DensityExpr(f"max[{n}]", lambda sp, xs: max_density(n, sp, xs))


def scaled_sum_expr(n: int) -> DensityExpr:
    return DensityExpr(f"scaled-sum[{n}]", lambda sp, xs: scaled_sum_density(n, sp, xs),
                       closed_form=False)


def max2_third_expr() -> DensityExpr:
    return DensityExpr("max2-plus-third", max2_plus_third_density, closed_form=False)


def q_step_exprs() -> tuple[DensityExpr, DensityExpr]:
    """The two consecutive differences ``Q(y)-Q(2y/3)`` and ``Q(2y/3)-Q(y/3)``."""
    upper = DensityExpr(
        "Q(y)-Q(2y/3)", lambda sp, ys: q_function(sp, ys) - q_function(sp, 2.0 * ys / 3.0))
    lower = DensityExpr(
        "Q(2y/3)-Q(y/3)", lambda sp, ys: q_function(sp, 2.0 * ys / 3.0) - q_function(sp, ys / 3.0))
    return upper, lower


def discrepancy(lhs: DensityExpr, rhs: DensityExpr, spec: DistributionSpec,
                grid: Sequence[float]) -> DiscrepancyReport:
    """Evaluate both sides on ``grid`` and summarize their difference."""
    g = _validate_grid(grid)
    return DiscrepancyReport.build(g, lhs(spec, g), rhs(spec, g))


def q_residual(spec: DistributionSpec, grid: Sequence[float]) -> DiscrepancyReport:
    """Residual of the Q functional equation on ``grid``."""
    upper, lower = q_step_exprs()
    return discrepancy(upper, lower, spec, grid)


# Named identity pairs; each maps to (lhs, rhs, note).
PAIR_NAMES = ("comb-pdf", "comb-surv", "max", "scaled-sum", "max2-third", "q-residual",
              *(f"mixed-{i}" for i in range(1, 8)))


def identity_pair(name: str, n: int = 3, mode: str = "default"
                  ) -> tuple[DensityExpr, DensityExpr, str | None]:
    """Resolve a pair name to its two sides.

    ``comb-pdf``   all-pdf combination vs all-survival combination
    ``comb-surv``  all-survival combination vs density of the maximum
    ``max``        density of the maximum vs all-pdf combination
    ``scaled-sum`` density of the scaled sum vs density of the maximum
    ``max2-third`` density of max(X1,X2)+X3/3 vs density of the maximum of 3
    ``q-residual`` consecutive Q differences
    ``mixed-i``    i-th alternative form vs all-pdf combination (n = 3)
    """
    if name == "comb-pdf":
        return combination_expr(MixedForm.all_pdf(n)), combination_expr(MixedForm.all_survival(n)), None
    if name == "comb-surv":
        return combination_expr(MixedForm.all_survival(n)), max_expr(n), None
    if name == "max":
        return max_expr(n), combination_expr(MixedForm.all_pdf(n)), None
    if name == "scaled-sum":
        return scaled_sum_expr(n), max_expr(n), None
    if name == "max2-third":
        return max2_third_expr(), max_expr(3), None
    if name == "q-residual":
        upper, lower = q_step_exprs()
        return upper, lower, None
    if name.startswith("mixed-"):
        try:
            idx = int(name[len("mixed-"):])
        except ValueError:
            raise ParameterError(f"unknown form {name!r}") from None
        form = seven_form(idx, mode)
        note = FORM5_NOTE if idx == 5 and mode == "default" else None
        return combination_expr(form), combination_expr(MixedForm.all_pdf(3)), note
    raise ParameterError(f"unknown form {name!r}; expected one of {', '.join(PAIR_NAMES)}")
