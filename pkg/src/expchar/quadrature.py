"""Adaptive Simpson quadrature with explicit error control.

The recursion follows the classical Lyness scheme: a panel is accepted
when the two-half Simpson estimate differs from the one-panel estimate by
at most ``15 * tol``; the accepted value carries the Richardson correction
``delta / 15``.  Each split halves the tolerance.  Panels that hit
``max_depth`` are accepted with their error estimate but mark the whole
integral as unconverged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import NumericError

MAX_DEPTH = 40
MIN_DEPTH = 3
_CUT_NUDGE = 4.0 * 2.0 ** -52


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    evaluations: int
    converged: bool


class _Counter:
    __slots__ = ("calls", "failed")

    def __init__(self):
        self.calls = 0
        self.failed = False


def _simpson_panel(f, a, fa, b, fb, m, fm, whole, tol, depth, max_depth, state):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    state.calls += 2
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if not math.isfinite(delta):
        state.failed = True
        return float("nan"), float("inf")
    if depth >= MIN_DEPTH and abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0, abs(delta) / 15.0
    if depth >= max_depth:
        state.failed = True
        return left + right + delta / 15.0, abs(delta) / 15.0
    v1, e1 = _simpson_panel(f, a, fa, m, fm, lm, flm, left, 0.5 * tol,
                            depth + 1, max_depth, state)
    v2, e2 = _simpson_panel(f, m, fm, b, fb, rm, frm, right, 0.5 * tol,
                            depth + 1, max_depth, state)
    return v1 + v2, e1 + e2


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = MAX_DEPTH,
    breakpoints: Iterable[float] = (),
    strict: bool = True,
) -> QuadResult:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Parameters
    ----------
    f : callable
        Scalar integrand.  Must be finite at every node, including the
        endpoints.
    a, b : float
        Integration limits, ``a <= b``.
    tol : float
        Absolute tolerance for the whole interval.  When ``breakpoints``
        split the interval, the tolerance is shared in proportion to the
        piece lengths.
    max_depth : int
        Maximum bisection depth of any panel.
    breakpoints : iterable of float
        Points of non-smoothness inside ``(a, b)``.  Integration is split
        there; points outside the open interval are ignored.
    strict : bool
        Raise :class:`NumericError` on non-convergence.  Otherwise the
        result is returned with ``converged=False``.
    """
    if b < a:
        raise ValueError("integration limits must satisfy a <= b")
    if b == a:
        return QuadResult(0.0, 0.0, 0, True)
    cuts = sorted({p for p in breakpoints if a < p < b})
    edges = [a, *cuts, b]
    span = b - a
    state = _Counter()
    total = 0.0
    err = 0.0
    last = len(edges) - 2
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        piece_tol = tol * (hi - lo) / span
        # at a cut take the one-sided value from inside the piece, so a jump
        # sitting exactly on the breakpoint does not leak into either side
        nudge = 0.25 * (hi - lo)
        fa = f(lo + min(_CUT_NUDGE * abs(lo), nudge)) if i > 0 else f(lo)
        fb = f(hi - min(_CUT_NUDGE * abs(hi), nudge)) if i < last else f(hi)
        m = 0.5 * (lo + hi)
        fm = f(m)
        state.calls += 3
        whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)
        v, e = _simpson_panel(f, lo, fa, hi, fb, m, fm, whole, piece_tol,
                              1, max_depth, state)
        total += v
        err += e
    res = QuadResult(total, err, state.calls, not state.failed)
    if strict and not res.converged:
        raise NumericError(
            f"adaptive Simpson did not converge on [{a}, {b}] "
            f"(tol={tol:g}, achieved={err:g})",
            achieved=err,
        )
    return res
