"""Truncated one-sided and bilateral sums with tail bookkeeping."""

from __future__ import annotations

import dataclasses
import math
import warnings
from typing import Callable

from qcalc.context import Number, QContext
from qcalc.errors import DivergenceWarning, QCalcError

#: consecutive small terms required before a float sum stops early
STOP_RUN = 5
#: a tail is extrapolated only if the last two term ratios agree this well (relative to 1 - r)
RATIO_STABILITY = 1e-3


@dataclasses.dataclass(frozen=True)
class SumResult:
    """One direction of a truncated sum.

    ``tail_est`` is the magnitude of the first discarded term and
    ``correction`` the geometric tail estimate already folded into ``value``.
    """

    value: Number
    terms_used: int
    tail_est: float
    correction: float = 0.0
    converged: bool = False
    diverged: bool = False
    abs_sum: float = 0.0


@dataclasses.dataclass(frozen=True)
class BilateralSum:
    """Sum over n >= 0 (``positive``) and n <= -1 (``negative``)."""

    value: Number
    positive: SumResult
    negative: SumResult
    window: int

    @property
    def terms_used(self) -> int:
        return self.positive.terms_used + self.negative.terms_used

    @property
    def diverged(self) -> bool:
        return self.positive.diverged or self.negative.diverged

    @property
    def abs_sum(self) -> float:
        return self.positive.abs_sum + self.negative.abs_sum

    def meta(self) -> dict:
        return {
            "window": self.window,
            "terms_pos": self.positive.terms_used,
            "terms_neg": self.negative.terms_used,
            "tail_pos": self.positive.tail_est,
            "tail_neg": self.negative.tail_est,
            "extrapolated_pos": self.positive.correction,
            "extrapolated_neg": self.negative.correction,
            "diverged": self.diverged,
        }


def _safe_magnitude(term: Callable, n: int) -> float:
    try:
        return abs(float(term(n)))
    except (QCalcError, ArithmeticError, ValueError):
        return math.nan


def _aitken_tail(prev: float, last: float) -> float | None:
    """Geometric remainder after ``last`` given the ratio last/prev."""
    if prev == 0:
        return None
    r = last / prev
    return last * r / (1 - r) if abs(r) < 1 else None


def _tail_extrapolation(terms: list[float]) -> float:
    """Estimate of the discarded tail from the last retained terms (0 if unreliable).

    One Aitken step removes the dominant geometric component.  With four
    terms a second step is applied to the sequence of Aitken estimates,
    which also removes a slower-varying ratio; it is kept only when it is a
    small refinement of the first.
    """
    t0, t1, t2 = terms[-3:]
    if t0 == 0 or t1 == 0:
        return 0.0
    r1, r2 = t1 / t0, t2 / t1
    if not (abs(r2) < 1 and abs(r2 - r1) <= RATIO_STABILITY * abs(1 - r2)):
        return 0.0
    first = _aitken_tail(t1, t2)
    if len(terms) < 4:
        return first
    # Aitken-corrected partial sums, measured from the last partial sum
    s = terms[-4:]
    a = [-(s[2] + s[3]) + (_aitken_tail(s[0], s[1]) or 0.0),
         -s[3] + (_aitken_tail(s[1], s[2]) or 0.0),
         first]
    d1, d2 = a[1] - a[0], a[2] - a[1]
    if d2 == d1:
        return first
    second = a[2] - d2 * d2 / (d2 - d1)
    return second if abs(second - first) < 0.5 * abs(first) else first


def directional_sum(ctx: QContext, term: Callable[[int], Number], start: int, step: int,
                    cap: int) -> SumResult:
    """Sum ``term(start) + term(start + step) + ...`` for at most ``cap`` terms.

    Float mode stops once :data:`STOP_RUN` consecutive terms are below
    ``tail_tol`` relative to the running total.  If the cap is reached first
    and the last term ratios are stable and below 1 in modulus, the geometric
    remainder ``T r / (1 - r)`` is added.  Otherwise, if the last five retained
    terms are non-decreasing in magnitude, a :class:`DivergenceWarning` is
    emitted and the result is flagged.
    """
    tol = ctx.trunc.tail_tol
    total = ctx.num(0)
    abs_total = 0.0
    recent: list = []
    small_run = 0
    converged = diverged = False
    n = start
    used = 0
    for _ in range(cap):
        value = term(n)
        n += step
        used += 1
        if not ctx.exact and not math.isfinite(value):
            diverged = True
            break
        total += value
        magnitude = abs(float(value))
        abs_total += magnitude
        recent.append(value)
        del recent[:-STOP_RUN]
        if not ctx.exact:
            small_run = small_run + 1 if magnitude <= tol * abs(total) else 0
            if small_run >= STOP_RUN:
                converged = True
                break

    tail = math.inf if diverged else _safe_magnitude(term, n)
    correction = 0.0
    if not (converged or diverged or ctx.exact) and ctx.trunc.extrapolate and len(recent) >= 3:
        correction = _tail_extrapolation([float(v) for v in recent])
        total += correction
    if not (converged or diverged) and correction == 0.0 and len(recent) == STOP_RUN:
        mags = [abs(float(v)) for v in recent]
        if mags[-1] > 0 and all(b >= a for a, b in zip(mags, mags[1:])):
            diverged = True
    if diverged:
        warnings.warn(f"terms failed to decay within {cap} terms (start={start}, step={step})",
                      DivergenceWarning, stacklevel=3)
    return SumResult(total, used, tail, correction, converged, diverged, abs_total)


def bilateral_sum(ctx: QContext, term: Callable[[int], Number], window: int | None = None) -> BilateralSum:
    """Sum ``term(n)`` over ``-window <= n <= window`` (default: the policy's window)."""
    window = ctx.trunc.bilateral_window if window is None else window
    pos = directional_sum(ctx, term, 0, 1, window + 1)
    neg = directional_sum(ctx, term, -1, -1, window)
    return BilateralSum(pos.value + neg.value, pos, neg, window)

