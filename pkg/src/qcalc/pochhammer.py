"""q-shifted factorials (a+b)_q^n, (1+a)_q^inf and (1+a)_q^t.

Notation follows the additive convention used throughout the package::

    (a+b)_q^n  = prod_{j=0}^{n-1} (a + q**j * b)          n >= 0
    (1+a)_q^oo = prod_{j>=0} (1 + q**j * a)
    (1+a)_q^t  = (1+a)_q^oo / (1 + q**t * a)_q^oo

so the usual (a; q)_n is ``poch_finite(ctx, 1, -a, n)``.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from qcalc.context import POLE_TOL, Number, QContext, as_integer, rpow
from qcalc.errors import DomainError, PoleError


@dataclasses.dataclass(frozen=True)
class PochResult:
    value: Number
    factors_used: int
    truncated: bool
    exact: bool = False
    min_abs_factor: float = math.inf


def _factor_count(ctx: QContext, magnitude: float) -> int:
    """Factors needed until |q**j * a| < tail_tol, clipped to the cap."""
    cap = ctx.trunc.product_terms
    if ctx.exact:
        return cap
    tol = ctx.trunc.tail_tol
    if magnitude == 0:
        return 1
    if not math.isfinite(magnitude):
        raise DomainError(f"non-finite argument in q-product: {magnitude}")
    if tol == 0 or magnitude < tol:
        return cap if tol == 0 else 1
    need = math.ceil(math.log(tol / magnitude) / math.log(ctx.q)) + 1
    return max(1, min(cap, need))


def _qpowers(ctx: QContext, count: int) -> np.ndarray:
    return ctx.q ** np.arange(count, dtype=float)


def poch_finite(ctx: QContext, a, b, n: int) -> Number:
    """(a+b)_q^n for any integer n.

    For n < 0 the value comes from the infinite-product definition with the
    common tail cancelled: ``(a+b)_q^{-m} = 1 / prod_{j=1}^{m} (a + q**-j * b)``.
    """
    n = as_integer(n)
    if n is None:
        raise DomainError("poch_finite needs an integer exponent; use poch_real")
    a, b = ctx.num(a), ctx.num(b)
    result = ctx.num(1)
    if n >= 0:
        for j in range(n):
            result *= a + ctx.power(j) * b
        return result
    for j in range(1, -n + 1):
        factor = a + ctx.power(-j) * b
        if ctx.is_pole(factor):
            raise PoleError(f"({a}+{b})_q^{n}: factor j={-j} vanishes")
        result *= factor
    return 1 / result


def poch_inf(ctx: QContext, a, *, as_denominator: bool = False) -> PochResult:
    """Truncated (1+a)_q^oo.

    With ``as_denominator=True`` a factor within ``POLE_TOL`` of zero raises
    :class:`PoleError` instead of returning a (near) zero product.
    """
    a = ctx.num(a)
    if ctx.exact:
        value = ctx.num(1)
        smallest = math.inf
        qj = ctx.num(1)
        for _ in range(ctx.trunc.product_terms):
            factor = 1 + qj * a
            smallest = min(smallest, abs(float(factor)))
            if as_denominator and factor == 0:
                raise PoleError(f"(1+{a})_q^oo has a vanishing factor")
            value *= factor
            qj *= ctx.q
        return PochResult(value, ctx.trunc.product_terms, True, exact=True, min_abs_factor=smallest)
    count = _factor_count(ctx, abs(a))
    factors = 1.0 + a * _qpowers(ctx, count)
    smallest = float(np.min(np.abs(factors)))
    if as_denominator and smallest < POLE_TOL:
        raise PoleError(f"(1+{a})_q^oo has a factor {smallest:.3g} treated as zero")
    with np.errstate(over="ignore"):
        value = float(np.prod(factors))
    return PochResult(value, count, True, min_abs_factor=smallest)


def poch_real(ctx: QContext, a, t, *, via_products: bool = False) -> Number:
    """(1+a)_q^t = (1+a)_q^oo / (1+q**t a)_q^oo for real t.

    Integer exponents use the finite product (exact in exact mode) unless
    ``via_products`` forces the infinite-product route.  Numerator and
    denominator share one truncation length, so their tails cancel factor
    by factor.
    """
    n = as_integer(t)
    if n is not None and not via_products:
        return poch_finite(ctx, 1, a, n)
    a = ctx.num(a)
    shifted = ctx.power(t) * a
    if ctx.exact:
        value = ctx.num(1)
        qj = ctx.num(1)
        for j in range(ctx.trunc.product_terms):
            den = 1 + qj * shifted
            if den == 0:
                raise PoleError(f"(1+{a})_q^{t}: denominator factor j={j} vanishes")
            value *= (1 + qj * a) / den
            qj *= ctx.q
        return value
    count = _factor_count(ctx, max(abs(a), abs(shifted)))
    qj = _qpowers(ctx, count)
    den = 1.0 + shifted * qj
    if float(np.min(np.abs(den))) < POLE_TOL:
        raise PoleError(f"(1+{a})_q^{t}: denominator product vanishes")
    with np.errstate(over="ignore"):
        return float(np.prod((1.0 + a * qj) / den))


def power_over_poch(ctx: QContext, x, p, a, t) -> Number:
    """x**p / (1+a)_q^t, robust when both parts overflow but their ratio does not.

    For a huge lattice point x the power and the product can each exceed the
    float range while the quotient stays moderate.  Float mode then sums the
    logarithms of the factors instead.
    """
    try:
        num = rpow(ctx, x, p)
    except OverflowError:
        num = math.inf
    den = poch_real(ctx, a, t)
    if ctx.exact or (math.isfinite(num) and math.isfinite(den) and num != 0 and den != 0):
        return num / den
    a = ctx.num(a)
    shifted = ctx.power(t) * a
    qj = _qpowers(ctx, _factor_count(ctx, max(abs(a), abs(shifted))))
    ratios = (1.0 + a * qj) / (1.0 + shifted * qj)
    if float(np.min(np.abs(1.0 + shifted * qj))) < POLE_TOL:
        raise PoleError(f"(1+{a})_q^{t}: denominator product vanishes")
    if np.any(ratios == 0):
        raise PoleError(f"(1+{a})_q^{t} vanishes in a denominator")
    sign = -1.0 if np.count_nonzero(ratios < 0) % 2 else 1.0
    return sign * math.exp(p * math.log(x) - float(np.sum(np.log(np.abs(ratios)))))


def _close(x, y, rtol) -> bool:
    scale = max(abs(x), abs(y))
    return abs(x - y) <= rtol * scale if scale else True


def poch_identities_check(ctx: QContext, x, t, s, n: int, rtol: float = 1e-12) -> dict[str, bool]:
    """Evaluate both sides of the four product-algebra identities.

    Keys are ``"split"``, ``"inversion"``, ``"shift"`` and ``"integer_shift"``:

    * split:          (1+x)^{s+t} = (1+x)^s (1+q^s x)^t
    * inversion:      (1+x)^{-t} = 1 / (1+q^{-t} x)^t
    * shift:          (1+q^s x)^t = (1+x)^{s+t}/(1+x)^s = (1+q^t x)^s (1+x)^t/(1+x)^s
    * integer_shift:  (1+q^{-n} x)^t = (x+q)_q^n / (q^t x + q)_q^n * (1+x)^t
    """
    P = lambda a, e: poch_real(ctx, a, e)
    qs, qt = ctx.power(s), ctx.power(t)
    x = ctx.num(x)
    shift_lhs = P(qs * x, t)
    return {
        "split": _close(P(x, s + t), P(x, s) * P(qs * x, t), rtol),
        "inversion": _close(P(x, -t), 1 / P(ctx.power(-t) * x, t), rtol),
        "shift": _close(shift_lhs, P(x, s + t) / P(x, s), rtol)
        and _close(shift_lhs, P(qt * x, s) * P(x, t) / P(x, s), rtol),
        "integer_shift": _close(
            P(ctx.power(-n) * x, t),
            poch_finite(ctx, x, ctx.q, n) / poch_finite(ctx, qt * x, ctx.q, n) * P(x, t),
            rtol,
        ),
    }
