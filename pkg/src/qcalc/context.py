"""Base q, arithmetic mode and truncation policy shared by every evaluation.

A :class:`QContext` is passed as the first argument to every function in
qcalc.  It is immutable; derive variants with :meth:`QContext.replace`.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import warnings
from fractions import Fraction
from numbers import Rational
from typing import Union

import mpmath

from qcalc.errors import DomainError, InexactWarning, ModeError

Number = Union[float, Fraction]

#: absolute threshold below which a denominator factor counts as a pole (float mode)
POLE_TOL = 1e-15

_EXACT_POW_DPS = 40


class Mode(str, enum.Enum):
    FLOAT = "float"
    EXACT = "exact"


@dataclasses.dataclass(frozen=True)
class TruncationPolicy:
    """Caps and tolerances used to truncate infinite products and sums.

    ``product_terms`` caps the factors of an infinite product, ``series_terms``
    the terms of a one-sided Jackson sum, and ``bilateral_window`` is W in a
    bilateral sum over ``-W <= n <= W``.  In float mode a product stops early
    once ``|q**j * a| < tail_tol`` and a sum once five consecutive terms fall
    below ``tail_tol`` relative to the running total.  ``extrapolate`` adds a
    geometric tail estimate when a sum hits its cap while its terms still
    decay with a stable ratio.  Exact mode ignores ``tail_tol`` and
    ``extrapolate``.
    """

    product_terms: int = 10_000
    series_terms: int = 10_000
    bilateral_window: int = 200
    tail_tol: float = 1e-17
    extrapolate: bool = True

    def __post_init__(self):
        for name in ("product_terms", "series_terms", "bilateral_window"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise DomainError(f"{name} must be a positive integer, got {value!r}")
        if not self.tail_tol >= 0:
            raise DomainError(f"tail_tol must be nonnegative, got {self.tail_tol!r}")

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


#: caps used when an exact context is built without an explicit policy
EXACT_DEFAULT_POLICY = TruncationPolicy(product_terms=60, series_terms=60, bilateral_window=60)


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or a decimal literal into an exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ModeError(f"not a rational number: {text!r}") from exc


def as_integer(t) -> int | None:
    """Return ``t`` as an int if it is integer-valued, else None."""
    if isinstance(t, bool):
        return int(t)
    if isinstance(t, int):
        return t
    if isinstance(t, Fraction):
        return t.numerator if t.denominator == 1 else None
    if isinstance(t, float) and t.is_integer():
        return int(t)
    return None


@dataclasses.dataclass(frozen=True)
class QContext:
    q: Number
    mode: Mode = Mode.FLOAT
    trunc: TruncationPolicy = TruncationPolicy()

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise DomainError(f"q must lie in the open interval (0, 1), got {self.q}")

    @property
    def exact(self) -> bool:
        return self.mode is Mode.EXACT

    def replace(self, **changes) -> "QContext":
        return dataclasses.replace(self, **changes)

    def num(self, value) -> Number:
        """Coerce ``value`` to the number type of this context's mode.

        In exact mode floats are read through their shortest decimal repr,
        so ``0.3`` becomes ``3/10``.
        """
        if not self.exact:
            return float(value)
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, Rational)):
            return Fraction(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ModeError(f"cannot represent {value!r} exactly")
            return Fraction(repr(value))
        if isinstance(value, str):
            return parse_rational(value)
        raise ModeError(f"cannot represent {value!r} exactly")

    def power(self, t) -> Number:
        """q**t, exact whenever ``t`` is an integer in exact mode."""
        return rpow(self, self.q, t)

    def is_pole(self, factor) -> bool:
        if self.exact:
            return factor == 0
        return abs(factor) < POLE_TOL

    def echo(self) -> dict:
        return {"q": str(self.q), "mode": self.mode.value, "trunc": self.trunc.as_dict()}


def rpow(ctx: QContext, base, t) -> Number:
    """``base**t`` in the arithmetic of ``ctx``.

    Exact mode keeps integer powers exact.  A non-integer power can't be
    rational in general; it is computed with 40-digit mpmath arithmetic,
    rounded to a Fraction, and an :class:`InexactWarning` is emitted.
    """
    n = as_integer(t)
    if not ctx.exact:
        base = float(base)
        if n is not None:
            return base**n
        if base < 0:
            raise DomainError(f"non-integer power {t} of negative base {base}")
        return base ** float(t)
    base = ctx.num(base)
    if n is not None:
        if base == 0 and n < 0:
            raise DomainError("0 raised to a negative power")
        return base**n
    if base < 0:
        raise DomainError(f"non-integer power {t} of negative base {base}")
    warnings.warn(f"q-power with non-integer exponent {t} is not exact", InexactWarning, stacklevel=3)
    t = ctx.num(t)
    with mpmath.workdps(_EXACT_POW_DPS):
        value = mpmath.power(mpmath.mpf(base.numerator) / base.denominator,
                             mpmath.mpf(t.numerator) / t.denominator)
        man, exp = value.man_exp
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def make_context(q, mode: Mode | str = Mode.FLOAT, trunc: TruncationPolicy | None = None,
                 **overrides) -> QContext:
    """Build a validated :class:`QContext`.

    ``overrides`` are applied on top of ``trunc`` (or the mode's default
    policy), e.g. ``make_context(0.3, product_terms=200)``.

    >>> make_context("1/2", "exact").q
    Fraction(1, 2)
    """
    mode = Mode(mode)
    if mode is Mode.EXACT:
        if isinstance(q, str):
            q = parse_rational(q)
        elif isinstance(q, Rational) and not isinstance(q, bool):
            q = Fraction(q)
        else:
            raise ModeError(f"exact mode needs q as a ratio of integers, got {q!r}")
    else:
        if isinstance(q, str):
            q = float(parse_rational(q)) if "/" in q else float(q)
        q = float(q)
    if trunc is None:
        trunc = EXACT_DEFAULT_POLICY if mode is Mode.EXACT else TruncationPolicy()
    if overrides:
        trunc = dataclasses.replace(trunc, **overrides)
    return QContext(q=q, mode=mode, trunc=trunc)


def q_number(ctx: QContext, t) -> Number:
    """The q-bracket [t] = (1 - q**t)/(1 - q)."""
    n = as_integer(t)
    if n is not None and n > 0:
        # 1 + q + ... + q**(n-1), without cancellation
        return sum((ctx.power(j) for j in range(n)), ctx.num(0))
    return (1 - ctx.power(t)) / (1 - ctx.q)


def q_factorial(ctx: QContext, n: int) -> Number:
    """[n]! = [1][2]...[n], with [0]! = 1."""
    if as_integer(n) is None or n < 0:
        raise DomainError(f"q_factorial needs a nonnegative integer, got {n!r}")
    result = ctx.num(1)
    for k in range(1, int(n) + 1):
        result *= q_number(ctx, k)
    return result
