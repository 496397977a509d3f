"""Truncated Laurent series in q with exact rational coefficients.

A :class:`QLaurentSeries` knows its coefficients for exponents
``min_order <= k < order_cap`` and nothing at or beyond the cap.  Products
and inverses track precision the way p-adic arithmetic does: multiplying by
a series of negative valuation lowers the cap of the result.

Identity parameters are :class:`Monomial` values ``c * q**k``.  A plain
rational is the monomial with ``k = 0``; giving parameters a q-order is what
makes bilateral sums such as the 1psi1 series well defined as formal series.
"""

from __future__ import annotations

import dataclasses
import re
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from qcalc.errors import NotInvertible, PoleError, SeriesWindowError

DEFAULT_ORDER_CAP = 40


@dataclasses.dataclass(frozen=True, init=False, eq=False)
class QLaurentSeries:
    min_order: int
    coeffs: tuple
    order_cap: int

    def __init__(self, coeffs: Sequence = (), min_order: int = 0, order_cap: int = DEFAULT_ORDER_CAP):
        coeffs = [Fraction(c) for c in coeffs][: max(0, order_cap - min_order)]
        start = 0
        while start < len(coeffs) and coeffs[start] == 0:
            start += 1
        coeffs = coeffs[start:]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "min_order", min_order + start if coeffs else order_cap)
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "order_cap", order_cap)

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, cap: int = DEFAULT_ORDER_CAP) -> "QLaurentSeries":
        return cls((), 0, cap)

    @classmethod
    def monomial(cls, coef, order: int, cap: int = DEFAULT_ORDER_CAP) -> "QLaurentSeries":
        return cls([coef], order, cap)

    @classmethod
    def from_dict(cls, terms: dict, cap: int = DEFAULT_ORDER_CAP) -> "QLaurentSeries":
        if not terms:
            return cls.zero(cap)
        lo = min(terms)
        return cls([terms.get(k, 0) for k in range(lo, max(terms) + 1)], lo, cap)

    # -- inspection ---------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation(self) -> int:
        """Lowest order with a nonzero coefficient (``order_cap`` for the zero series)."""
        return self.min_order

    def __getitem__(self, k: int) -> Fraction:
        if k >= self.order_cap:
            raise IndexError(f"coefficient of q^{k} lies beyond the cap {self.order_cap}")
        i = k - self.min_order
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def items(self) -> Iterable[tuple[int, Fraction]]:
        return ((self.min_order + i, c) for i, c in enumerate(self.coeffs) if c)

    def evaluate(self, q):
        """Sum of the known terms at a numeric q."""
        return sum((c * q**k for k, c in self.items()), 0 * q)

    def truncate(self, cap: int) -> "QLaurentSeries":
        return QLaurentSeries(self.coeffs, self.min_order, min(cap, self.order_cap))

    def to_json(self) -> dict:
        return {"min_order": self.min_order, "order_cap": self.order_cap,
                "coeffs": [str(c) for c in self.coeffs]}

    def __repr__(self) -> str:
        if self.is_zero:
            return f"O(q^{self.order_cap})"
        terms = " + ".join(f"({c})*q^{k}" for k, c in self.items())
        return f"{terms} + O(q^{self.order_cap})"

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "QLaurentSeries":
        other = _coerce(other, self.order_cap)
        cap = min(self.order_cap, other.order_cap)
        terms: dict[int, Fraction] = {}
        for series in (self, other):
            for k, c in series.items():
                if k < cap:
                    terms[k] = terms.get(k, 0) + c
        return QLaurentSeries.from_dict(terms, cap)

    __radd__ = __add__

    def __neg__(self) -> "QLaurentSeries":
        return QLaurentSeries([-c for c in self.coeffs], self.min_order, self.order_cap)

    def __sub__(self, other) -> "QLaurentSeries":
        return self + (-_coerce(other, self.order_cap))

    def __rsub__(self, other) -> "QLaurentSeries":
        return _coerce(other, self.order_cap) - self

    def __mul__(self, other) -> "QLaurentSeries":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return QLaurentSeries.zero(self.order_cap)
            return QLaurentSeries([c * other for c in self.coeffs], self.min_order, self.order_cap)
        cap = min(self.order_cap + other.valuation, other.order_cap + self.valuation)
        lo = self.min_order + other.min_order
        out = [Fraction(0)] * max(0, cap - lo)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                if i + j >= len(out):
                    break
                out[i + j] += a * b
        return QLaurentSeries(out, lo, cap)

    __rmul__ = __mul__

    def shift(self, k: int) -> "QLaurentSeries":
        """Multiply by q**k."""
        return QLaurentSeries(self.coeffs, self.min_order + k, self.order_cap + k)

    def invert(self) -> "QLaurentSeries":
        if self.is_zero:
            raise NotInvertible("cannot invert a series with no nonzero coefficient below the cap")
        v = self.min_order
        rel = self.order_cap - v
        inv = _unit_inverse(list(self.coeffs), rel)
        return QLaurentSeries(inv, -v, -v + rel)

    def __truediv__(self, other) -> "QLaurentSeries":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise NotInvertible("division by zero")
            return self * (Fraction(1) / other)
        return self * other.invert()


def _coerce(value, cap: int) -> QLaurentSeries:
    if isinstance(value, QLaurentSeries):
        return value
    return QLaurentSeries([value], 0, cap)


def _unit_inverse(u: list, rel: int) -> list:
    """Coefficients of 1/u to ``rel`` terms; ``u[0]`` must be nonzero."""
    if not u or u[0] == 0:
        raise NotInvertible("lowest coefficient is zero")
    inv = [Fraction(0)] * rel
    if rel == 0:
        return inv
    inv[0] = 1 / Fraction(u[0])
    for n in range(1, rel):
        acc = Fraction(0)
        for k in range(1, min(n, len(u) - 1) + 1):
            acc += u[k] * inv[n - k]
        inv[n] = -acc * inv[0]
    return inv


def fps_add(a: QLaurentSeries, b: QLaurentSeries) -> QLaurentSeries:
    return a + b


def fps_mul(a: QLaurentSeries, b: QLaurentSeries) -> QLaurentSeries:
    return a * b


def fps_invert(a: QLaurentSeries) -> QLaurentSeries:
    return a.invert()


@dataclasses.dataclass(frozen=True)
class SeriesComparison:
    equal: bool
    cap: int
    order: int | None = None
    lhs_coeff: Fraction | None = None
    rhs_coeff: Fraction | None = None

    def __bool__(self) -> bool:
        return self.equal


def fps_equal(a: QLaurentSeries, b: QLaurentSeries, cap: int | None = None) -> SeriesComparison:
    """Compare coefficients below ``cap`` (default: the smaller of the two caps)."""
    common = min(a.order_cap, b.order_cap)
    cap = common if cap is None else min(cap, common)
    lo = min(a.min_order, b.min_order)
    for k in range(lo, cap):
        if a[k] != b[k]:
            return SeriesComparison(False, cap, k, a[k], b[k])
    return SeriesComparison(True, cap)


# -- monomial parameters ----------------------------------------------------

@dataclasses.dataclass(frozen=True)
class Monomial:
    """The parameter ``coef * q**order``."""

    coef: Fraction
    order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coef", Fraction(self.coef))

    def value_at(self, q):
        return self.coef * q**self.order if self.coef else 0 * q

    def __mul__(self, other: "Monomial") -> "Monomial":
        other = as_monomial(other)
        return Monomial(self.coef * other.coef, self.order + other.order)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        other = as_monomial(other)
        if other.coef == 0:
            raise PoleError("division by a zero parameter")
        return Monomial(self.coef / other.coef, self.order - other.order)

    def __neg__(self) -> "Monomial":
        return Monomial(-self.coef, self.order)

    def __str__(self) -> str:
        if self.order == 0:
            return str(self.coef)
        return f"{self.coef}*q^{self.order}"


_MONO_RE = re.compile(r"^\s*(?P<coef>[+-]?\d+(?:/\d+)?)?\s*(?P<star>\*)?\s*(?P<q>q(?:\^\(?(?P<k>[+-]?\d+)\)?)?)?\s*$")


def parse_monomial(text: str) -> Monomial:
    """Parse ``"2/3"``, ``"-1/2*q^3"``, ``"q"``, ``"-q^2"`` or ``"q^-1"``."""
    text = text.strip()
    negate = False
    if re.match(r"^-\s*q", text):
        negate, text = True, text.lstrip("-").strip()
    m = _MONO_RE.match(text)
    if not m or not (m.group("coef") or m.group("q")) or (m.group("star") and not (m.group("coef") and m.group("q"))):
        raise ValueError(f"not a monomial c*q^k: {text!r}")
    coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
    order = 0
    if m.group("q"):
        order = int(m.group("k")) if m.group("k") else 1
    return Monomial(-coef if negate else coef, order)


def as_monomial(value) -> Monomial:
    if isinstance(value, Monomial):
        return value
    if isinstance(value, str):
        return parse_monomial(value)
    if isinstance(value, float):
        raise TypeError("exact series parameters must be rational, not float")
    return Monomial(Fraction(value), 0)


# -- products of binomial factors -------------------------------------------

def _binomial(u: Fraction, a: int, w: Fraction, b: int):
    """Normalise u q^a + w q^b into (const, valuation, unit-tail) or None if zero.

    The unit-tail ``(d, e)`` with ``e > 0`` stands for ``1 + d q^e``.
    """
    if u == 0 and w == 0:
        return None
    if u == 0:
        return w, b, None
    if w == 0:
        return u, a, None
    if a == b:
        return (None if u + w == 0 else (u + w, a, None))
    if a > b:
        u, a, w, b = w, b, u, a
    return u, a, (w / u, b - a)


@dataclasses.dataclass
class FactorProduct:
    """coef q^shift * prod (u q^a + w q^b)^p * prod (1 - c q^e)_q^oo^p  with p = +-1."""

    coef: Fraction = Fraction(1)
    shift: int = 0
    factors: list = dataclasses.field(default_factory=list)
    infinite: list = dataclasses.field(default_factory=list)

    def times(self, mono: Monomial, power: int = 1) -> "FactorProduct":
        mono = as_monomial(mono)
        if power >= 0:
            self.coef *= mono.coef**power
        else:
            if mono.coef == 0:
                raise PoleError("zero monomial in a denominator")
            self.coef /= mono.coef**(-power)
        self.shift += mono.order * power
        return self

    def binom(self, u, a, w, b, power: int = 1) -> "FactorProduct":
        self.factors.append((Fraction(u), a, Fraction(w), b, power))
        return self

    def one_minus(self, x: Monomial, power: int = 1) -> "FactorProduct":
        """Multiply by (1 - x)**power."""
        x = as_monomial(x)
        return self.binom(1, 0, -x.coef, x.order, power)

    def poch_inf(self, x: Monomial, power: int = 1) -> "FactorProduct":
        """Multiply by ((1 - x)_q^oo)**power = prod_j (1 - x q^j)**power."""
        x = as_monomial(x)
        if x.coef != 0:
            self.infinite.append((x.coef, x.order, power))
        return self

    def _expanded(self, rel: int):
        yield from self.factors
        for c, e, p in self.infinite:
            for j in range(max(0, rel - e)):
                yield (Fraction(1), 0, -c, e + j, p)

    def _inf_valuation(self, c, e, p):
        v = 0
        for j in range(max(0, -e + 1)):
            if e + j < 0:
                v += e + j
            elif c == 1:
                if p < 0:
                    raise PoleError(f"(1 - {c} q^{e})_q^oo in a denominator vanishes")
                return None
        return v * p

    def valuation(self) -> int | None:
        """Exact valuation of the product, or None if it is identically zero."""
        if self.coef == 0:
            return None
        v = self.shift
        for u, a, w, b, p in self.factors:
            norm = _binomial(u, a, w, b)
            if norm is None:
                if p < 0:
                    raise PoleError("a denominator factor vanishes identically")
                return None
            v += norm[1] * p
        for c, e, p in self.infinite:
            inf_v = self._inf_valuation(c, e, p)
            if inf_v is None:
                return None
            v += inf_v
        return v

    def series(self, cap: int) -> QLaurentSeries:
        v = self.valuation()
        if v is None or v >= cap:
            return QLaurentSeries.zero(cap)
        rel = cap - v
        const = self.coef
        unit = [Fraction(1)] + [Fraction(0)] * (rel - 1)
        for u, a, w, b, p in self._expanded(rel):
            k, _, tail = _binomial(u, a, w, b)
            const = const * k if p > 0 else const / k
            if tail is None or tail[1] >= rel:
                continue
            d, e = tail
            if p > 0:
                for i in range(rel - 1, e - 1, -1):
                    unit[i] += d * unit[i - e]
            else:
                for i in range(e, rel):
                    unit[i] -= d * unit[i - e]
        return QLaurentSeries([const * c for c in unit], v, cap)


def fps_poch_inf(x, cap: int = DEFAULT_ORDER_CAP) -> QLaurentSeries:
    """prod_{j >= 0} (1 - q**j x) as a series in q; ``x`` rational or a Monomial."""
    return FactorProduct().poch_inf(as_monomial(x)).series(cap)


def fps_theta_sum(x, cap: int = DEFAULT_ORDER_CAP) -> QLaurentSeries:
    """sum_{n in Z} (-1)**n q**(n(n-1)/2) x**n, summed directly."""
    x = as_monomial(x)
    if x.coef == 0:
        raise PoleError("the theta sum needs x != 0")
    k = x.order
    bound = 2 * abs(k) + int((2 * cap) ** 0.5) + 3
    terms: dict[int, Fraction] = {}
    for n in range(-bound, bound + 1):
        order = n * (n - 1) // 2 + k * n
        if order < cap:
            terms[order] = terms.get(order, 0) + (-1) ** (n % 2) * x.coef**n
    return QLaurentSeries.from_dict(terms, cap)


def exact_bilateral_sum(term: Callable[[int], FactorProduct], cap: int, saturation: int,
                        max_terms: int = 10_000) -> tuple[QLaurentSeries, dict]:
    """Sum the series of ``term(n)`` over every n contributing below ``cap``.

    ``saturation`` bounds |n| past which the per-step change in valuation is
    nondecreasing.  Beyond it a direction stops once the valuation exceeds
    the cap and is still growing, or the terms vanish identically; a
    non-positive, non-growing step raises :class:`SeriesWindowError`.
    """
    total = QLaurentSeries.zero(cap)
    window: dict[str, int] = {}
    for label, start, step in (("pos", 0, 1), ("neg", -1, -1)):
        n, prev_v, prev_delta, last_used = start, None, None, None
        for _ in range(max_terms):
            product = term(n)
            v = product.valuation()
            if v is not None and v < cap:
                total = total + product.series(cap)
                last_used = n
            beyond = abs(n) > saturation
            delta = None if v is None or prev_v is None else v - prev_v
            if beyond:
                if v is None:
                    break
                if v >= cap and delta is not None and delta >= 1:
                    break
                if delta is not None and prev_delta is not None and delta <= 0 and delta <= prev_delta:
                    raise SeriesWindowError(
                        f"bilateral terms stop gaining q-order at n={n} (step {delta}); "
                        "the sum is not a formal Laurent series for these parameters")
            prev_v, prev_delta = v, delta
            n += step
        else:
            raise SeriesWindowError(f"no window bound found within {max_terms} terms")
        window[label] = last_used if last_used is not None else 0
    return total, window
