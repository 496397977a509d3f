"""q-derivative and Jackson integrals (definite, interval, improper).

Functions passed in are plain callables evaluated only on the geometric
lattice the integral needs.  :class:`QPolynomial` is the one structured
integrand: exact mode integrates it in closed form, since a truncated
Jackson sum of a polynomial is never exact.
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Sequence

from qcalc.context import Number, QContext, as_integer, q_number, rpow
from qcalc.errors import DomainError
from qcalc.summation import SumResult, bilateral_sum, directional_sum

RealFunction = Callable[[Number], Number]


@dataclasses.dataclass(frozen=True)
class IntegralResult:
    value: Number
    terms_used: int
    lower_tail_est: float
    upper_tail_est: float = 0.0
    A: Number | None = None
    correction: float = 0.0
    diverged: bool = False

    def __float__(self) -> float:
        return float(self.value)

    def meta(self) -> dict:
        return {
            "terms_used": self.terms_used,
            "lower_tail_est": self.lower_tail_est,
            "upper_tail_est": self.upper_tail_est,
            "extrapolated": self.correction,
            "diverged": self.diverged,
        }


@dataclasses.dataclass(frozen=True, init=False)
class QPolynomial:
    """Polynomial c0 + c1 x + ... with coefficients in the context's number type."""

    coeffs: tuple

    def __init__(self, coeffs: Sequence):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs) or (0,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return QPolynomial([x + y for x, y in zip(a, b)])

    def __neg__(self) -> "QPolynomial":
        return QPolynomial([-c for c in self.coeffs])

    def __sub__(self, other: "QPolynomial") -> "QPolynomial":
        return self + (-other)

    def __mul__(self, other: "QPolynomial") -> "QPolynomial":
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return QPolynomial(out)

    def scaled(self, c) -> "QPolynomial":
        """The polynomial x -> p(c x)."""
        return QPolynomial([a * c**k for k, a in enumerate(self.coeffs)])

    def q_derivative(self, ctx: QContext) -> "QPolynomial":
        return QPolynomial([q_number(ctx, k) * a for k, a in enumerate(self.coeffs)][1:] or [0])

    def jackson_antiderivative(self, ctx: QContext) -> "QPolynomial":
        """The antiderivative F with D_q F = p and F(0) = 0."""
        return QPolynomial([0] + [a / q_number(ctx, k + 1) for k, a in enumerate(self.coeffs)])


def q_derivative(ctx: QContext, f: RealFunction, x) -> Number:
    """(f(qx) - f(x)) / ((q - 1) x)."""
    x = ctx.num(x)
    if x == 0:
        raise DomainError("the q-derivative difference quotient is undefined at x = 0")
    return (f(ctx.q * x) - f(x)) / ((ctx.q - 1) * x)


def _result_from_sum(part: SumResult, **extra) -> IntegralResult:
    return IntegralResult(part.value, part.terms_used, part.tail_est, correction=part.correction,
                          diverged=part.diverged, **extra)


def jackson_integral(ctx: QContext, f: RealFunction, a) -> IntegralResult:
    """(1 - q) * sum_{n >= 0} q**n a f(q**n a), truncated at ``series_terms``."""
    a = ctx.num(a)
    if a <= 0:
        raise DomainError(f"Jackson integral upper limit must be positive, got {a}")
    if ctx.exact and isinstance(f, QPolynomial):
        F = f.jackson_antiderivative(ctx)
        return IntegralResult(F(a) - F(0 * a), len(f.coeffs), 0.0)
    scale = (1 - ctx.q) * a

    def term(n):
        x = ctx.power(n) * a
        return scale * ctx.power(n) * f(x)

    return _result_from_sum(directional_sum(ctx, term, 0, 1, ctx.trunc.series_terms))


def jackson_interval(ctx: QContext, f: RealFunction, a, b) -> Number:
    """int_a^b f d_q x = int_0^b - int_0^a  (``a = 0`` allowed)."""
    a, b = ctx.num(a), ctx.num(b)
    if a < 0 or b <= 0:
        raise DomainError("Jackson interval endpoints must be positive")
    lower = jackson_integral(ctx, f, a).value if a else 0
    return jackson_integral(ctx, f, b).value - lower


def jackson_improper(ctx: QContext, f: RealFunction, A) -> IntegralResult:
    """int_0^{oo/A} f d_q x = (1 - q) * sum_{n in Z} (q**n / A) f(q**n / A).

    The value may depend on ``A``; the result records it.  ``lower_tail_est``
    refers to the x -> 0 end (n -> +oo), ``upper_tail_est`` to x -> oo.
    """
    A = ctx.num(A)
    if A <= 0:
        raise DomainError(f"improper Jackson integral needs A > 0, got {A}")
    weight = (1 - ctx.q)

    def term(n):
        x = ctx.power(n) / A
        return weight * x * f(x)

    total = bilateral_sum(ctx, term)
    pos, neg = total.positive, total.negative
    return IntegralResult(total.value, total.terms_used, pos.tail_est, neg.tail_est, A,
                          pos.correction + neg.correction, total.diverged)


def jackson_upper(ctx: QContext, f: RealFunction, a) -> IntegralResult:
    """int_a^{oo/(1/a)} f d_q x = (1 - q) * sum_{m >= 1} (a q**-m) f(a q**-m).

    This is the improper integral over the lattice through ``a`` minus the
    Jackson integral from 0 to ``a``, computed without touching x <= a.
    """
    a = ctx.num(a)
    if a <= 0:
        raise DomainError(f"lower limit must be positive, got {a}")
    weight = (1 - ctx.q)

    def term(m):
        x = a * ctx.power(-m)
        return weight * x * f(x)

    part = directional_sum(ctx, term, 1, 1, ctx.trunc.bilateral_window)
    return IntegralResult(part.value, part.terms_used, 0.0, part.tail_est, 1 / a,
                          part.correction, part.diverged)


@dataclasses.dataclass(frozen=True)
class PairedValues:
    """Two evaluations that a transformation rule says must agree."""

    lhs: Number
    rhs: Number
    lhs_meta: dict = dataclasses.field(default_factory=dict)
    rhs_meta: dict = dataclasses.field(default_factory=dict)

    @property
    def residual(self) -> float:
        scale = max(abs(float(self.lhs)), abs(float(self.rhs)))
        diff = abs(float(self.lhs - self.rhs))
        return diff / scale if scale else diff


def _reflected(f: RealFunction) -> RealFunction:
    return lambda x: f(1 / x) / (x * x)


def reciprocity_transform(ctx: QContext, f: RealFunction, A, kind: str = "improper") -> PairedValues:
    """Both sides of a reciprocity relation.

    ``kind="improper"``: int_0^{oo/A} f  vs  int_0^{oo*A} x**-2 f(1/x).
    ``kind="finite"``:   int_0^A f       vs  int_{q/A}^{oo/A} x**-2 f(1/x).
    """
    A = ctx.num(A)
    g = _reflected(f)
    if kind == "improper":
        lhs = jackson_improper(ctx, f, A)
        rhs = jackson_improper(ctx, g, 1 / A)
    elif kind == "finite":
        lhs = jackson_integral(ctx, f, A)
        rhs = jackson_upper(ctx, g, ctx.q / A)
    else:
        raise DomainError(f"unknown reciprocity kind {kind!r}")
    return PairedValues(lhs.value, rhs.value, lhs.meta(), rhs.meta())


def change_of_variable(ctx: QContext, f: RealFunction, u_alpha, u_beta, a, b) -> PairedValues:
    """Both sides of the substitution u(x) = alpha x**beta.

    Left: int_{u(a)}^{u(b)} f(u) d_q u.  Right: the integral over [a, b] of
    f(u(x)) D_{p} u(x) d_{p} x taken in base p = q**(1/beta).
    """
    if u_beta == 0:
        raise DomainError("u(x) = alpha x**beta needs beta != 0")
    if u_beta < 0:
        raise DomainError("beta < 0 gives base q**(1/beta) > 1; use reciprocity_transform")
    if u_alpha <= 0:
        raise DomainError("u(x) must map positive x to positive values (alpha > 0)")
    alpha = ctx.num(u_alpha)
    n = as_integer(u_beta)
    inv_beta = ctx.num(1) / n if n is not None else 1 / ctx.num(u_beta)
    other = ctx.replace(q=rpow(ctx, ctx.q, inv_beta))

    def u(x):
        return alpha * rpow(other, x, u_beta)

    def integrand(x):
        return f(u(x)) * q_derivative(other, u, x)

    ua = u(ctx.num(a)) if a else 0
    lhs = jackson_interval(ctx, f, ua, u(ctx.num(b)))
    rhs = jackson_interval(other, integrand, a, b)
    return PairedValues(lhs, rhs, {"base": str(ctx.q)}, {"base": str(other.q)})


def q_integration_by_parts_check(ctx: QContext, f: RealFunction, g: RealFunction, a,
                                 rtol: float = 1e-10) -> bool:
    """Check int_0^a g D_q f = [f g]_0^a - int_0^a f(qx) D_q g.

    Two polynomials are handled symbolically (exact in exact mode); other
    callables go through truncated Jackson sums.
    """
    a = ctx.num(a)
    zero = 0 * a
    if isinstance(f, QPolynomial) and isinstance(g, QPolynomial):
        left_integrand = g * f.q_derivative(ctx)
        right_integrand = f.scaled(ctx.q) * g.q_derivative(ctx)
    else:
        left_integrand = lambda x: g(x) * q_derivative(ctx, f, x)
        right_integrand = lambda x: f(ctx.q * x) * q_derivative(ctx, g, x)
    lhs = jackson_integral(ctx, left_integrand, a).value
    rhs = f(a) * g(a) - f(zero) * g(zero) - jackson_integral(ctx, right_integrand, a).value
    if ctx.exact and isinstance(f, QPolynomial) and isinstance(g, QPolynomial):
        return lhs == rhs
    scale = max(abs(float(lhs)), abs(float(rhs)), abs(float(f(a) * g(a))))
    return abs(float(lhs - rhs)) <= rtol * scale
