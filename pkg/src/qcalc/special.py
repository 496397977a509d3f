"""q-exponentials, q-gamma and q-beta in their integral representations, and K(x; t).

The product form of Gamma_q is the reference; every integral representation
is an independent validation surface built on the Jackson sums in
:mod:`qcalc.calculus`.

The two integrals built on e_q (``little_gamma``, ``little_beta``) depend on
the lattice parameter A.  Multiplying by the q-constant ``k_function(A, t)``
removes that dependence::

    K(A; t) * little_gamma(t, A)   == Gamma_q(t)
    K(A; t) * little_beta(t, s, A) == B_q(t, s)
"""

from __future__ import annotations

import dataclasses
import enum

from qcalc.calculus import IntegralResult, jackson_improper, jackson_integral
from qcalc.context import Number, QContext, as_integer, rpow
from qcalc.errors import DomainError, PoleError
from qcalc.pochhammer import poch_inf, poch_real, power_over_poch


class Representation(str, enum.Enum):
    PRODUCT = "product"
    BIG_INTEGRAL = "big_integral"
    LITTLE_INTEGRAL_WITH_K = "little_integral_with_k"
    GAMMA_RATIO = "gamma_ratio"
    SYMMETRIC_INTEGRAL = "symmetric_integral"
    EULER_TYPE_WITH_K = "euler_type_with_k"


@dataclasses.dataclass(frozen=True)
class GammaBetaValue:
    value: Number
    representation: Representation
    A_used: Number | None = None
    meta: dict = dataclasses.field(default_factory=dict)

    def __float__(self) -> float:
        return float(self.value)


@dataclasses.dataclass(frozen=True)
class KValue:
    x: Number
    t: Number
    value: Number

    def __float__(self) -> float:
        return float(self.value)


def _positive(name: str, *values) -> None:
    for v in values:
        if not v > 0:
            raise DomainError(f"{name} needs positive arguments, got {v}")


# -- q-exponentials ---------------------------------------------------------

def e_q(ctx: QContext, x) -> Number:
    """e_q^x = 1 / (1 - (1-q) x)_q^oo; poles at x = q**-n / (1-q), n >= 0."""
    x = ctx.num(x)
    try:
        product = poch_inf(ctx, -(1 - ctx.q) * x, as_denominator=True)
    except PoleError as exc:
        raise PoleError(f"e_q has a pole at x = {x}") from exc
    return 1 / product.value


def E_q(ctx: QContext, x) -> Number:
    """E_q^x = (1 + (1-q) x)_q^oo, an entire function of x."""
    return poch_inf(ctx, (1 - ctx.q) * ctx.num(x)).value


def e_q_series(ctx: QContext, x, terms: int | None = None) -> Number:
    """sum x**n / [n]!; converges only for |x| < 1/(1-q)."""
    x = ctx.num(x)
    if not abs(x) < 1 / (1 - ctx.q):
        raise DomainError("the e_q series diverges for |x| >= 1/(1-q)")
    return _exp_series(ctx, x, terms, quadratic=False)


def E_q_series(ctx: QContext, x, terms: int | None = None) -> Number:
    """sum q**(n(n-1)/2) x**n / [n]!, convergent for every x."""
    return _exp_series(ctx, ctx.num(x), terms, quadratic=True)


def _exp_series(ctx, x, terms, quadratic):
    terms = ctx.trunc.series_terms if terms is None else terms
    total = term = ctx.num(1)
    for n in range(1, terms):
        # ratio of consecutive terms: x / [n], times q**(n-1) for E_q
        term = term * x * (1 - ctx.q) / (1 - ctx.power(n))
        if quadratic:
            term *= ctx.power(n - 1)
        total += term
        if not ctx.exact and term == 0:
            break
    return total


# -- q-gamma ----------------------------------------------------------------

def gamma_q_product(ctx: QContext, t) -> Number:
    """Gamma_q(t) = (1-q)_q^{t-1} / (1-q)**(t-1)."""
    _positive("gamma_q", t)
    return poch_real(ctx, -ctx.q, t - 1) / rpow(ctx, 1 - ctx.q, t - 1)


def _big_gamma_integral(ctx: QContext, t) -> IntegralResult:
    _positive("gamma_q", t)
    q = ctx.q

    def f(x):
        return rpow(ctx, x, t - 1) * poch_inf(ctx, -q * (1 - q) * x).value

    return jackson_integral(ctx, f, 1 / (1 - q))


def gamma_q_bigE_integral(ctx: QContext, t) -> Number:
    """int_0^{1/(1-q)} x**(t-1) E_q^{-q x} d_q x."""
    return _big_gamma_integral(ctx, t).value


def _little_gamma(ctx: QContext, t, A) -> IntegralResult:
    _positive("little_gamma", t, A)
    q = ctx.q

    def f(x):
        return rpow(ctx, x, t - 1) / poch_inf(ctx, (1 - q) * x).value

    return jackson_improper(ctx, f, ctx.num(A) * (1 - q))


def little_gamma(ctx: QContext, t, A) -> Number:
    """int_0^{oo/(A(1-q))} x**(t-1) e_q^{-x} d_q x; depends on A unless t is an integer."""
    return _little_gamma(ctx, t, A).value


# -- q-beta -----------------------------------------------------------------

def _beta_integral(ctx: QContext, t, s) -> IntegralResult:
    _positive("beta_q", t, s)
    q = ctx.q

    def f(x):
        return rpow(ctx, x, t - 1) * poch_real(ctx, -q * x, s - 1)

    return jackson_integral(ctx, f, 1)


def beta_q_integral(ctx: QContext, t, s) -> Number:
    """int_0^1 x**(t-1) (1 - q x)_q^{s-1} d_q x."""
    return _beta_integral(ctx, t, s).value


def beta_q_gamma_ratio(ctx: QContext, t, s) -> Number:
    """Gamma_q(t) Gamma_q(s) / Gamma_q(t + s)."""
    _positive("beta_q", t, s)
    return gamma_q_product(ctx, t) * gamma_q_product(ctx, s) / gamma_q_product(ctx, t + s)


def _little_beta(ctx: QContext, t, s, A) -> IntegralResult:
    _positive("little_beta", t, s, A)

    def f(x):
        return power_over_poch(ctx, x, t - 1, x, t + s)

    return jackson_improper(ctx, f, A)


def little_beta(ctx: QContext, t, s, A) -> Number:
    """int_0^{oo/A} x**(t-1) / (1+x)_q^{t+s} d_q x."""
    return _little_beta(ctx, t, s, A).value


def _symmetric_integral(ctx: QContext, t, s, alpha) -> IntegralResult:
    _positive("beta_q_symmetric_integral", t, s, alpha)
    q = ctx.q

    def f(y):
        return 1 / (y * poch_real(ctx, q / y, t) * poch_real(ctx, y, s))

    return jackson_improper(ctx, f, alpha)


def beta_q_symmetric_integral(ctx: QContext, t, s, alpha) -> Number:
    """int_0^{oo/alpha} d_q y / (y (1 + q/y)_q^t (1 + y)_q^s), equal to B_q(t, s) for all alpha."""
    return _symmetric_integral(ctx, t, s, alpha).value


# -- the q-constant K -------------------------------------------------------

def k_function(ctx: QContext, x, t) -> KValue:
    """K(x; t) = x**t / (1+x) * (1 + 1/x)_q^t * (1+x)_q^{1-t}."""
    x = ctx.num(x)
    if not x > 0:
        raise DomainError(f"K(x; t) needs x > 0, got {x}")
    value = rpow(ctx, x, t) / (1 + x) * poch_real(ctx, 1 / x, t) * poch_real(ctx, x, 1 - t)
    return KValue(x, t, value)


def jackson_factor(ctx: QContext, t) -> Number:
    """q**(t(t-1)/2), the value of K(x; t) for integer t."""
    n = as_integer(t)
    if n is not None:
        return ctx.power(n * (n - 1) // 2)
    return ctx.power(ctx.num(t) * (ctx.num(t) - 1) / 2)


# -- dispatchers ------------------------------------------------------------

def gamma_q(ctx: QContext, t, representation: Representation | str = Representation.PRODUCT,
            A=1) -> GammaBetaValue:
    """Gamma_q(t) through one of its representations.

    ``product``, ``big_integral`` or ``little_integral_with_k`` (which uses
    the lattice parameter ``A``).
    """
    rep = Representation(representation)
    if rep is Representation.PRODUCT:
        return GammaBetaValue(gamma_q_product(ctx, t), rep)
    if rep is Representation.BIG_INTEGRAL:
        res = _big_gamma_integral(ctx, t)
        return GammaBetaValue(res.value, rep, meta=res.meta())
    if rep is Representation.LITTLE_INTEGRAL_WITH_K:
        res = _little_gamma(ctx, t, A)
        value = k_function(ctx, A, t).value * res.value
        return GammaBetaValue(value, rep, ctx.num(A), res.meta())
    raise DomainError(f"{rep.value} is not a representation of Gamma_q")


def beta_q(ctx: QContext, t, s, representation: Representation | str = Representation.GAMMA_RATIO,
           A=1) -> GammaBetaValue:
    """B_q(t, s) through ``gamma_ratio``, ``big_integral``, ``euler_type_with_k``
    or ``symmetric_integral``; ``A`` is the lattice parameter of the last two."""
    rep = Representation(representation)
    if rep is Representation.GAMMA_RATIO:
        return GammaBetaValue(beta_q_gamma_ratio(ctx, t, s), rep)
    if rep is Representation.BIG_INTEGRAL:
        res = _beta_integral(ctx, t, s)
        return GammaBetaValue(res.value, rep, meta=res.meta())
    if rep is Representation.EULER_TYPE_WITH_K:
        res = _little_beta(ctx, t, s, A)
        value = k_function(ctx, A, t).value * res.value
        return GammaBetaValue(value, rep, ctx.num(A), res.meta())
    if rep is Representation.SYMMETRIC_INTEGRAL:
        res = _symmetric_integral(ctx, t, s, A)
        return GammaBetaValue(res.value, rep, ctx.num(A), res.meta())
    raise DomainError(f"{rep.value} is not a representation of B_q")


GAMMA_REPRESENTATIONS = (Representation.PRODUCT, Representation.BIG_INTEGRAL,
                         Representation.LITTLE_INTEGRAL_WITH_K)
BETA_REPRESENTATIONS = (Representation.GAMMA_RATIO, Representation.BIG_INTEGRAL,
                        Representation.EULER_TYPE_WITH_K, Representation.SYMMETRIC_INTEGRAL)

