"""Two-sided checks of bilateral q-series identities.

Every verifier evaluates the two sides independently and returns an
:class:`IdentityReport`.  The float backend sums bilateral series over the
context's window; the exact backend expands both sides as truncated Laurent
series in q with the parameters given as monomials ``c * q**k``.

Notation: ``(1-a)_n`` is ``prod_{j<n} (1 - q**j a)`` and ``(1-a)_oo`` the
corresponding infinite product.

* Jacobi triple product:
  ``(1-q)_oo (1-x)_oo (1-q/x)_oo = sum_n (-1)**n q**(n(n-1)/2) x**n``
* its one-parameter family (A >= 0):
  ``(1-q)_oo (1-x)_oo (1-q/x)_oo = (1+qA)_oo (1+Ax)_oo sum_n (-x)**n (A+1)_n``
  where ``(A+1)_n = prod_{j<n} (A + q**j)``, which is ``q**(n(n-1)/2)`` at A = 0
* Ramanujan's 1psi1 sum:
  ``sum_n (1-a)_n/(1-b)_n x**n
  = (q)(b/a)(ax)(q/ax) / ((b)(q/a)(x)(b/ax))``  (all ``(1-.)_oo``)
* the symmetric bilateral identity:
  ``sum_n (1-a)_n (1-q/a)_{-n} / ((1-b)_n (1-c)_{-n})
  = (a)(q/a)(q)(bc/q) / ((b)(c)(b/a)(ac/q))``
"""

from __future__ import annotations

import dataclasses
import enum
import math
from fractions import Fraction
from typing import Callable

from qcalc.calculus import jackson_improper, jackson_upper
from qcalc.context import POLE_TOL, QContext, make_context, rpow
from qcalc.errors import DomainError, ModeError, PoleError
from qcalc.fps import (DEFAULT_ORDER_CAP, FactorProduct, Monomial, QLaurentSeries, as_monomial,
                       exact_bilateral_sum, fps_equal, fps_theta_sum)
from qcalc.pochhammer import poch_inf, poch_real, power_over_poch
from qcalc.special import (BETA_REPRESENTATIONS, GAMMA_REPRESENTATIONS, Representation, beta_q,
                           gamma_q, k_function)
from qcalc.summation import BilateralSum, bilateral_sum

DEFAULT_TOL = 1e-10
#: a truncated sum is trusted only if its first discarded term is this small (relative)
TAIL_TOL = 1e-12
#: below this fraction of the absolute term mass a side counts as numerically zero
ZERO_SIDE = 1e-13


class IdentityId(str, enum.Enum):
    JACOBI_CLASSICAL = "jacobi"
    JACOBI_FAMILY = "jacobi-family"
    RAMANUJAN = "ramanujan"
    SYMMETRIC_BILATERAL = "symmetric"
    TRANSLATION_INVARIANCE = "translation"
    GAMMA_REPRESENTATIONS = "gamma-reps"
    BETA_REPRESENTATIONS = "beta-reps"


class Backend(str, enum.Enum):
    FLOAT = "float"
    EXACT = "exact"


@dataclasses.dataclass(frozen=True)
class IdentityReport:
    identity_id: IdentityId
    params: dict
    lhs: object
    rhs: object
    backend: Backend
    error: float | int | None
    passed: bool
    trunc_meta: dict = dataclasses.field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def as_row(self) -> dict:
        def show(v):
            if isinstance(v, QLaurentSeries):
                return repr(v)
            return v if isinstance(v, (int, float, str)) or v is None else str(v)

        return {
            "identity": self.identity_id.value,
            "backend": self.backend.value,
            **{k: str(v) for k, v in self.params.items()},
            "lhs": show(self.lhs),
            "rhs": show(self.rhs),
            "error": self.error,
            "status": "pass" if self.passed else "fail",
        }


# -- shared helpers ----------------------------------------------------------

def relative_error(lhs: float, rhs: float, abs_scale: float = 0.0) -> float:
    """|lhs - rhs| / max(|lhs|, |rhs|), falling back to ``abs_scale`` when both sides vanish."""
    denom = max(abs(lhs), abs(rhs))
    if denom <= ZERO_SIDE * abs_scale:
        denom = abs_scale
    diff = abs(lhs - rhs)
    return diff / denom if denom else diff


def _float_ctx(ctx: QContext) -> QContext:
    return make_context(float(ctx.q)) if ctx.exact else ctx


def _real(ctx: QContext, value) -> float:
    if isinstance(value, (str, Monomial)):
        return float(as_monomial(value).value_at(Fraction(ctx.q)))
    return float(value)


def _exact_param(value) -> Monomial:
    try:
        return as_monomial(value)
    except TypeError as exc:
        raise ModeError(f"exact backend needs rational or monomial parameters, got {value!r}") from exc


def _den_inf(ctx: QContext, x: float) -> float:
    """(1 - x)_oo for a denominator, screened for vanishing factors."""
    return poch_inf(ctx, -x, as_denominator=True).value


def _num_inf(ctx: QContext, x: float) -> float:
    return poch_inf(ctx, -x).value


def _recurrence_sum(ctx: QContext, first: float, up: Callable[[int], tuple], down: Callable[[int], tuple],
                    window: int | None = None) -> BilateralSum:
    """Bilateral sum with term(0) = ``first`` and ratios given as (num, den) pairs.

    ``up(n)`` gives term(n+1)/term(n) and ``down(m)`` gives term(-m-1)/term(-m).
    Building terms by ratios avoids overflowing intermediate products.
    """
    window = ctx.trunc.bilateral_window if window is None else window
    table = {0: first}
    value = first
    for n in range(0, window + 1):
        value = value * _ratio(up(n))
        table[n + 1] = value
    value = first
    for m in range(0, window + 1):
        value = value * _ratio(down(m))
        table[-m - 1] = value
    return bilateral_sum(ctx, table.__getitem__, window)


def _ratio(pair: tuple) -> float:
    num, den = pair
    if abs(den) < POLE_TOL:
        raise PoleError("a bilateral term has a vanishing denominator factor")
    return num / den


def _float_report(identity, params, lhs, rhs, abs_scale, sums, tol, extra=None, *,
                  series_side: float) -> IdentityReport:
    """``series_side`` is the side carrying the bilateral sum; its condition
    number ``abs_scale / |series_side|`` bounds the attainable relative accuracy."""
    err = relative_error(lhs, rhs, abs_scale)
    scale = max(abs(lhs), abs(rhs), abs_scale)
    tails = [max(s.positive.tail_est if not s.positive.correction else 0.0,
                 s.negative.tail_est if not s.negative.correction else 0.0) for s in sums]
    tail_ok = all(t <= TAIL_TOL * scale for t in tails)
    diverged = any(s.diverged for s in sums)
    condition = abs_scale / abs(series_side) if series_side else math.inf
    meta = {"window": [s.window for s in sums], "tails": tails, "tail_ok": tail_ok,
            "diverged": diverged, "condition": condition, **(extra or {})}
    if sums:
        meta["sum"] = sums[0].meta()
    passed = math.isfinite(err) and err <= tol and tail_ok and not diverged
    return IdentityReport(identity, params, lhs, rhs, Backend.FLOAT, err, passed, meta)


def _series_at(build: Callable[[int], QLaurentSeries], cap: int) -> QLaurentSeries:
    """Evaluate ``build`` at a working cap high enough that the result is known below ``cap``."""
    work = cap
    for _ in range(8):
        series = build(work)
        if series.order_cap >= cap:
            return series.truncate(cap)
        work += cap - series.order_cap + 1
    raise PoleError("could not reach the requested precision")


def _exact_report(identity, params, lhs: QLaurentSeries, rhs: QLaurentSeries, cap, extra=None) -> IdentityReport:
    cmp = fps_equal(lhs, rhs, cap)
    meta = {"order_cap": cap, **(extra or {})}
    if not cmp:
        meta.update(mismatch_lhs=str(cmp.lhs_coeff), mismatch_rhs=str(cmp.rhs_coeff))
    return IdentityReport(identity, params, lhs, rhs, Backend.EXACT, cmp.order, cmp.equal, meta)


def _saturation(*monomials: Monomial) -> int:
    return max(abs(m.order) for m in monomials) + 2


def _triple_product_series(x: Monomial, cap: int) -> QLaurentSeries:
    q = Monomial(1, 1)
    return _series_at(lambda w: FactorProduct().poch_inf(q).poch_inf(x).poch_inf(q / x).series(w), cap)


# -- Jacobi ------------------------------------------------------------------

def verify_jacobi(ctx: QContext, x, backend: Backend | str = Backend.FLOAT, *,
                  tol: float = DEFAULT_TOL, cap: int = DEFAULT_ORDER_CAP) -> IdentityReport:
    """The Jacobi triple product against its theta series."""
    backend = Backend(backend)
    if backend is Backend.EXACT:
        xm = _exact_param(x)
        if xm.coef == 0:
            raise DomainError("the triple product needs x != 0")
        lhs = _triple_product_series(xm, cap)
        rhs = fps_theta_sum(xm, cap)
        return _exact_report(IdentityId.JACOBI_CLASSICAL, {"x": xm}, lhs, rhs, cap)
    fctx = _float_ctx(ctx)
    xv = _real(fctx, x)
    if xv == 0:
        raise DomainError("the triple product needs x != 0")
    q = fctx.q
    lhs = _num_inf(fctx, q) * _num_inf(fctx, xv) * _num_inf(fctx, q / xv)
    total = _theta_terms(fctx, xv, 0.0)
    return _float_report(IdentityId.JACOBI_CLASSICAL, {"q": q, "x": xv}, lhs, total.value,
                         total.abs_sum, [total], tol, series_side=total.value)


def _theta_terms(ctx: QContext, x: float, A: float) -> BilateralSum:
    """sum_n (-x)**n (A+1)_n; at A = 0 the ratios are those of (-x)**n q**(n(n-1)/2)."""
    q = ctx.q
    if A == 0:
        return _recurrence_sum(ctx, 1.0, lambda n: (-x * q**n, 1.0), lambda m: (-q ** (m + 1), x))
    return _recurrence_sum(ctx, 1.0, lambda n: (-x * (A + q**n), 1.0),
                           lambda m: (1.0, -x * (A + q ** (-m - 1))))


def verify_jacobi_family(ctx: QContext, x, A, backend: Backend | str = Backend.FLOAT, *,
                         tol: float = DEFAULT_TOL, cap: int = DEFAULT_ORDER_CAP) -> IdentityReport:
    """The triple product as (1+qA)_oo (1+Ax)_oo sum_n (-x)**n (A+1)_n for A >= 0."""
    backend = Backend(backend)
    if backend is Backend.EXACT:
        return _jacobi_family_exact(_exact_param(x), _exact_param(A), cap)
    fctx = _float_ctx(ctx)
    xv, Av = _real(fctx, x), _real(fctx, A)
    if xv == 0:
        raise DomainError("the triple product needs x != 0")
    if Av < 0:
        raise DomainError(f"the family is parametrised by A >= 0, got {Av}")
    q = fctx.q
    lhs = _num_inf(fctx, q) * _num_inf(fctx, xv) * _num_inf(fctx, q / xv)
    prefactor = poch_inf(fctx, q * Av).value * poch_inf(fctx, Av * xv).value
    total = _theta_terms(fctx, xv, Av)
    return _float_report(IdentityId.JACOBI_FAMILY, {"q": q, "x": xv, "A": Av}, lhs,
                         prefactor * total.value, abs(prefactor) * total.abs_sum, [total], tol,
                         {"limit_path": Av == 0}, series_side=prefactor * total.value)


def _jacobi_family_exact(x: Monomial, A: Monomial, cap: int) -> IdentityReport:
    if x.coef == 0:
        raise DomainError("the triple product needs x != 0")
    if A.coef < 0:
        raise DomainError("the family is parametrised by A >= 0")
    minus_x = -x

    def term(n: int) -> FactorProduct:
        p = FactorProduct().times(minus_x, n)
        if A.coef == 0:
            return p.times(Monomial(1, n * (n - 1) // 2))
        if n >= 0:
            for j in range(n):
                p.binom(A.coef, A.order, 1, j)
        else:
            for j in range(1, -n + 1):
                p.binom(A.coef, A.order, 1, -j, -1)
        return p

    def rhs(work: int) -> QLaurentSeries:
        total, _ = exact_bilateral_sum(term, work, _saturation(x, A) if A.coef else _saturation(x))
        pre = FactorProduct().poch_inf(-A * Monomial(1, 1)).poch_inf(-A * x)
        return pre.series(work) * total

    lhs = _triple_product_series(x, cap)
    right = _series_at(rhs, cap)
    return _exact_report(IdentityId.JACOBI_FAMILY, {"x": x, "A": A}, lhs, right, cap,
                         {"limit_path": A.coef == 0})


# -- Ramanujan's 1psi1 -------------------------------------------------------

def verify_ramanujan(ctx: QContext, a, b, x, backend: Backend | str = Backend.FLOAT, *,
                     tol: float = DEFAULT_TOL, cap: int = DEFAULT_ORDER_CAP) -> IdentityReport:
    """sum_n (1-a)_n/(1-b)_n x**n against its product evaluation (|b/a| < |x| < 1)."""
    backend = Backend(backend)
    if backend is Backend.EXACT:
        return _ramanujan_exact(_exact_param(a), _exact_param(b), _exact_param(x), cap)
    fctx = _float_ctx(ctx)
    av, bv, xv = (_real(fctx, v) for v in (a, b, x))
    if av == 0 or xv == 0:
        raise DomainError("Ramanujan's sum needs a != 0 and x != 0")
    if bv == av:
        raise PoleError("b = a makes (1 - b/a)_oo vanish and the sum a bilateral geometric series")
    q = fctx.q
    rhs_den = (_den_inf(fctx, bv) * _den_inf(fctx, q / av) * _den_inf(fctx, xv)
               * _den_inf(fctx, bv / (av * xv)))
    rhs_num = (_num_inf(fctx, q) * _num_inf(fctx, bv / av) * _num_inf(fctx, av * xv)
               * _num_inf(fctx, q / (av * xv)))
    total = _recurrence_sum(
        fctx, 1.0,
        lambda n: ((1 - q**n * av) * xv, 1 - q**n * bv),
        lambda m: (1 - q ** (-m - 1) * bv, (1 - q ** (-m - 1) * av) * xv),
    )
    return _float_report(IdentityId.RAMANUJAN, {"q": q, "a": av, "b": bv, "x": xv}, total.value,
                         rhs_num / rhs_den, total.abs_sum, [total], tol, series_side=total.value)


def _check_exact_pair(a: Monomial, b: Monomial) -> None:
    if a.coef == 0:
        raise DomainError("a must be nonzero")
    if a == b:
        raise PoleError("b = a makes (1 - b/a)_oo vanish")


def _ramanujan_exact(a: Monomial, b: Monomial, x: Monomial, cap: int) -> IdentityReport:
    _check_exact_pair(a, b)
    if x.coef == 0:
        raise DomainError("x must be nonzero")
    q = Monomial(1, 1)

    def term(n: int) -> FactorProduct:
        p = FactorProduct().times(x, n)
        if n >= 0:
            for j in range(n):
                p.one_minus(a * Monomial(1, j)).one_minus(b * Monomial(1, j), -1)
        else:
            for j in range(1, -n + 1):
                p.one_minus(b * Monomial(1, -j)).one_minus(a * Monomial(1, -j), -1)
        return p

    def rhs(work: int) -> QLaurentSeries:
        p = FactorProduct()
        for v in (q, b / a, a * x, q / (a * x)):
            p.poch_inf(v)
        for v in (b, q / a, x, b / (a * x)):
            p.poch_inf(v, -1)
        return p.series(work)

    right = _series_at(rhs, cap)
    left, window = exact_bilateral_sum(term, cap, _saturation(a, b, x))
    return _exact_report(IdentityId.RAMANUJAN, {"a": a, "b": b, "x": x}, left, right, cap,
                         {"window": window})


# -- symmetric bilateral identity --------------------------------------------

def verify_symmetric_bilateral(ctx: QContext, a, b, c, backend: Backend | str = Backend.FLOAT, *,
                               tol: float = DEFAULT_TOL, cap: int = DEFAULT_ORDER_CAP) -> IdentityReport:
    """sum_n (1-a)_n (1-q/a)_{-n} / ((1-b)_n (1-c)_{-n}) against its product form.

    The sum converges for |b/a| < 1 and |ac/q| < 1.
    """
    backend = Backend(backend)
    if backend is Backend.EXACT:
        return _symmetric_exact(_exact_param(a), _exact_param(b), _exact_param(c), cap)
    fctx = _float_ctx(ctx)
    av, bv, cv = (_real(fctx, v) for v in (a, b, c))
    if av == 0:
        raise DomainError("a must be nonzero")
    if bv == av:
        raise PoleError("b = a makes (1 - b/a)_oo vanish")
    q = fctx.q
    rhs_den = (_den_inf(fctx, bv) * _den_inf(fctx, cv) * _den_inf(fctx, bv / av)
               * _den_inf(fctx, av * cv / q))
    rhs_num = (_num_inf(fctx, av) * _num_inf(fctx, q / av) * _num_inf(fctx, q)
               * _num_inf(fctx, bv * cv / q))
    total = _recurrence_sum(
        fctx, 1.0,
        lambda n: ((1 - q**n * av) * (1 - q ** (-n - 1) * cv), (1 - q**n * bv) * (1 - q ** (-n) / av)),
        lambda m: ((1 - q ** (-m - 1) * bv) * (1 - q ** (m + 1) / av),
                   (1 - q ** (-m - 1) * av) * (1 - q**m * cv)),
    )
    return _float_report(IdentityId.SYMMETRIC_BILATERAL, {"q": q, "a": av, "b": bv, "c": cv},
                         total.value, rhs_num / rhs_den, total.abs_sum, [total], tol,
                         series_side=total.value)


def _symmetric_exact(a: Monomial, b: Monomial, c: Monomial, cap: int) -> IdentityReport:
    _check_exact_pair(a, b)
    q = Monomial(1, 1)
    inv_a = Monomial(1) / a

    def term(n: int) -> FactorProduct:
        p = FactorProduct()
        if n >= 0:
            for i in range(n):
                p.one_minus(a * Monomial(1, i)).one_minus(b * Monomial(1, i), -1)
                p.one_minus(inv_a * Monomial(1, -i), -1).one_minus(c * Monomial(1, -i - 1))
        else:
            for i in range(-n):
                p.one_minus(b * Monomial(1, -i - 1)).one_minus(a * Monomial(1, -i - 1), -1)
                p.one_minus(inv_a * Monomial(1, i + 1)).one_minus(c * Monomial(1, i), -1)
        return p

    def rhs(work: int) -> QLaurentSeries:
        p = FactorProduct()
        for v in (a, q / a, q, b * c / q):
            p.poch_inf(v)
        for v in (b, c, b / a, a * c / q):
            p.poch_inf(v, -1)
        return p.series(work)

    right = _series_at(rhs, cap)
    left, window = exact_bilateral_sum(term, cap, _saturation(a, b, c))
    return _exact_report(IdentityId.SYMMETRIC_BILATERAL, {"a": a, "b": b, "c": c}, left, right, cap,
                         {"window": window})


# -- translation invariance --------------------------------------------------

def verify_translation_invariance(ctx: QContext, alpha_exp, beta_exp, A, *,
                                  tol: float = DEFAULT_TOL) -> IdentityReport:
    """int_0^{oo/A} x**alpha/(1+x)_q^beta = q**(1-beta)/K(A; alpha) int_1^{oo/1} x**(alpha-beta) (1-1/x)_q^alpha.

    Requires alpha > 0 and beta > alpha + 1.
    """
    fctx = _float_ctx(ctx)
    alpha, beta, Av = float(alpha_exp), float(beta_exp), _real(fctx, A)
    if not alpha > 0 or not beta > alpha + 1:
        raise DomainError(f"translation invariance needs alpha > 0 and beta > alpha + 1, got {alpha}, {beta}")
    if not Av > 0:
        raise DomainError(f"A must be positive, got {Av}")
    lower = jackson_improper(fctx, lambda x: power_over_poch(fctx, x, alpha, x, beta), Av)
    upper = jackson_upper(fctx, lambda x: rpow(fctx, x, alpha - beta) * poch_real(fctx, -1 / x, alpha), 1.0)
    K = k_function(fctx, Av, alpha).value
    rhs = rpow(fctx, fctx.q, 1 - beta) / K * upper.value
    tails_ok = ((lower.lower_tail_est <= TAIL_TOL * abs(lower.value) or lower.correction != 0)
                and (upper.upper_tail_est <= TAIL_TOL * abs(upper.value) or upper.correction != 0))
    err = relative_error(lower.value, rhs)
    meta = {"lhs": lower.meta(), "rhs": upper.meta(), "tail_ok": tails_ok, "K": K}
    passed = err <= tol and tails_ok and not (lower.diverged or upper.diverged)
    return IdentityReport(IdentityId.TRANSLATION_INVARIANCE,
                          {"q": fctx.q, "alpha": alpha, "beta": beta, "A": Av},
                          lower.value, rhs, Backend.FLOAT, err, passed, meta)


# -- cross-representation checks ---------------------------------------------

def _representation_report(identity, params, values: dict, tol) -> IdentityReport:
    ref_key = next(iter(values))
    ref = values[ref_key]
    errors = {k: relative_error(v, ref) for k, v in values.items()}
    worst = max(errors, key=errors.get)
    return IdentityReport(identity, params, ref, values[worst], Backend.FLOAT, errors[worst],
                          errors[worst] <= tol,
                          {"reference": ref_key, "worst": worst, "values": values})


def verify_gamma_representations(ctx: QContext, t, A=1, *, tol: float = DEFAULT_TOL) -> IdentityReport:
    """All representations of Gamma_q(t) against the product form."""
    fctx = _float_ctx(ctx)
    values = {rep.value: float(gamma_q(fctx, t, rep, A).value) for rep in GAMMA_REPRESENTATIONS}
    return _representation_report(IdentityId.GAMMA_REPRESENTATIONS,
                                  {"q": fctx.q, "t": t, "A": A}, values, tol)


def verify_beta_representations(ctx: QContext, t, s, A=1, *, tol: float = DEFAULT_TOL) -> IdentityReport:
    """All representations of B_q(t, s) against the gamma ratio."""
    fctx = _float_ctx(ctx)
    values = {rep.value: float(beta_q(fctx, t, s, rep, A).value) for rep in BETA_REPRESENTATIONS}
    return _representation_report(IdentityId.BETA_REPRESENTATIONS,
                                  {"q": fctx.q, "t": t, "s": s, "A": A}, values, tol)


VERIFIERS = {
    IdentityId.JACOBI_CLASSICAL: verify_jacobi,
    IdentityId.JACOBI_FAMILY: verify_jacobi_family,
    IdentityId.RAMANUJAN: verify_ramanujan,
    IdentityId.SYMMETRIC_BILATERAL: verify_symmetric_bilateral,
    IdentityId.TRANSLATION_INVARIANCE: verify_translation_invariance,
    IdentityId.GAMMA_REPRESENTATIONS: verify_gamma_representations,
    IdentityId.BETA_REPRESENTATIONS: verify_beta_representations,
}
