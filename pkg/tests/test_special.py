import itertools
import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from qcalc import (BETA_REPRESENTATIONS, GAMMA_REPRESENTATIONS, DomainError, E_q, E_q_series, PoleError,
                   beta_q, beta_q_gamma_ratio, beta_q_integral, beta_q_symmetric_integral, e_q, e_q_series,
                   gamma_q, gamma_q_bigE_integral, gamma_q_product, jackson_factor, k_function, little_beta, little_gamma,
                   make_context, q_number)

rel = lambda a, b: abs(a - b) / abs(b)


def k_limit_oracle(q, A, t, N):
    """Finite-N version of the limit defining K(A; t), evaluated with mpmath at 40 digits."""
    with mpmath.workdps(40):
        q, A, t = mpmath.mpf(q), mpmath.mpf(A), mpmath.mpf(t)
        a = 1 / (A * q**N)
        return (A * q**N) ** t * mpmath.qp(-a, q) / mpmath.qp(-(q**t) * a, q)


class TestExponentials:
    @pytest.mark.parametrize("q", [0.2, 0.5, 0.9])
    def test_at_zero(self, q):
        ctx = make_context(q)
        assert e_q(ctx, 0) == E_q(ctx, 0) == 1

    @pytest.mark.parametrize("q", [0.2, 0.5, 0.9])
    def test_big_zero(self, q):
        assert E_q(make_context(q), -1 / (1 - q)) == 0

    @given(st.floats(0.05, 0.95), st.floats(-3, 3))
    def test_reciprocal_pair(self, q, x):
        ctx = make_context(q)
        if abs(x) * (1 - q) not in (1.0,):
            try:
                assert e_q(ctx, x) * E_q(ctx, -x) == pytest.approx(1.0, rel=1e-10)
            except PoleError:
                pass

    def test_series_inside_radius(self, ctx_half):
        for x in (-1.5, 0.3, 1.9):
            assert e_q(ctx_half, x) == pytest.approx(e_q_series(ctx_half, x), rel=1e-13)
            assert E_q(ctx_half, x) == pytest.approx(E_q_series(ctx_half, x), rel=1e-13)

    def test_product_beyond_radius(self, ctx_half):
        # x = 3 exceeds 1/(1-q) = 2 but avoids the lattice poles 2^(n+1)
        value = e_q(ctx_half, 3)
        assert value == pytest.approx(1 / float(mpmath.qp(1.5, 0.5)), rel=1e-12)

    def test_pole(self, ctx_half):
        with pytest.raises(PoleError):
            e_q(ctx_half, 4)


class TestGamma:
    @pytest.mark.parametrize("t, expected", [(1, 1), (2, 1), (3, 1.5)])
    def test_small_integers(self, ctx_half, t, expected):
        assert gamma_q_product(ctx_half, t) == pytest.approx(expected)

    @pytest.mark.parametrize("t", [0, -1, -2.5])
    def test_nonpositive(self, ctx_half, t):
        with pytest.raises(DomainError):
            gamma_q_product(ctx_half, t)

    @pytest.mark.parametrize("t, expected", [(1, 1.0), (4, 2.625)])
    def test_big_integral_integers(self, ctx_half, t, expected):
        assert gamma_q_bigE_integral(ctx_half, t) == pytest.approx(expected, rel=1e-12)

    def test_big_integral_half(self, ctx_half):
        assert rel(gamma_q_bigE_integral(ctx_half, 0.5), gamma_q_product(ctx_half, 0.5)) <= 1e-10

    def test_mpmath_oracle(self):
        for q, t in [(0.3, 0.4), (0.5, 2.7), (0.85, 1.3)]:
            assert gamma_q_product(make_context(q), t) == pytest.approx(float(mpmath.qgamma(t, q)), rel=1e-12)

    @given(st.floats(0.05, 0.95), st.floats(0.05, 6))
    def test_recurrence(self, q, t):
        ctx = make_context(q)
        assert gamma_q_product(ctx, t + 1) == pytest.approx(q_number(ctx, t) * gamma_q_product(ctx, t), rel=1e-11)

    def test_exact_integer(self, exact_half):
        assert gamma_q_product(exact_half, 4) == pytest.approx(2.625) and gamma_q_product(exact_half, 4).denominator

    @pytest.mark.parametrize("q", [0.2, 0.6])
    def test_beta_tends_to_gamma(self, q):
        """(1 - q)^{-t} B_q(t, s) rises toward Gamma_q(t) as s grows."""
        ctx, t = make_context(q), 1.7
        target = gamma_q_product(ctx, t)
        gaps = [abs(target - beta_q_integral(ctx, t, s) / (1 - q) ** t) / target for s in (2, 4, 8, 16, 64)]
        assert all(b < a for a, b in zip(gaps, gaps[1:4]))
        assert gaps[-1] < 1e-13

    def test_little_gamma_one(self):
        for A in (0.3, 1, 2.5):
            assert little_gamma(make_context(0.5), 1, A) == pytest.approx(1.0, rel=1e-12)

    def test_little_gamma_three(self, ctx_half):
        assert little_gamma(ctx_half, 3, 1) == pytest.approx(12.0, rel=1e-12)

    def test_main_theorem_point(self):
        ctx = make_context(0.4)
        value = k_function(ctx, 2, 0.7).value * little_gamma(ctx, 0.7, 2)
        assert rel(value, gamma_q_product(ctx, 0.7)) <= 1e-10

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.1, 0.9), st.floats(0.1, 4), st.floats(0.3, 3))
    def test_little_gamma_recurrence(self, q, t, A):
        ctx = make_context(q)
        lhs = little_gamma(ctx, t + 1, A)
        assert rel(lhs, q**-t * q_number(ctx, t) * little_gamma(ctx, t, A)) <= 1e-10

    @pytest.mark.parametrize("rep", GAMMA_REPRESENTATIONS)
    def test_representations_agree(self, rep):
        for q, t, A in itertools.product((0.1, 0.5, 0.9), (0.3, 1, 2.4), (0.5, 2)):
            ctx = make_context(q)
            assert rel(gamma_q(ctx, t, rep, A=A).value, gamma_q_product(ctx, t)) <= 1e-10

    def test_wrong_representation(self, ctx_half):
        with pytest.raises(DomainError):
            gamma_q(ctx_half, 1.5, "symmetric_integral")


class TestBeta:
    @pytest.mark.parametrize("t", [0.4, 1.0, 2.6])
    def test_second_argument_one(self, ctx_half, t):
        expected = 1 / q_number(ctx_half, t)
        assert beta_q_integral(ctx_half, t, 1) == pytest.approx(expected, rel=1e-12)
        assert beta_q_gamma_ratio(ctx_half, t, 1) == pytest.approx(expected, rel=1e-12)

    def test_one_one(self, ctx_half):
        assert beta_q_integral(ctx_half, 1, 1) == pytest.approx(1.0)

    def test_two_two(self, ctx_half):
        assert beta_q_integral(ctx_half, 2, 2) == pytest.approx(1 / 2.625, rel=1e-13)

    @given(st.floats(0.05, 0.95), st.floats(0.1, 5), st.floats(0.1, 5))
    def test_symmetry(self, q, t, s):
        ctx = make_context(q)
        assert beta_q_gamma_ratio(ctx, t, s) == pytest.approx(beta_q_gamma_ratio(ctx, s, t), rel=1e-13)

    @pytest.mark.parametrize("A", [0.3, 1, 4])
    def test_little_beta_t_one(self, ctx_half, A):
        assert little_beta(ctx_half, 1, 2.2, A) == pytest.approx(1 / q_number(ctx_half, 2.2), rel=1e-12)

    def test_little_beta_integer_t(self, ctx_half):
        for A in (0.5, 1.5):
            corrected = k_function(ctx_half, A, 2).value * little_beta(ctx_half, 2, 1.4, A)
            assert rel(corrected, beta_q_gamma_ratio(ctx_half, 2, 1.4)) <= 1e-12

    def test_little_beta_main_theorem(self, ctx_half):
        corrected = k_function(ctx_half, 0.8, 0.6).value * little_beta(ctx_half, 0.6, 1.3, 0.8)
        assert rel(corrected, beta_q_gamma_ratio(ctx_half, 0.6, 1.3)) <= 1e-10

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.1, 0.9), st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0.3, 3))
    def test_little_beta_recurrences(self, q, t, s, A):
        # exponents near 0 with q near 1 make both tails decay like q^0.1 per term
        ctx = make_context(q, bilateral_window=2000)
        base = little_beta(ctx, t, s, A)
        bracket = lambda v: q_number(ctx, v)
        assert rel(little_beta(ctx, t + 1, s, A), q**-t * bracket(t) / bracket(t + s) * base) <= 1e-10
        assert rel(little_beta(ctx, t, s + 1, A), bracket(s) / bracket(t + s) * base) <= 1e-10

    def test_correction_removes_A_dependence(self):
        ctx, t, s = make_context(0.1), 0.6, 1.3
        raw = [little_beta(ctx, t, s, A) for A in (0.5, 1, 2)]
        corrected = [k_function(ctx, A, t).value * v for A, v in zip((0.5, 1, 2), raw)]
        assert max(raw) - min(raw) > 1e-6
        assert max(corrected) - min(corrected) <= 1e-9 * corrected[0]

    @pytest.mark.parametrize("q, floor", [(0.1, 5e-4), (0.05, 5e-3)])
    def test_integer_factor_misses_at_small_q(self, q, floor):
        """q^(t(t-1)/2) in place of K(A; t) is wrong for non-integer t; visibly so when q is small."""
        ctx = make_context(q)
        t, s = 0.5, 1.5
        wrong = jackson_factor(ctx, t) * little_beta(ctx, t, s, 1)
        assert rel(wrong, beta_q_gamma_ratio(ctx, t, s)) > floor

    def test_all_representations_grid(self):
        grid = (0.3, 0.5, 1, 1.7, 2, 3.2)
        for q in (0.1, 0.5, 0.9):
            ctx = make_context(q)
            for t, s in itertools.product(grid, grid):
                ref = beta_q_gamma_ratio(ctx, t, s)
                for rep in BETA_REPRESENTATIONS:
                    assert rel(beta_q(ctx, t, s, rep, A=1.5).value, ref) <= 1e-10, (q, t, s, rep)

    def test_symmetric_integral_examples(self, ctx_half):
        assert beta_q_symmetric_integral(ctx_half, 1, 1, 1) == pytest.approx(1.0, rel=1e-12)
        expected = gamma_q_product(ctx_half, 2) * gamma_q_product(ctx_half, 3) / gamma_q_product(ctx_half, 5)
        assert beta_q_symmetric_integral(ctx_half, 2, 3, 0.7) == pytest.approx(expected, rel=1e-12)
        assert beta_q_symmetric_integral(ctx_half, 0.4, 2.1, 3) == pytest.approx(
            beta_q_symmetric_integral(ctx_half, 2.1, 0.4, 1 / 3), rel=1e-12)


class TestK:
    @pytest.mark.parametrize("x", [0.2, 1, 3.5])
    def test_zero_and_one(self, ctx_half, x):
        assert k_function(ctx_half, x, 0).value == pytest.approx(1.0)
        assert k_function(ctx_half, x, 1).value == pytest.approx(1.0)

    def test_integer_three(self, ctx_half):
        assert k_function(ctx_half, 0.7, 3).value == pytest.approx(0.125, rel=1e-13)

    def test_q_constant(self):
        ctx = make_context(0.4)
        assert k_function(ctx, 0.4 * 0.7, 0.3).value == pytest.approx(k_function(ctx, 0.7, 0.3).value, rel=1e-13)

    def test_not_constant(self):
        ctx = make_context(0.1)
        assert abs(k_function(ctx, 0.3, 0.5).value - k_function(ctx, 1.0, 0.5).value) > 1e-3

    @given(st.floats(0.05, 0.95), st.floats(0.05, 20), st.floats(-3, 3))
    def test_recurrence(self, q, x, t):
        ctx = make_context(q)
        assert k_function(ctx, x, t + 1).value == pytest.approx(q**t * k_function(ctx, x, t).value, rel=1e-11)

    def test_domain(self, ctx_half):
        with pytest.raises(DomainError):
            k_function(ctx_half, 0, 0.5)

    @pytest.mark.parametrize("q, A, t", [(0.5, 1, 0.5), (0.3, 2.5, 0.7), (0.8, 0.4, 1.6)])
    def test_limit_construction(self, q, A, t):
        closed = k_function(make_context(q), A, t).value
        # the finite-N error decays like q^N
        N = math.ceil(math.log(1e-14) / math.log(q))
        errors = [abs(float(k_limit_oracle(q, A, t, n)) - closed) for n in (5, N // 2, N)]
        assert errors[-1] <= 1e-12 * closed
        assert errors[0] > errors[-1]

    @pytest.mark.parametrize("t", [0.25, 0.5, 0.75])
    def test_small_q_limit_deep(self, t):
        ctx = make_context(1e-24)
        for x in (0.5, 1.0, 2.0):
            assert abs(k_function(ctx, x, t).value - (x**t + x ** (t - 1))) < 1e-4

    @pytest.mark.parametrize("t", [0.25, 0.75])
    def test_small_q_rate(self, t):
        """The departure from the q -> 0 limit shrinks like q^min(t, 1-t)."""
        x = 1.0
        gaps = [abs(k_function(make_context(q), x, t).value - 2.0) for q in (1e-8, 1e-16)]
        assert gaps[1] / gaps[0] == pytest.approx(1e-8 ** min(t, 1 - t), rel=0.05)

    def test_q_to_one(self):
        for t in (0.3, 1.7):
            assert abs(k_function(make_context(0.999), 1.3, t).value - 1) < 1e-2


def test_classical_limit_direction():
    errors = [rel(gamma_q_product(make_context(q, product_terms=100_000), 2.5), math.gamma(2.5))
              for q in (0.9, 0.99, 0.999)]
    assert errors[0] > errors[1] > errors[2]
