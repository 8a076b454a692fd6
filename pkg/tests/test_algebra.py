"""Ring arithmetic, orderings, transforms and text formats."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmtest import algebra as alg
from rmtest.algebra import EvalTable, Monomial, Polynomial
from rmtest.errors import (
    DegenerateFormError,
    ParamsMismatchError,
    ZeroPolynomialError,
)


def test_prime_check():
    assert alg.is_prime(2) and alg.is_prime(3) and alg.is_prime(5)
    assert not alg.is_prime(4) and not alg.is_prime(9) and not alg.is_prime(1)
    with pytest.raises(ValueError):
        Polynomial.zero(4, 2)
    with pytest.raises(ValueError):
        Monomial(9, (1,))


def test_field_element_ops():
    a = alg.FieldElement(2, 3)
    assert int(a + 2) == 1
    assert int(a * a) == 1
    assert int(-a) == 1
    assert int(a.inverse()) == 2
    with pytest.raises(ParamsMismatchError):
        a + alg.FieldElement(1, 5)


class TestReducedProduct:
    def test_square_collapses_over_f2(self):
        x = Polynomial.variable(2, 1, 0)
        assert x * x == x

    def test_cube_collapses_over_f3(self):
        x = Polynomial.variable(3, 1, 0)
        assert x * (x * x) == x

    def test_binomial_square_matches_pointwise(self):
        f = Polynomial.variable(2, 2, 0) + Polynomial.variable(2, 2, 1)
        prod = f * f
        assert prod == f  # X1 + X2 over F_2
        tables = f.evaluate_all().pointwise_mul(f.evaluate_all())
        assert prod.evaluate_all() == tables

    def test_params_mismatch(self):
        with pytest.raises(ParamsMismatchError):
            alg.mul_reduced(Polynomial.one(2, 2), Polynomial.one(3, 2))

    @pytest.mark.parametrize("q,n", [(2, 2), (2, 3), (3, 1), (3, 2)])
    def test_ring_isomorphism_exhaustive_small(self, q, n):
        polys = list(alg.all_polynomials(q, n)) if q**(q**n) <= 7_000_000 else None
        if polys is None or len(polys) > 300:
            rng = np.random.default_rng(11)
            pairs = [
                (
                    alg.random_polynomial(q, n, n * (q - 1), rng),
                    alg.random_polynomial(q, n, n * (q - 1), rng),
                )
                for _ in range(200)
            ]
        else:
            pairs = [(f, g) for f in polys for g in polys]
        for f, g in pairs:
            lhs = alg.mul_reduced(f, g).evaluate_all()
            rhs = f.evaluate_all().pointwise_mul(g.evaluate_all())
            assert lhs == rhs


class TestMonomials:
    def test_reduced_product_and_disjointness_over_f3(self):
        m = Monomial(3, (2,))
        res = alg.monomial_product(m, Monomial(3, (1,)))
        assert res.unreduced_exponents == (3,)
        assert not res.unreduced_valid
        assert res.reduced == Monomial(3, (1,))
        assert not res.disjoint

    def test_disjoint_product(self):
        res = alg.monomial_product(Monomial(3, (2, 0)), Monomial(3, (0, 1)))
        assert res.reduced == Monomial(3, (2, 1))
        assert res.disjoint and res.unreduced_valid

    def test_disjoint_matches_per_variable_rule_exhaustive(self):
        monos = [Monomial(2, (a, b)) for a in range(2) for b in range(2)]
        for m1 in monos:
            for m2 in monos:
                rule = all(
                    a + b < 2 for a, b in zip(m1.exponents, m2.exponents)
                )
                assert alg.monomial_product(m1, m2).disjoint == rule


class TestGradedLex:
    def test_equal_degree_tiebreak(self):
        assert alg.compare_graded_lex(Monomial(3, (2, 0)), Monomial(3, (1, 1))) == 1

    def test_degree_dominates(self):
        assert alg.compare_graded_lex(Monomial(3, (0, 1)), Monomial(3, (1, 1))) == -1

    def test_total_order_and_product_compatibility(self):
        monos = [Monomial(3, (a, b)) for a in range(3) for b in range(3)]
        ordered = sorted(monos)
        # strict chain
        for a, b in zip(ordered, ordered[1:]):
            assert alg.compare_graded_lex(a, b) == -1
        # unreduced products preserve the order
        for m1 in monos:
            for m2 in monos:
                if not m1 <= m2:
                    continue
                for m3 in monos:
                    u1 = m1.unreduced_exponents(m3)
                    u2 = m2.unreduced_exponents(m3)
                    assert (sum(u1), u1) <= (sum(u2), u2)

    def test_index_roundtrip(self):
        for idx in range(27):
            assert Monomial.from_index(3, 3, idx).index() == idx


class TestLeadingMonomial:
    def test_affine_over_f2(self):
        f = Polynomial.one(2, 1) + Polynomial.variable(2, 1, 0)
        assert f.leading_monomial() == Monomial(2, (1,))

    def test_lex_tiebreak(self):
        f = Polynomial.from_terms(3, 2, {(1, 1): 1, (2, 0): 1})
        assert f.leading_monomial() == Monomial(3, (2, 0))

    def test_zero_raises(self):
        with pytest.raises(ZeroPolynomialError):
            Polynomial.zero(2, 2).leading_monomial()
        assert Polynomial.zero(2, 2).degree == float("-inf")

    def test_degree_matches_max_nonzero_exhaustive(self):
        for f in alg.all_polynomials(2, 2):
            if f.is_zero():
                continue
            expected = max(m.degree for m, _ in f.terms())
            assert f.degree == expected == f.leading_monomial().degree


class TestTransforms:
    def test_univariate_interpolation(self):
        assert alg.interpolate(EvalTable(2, 1, [0, 1])) == Polynomial.variable(2, 1, 0)

    def test_zero_table(self):
        assert alg.interpolate(EvalTable(3, 2, [0] * 9)).is_zero()

    def test_roundtrip_cubic_space(self):
        # the degree-3 space over (2, 3) is the whole ring: 2^(2^3) functions
        count = 0
        for f in alg.all_polynomials(2, 3, 3):
            assert alg.interpolate(f.evaluate_all()) == f
            count += 1
        assert count == 256

    def test_shape_error(self):
        with pytest.raises(ValueError):
            EvalTable(2, 2, [0, 1, 1])

    @given(st.integers(0, 3**4 - 1), st.data())
    @settings(max_examples=60, deadline=None)
    def test_roundtrip_hypothesis(self, seed, data):
        q, n = data.draw(st.sampled_from([(2, 3), (3, 2), (5, 1)]))
        rng = np.random.default_rng(seed)
        f = alg.random_polynomial(q, n, n * (q - 1), rng)
        assert alg.interpolate(f.evaluate_all()) == f
        # table -> poly -> table as well
        table = EvalTable(q, n, rng.integers(0, q, q**n))
        assert alg.interpolate(table).evaluate_all() == table


class TestRestrict:
    def test_substitution(self):
        f = Polynomial.from_terms(2, 2, {(1, 1): 1})
        assert f.restrict([0, 1], 1) == Polynomial.variable(2, 1, 0)

    def test_vanishing_on_own_kernel(self):
        f = Polynomial.variable(2, 2, 0) + Polynomial.variable(2, 2, 1)
        assert f.restrict([1, 1], 0).is_zero()

    def test_agreement_on_hyperplane_points(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            f = alg.random_polynomial(3, 3, 6, rng)
            ell = [int(x) for x in rng.integers(0, 3, 3)]
            if not any(ell):
                ell[0] = 1
            alpha = int(rng.integers(0, 3))
            res = f.restrict(ell, alpha)
            pivot = next(j for j, c in enumerate(ell) if c)
            rows = [e for j in range(3) if j != pivot for e in [np.eye(3, dtype=int)[j]]]
            rows.append(ell)
            a_inv = alg.inverse_mod_matrix(rows, 3)
            for y0 in range(3):
                for y1 in range(3):
                    x = a_inv @ np.array([y0, y1, alpha]) % 3
                    assert res.evaluate((y0, y1)) == f.evaluate(tuple(int(v) for v in x))

    def test_degree_never_grows(self):
        forms = [
            (a, b, c)
            for a in range(2)
            for b in range(2)
            for c in range(2)
            if (a, b, c) != (0, 0, 0)
        ]
        assert len(forms) == 7
        for f in alg.all_polynomials(2, 3, 2):
            for ell in forms:
                for alpha in (0, 1):
                    assert f.restrict(ell, alpha).degree <= f.degree

    def test_zero_form_rejected(self):
        with pytest.raises(DegenerateFormError):
            Polynomial.one(2, 2).restrict([0, 0], 0)


class TestRandomPolynomial:
    def test_constant_case_frequencies(self):
        rng = np.random.default_rng(123)
        counts = np.zeros(3, dtype=int)
        draws = 10_000
        for _ in range(draws):
            f = alg.random_polynomial(3, 2, 0, rng)
            counts[int(f.coeffs[0])] += 1
        # 95% binomial band around 1/3
        p = 1 / 3
        half = 1.96 * (p * (1 - p) / draws) ** 0.5
        for c in counts:
            assert abs(c / draws - p) < half + 1e-9

    def test_full_degree_uniform_chi_square(self):
        rng = np.random.default_rng(2024)
        draws = 16_000
        counts = np.zeros(16, dtype=int)
        for _ in range(draws):
            f = alg.random_polynomial(2, 2, 2, rng)
            idx = int(sum(int(c) << j for j, c in enumerate(f.coeffs)))
            counts[idx] += 1
        expected = draws / 16
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        assert chi2 < 30.5779  # chi-square critical value, df=15, alpha=0.01

    def test_seed_determinism(self):
        a = [alg.random_polynomial(3, 2, 2, np.random.default_rng(99)) for _ in range(5)]
        b = [alg.random_polynomial(3, 2, 2, np.random.default_rng(99)) for _ in range(5)]
        assert a == b

    def test_out_of_range_degree(self):
        with pytest.raises(ValueError):
            alg.random_polynomial(2, 2, 3, np.random.default_rng(0))


class TestTextFormats:
    def test_writer_format(self):
        f = Polynomial.from_terms(3, 2, {(2, 1): 2, (0, 0): 1})
        assert alg.poly_to_text(f) == "q=3 n=2: 2*X1^2*X2 + 1"

    def test_parser_normalizes_term_order_and_duplicates(self):
        f = alg.poly_from_text("q=3 n=2: 1 + 2*X1^2*X2 + 1*X1^2*X2 + 2")
        assert f == Polynomial.from_terms(3, 2, {(2, 1): 3, (0, 0): 3})
        assert f.is_zero()

    def test_roundtrip_random(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            f = alg.random_polynomial(3, 2, 4, rng)
            assert alg.poly_from_text(alg.poly_to_text(f)) == f

    def test_zero(self):
        assert alg.poly_from_text("q=2 n=2: 0").is_zero()
        assert alg.poly_to_text(Polynomial.zero(2, 2)) == "q=2 n=2: 0"

    def test_table_roundtrip(self):
        t = EvalTable(3, 2, list(range(9)))
        assert alg.table_from_text(alg.table_to_text(t)) == t

    def test_bad_header(self):
        with pytest.raises(ValueError):
            alg.poly_from_text("nope")
