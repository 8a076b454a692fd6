"""The multiplier tests, their oracles, bounds and character views."""

import math
from fractions import Fraction

import numpy as np
import pytest

from rmtest import algebra as alg, combin, multtests as mt, rmcode
from rmtest.algebra import Polynomial
from rmtest.estimator import trial_rng
from rmtest.rmcode import CodeParams


def product_instance():
    return Polynomial.from_terms(2, 2, {(1, 1): 1})


class TestTestEK:
    def test_members_always_accept(self):
        cfg = mt.TestConfig(CodeParams(3, 2, 2), e=1, k=2)
        f = Polynomial.from_terms(3, 2, {(1, 1): 2, (1, 0): 1})
        assert all(mt.test_e_k(f, cfg, trial_rng(7, i)) for i in range(100))

    def test_exact_acceptance_half(self):
        cfg = mt.TestConfig(CodeParams(2, 2, 0), e=1, k=1)
        assert mt.exact_acceptance_probability(product_instance(), cfg) == Fraction(1, 2)

    def test_exact_matches_sampling(self):
        cfg = mt.TestConfig(CodeParams(2, 2, 0), e=1, k=1)
        f = product_instance()
        hits = sum(mt.test_e_k(f, cfg, trial_rng(11, i)) for i in range(2000))
        assert abs(hits / 2000 - 0.5) < 0.05

    def test_member_probability_one(self):
        cfg = mt.TestConfig(CodeParams(2, 2, 1), e=1, k=1)
        assert mt.exact_acceptance_probability(Polynomial.variable(2, 2, 0), cfg) == 1

    def test_two_multipliers(self):
        cfg = mt.TestConfig(CodeParams(2, 2, 0), e=1, k=2)
        f = product_instance()
        # oracle: brute force over both multipliers through the ring product
        count = 0
        polys = list(alg.all_polynomials(2, 2, 1))
        for p1 in polys:
            for p2 in polys:
                prod = alg.mul_reduced(alg.mul_reduced(f, p1), p2)
                count += prod.degree <= 2
        assert mt.exact_acceptance_probability(f, cfg) == Fraction(count, len(polys) ** 2)

    def test_vacuous_flag(self):
        assert mt.TestConfig(CodeParams(2, 3, 2), e=1, k=1).vacuous
        assert not mt.TestConfig(CodeParams(2, 3, 1), e=1, k=1).vacuous


class TestHardInstance:
    def test_shape(self):
        f = mt.hard_instance(2, 3, 1)
        one = Polynomial.one(2, 3)
        expect = (one + Polynomial.variable(2, 3, 0)) * (one + Polynomial.variable(2, 3, 1))
        assert f == expect
        assert f.degree == 2
        assert f.evaluate_all().support_size() == 2

    def test_acceptance_floor(self):
        f = mt.hard_instance(2, 3, 1)
        floor = Fraction(1, 2 ** combin.monomial_count(2, 1, 1))
        assert floor == Fraction(1, 4)
        p_stated = mt.exact_acceptance_probability(
            f, mt.TestConfig(CodeParams(2, 3, 2), e=1, k=1)
        )
        assert p_stated == 1 >= floor
        p_far = mt.exact_acceptance_probability(
            f, mt.TestConfig(CodeParams(2, 3, 1), e=1, k=1)
        )
        assert p_far == Fraction(1, 2) >= floor

    def test_multiplier_vanishing_probability_exact(self):
        assert mt.subspace_vanishing_probability(2, 3, 1, 1) == Fraction(1, 4)
        assert mt.subspace_vanishing_probability(3, 2, 1, 1) == Fraction(1, 9)

    def test_distance_is_subspace_size(self):
        f = mt.hard_instance(2, 3, 1)
        assert rmcode.distance(f, CodeParams(2, 3, 1)).distance == 2


class TestSoundnessBound:
    def test_eta_value(self):
        assert mt.eta_factor(2, 1) == pytest.approx(1 / (2 * math.log(2)))
        assert mt.eta_factor(3, 2) == pytest.approx(1 / (3.0 * math.log(3)))

    def test_small_delta_floor(self):
        cfg = mt.TestConfig(CodeParams(2, 8, 2), e=1, k=1)
        bp = mt.soundness_bound(cfg, delta=2)
        assert bp.n_count == 1  # negative variable count collapses to one
        assert bp.bound == pytest.approx(2 ** (-bp.eta))

    def test_monotone_in_delta(self):
        cfg = mt.TestConfig(CodeParams(2, 8, 2), e=1, k=1)
        values = [mt.soundness_bound(cfg, d).bound for d in range(1, 5000, 61)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_vacuous_flag(self):
        cfg = mt.TestConfig(CodeParams(2, 8, 2), e=1, k=3)
        bp = mt.soundness_bound(cfg, delta=1)
        assert bp.vacuous == (bp.bound > 1)

    def test_premise_detection(self):
        # desk-scale instances sit outside the bound's parameter ranges
        cfg = mt.TestConfig(CodeParams(2, 3, 1), e=1, k=1)
        assert mt.soundness_premise(cfg, 2).vacuous
        # a comfortably large co-degree admits the premise
        big = mt.TestConfig(CodeParams(2, 40, 8), e=8, k=1)
        assert not mt.soundness_premise(big, 2).vacuous

    def test_domination_or_recorded_vacuous_premise(self):
        # for every far function on an exactly enumerable instance, either
        # the premise fails (the expected outcome at this scale,
        # recorded explicitly) or the bound dominates the exact acceptance
        cfg = mt.TestConfig(CodeParams(2, 3, 1), e=1, k=1)
        far, vacuous = 0, 0
        for f in alg.all_polynomials(2, 3):
            dist = rmcode.distance(f, cfg.code).distance
            if dist < 1:
                continue
            far += 1
            premise = mt.soundness_premise(cfg, dist)
            if premise.vacuous:
                vacuous += 1
                continue
            p = mt.exact_acceptance_probability(f, cfg)
            assert float(p) <= mt.soundness_bound(cfg, dist).bound
        assert far > 0
        # co-degree 2 cannot reach the required ranges: all premises vacuous
        assert vacuous == far

    def test_case2_bound_binds(self):
        # exact-degree instances: acceptance never exceeds the staged bound;
        # keep deg(f) low enough that every stage retains co-degree >= 3e
        rng = np.random.default_rng(19)
        cases = 0
        for q, n, e, k in ((2, 4, 1, 1), (3, 2, 1, 1), (2, 6, 1, 2)):
            cap = n * (q - 1) - 3 * e - e * (k - 1)
            for _ in range(30):
                f = alg.random_polynomial(q, n, cap, rng)
                if f.is_zero() or f.degree == 0:
                    continue
                dprime = int(f.degree)
                for d in range(0, dprime):
                    bound, applicable = mt.case2_bound(q, n, dprime, e, k)
                    assert applicable
                    cfg = mt.TestConfig(CodeParams(q, n, d), e=e, k=k)
                    p = mt.exact_acceptance_probability(f, cfg)
                    assert p <= bound
                    cases += 1
        assert cases > 20


class TestCorrH:
    def test_identity_shape_reduces_to_single_multiplier(self):
        f = product_instance()
        cfg = mt.TestConfig(CodeParams(2, 2, 0), e=1, k=1)
        h = mt.UnivariatePoly(2, (0, 1))
        for i in range(300):
            assert mt.corr_h(f, cfg, h, trial_rng(13, i)) == mt.test_e_k(
                f, cfg, trial_rng(13, i)
            )

    def test_square_shape_matches_enumeration(self):
        h = mt.UnivariatePoly(3, (0, 0, 1))
        f = Polynomial.from_terms(3, 2, {(2, 1): 1})
        cfg = mt.TestConfig(CodeParams(3, 2, 1), e=1, k=2)
        p = mt.exact_corr_h_probability(f, cfg, h)
        count = 0
        polys = list(alg.all_polynomials(3, 2, 1))
        for P in polys:
            prod = alg.mul_reduced(f, h.eval_poly(P))
            count += prod.degree <= 1 + 2
        assert p == Fraction(count, len(polys))

    def test_member_always_accepts(self):
        h = mt.UnivariatePoly(3, (1, 2, 1))
        f = Polynomial.variable(3, 2, 0)
        cfg = mt.TestConfig(CodeParams(3, 2, 1), e=1, k=2)
        assert mt.exact_corr_h_probability(f, cfg, h) == 1

    def test_degree_q_rejected(self):
        cfg = mt.TestConfig(CodeParams(2, 2, 0), e=1, k=2)
        with pytest.raises(ValueError):
            mt.corr_h(product_instance(), cfg, mt.UnivariatePoly(2, (0, 0, 1)), trial_rng(0, 0))

    def test_leading_zero_rejected(self):
        with pytest.raises(ValueError):
            mt.UnivariatePoly(3, (1, 0, 3))

    def test_consistency_with_plain_test(self):
        # shaped acceptance <= plain k-multiplier acceptance^(1/2^k)
        h = mt.UnivariatePoly(3, (0, 0, 1))
        cfg = mt.TestConfig(CodeParams(3, 2, 1), e=1, k=2)
        rng = np.random.default_rng(31)
        for _ in range(20):
            f = alg.random_polynomial(3, 2, 4, rng)
            p_corr = float(mt.exact_corr_h_probability(f, cfg, h))
            p_plain = float(mt.exact_acceptance_probability(f, cfg))
            assert p_corr <= p_plain ** (1 / 4) + 1e-12


class TestCharacterAverages:
    def test_zero_function_gives_one(self):
        g = mt.UnivariatePoly(3, (0, 1))
        assert mt.raw_character_average(Polynomial.zero(3, 2), 1, g).is_exactly_one()

    def test_composed_average_equals_acceptance(self):
        h = mt.UnivariatePoly(3, (0, 0, 1))
        cfg = mt.TestConfig(CodeParams(3, 2, 1), e=1, k=2)
        rng = np.random.default_rng(37)
        for _ in range(10):
            f = alg.random_polynomial(3, 2, 4, rng)
            cs = mt.character_average(f, cfg, h)
            p = mt.exact_corr_h_probability(f, cfg, h)
            assert cs.rational_if_real() == p
            assert abs(cs.abs_value() - float(p)) < 1e-9

    def test_squaring_base_case(self):
        rng = np.random.default_rng(41)
        for q, n, e in ((2, 1, 1), (2, 2, 1), (3, 1, 1), (3, 2, 0)):
            for _ in range(15):
                f = alg.random_polynomial(q, n, n * (q - 1), rng)
                for a in range(1, q):
                    for b in range(q):
                        gab = mt.UnivariatePoly(q, (b, a))
                        lhs = abs(mt.raw_character_average(f, e, gab).value()) ** 2
                        ga = mt.UnivariatePoly(q, (0, a))
                        rhs = mt.raw_character_average(f, e, ga).value()
                        assert abs(lhs - rhs) < 1e-9

    def test_two_step_inequality(self):
        rng = np.random.default_rng(43)
        for _ in range(10):
            f = alg.random_polynomial(3, 2, 4, rng)
            for g2 in (1, 2):
                for g1 in range(3):
                    for g0 in range(3):
                        g = mt.UnivariatePoly(3, (g0, g1, g2))
                        lhs = abs(mt.raw_character_average(f, 1, g).value()) ** 4
                        rhs = mt.pair_character_average(f, 1, (2 * g2) % 3).value()
                        assert abs(rhs.imag) < 1e-9
                        assert lhs <= rhs.real + 1e-9


class TestRobustExperiment:
    def test_member_all_zero(self):
        cfg = mt.TestConfig(CodeParams(2, 3, 0), e=1, k=1)
        rep = mt.robust_distance_experiment(Polynomial.zero(2, 3), cfg)
        assert rep.distance_counts == {0: 16}
        assert rep.min_distance == 0

    def test_distance_zero_fraction_is_acceptance(self):
        f = Polynomial.from_terms(2, 3, {(1, 1, 1): 1})
        cfg = mt.TestConfig(CodeParams(2, 3, 0), e=1, k=1)
        rep = mt.robust_distance_experiment(f, cfg)
        assert rep.mode == "exact"
        p = mt.exact_acceptance_probability(f, cfg)
        assert rep.fraction_at_most[0] == p == Fraction(1, 2)

    def test_sampled_mode(self):
        f = Polynomial.from_terms(2, 3, {(1, 1, 1): 1})
        cfg = mt.TestConfig(CodeParams(2, 3, 0), e=1, k=1)
        rep = mt.robust_distance_experiment(f, cfg, trials=100, seed=5)
        assert rep.mode == "sampled" and rep.samples == 100

    def test_reduction_inequality_exhaustive(self):
        cfg = mt.TestConfig(CodeParams(2, 3, 0), e=1, k=1)
        for f in alg.all_polynomials(2, 3):
            for dp in (1, 2):
                lhs, rhs, held = mt.reduction_check(f, cfg, dp)
                assert held, (alg.poly_to_text(f), dp, lhs, rhs)

    def test_requires_single_multiplier(self):
        cfg = mt.TestConfig(CodeParams(2, 3, 0), e=1, k=2)
        with pytest.raises(ValueError):
            mt.robust_distance_experiment(Polynomial.zero(2, 3), cfg)


class TestAKKLR:
    def test_member_always_accepts(self):
        code = CodeParams(2, 4, 1)
        f = Polynomial.variable(2, 4, 0) + Polynomial.one(2, 4)
        assert all(mt.akklr_test(f, code, trial_rng(17, i)) for i in range(100))

    def test_cube_product_rejection_exact(self):
        f = Polynomial.from_terms(2, 3, {(1, 1, 1): 1})
        pr = mt.akklr_exact_rejection_probability(f, CodeParams(2, 3, 1))
        assert pr == Fraction(1, 2)
        assert pr > 0

    def test_sampled_rejection_tracks_exact(self):
        f = Polynomial.from_terms(2, 3, {(1, 1, 1): 1})
        code = CodeParams(2, 3, 1)
        rejections = sum(
            not mt.akklr_test(f, code, trial_rng(23, i)) for i in range(1500)
        )
        assert abs(rejections / 1500 - 0.5) < 0.06

    def test_restriction_agrees_pointwise(self):
        rng = np.random.default_rng(29)
        f = alg.random_polynomial(3, 3, 4, rng)
        dirs, offset = mt.sample_affine_subspace(3, 3, 2, rng)
        res = alg.restrict_to_affine(f, dirs, offset)
        for t0 in range(3):
            for t1 in range(3):
                x = (offset + np.array([t0, t1]) @ dirs) % 3
                assert res.evaluate((t0, t1)) == f.evaluate(tuple(int(v) for v in x))

    def test_dimension_check(self):
        with pytest.raises(ValueError):
            mt.akklr_test(Polynomial.zero(2, 2), CodeParams(2, 2, 2), trial_rng(0, 0))
