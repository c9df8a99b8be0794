"""Extremal couplings together with their sum laws and expectations."""

import math
from fractions import Fraction

import numpy as np
import pytest

from stochorder.couplings import (
    CtExistence, CtNotExists, DiscreteJoint, GridSum, comonotonic_version,
    countermono_existence, countermono_version, expectation_of, from_json,
    is_pairwise_countermonotonic, marginal_discrepancy, sum_distribution, to_discrete_joint,
)
from stochorder.dist import Affine, Cauchy, Discrete, Pareto, PointMass, Uniform01, bernoulli
from stochorder.extmath import DEFAULT_CONFIG, MeanKind
from stochorder.gallery import example1_coupling, example1_phi
from stochorder.generators import mean_preserving_spread, random_discrete, random_joint
from stochorder.orders import check_cx

B3 = bernoulli(Fraction(3, 10))


class TestComonotonic:
    def test_uniform_sum_is_doubled_uniform(self):
        S = sum_distribution(comonotonic_version([Uniform01(), Uniform01()]))
        assert S.quantile(0.3) == pytest.approx(0.6)
        assert S.affine_form()[0] == 2

    def test_pareto_sum_is_law_of_2x(self):
        S = sum_distribution(comonotonic_version([Pareto(0.5), Pareto(0.5)]))
        for t in (0.1, 0.5, 0.9):
            assert S.quantile(t) == pytest.approx(2 * (1 - t) ** -2)

    def test_point_mass_shifts(self):
        D = Discrete.from_pairs([0, 3], [Fraction(1, 4), Fraction(3, 4)])
        S = sum_distribution(comonotonic_version([PointMass(1), D]))
        assert S.as_discrete().atoms == (1, 4)

    def test_marginal_fidelity(self):
        C = comonotonic_version([Pareto(2), Uniform01(), Cauchy()])
        for i in range(3):
            assert marginal_discrepancy(C, i) <= 2e-4


class TestCountermonoExistence:
    def test_bernoulli_triple_low(self):
        assert countermono_existence([B3] * 3) is CtExistence.EXISTS_LOW

    def test_uniform_triple_none(self):
        assert countermono_existence([Uniform01()] * 3) is CtExistence.NOT_EXISTS
        with pytest.raises(CtNotExists):
            countermono_version([Uniform01()] * 3)

    def test_pair_always_exists(self):
        assert countermono_existence([Uniform01(), Cauchy()]) is CtExistence.EXISTS_PAIRWISE

    def test_high_variant(self):
        D = bernoulli(Fraction(7, 10))
        assert countermono_existence([D] * 3) is CtExistence.EXISTS_HIGH

    def test_point_masses_do_not_count(self):
        Ds = [Uniform01(), Uniform01(), PointMass(2)]
        assert countermono_existence(Ds) is CtExistence.EXISTS_PAIRWISE


class TestCountermonoVersion:
    def test_uniform_pair_sums_to_one(self):
        S = sum_distribution(countermono_version([Uniform01(), Uniform01()]))
        assert isinstance(S, PointMass) and S.c == 1

    def test_bernoulli_triple_joint(self):
        J = to_discrete_joint(countermono_version([B3] * 3))
        p = Fraction(3, 10)
        assert J.as_dict() == {(0, 0, 0): Fraction(1, 10), (0, 0, 1): p, (0, 1, 0): p,
                               (1, 0, 0): p}
        assert all(m.probs == B3.probs for m in J.marginals)
        assert is_pairwise_countermonotonic(J)

    def test_high_variant_marginals(self):
        D = bernoulli(Fraction(4, 5))
        J = to_discrete_joint(countermono_version([D] * 4))
        assert all(m.atoms == D.atoms and m.probs == D.probs for m in J.marginals)
        assert is_pairwise_countermonotonic(J)

    def test_example1_w_quantile(self):
        """W = 1/X + 1/Y under the counter-monotonic uniform pair has quantile 4/(1-v^2)."""
        n = 20_000
        C = countermono_version([Uniform01(), Uniform01()])
        x, y = C.evaluate((np.arange(1, n + 1) - 0.5) / n).T
        W = np.sort(1 / x + 1 / y)
        for v in (0.1, 0.25, 0.5, 0.75, 0.9):
            assert W[int(v * n)] == pytest.approx(4 / (1 - v ** 2), rel=1e-3)

    def test_random_discrete_pairs_are_pairwise_ct(self, rng):
        for _ in range(50):
            X, Y = random_discrete(rng), random_discrete(rng)
            J = to_discrete_joint(countermono_version([X, Y]))
            assert is_pairwise_countermonotonic(J)
            assert J.marginal(0).probs == X.probs and J.marginal(1).probs == Y.probs


class TestPairwiseCheck:
    def test_examples(self):
        assert is_pairwise_countermonotonic(
            DiscreteJoint.from_pairs([(1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0)], [0.25] * 4))
        assert not is_pairwise_countermonotonic(
            DiscreteJoint.from_pairs([(0, 0), (1, 1)], [0.5, 0.5]))
        assert is_pairwise_countermonotonic(DiscreteJoint.from_pairs([(3, 4)], [1]))


class TestSumDistribution:
    def test_discrete_joint(self):
        J = DiscreteJoint.from_pairs([(0, 0), (1, 1)], [Fraction(1, 2), Fraction(1, 2)])
        S = sum_distribution(J)
        assert S.atoms == (0, 2) and S.probs == (Fraction(1, 2), Fraction(1, 2))

    def test_heavy_tailed_grid_sum_keeps_infinite_tail(self):
        S = sum_distribution(countermono_version([Pareto(0.5), Pareto(0.5)]))
        assert isinstance(S, GridSum)
        assert S.mean_class().kind is MeanKind.PLUS_INF
        assert S.upper_tail_integral(0.5) == math.inf
        assert math.isfinite(S.lower_tail_integral(0.5))


class TestExpectation:
    def test_example1_value(self):
        v = expectation_of(example1_coupling(), example1_phi)
        assert v.value == pytest.approx(2 * math.log(2), abs=1e-6)

    def test_example1_comonotonic_zero(self):
        v = expectation_of(comonotonic_version([Uniform01()] * 3), example1_phi)
        assert v.kind is MeanKind.FINITE and v.value == 0

    def test_infinite_expectation(self):
        v = expectation_of(comonotonic_version([Pareto(0.5), Pareto(0.5)]), lambda x, y: x + y)
        assert v.kind is MeanKind.PLUS_INF

    def test_example1_marginals(self):
        C = example1_coupling()
        for i in range(3):
            assert marginal_discrepancy(C, i) <= 2e-4


class TestSumBounds:
    def test_bivariate_bounds(self, rng):
        for _ in range(60):
            X, Y = random_discrete(rng), random_discrete(rng)
            s = sum_distribution(random_joint([X, Y], rng))
            assert check_cx(sum_distribution(countermono_version([X, Y])), s).holds
            assert check_cx(s, sum_distribution(comonotonic_version([X, Y]))).holds

    def test_trivariate_comonotonic_bound(self, rng):
        for d in (3, 4):
            for _ in range(20):
                Ms = [random_discrete(rng, 5) for _ in range(d)]
                s = sum_distribution(random_joint(Ms, rng))
                assert check_cx(s, sum_distribution(comonotonic_version(Ms))).holds

    def test_spread_marginals_bound(self, rng):
        for _ in range(40):
            X, Y = random_discrete(rng, 5), random_discrete(rng, 5)
            Z, W = mean_preserving_spread(X, rng), mean_preserving_spread(Y, rng)
            s = sum_distribution(random_joint([X, Y], rng))
            assert check_cx(s, sum_distribution(comonotonic_version([Z, W]))).holds

    def test_sum_means_do_not_depend_on_coupling(self, rng):
        X, Y = random_discrete(rng), random_discrete(rng)
        values = {expectation_of(random_joint([X, Y], rng), lambda x, y: x + y).value
                  for _ in range(20)}
        assert values == {X.mean() + Y.mean()}


class TestJson:
    def test_parse_kinds(self):
        spec = {"type": "countermonotonic",
                "marginals": [{"type": "discrete", "atoms": [0, 1], "probs": [0.3, 0.7]}] * 2}
        C = from_json(spec)
        assert C.kind == "countermonotonic"
        J = from_json({"type": "discrete_joint", "atoms": [[0, 0], [1, 1]], "probs": [0.5, 0.5]})
        assert J.probs == (Fraction(1, 2), Fraction(1, 2))
        with pytest.raises(ValueError):
            from_json({"type": "gumbel"})

    def test_joint_round_trip(self):
        J = DiscreteJoint.from_pairs([(0, 1), (1, 0)], [0.25, 0.75])
        again = from_json(J.to_json())
        assert again.atoms == J.atoms


def test_default_grid_from_config():
    cfg = DEFAULT_CONFIG.with_(grid_n=64)
    S = sum_distribution(countermono_version([Affine(2, 0, Uniform01()), Uniform01()]), cfg)
    assert len(S.approx.atoms) <= 64
