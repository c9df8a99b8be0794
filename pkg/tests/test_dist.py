"""Univariate laws: quantiles, cdfs and the stop-loss transforms."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stochorder.dist import (
    Affine, Cauchy, ComonotonicSum, Discrete, Mixture, Pareto, PointMass, QuantileFunction,
    Uniform01, bernoulli, exact_number, from_json,
)
from stochorder.extmath import INF, MeanKind
from stochorder.generators import mean_preserving_spread, random_discrete
from stochorder.orders import check_cx

LEVELS = np.linspace(0.001, 0.999, 57)


@st.composite
def discrete_laws(draw, max_atoms=6):
    atoms = draw(st.lists(st.integers(-20, 20), min_size=1, max_size=max_atoms, unique=True))
    weights = draw(st.lists(st.integers(1, 9), min_size=len(atoms), max_size=len(atoms)))
    total = sum(weights)
    return Discrete.from_pairs(atoms, [Fraction(w, total) for w in weights])


class TestQuantile:
    def test_pareto(self):
        assert Pareto(0.5).quantile(0.75) == pytest.approx(16.0)

    def test_left_convention_at_jump(self):
        assert Discrete.from_pairs([0, 1], [0.5, 0.5]).quantile(0.5) == 0

    def test_uniform(self):
        assert Uniform01().quantile(0.3) == pytest.approx(0.3)

    def test_vectorized_matches_scalar(self):
        D = Discrete.from_pairs([0, 2, 5], [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)])
        assert list(D.quantile(LEVELS)) == [D.quantile(float(t)) for t in LEVELS]

    def test_affine_positive_equivariance(self):
        D = Discrete.from_pairs([0, 2, 5], [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)])
        A = Affine(3, 1, D)
        for t in (0.1, 0.25, 0.5, 0.9):
            assert A.quantile(t) == 3 * D.quantile(t) + 1

    def test_affine_negative_uses_right_quantile(self):
        D = Discrete.from_pairs([0, 1], [Fraction(1, 2), Fraction(1, 2)])
        neg = Affine(-1, 0, D)
        assert neg.quantile(0.5) == -1
        assert neg.as_discrete().atoms == (-1, 0)


class TestCdf:
    def test_pareto(self):
        assert Pareto(1).cdf(2) == pytest.approx(0.5)

    def test_point_mass(self):
        assert PointMass(3).cdf(3) == 1.0

    def test_uniform_below_support(self):
        assert Uniform01().cdf(-1) == 0.0

    @pytest.mark.parametrize("D", [
        Pareto(0.5), Uniform01(), Cauchy(), bernoulli(Fraction(3, 10)),
        Affine(-2, 1, Pareto(1)), Mixture((0.25, 0.75), (Uniform01(), PointMass(2))),
    ])
    def test_galois_connection(self, D):
        for t in LEVELS:
            x = D.quantile(float(t))
            assert D.cdf(x) >= t - 1e-12
        for x in np.linspace(-5, 5, 41):
            F = D.cdf(float(x))
            if 0 < F < 1:
                assert D.quantile(F) <= x + 1e-9


class TestSupportAndMeans:
    def test_support_bounds(self):
        assert Pareto(0.5).support_bounds() == (1, INF)
        assert Discrete.from_pairs([0, 1], [0.3, 0.7]).support_bounds() == (0, 1)
        assert Cauchy().support_bounds() == (-INF, INF)

    def test_mean_classes(self):
        assert Cauchy().mean_class().kind is MeanKind.UNDEFINED
        assert Pareto(0.5).mean_class().kind is MeanKind.PLUS_INF
        assert Affine(-1, 0, Pareto(1)).mean_class().kind is MeanKind.MINUS_INF
        m = Uniform01().mean_class()
        assert m.kind is MeanKind.FINITE and m.value == pytest.approx(0.5)

    def test_pareto_finite_mean(self):
        assert Pareto(3).mean_class().value == pytest.approx(1.5)


class TestStopLoss:
    def test_examples(self):
        assert Uniform01().stop_loss_plus(0) == pytest.approx(0.5)
        assert Discrete.from_pairs([0, 1], [0.5, 0.5]).stop_loss_plus(0.5) == 0.25
        assert Pareto(0.5).stop_loss_plus(7) == INF
        assert Uniform01().stop_loss_minus(1) == pytest.approx(0.5)
        assert Affine(-1, 0, Pareto(0.5)).stop_loss_minus(-3) == INF
        assert PointMass(2).stop_loss_minus(1) == 0

    @given(discrete_laws(), st.integers(-25, 25))
    def test_put_call_parity_exact(self, D, w):
        assert D.stop_loss_plus(w) - D.stop_loss_minus(w) == D.mean() - w

    @pytest.mark.parametrize("D", [Uniform01(), Pareto(3), Affine(2, -1, Pareto(4)),
                                   Mixture((0.5, 0.5), (Uniform01(), Pareto(5)))])
    @pytest.mark.parametrize("w", [-1.0, 0.3, 2.5])
    def test_put_call_parity_numeric(self, D, w):
        mean = D.mean_class().value
        assert D.stop_loss_plus(w) - D.stop_loss_minus(w) == pytest.approx(mean - w, abs=1e-9)

    def test_pareto_closed_form(self):
        # E[(X - w)+] for Pareto(3) at w=2: integral of x^-3 over (2, inf)
        assert Pareto(3).stop_loss_plus(2) == pytest.approx(1 / 8)

    def test_quantile_function_matches_closed_form(self):
        P = Pareto(3)
        Q = QuantileFunction(P.quantile, P.quantile_upper, (1, INF), "pareto3")
        assert Q.stop_loss_plus(2) == pytest.approx(P.stop_loss_plus(2), abs=1e-8)
        assert Q.mean_class().value == pytest.approx(1.5, abs=1e-8)


class TestTailIntegrals:
    def test_examples(self):
        assert Uniform01().upper_tail_integral(0.5) == pytest.approx(0.375)
        assert Pareto(1).upper_tail_integral(0.5) == INF
        assert Discrete.from_pairs([0, 1], [0.5, 0.5]).lower_tail_integral(0.25) == 0

    @given(discrete_laws())
    def test_upper_tail_below_first_jump_is_full_mean(self, D):
        p = D.probs[0] / 2
        assert D.upper_tail_integral(p) == D.mean() - p * D.atoms[0]
        assert D.lower_tail_integral(p) + D.upper_tail_integral(p) == D.mean()

    def test_comonotonic_sum_tail(self):
        S = ComonotonicSum([Pareto(2), Pareto(3)])
        assert S.upper_tail_integral(0.5) == pytest.approx(
            Pareto(2).upper_tail_integral(0.5) + Pareto(3).upper_tail_integral(0.5), rel=1e-7)


class TestValidation:
    def test_rejects_bad_probabilities(self):
        with pytest.raises(ValueError):
            Discrete((0, 1), (0.5, 0.6))
        with pytest.raises(ValueError):
            Discrete((1, 0), (0.5, 0.5))

    def test_from_pairs_merges_and_drops_zero_mass(self):
        D = Discrete.from_pairs([2, 1, 2, 3], [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2), 0])
        assert D.atoms == (1, 2) and D.probs == (Fraction(1, 4), Fraction(3, 4))

    def test_pareto_rejects_nonpositive_alpha(self):
        with pytest.raises(ValueError):
            Pareto(0)

    def test_mixture_needs_components(self):
        with pytest.raises(ValueError):
            Mixture((), ())


class TestJson:
    @pytest.mark.parametrize("spec", [
        {"type": "discrete", "atoms": [0, 1], "probs": [0.5, 0.5]},
        {"type": "pareto", "alpha": 0.5},
        {"type": "cauchy"},
        {"type": "uniform01"},
        {"type": "pointmass", "c": 2},
        {"type": "affine", "a": -1, "b": 0, "base": {"type": "pareto", "alpha": 0.5}},
        {"type": "mixture", "weights": [0.5, 0.5],
         "components": [{"type": "uniform01"}, {"type": "pointmass", "c": 3}]},
    ])
    def test_round_trip(self, spec):
        D = from_json(spec)
        again = from_json(D.to_json())
        for t in (0.1, 0.5, 0.9):
            assert again.quantile(t) == pytest.approx(D.quantile(t))

    def test_decimals_are_exact(self):
        D = from_json({"type": "discrete", "atoms": [0.1, 0.2], "probs": [0.3, 0.7]})
        assert D.atoms == (Fraction(1, 10), Fraction(1, 5)) and D.exact
        assert exact_number(2.0) == 2 and isinstance(exact_number(2.0), int)

    def test_unknown_type(self):
        with pytest.raises(ValueError):
            from_json({"type": "gamma"})


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_mixture_closure_of_convex_order(seed):
    """Mixing two cx-ordered pairs with the same weights keeps the order."""
    rng = np.random.default_rng(seed)
    X, Xp = random_discrete(rng, 5), random_discrete(rng, 5)
    Y, Yp = mean_preserving_spread(X, rng), mean_preserving_spread(Xp, rng)
    assert check_cx(X, Y).holds and check_cx(Xp, Yp).holds
    w = Fraction(int(rng.integers(1, 10)), 10)
    left = Mixture((w, 1 - w), (X, Xp)).as_discrete()
    right = Mixture((w, 1 - w), (Y, Yp)).as_discrete()
    verdict = check_cx(left, right)
    assert verdict.holds and verdict.certification.level == "exact"
    assert math.isfinite(float(left.mean()))
