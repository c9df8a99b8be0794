"""Optimal-transport extremes for supermodular costs and the assignment oracle."""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from stochorder.couplings import comonotonic_version, countermono_version, sum_distribution
from stochorder.dist import Discrete, Pareto, Uniform01
from stochorder.extmath import MeanKind
from stochorder.ot import (
    CostFn, assignment_oracle, builtin_cost, ot_extremes_supermodular, spot_check_supermodular,
)


class TestExtremes:
    def test_product_on_uniforms(self):
        low, high = ot_extremes_supermodular(Uniform01(), Uniform01(), builtin_cost("product"))
        assert low.value == pytest.approx(1 / 6, abs=1e-9)
        assert high.value == pytest.approx(1 / 3, abs=1e-9)
        quad_low = integrate.quad(lambda u: u * (1 - u), 0, 1)[0]
        assert low.value == pytest.approx(quad_low, abs=1e-9)

    def test_stop_loss_of_sum(self):
        low, high = ot_extremes_supermodular(Uniform01(), Uniform01(), builtin_cost("cx_of_sum:1"))
        assert low.value == pytest.approx(0, abs=1e-12)
        assert high.value == pytest.approx(0.25, abs=1e-9)

    def test_pareto_sum_is_infinite(self):
        cost = CostFn(lambda x, y: x + y, True, "sum")
        low, high = ot_extremes_supermodular(Pareto(0.5), Pareto(0.5), cost)
        assert low.kind is MeanKind.PLUS_INF and high.kind is MeanKind.PLUS_INF

    def test_undeclared_cost_rejected(self):
        with pytest.raises(ValueError):
            ot_extremes_supermodular(Uniform01(), Uniform01(), CostFn(abs, False))


class TestAssignmentOracle:
    def test_rearrangement(self):
        xs = ys = [1, 2, 3]
        value, perm = assignment_oracle(xs, ys, builtin_cost("product"), "max")
        assert value == Fraction(14, 3) and perm == (0, 1, 2)
        value, perm = assignment_oracle(xs, ys, builtin_cost("product"), "min")
        assert value == Fraction(10, 3) and perm == (2, 1, 0)

    def test_single_atom(self):
        c = builtin_cost("neg_sq_diff")
        assert assignment_oracle([2], [5], c, "min")[0] == -9
        assert assignment_oracle([2], [5], c, "max")[0] == -9

    def test_limits(self):
        c = builtin_cost("product")
        with pytest.raises(ValueError):
            assignment_oracle(list(range(10)), list(range(10)), c)
        with pytest.raises(ValueError):
            assignment_oracle([1, 2], [1], c)

    def test_anti_sorted_attains_min(self, rng):
        c = builtin_cost("product")
        for _ in range(30):
            n = int(rng.integers(1, 7))
            xs = sorted(int(v) for v in rng.integers(-5, 6, n))
            ys = sorted(int(v) for v in rng.integers(-5, 6, n))
            value, _ = assignment_oracle(xs, ys, c, "min")
            assert value == Fraction(sum(x * y for x, y in zip(xs, reversed(ys))), n)

    def test_agrees_with_stop_loss_of_sums(self, rng):
        """For c = (x + y - w)+ the extremes are stop-loss values of ct/co sums."""
        for _ in range(30):
            n = int(rng.integers(1, 7))
            xs = [int(v) for v in rng.integers(-4, 5, n)]
            ys = [int(v) for v in rng.integers(-4, 5, n)]
            w = int(rng.integers(-4, 5))
            c = builtin_cost(f"cx_of_sum:{w}")
            X, Y = Discrete.uniform_on(xs), Discrete.uniform_on(ys)
            ct = sum_distribution(countermono_version([X, Y]))
            co = sum_distribution(comonotonic_version([X, Y]))
            assert assignment_oracle(xs, ys, c, "min")[0] == ct.stop_loss_plus(w)
            assert assignment_oracle(xs, ys, c, "max")[0] == co.stop_loss_plus(w)


class TestCosts:
    @pytest.mark.parametrize("name", ["product", "neg_sq_diff", "abs_diff_neg", "cx_of_sum:2.5"])
    def test_builtins_are_supermodular(self, name):
        assert spot_check_supermodular(builtin_cost(name))

    def test_submodular_cost_detected(self):
        assert not spot_check_supermodular(CostFn(lambda x, y: -x * y, True, "neg_product"))

    def test_unknown_cost(self):
        with pytest.raises(ValueError):
            builtin_cost("euclid")
        with pytest.raises(ValueError):
            builtin_cost("cx_of_sum:abc")


def test_exhaustive_oracle_matches_brute_force():
    xs, ys = [0, 3, 1, 4], [2, -1, 5, 0]
    c = builtin_cost("neg_sq_diff")
    values = [sum(c(xs[i], ys[p[i]]) for i in range(4)) for p in itertools.permutations(range(4))]
    assert assignment_oracle(xs, ys, c, "min")[0] == Fraction(min(values), 4)
    assert assignment_oracle(xs, ys, c, "max")[0] == Fraction(max(values), 4)
    assert np.isfinite(float(Fraction(max(values), 4)))
