"""Lattice laws: the concordance and supermodular checkers plus the randomized search."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from stochorder.dist import bernoulli
from stochorder.generators import random_discrete, random_joint
from stochorder.multiorder import (
    GridTooLarge, LatticeDist, LatticeFn, check_concordance, check_sm_lattice, marginals_equal,
    search_concordance_not_sm, supermodular_constraints,
)

COIN = bernoulli(Fraction(1, 2))
B3 = bernoulli(Fraction(3, 10))


def lattice_pairs(rng, count, sizes=(4, 4)):
    for _ in range(count):
        Ms = [random_discrete(rng, n, min_atoms=n) for n in sizes]
        yield (LatticeDist.from_joint(random_joint(Ms, rng)),
               LatticeDist.from_joint(random_joint(Ms, rng)), Ms)


class TestMarginalsEqual:
    def test_examples(self):
        A = LatticeDist.product([B3, B3])
        assert marginals_equal(A, A)
        assert marginals_equal(LatticeDist.comonotonic([COIN, B3]),
                               LatticeDist.countermonotonic([COIN, B3]))
        assert not marginals_equal(A, LatticeDist.product([COIN, COIN]))


class TestConcordance:
    def test_independent_below_comonotonic(self):
        v = check_concordance(LatticeDist.product([COIN, COIN]),
                              LatticeDist.comonotonic([COIN, COIN]))
        assert v.holds and v.certification.level == "exact"

    def test_comonotonic_not_below_countermonotonic(self):
        v = check_concordance(LatticeDist.comonotonic([COIN, COIN]),
                              LatticeDist.countermonotonic([COIN, COIN]))
        assert v.fails
        assert v.witness.at == (0, 0)
        assert (v.witness.lhs, v.witness.rhs) == (Fraction(1, 2), 0)

    def test_reflexive(self):
        A = LatticeDist.product([B3, COIN])
        assert check_concordance(A, A).holds

    def test_marginal_mismatch(self):
        v = check_concordance(LatticeDist.product([B3, B3]), LatticeDist.product([COIN, COIN]))
        assert v.fails and v.witness.which == "marginal"

    def test_frechet_bounds(self, rng):
        for A, _, Ms in lattice_pairs(rng, 30, (3, 4)):
            assert check_concordance(A, LatticeDist.comonotonic(Ms)).holds
            assert check_concordance(LatticeDist.countermonotonic(Ms), A).holds


class TestSupermodularLattice:
    def test_countermonotonic_bernoulli_triple_below_independent(self):
        v = check_sm_lattice(LatticeDist.countermonotonic([B3] * 3), LatticeDist.product([B3] * 3))
        assert v.holds and v.certification.level == "lp_numeric"

    def test_two_by_two_below_comonotonic(self, rng):
        for _ in range(20):
            Ms = [random_discrete(rng, 2, min_atoms=2) for _ in range(2)]
            A = LatticeDist.from_joint(random_joint(Ms, rng))
            assert check_sm_lattice(A, LatticeDist.comonotonic(Ms)).holds

    def test_reversed_fails_with_product_like_certificate(self):
        co, ct = LatticeDist.comonotonic([COIN, COIN]), LatticeDist.countermonotonic([COIN, COIN])
        v = check_sm_lattice(co, ct)
        assert v.fails
        phi = v.certificate.phi
        assert phi.is_supermodular()
        # E[XY] is 1/2 under the comonotonic law and 0 under the counter-monotonic one
        xy = np.array([[0, 0], [0, 1]])
        assert co.expect(xy) == Fraction(1, 2) and ct.expect(xy) == 0
        assert co.expect(phi.values) > ct.expect(phi.values)

    def test_certificates_are_sound(self, rng):
        for A, B, _ in lattice_pairs(rng, 40, (3, 3)):
            v = check_sm_lattice(A, B)
            if v.fails:
                phi = v.certificate.phi
                assert phi.second_differences().min() >= -1e-12
                assert float(A.expect(phi.values) - B.expect(phi.values)) > 1e-9 / 2

    def test_sm_implies_concordance(self, rng):
        for A, B, Ms in lattice_pairs(rng, 40, (3, 3)):
            for X, Y in ((A, B), (A, LatticeDist.comonotonic(Ms))):
                if check_sm_lattice(X, Y).holds:
                    assert check_concordance(X, Y).holds

    def test_antisymmetry(self, rng):
        for A, B, _ in lattice_pairs(rng, 30, (3, 3)):
            if check_sm_lattice(A, B).holds and check_sm_lattice(B, A).holds:
                X, Y = A.regrid(B.axes) if A.axes != B.axes else A, B
                assert np.all(np.abs(np.asarray(X.pmf, float) - np.asarray(Y.pmf, float)) < 1e-9)
        A = LatticeDist.product([B3, COIN])
        assert check_sm_lattice(A, A).holds

    def test_grid_cap(self):
        A = LatticeDist.product([bernoulli(Fraction(1, 2))] * 9)
        with pytest.raises(GridTooLarge):
            check_sm_lattice(A, A)

    def test_bivariate_equivalence(self, rng):
        for A, B, _ in lattice_pairs(rng, 30):
            assert check_concordance(A, B).result is check_sm_lattice(A, B).result


class TestConstraints:
    def test_count_and_sign(self):
        D = supermodular_constraints((3, 3))
        assert D.shape == (4, 9)
        x = np.arange(3)
        product = np.multiply.outer(x, x).ravel()
        assert np.all(D @ product >= 0)
        assert np.all(D @ (-product) <= 0)

    def test_separable_functions_are_modular(self):
        values = np.add.outer(np.array([0.0, 3.0, -1.0]), np.array([2.0, 5.0]))
        fn = LatticeFn(((0, 1, 2), (0, 1)), values)
        assert np.allclose(fn.second_differences(), 0)

    def test_three_dimensions(self):
        D = supermodular_constraints((2, 2, 2))
        assert D.shape == (6, 8)


class TestSearch:
    def test_finds_verified_instance_in_three_dimensions(self):
        found = search_concordance_not_sm(dim=3, rng_seed=1, budget=10_000)
        assert found is not None
        A, B = found
        assert marginals_equal(A, B)
        assert check_concordance(A, B).holds
        assert check_sm_lattice(A, B).fails

    def test_two_dimensions_never(self):
        assert search_concordance_not_sm(dim=2, grid_size=3, budget=200) is None

    def test_zero_budget(self):
        assert search_concordance_not_sm(dim=3, budget=0) is None

    def test_binary_cube_never(self):
        """On {0,1}^3 the two orders coincide, so the search must come back empty."""
        assert search_concordance_not_sm(dim=3, grid_size=2, budget=500) is None


class TestJson:
    def test_round_trip(self):
        A = LatticeDist.countermonotonic([B3] * 3)
        again = LatticeDist.from_json(A.to_json())
        assert again.exact
        assert all(again.pmf[idx] == A.pmf[idx]
                   for idx in itertools.product(range(2), repeat=3))

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            LatticeDist.from_json({"axes": [[0, 1], [0, 1]], "pmf": [[1.0]]})
