"""Seeded random instances with exact rational probabilities.

The property tests and the gallery draw random discrete laws and random
couplings of given marginals from here.  Mean-preserving spreads move a law
up in convex order, which yields ordered pairs by construction.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .couplings import DiscreteJoint
from .dist import Discrete

__all__ = ["random_discrete", "mean_preserving_spread", "random_joint", "greedy_joint"]


def random_discrete(rng: np.random.Generator, max_atoms: int = 8, lo: int = -10,
                    hi: int = 10, min_atoms: int = 1) -> Discrete:
    """Integer atoms in [lo, hi] with small-denominator rational weights."""
    k = int(rng.integers(min_atoms, max_atoms + 1))
    atoms = rng.choice(np.arange(lo, hi + 1), size=k, replace=False)
    weights = rng.integers(1, 10, size=k)
    total = int(weights.sum())
    return Discrete.from_pairs([int(a) for a in atoms],
                               [Fraction(int(w), total) for w in weights])


def mean_preserving_spread(d: Discrete, rng: np.random.Generator, width: int = 3) -> Discrete:
    """Split part of one atom's mass onto two points around it, same mean.

    Mass q at x moves to x - a and x + b in proportions b : a, which keeps
    the mean and yields a law larger in convex order.
    """
    i = int(rng.integers(len(d.atoms)))
    x, p = d.atoms[i], d.probs[i]
    a, b = int(rng.integers(1, width + 1)), int(rng.integers(1, width + 1))
    q = p * Fraction(int(rng.integers(1, 5)), 4)
    atoms = list(d.atoms) + [x - a, x + b, x]
    probs = list(d.probs) + [q * Fraction(b, a + b), q * Fraction(a, a + b), -q]
    return Discrete.from_pairs(atoms, probs)


def greedy_joint(marginals: Sequence[Discrete], orders: Sequence[Sequence[int]]) -> DiscreteJoint:
    """North-west corner coupling visiting each marginal's atoms in ``orders``."""
    d = len(marginals)
    pos = [0] * d
    left = [marginals[i].probs[orders[i][0]] for i in range(d)]
    atoms, probs = [], []
    while all(pos[i] < len(orders[i]) for i in range(d)):
        m = min(left)
        atoms.append(tuple(marginals[i].atoms[orders[i][pos[i]]] for i in range(d)))
        probs.append(m)
        for i in range(d):
            left[i] -= m
            if left[i] == 0:
                pos[i] += 1
                if pos[i] < len(orders[i]):
                    left[i] = marginals[i].probs[orders[i][pos[i]]]
    return DiscreteJoint.from_pairs(atoms, probs)


def random_joint(marginals: Sequence[Discrete], rng: np.random.Generator,
                 n_vertices: int = 3) -> DiscreteJoint:
    """Mixture of greedy couplings over random atom orders, rational weights."""
    weights = [Fraction(int(w)) for w in rng.integers(1, 10, size=n_vertices)]
    total = sum(weights)
    atoms, probs = [], []
    for w in weights:
        orders = [list(rng.permutation(len(m.atoms))) for m in marginals]
        J = greedy_joint(marginals, orders)
        atoms.extend(J.atoms)
        probs.extend(p * w / total for p in J.probs)
    return DiscreteJoint.from_pairs(atoms, probs)
