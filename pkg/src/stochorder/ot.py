"""Optimal-transport bounds for supermodular costs between two marginals.

For a supermodular cost the expected cost is smallest under the
counter-monotonic coupling and largest under the comonotonic one.  An
exhaustive assignment solver over equiprobable atoms serves as an
independent oracle for both claims.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .couplings import comonotonic_version, countermono_version, expectation_of
from .dist import Distribution
from .extmath import DEFAULT_CONFIG, MeanClass, QuadConfig

__all__ = [
    "CostFn", "builtin_cost", "BUILTIN_COSTS", "spot_check_supermodular",
    "ot_extremes_supermodular", "assignment_oracle",
]


@dataclass(frozen=True)
class CostFn:
    evaluator: Callable
    declared_supermodular: bool = True
    name: str = "custom"

    def __call__(self, x, y):
        return self.evaluator(x, y)


def _cx_of_sum(w):
    def c(x, y):
        s = x + y - w
        return s if s > 0 else 0 * s
    return c


BUILTIN_COSTS = {
    "product": lambda: CostFn(lambda x, y: x * y, True, "product"),
    "neg_sq_diff": lambda: CostFn(lambda x, y: -(x - y) ** 2, True, "neg_sq_diff"),
    "abs_diff_neg": lambda: CostFn(lambda x, y: -abs(x - y), True, "abs_diff_neg"),
}


def builtin_cost(name: str) -> CostFn:
    """Look up a named cost; ``cx_of_sum:w`` means (x + y - w)+."""
    if name.startswith("cx_of_sum:"):
        try:
            w = Fraction(name.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad threshold in cost {name!r}") from None
        w = int(w) if w.denominator == 1 else w
        return CostFn(_cx_of_sum(w), True, name)
    try:
        return BUILTIN_COSTS[name]()
    except KeyError:
        known = sorted(BUILTIN_COSTS) + ["cx_of_sum:<w>"]
        raise ValueError(f"unknown cost {name!r}; choose from {known}") from None


def spot_check_supermodular(c: CostFn, rng_seed=0, n: int = 1000, scale: float = 10.0,
                            tol: float = 1e-12) -> bool:
    """Test c(x) + c(y) <= c(x ^ y) + c(x v y) on random point pairs."""
    rng = np.random.default_rng(rng_seed)
    pts = rng.uniform(-scale, scale, size=(n, 4))
    for x1, x2, y1, y2 in pts:
        lo = (min(x1, y1), min(x2, y2))
        hi = (max(x1, y1), max(x2, y2))
        if c(x1, x2) + c(y1, y2) > c(*lo) + c(*hi) + tol * (1 + abs(c(*lo)) + abs(c(*hi))):
            return False
    return True


def ot_extremes_supermodular(DX: Distribution, DY: Distribution, c: CostFn,
                             cfg: QuadConfig = DEFAULT_CONFIG) -> tuple[MeanClass, MeanClass]:
    """(min, max) of E[c(X, Y)] over couplings, for supermodular c.

    The minimum is taken by the counter-monotonic coupling and the maximum by
    the comonotonic one; either may be infinite or undefined.
    """
    if not c.declared_supermodular:
        raise ValueError("cost is not declared supermodular")
    low = expectation_of(countermono_version([DX, DY]), c, cfg)
    high = expectation_of(comonotonic_version([DX, DY]), c, cfg)
    return low, high


def _exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


def assignment_oracle(xs: Sequence, ys: Sequence, c: CostFn, mode: str = "min"):
    """Best (1/n) sum_i c(x_i, y_sigma(i)) over all permutations sigma.

    Exhaustive, so limited to n <= 9.  Returns (value, sigma) with sigma a
    tuple of indices into ``ys``; the value is a Fraction when every cost is
    an integer or Fraction.
    """
    n = len(xs)
    if n != len(ys) or n == 0:
        raise ValueError("need two equally long, non-empty atom lists")
    if n > 9:
        raise ValueError("exhaustive enumeration is limited to n <= 9")
    if mode not in ("min", "max"):
        raise ValueError("mode must be 'min' or 'max'")
    table = [[c(x, y) for y in ys] for x in xs]
    sign = 1 if mode == "min" else -1
    best, best_perm = None, None
    for perm in itertools.permutations(range(n)):
        total = sum(table[i][perm[i]] for i in range(n))
        if best is None or sign * total < sign * best:
            best, best_perm = total, perm
    value = Fraction(best, n) if _exact(v for row in table for v in row) else best / n
    return value, best_perm
