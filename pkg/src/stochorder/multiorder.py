"""Concordance and supermodular orders for laws on finite product grids.

Both laws are first placed on the union of their axes.  Concordance compares
the joint cdf P(X <= x) and the upper-orthant probabilities P(X >= x) at
every grid point, which covers all of R^d for step functions.  The
supermodular order is decided by a linear program over grid functions whose
adjacent mixed second differences are nonnegative.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .couplings import (
    DiscreteJoint, comonotonic_version, countermono_version, to_discrete_joint,
)
from .dist import Discrete, exact_number
from .lp import LPFailure, simplex_min
from .orders import Certification, OrderVerdict, Result, Witness

__all__ = [
    "LatticeDist", "LatticeFn", "GridTooLarge", "LPFailure", "marginals_equal",
    "check_concordance", "check_sm_lattice", "search_concordance_not_sm",
    "supermodular_constraints", "DEFAULT_MAX_CELLS",
]

DEFAULT_MAX_CELLS = 256


class GridTooLarge(ValueError):
    """The merged grid has more cells than the LP is allowed to handle."""


def _exact_array(values) -> np.ndarray:
    arr = np.array(values, dtype=object)
    flat = arr.ravel()
    if all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in flat):
        return arr
    return np.array(values, dtype=float)


@dataclass(frozen=True, eq=False)
class LatticeDist:
    """A pmf on the product of strictly increasing axes (row-major tensor)."""

    axes: tuple
    pmf: np.ndarray

    def __post_init__(self):
        axes = tuple(tuple(a) for a in self.axes)
        pmf = _exact_array(self.pmf)
        if len(axes) < 2:
            raise ValueError("lattice laws need at least two dimensions")
        if pmf.shape != tuple(len(a) for a in axes):
            raise ValueError(f"pmf shape {pmf.shape} does not match axes")
        if any(b <= a for ax in axes for a, b in zip(ax, ax[1:])):
            raise ValueError("axes must be strictly increasing")
        if any(v < 0 for v in pmf.ravel()) or abs(pmf.sum() - 1) > 1e-12:
            raise ValueError("pmf must be nonnegative and sum to 1")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "pmf", pmf)

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def exact(self) -> bool:
        return self.pmf.dtype == object

    @classmethod
    def from_joint(cls, J: DiscreteJoint) -> "LatticeDist":
        axes = [sorted({a[i] for a in J.atoms}) for i in range(J.dim)]
        index = [{v: k for k, v in enumerate(ax)} for ax in axes]
        exact = all(isinstance(p, (int, Fraction)) for p in J.probs)
        pmf = np.zeros(tuple(len(a) for a in axes), dtype=object if exact else float)
        if exact:
            pmf[...] = 0
        for a, p in zip(J.atoms, J.probs):
            pmf[tuple(index[i][a[i]] for i in range(J.dim))] += p
        return cls(tuple(axes), pmf)

    @classmethod
    def product(cls, marginals: Sequence[Discrete]) -> "LatticeDist":
        pmf = np.array(1, dtype=object)
        for m in marginals:
            pmf = np.multiply.outer(pmf, np.array(m.probs, dtype=object))
        return cls(tuple(m.atoms for m in marginals), pmf)

    @classmethod
    def comonotonic(cls, marginals: Sequence[Discrete]) -> "LatticeDist":
        return cls.from_joint(to_discrete_joint(comonotonic_version(marginals)))

    @classmethod
    def countermonotonic(cls, marginals: Sequence[Discrete]) -> "LatticeDist":
        return cls.from_joint(to_discrete_joint(countermono_version(marginals)))

    def to_joint(self) -> DiscreteJoint:
        atoms, probs = [], []
        for idx in itertools.product(*(range(len(a)) for a in self.axes)):
            p = self.pmf[idx]
            if p:
                atoms.append(tuple(self.axes[i][k] for i, k in enumerate(idx)))
                probs.append(p)
        return DiscreteJoint.from_pairs(atoms, probs)

    def marginal(self, i: int) -> dict:
        """Nonzero masses of coordinate i as {value: probability}."""
        other = tuple(k for k in range(self.dim) if k != i)
        masses = self.pmf.sum(axis=other)
        return {v: m for v, m in zip(self.axes[i], masses) if m != 0}

    def regrid(self, axes: Sequence[Sequence]) -> "LatticeDist":
        """The same law on a finer product grid (axes must contain the old ones)."""
        axes = tuple(tuple(a) for a in axes)
        pmf = np.zeros(tuple(len(a) for a in axes), dtype=self.pmf.dtype)
        if self.exact:
            pmf[...] = 0
        where = [np.array([ax.index(v) for v in old]) for ax, old in zip(axes, self.axes)]
        pmf[np.ix_(*where)] = self.pmf
        return LatticeDist(axes, pmf)

    def expect(self, values: np.ndarray):
        return (self.pmf * values).sum()

    def to_json(self) -> dict:
        return {"axes": [[float(v) for v in ax] for ax in self.axes],
                "pmf": np.asarray(self.pmf, dtype=float).tolist()}

    @classmethod
    def from_json(cls, obj) -> "LatticeDist":
        try:
            axes = tuple(tuple(exact_number(v) for v in a) for a in obj["axes"])
            pmf = np.vectorize(exact_number, otypes=[object])(np.array(obj["pmf"], dtype=object))
            return cls(axes, pmf)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"bad lattice spec: {exc}") from None


@dataclass(frozen=True, eq=False)
class LatticeFn:
    """Values of a function on a product grid."""

    axes: tuple
    values: np.ndarray

    def second_differences(self) -> np.ndarray:
        return supermodular_constraints(self.values.shape) @ self.values.ravel()

    def is_supermodular(self, tol: float = 1e-12) -> bool:
        diffs = self.second_differences()
        return bool(diffs.size == 0 or diffs.min() >= -tol)

    def to_dict(self) -> dict:
        return {"axes": [[float(v) for v in ax] for ax in self.axes],
                "values": np.asarray(self.values, dtype=float).tolist()}


def _merge(A: LatticeDist, B: LatticeDist):
    if A.dim != B.dim:
        raise ValueError("lattice laws of different dimensions")
    axes = tuple(tuple(sorted(set(a) | set(b))) for a, b in zip(A.axes, B.axes))
    return A.regrid(axes), B.regrid(axes)


def _close(a, b, exact: bool) -> bool:
    return a == b if exact else abs(float(a) - float(b)) <= 1e-12


def _marginal_witness(A: LatticeDist, B: LatticeDist) -> Optional[Witness]:
    exact = A.exact and B.exact
    for i in range(A.dim):
        ma, mb = A.marginal(i), B.marginal(i)
        for v in sorted(set(ma) | set(mb)):
            if not _close(ma.get(v, 0), mb.get(v, 0), exact):
                return Witness((i, v), ma.get(v, 0), mb.get(v, 0), "marginal")
    return None


def marginals_equal(A: LatticeDist, B: LatticeDist) -> bool:
    """All one-dimensional marginals agree (exactly for rational pmfs)."""
    return _marginal_witness(*_merge(A, B)) is None


def _cdf(pmf: np.ndarray, dim: Optional[int] = None) -> np.ndarray:
    out = pmf
    for ax in range(pmf.ndim if dim is None else dim):
        out = np.cumsum(out, axis=ax)
    return out


def _upper(pmf: np.ndarray, dim: Optional[int] = None) -> np.ndarray:
    """P(X >= x) at every grid point (summing over the first ``dim`` axes)."""
    out = pmf
    for ax in range(pmf.ndim if dim is None else dim):
        out = np.flip(np.cumsum(np.flip(out, axis=ax), axis=ax), axis=ax)
    return out


def check_concordance(A: LatticeDist, B: LatticeDist) -> OrderVerdict:
    """A <=c B: equal marginals, with every orthant probability of A below that of B."""
    A, B = _merge(A, B)
    exact = A.exact and B.exact
    cert = Certification.exact()
    mw = _marginal_witness(A, B)
    if mw is not None:
        return OrderVerdict("concordance", Result.FAILS, cert, mw, "marginals differ")
    slack = 0 if exact else 1e-12
    for name, fn in (("cdf", _cdf), ("survival", _upper)):
        fa, fb = fn(A.pmf), fn(B.pmf)
        for idx in itertools.product(*(range(n) for n in fa.shape)):
            if fa[idx] > fb[idx] + slack:
                at = tuple(A.axes[i][k] for i, k in enumerate(idx))
                return OrderVerdict("concordance", Result.FAILS, cert,
                                    Witness(at, fa[idx], fb[idx], name))
    return OrderVerdict("concordance", Result.HOLDS, cert)


def supermodular_constraints(shape: Sequence[int]) -> np.ndarray:
    """Rows D with (D @ f.ravel()) the adjacent mixed second differences of f."""
    shape = tuple(shape)
    n = int(np.prod(shape))
    idx = np.arange(n).reshape(shape)
    rows = []
    for i, j in itertools.combinations(range(len(shape)), 2):
        sl = lambda di, dj: idx[tuple(
            slice(di, shape[k] - 1 + di) if k == i else
            slice(dj, shape[k] - 1 + dj) if k == j else slice(None)
            for k in range(len(shape)))].ravel()
        a, b, c, d = sl(1, 1), sl(1, 0), sl(0, 1), sl(0, 0)
        block = np.zeros((a.size, n))
        r = np.arange(a.size)
        block[r, a] += 1
        block[r, b] -= 1
        block[r, c] -= 1
        block[r, d] += 1
        rows.append(block)
    return np.vstack(rows) if rows else np.zeros((0, n))


@dataclass(frozen=True)
class _SmCertificate:
    """A supermodular phi with E_A[phi] > E_B[phi], plus the LP optimum."""

    phi: LatticeFn
    lp_minimum: float
    gap: float

    def to_dict(self) -> dict:
        return {"phi": self.phi.to_dict(), "lp_minimum": self.lp_minimum, "gap": self.gap}


def check_sm_lattice(A: LatticeDist, B: LatticeDist, tol: float = 1e-9,
                     max_cells: int = DEFAULT_MAX_CELLS) -> OrderVerdict:
    """A <=sm B on a finite grid, by linear programming.

    Minimizes E_B[phi] - E_A[phi] over supermodular grid functions with
    values in [-1, 1] (substituting psi = phi + 1 in [0, 2]); the order holds
    iff the minimum is at least -tol.  On finite support the plain, dagger
    and diamond variants of the order coincide, so one verdict serves all.
    A failing verdict carries the minimizing phi, re-verified by summation.
    """
    A, B = _merge(A, B)
    shape = A.pmf.shape
    n = int(np.prod(shape))
    if n > max_cells:
        raise GridTooLarge(f"merged grid has {n} cells, cap is {max_cells}")
    pa = np.asarray(A.pmf, dtype=float).ravel()
    pb = np.asarray(B.pmf, dtype=float).ravel()
    D = supermodular_constraints(shape)
    G = np.vstack([-D, np.eye(n)])
    h = np.concatenate([np.zeros(D.shape[0]), np.full(n, 2.0)])
    res = simplex_min(pb - pa, G, h)
    if res.status != "optimal":
        raise LPFailure(f"LP ended with status {res.status}")
    # sum(pb - pa) vanishes, so the shift psi -> phi leaves the objective alone
    phi = res.x - 1.0
    minimum = float((pb - pa) @ phi)
    cert = Certification("lp_numeric", None, tol)
    if minimum >= -tol:
        return OrderVerdict("sm", Result.HOLDS, cert, note=f"lp_minimum={minimum:.3e}",
                            certificate=None, statistic=minimum)
    fn = LatticeFn(A.axes, phi.reshape(shape))
    gap = float(A.expect(fn.values) - B.expect(fn.values))
    certificate = _SmCertificate(fn, minimum, gap)
    if not (fn.is_supermodular(1e-12) and gap > tol / 2):
        return OrderVerdict("sm", Result.INCONCLUSIVE, cert,
                            note="LP certificate failed re-verification",
                            certificate=certificate, statistic=minimum)
    return OrderVerdict("sm", Result.FAILS, cert, certificate=certificate, statistic=minimum)


# ---------------------------------------------------------------------------
# randomized search for concordance without supermodular dominance


def _random_marginal(rng: np.random.Generator, size: int) -> Discrete:
    weights = rng.integers(1, 6, size)
    total = int(weights.sum())
    return Discrete(tuple(range(size)), tuple(Fraction(int(w), total) for w in weights))


def _random_supermodular(shape, axes, rng: np.random.Generator) -> np.ndarray:
    """u(sum_i a_i x_i) with u a convex hinge and a_i > 0: supermodular."""
    grids = np.meshgrid(*[np.asarray(a, dtype=float) for a in axes], indexing="ij")
    weights = rng.uniform(0.2, 1.0, len(shape))
    s = sum(w * g for w, g in zip(weights, grids))
    t = rng.uniform(s.min(), s.max())
    return np.maximum(s - t, 0.0)


def _rationalize(x: np.ndarray, denominator: int) -> np.ndarray:
    """Round to multiples of 1/denominator; LP vertices here share A's denominator."""
    out = np.empty(x.shape, dtype=object)
    for idx, v in np.ndenumerate(x):
        out[idx] = Fraction(round(float(v) * denominator), denominator)
    return out


def search_concordance_not_sm(dim: int = 3, grid_size: int = 3, rng_seed=0,
                              budget: int = 10_000):
    """Random search for A <=c B with A not <=sm B.

    Each draw fixes random marginals and a random coupling A, picks a random
    supermodular phi, and asks an LP for the concordance-larger B with the
    same marginals that minimizes E_B[phi].  A rationalized B is returned
    only if both exact deciders confirm it.  Returns (A, B) or None.
    """
    from scipy.optimize import linprog

    from .generators import random_joint

    if dim < 2:
        raise ValueError("dim must be at least 2")
    rng = np.random.default_rng(rng_seed)
    shape = (grid_size,) * dim
    n = grid_size ** dim
    for _ in range(budget):
        marginals = [_random_marginal(rng, grid_size) for _ in range(dim)]
        A = LatticeDist.from_joint(random_joint(marginals, rng)).regrid(
            [tuple(range(grid_size))] * dim)
        pa = np.asarray(A.pmf, dtype=float)
        phi = _random_supermodular(shape, A.axes, rng)

        eye = np.eye(n).reshape(shape + (n,))
        cdf_rows = _cdf(eye, dim).reshape(n, n)
        up_rows = _upper(eye, dim).reshape(n, n)
        marg_rows = np.vstack([eye.sum(axis=tuple(k for k in range(dim) if k != i)).reshape(grid_size, n)
                               for i in range(dim)])
        A_ub = np.vstack([-cdf_rows, -up_rows])
        b_ub = np.concatenate([-cdf_rows @ pa.ravel(), -up_rows @ pa.ravel()])
        res = linprog(phi.ravel(), A_ub=A_ub, b_ub=b_ub, A_eq=marg_rows,
                      b_eq=marg_rows @ pa.ravel(), bounds=(0, None), method="highs")
        if res.status != 0 or phi.ravel() @ res.x > phi.ravel() @ pa.ravel() - 1e-7:
            continue
        denominator = math.lcm(*(Fraction(v).denominator for v in A.pmf.ravel()))
        pb = _rationalize(res.x.reshape(shape), denominator)
        if sum(pb.ravel()) != 1 or any(v < 0 for v in pb.ravel()):
            continue
        B = LatticeDist(A.axes, pb)
        if check_concordance(A, B).holds and check_sm_lattice(A, B).fails:
            return A, B
    return None
