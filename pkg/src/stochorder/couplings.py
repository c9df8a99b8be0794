"""Couplings driven by one shared uniform variable, and finite joint laws.

A ``UMaps`` coupling is the law of (T_1(U), ..., T_d(U)) for U uniform on
(0, 1).  When every map is a step function with jumps at known levels the
coupling converts exactly into a ``DiscreteJoint``; otherwise sums and
expectations are one-dimensional integrals or grid approximations in u.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .dist import Affine, ComonotonicSum, Discrete, Distribution, PointMass, Uniform01
from .extmath import (
    DEFAULT_CONFIG, INF, MINUS_INF, PLUS_INF, UNDEFINED, MeanClass,
    QuadConfig, ext_add, integrate_quantile,
)

__all__ = [
    "UMaps", "DiscreteJoint", "Coupling", "CtExistence", "CtNotExists",
    "comonotonic_version", "countermono_existence", "countermono_version",
    "sum_distribution", "expectation_of", "is_pairwise_countermonotonic",
    "to_discrete_joint", "marginal_discrepancy", "from_json", "GridSum",
]


class CtNotExists(ValueError):
    """No counter-monotonic version exists for the given marginals."""


@dataclass(frozen=True, eq=False)
class UMaps:
    """(T_1(U), ..., T_d(U)) with U uniform on (0, 1).

    ``levels`` lists points of (0, 1) where some map jumps or kinks;
    ``step`` says every map is constant between consecutive levels.
    """

    maps: tuple
    marginals: tuple
    kind: str = "general"
    levels: tuple = ()
    step: bool = False

    @property
    def dim(self) -> int:
        return len(self.maps)

    def evaluate(self, u) -> np.ndarray:
        """Matrix of shape (len(u), d) with row k equal to T(u_k)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return np.column_stack([np.asarray(T(u), dtype=float) * np.ones_like(u)
                                for T in self.maps])

    def point(self, u) -> tuple:
        """T(u) for a single level, preserving exact arithmetic."""
        return tuple(T(u) for T in self.maps)


@dataclass(frozen=True, eq=False)
class DiscreteJoint:
    """Finitely many points of R^d with positive probabilities."""

    atoms: tuple
    probs: tuple

    def __post_init__(self):
        atoms = tuple(tuple(a) for a in self.atoms)
        probs = tuple(self.probs)
        if not atoms or len(atoms) != len(probs):
            raise ValueError("joint needs as many probabilities as atoms")
        if len({len(a) for a in atoms}) != 1:
            raise ValueError("all atoms must have the same dimension")
        if any(p <= 0 for p in probs) or abs(sum(probs) - 1) > 1e-12:
            raise ValueError("joint probabilities must be positive and sum to 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_pairs(cls, atoms: Sequence, probs: Sequence) -> "DiscreteJoint":
        merged: dict = {}
        for a, p in zip(atoms, probs):
            if p:
                key = tuple(a)
                merged[key] = merged.get(key, 0) + p
        keys = sorted(merged)
        return cls(tuple(keys), tuple(merged[k] for k in keys))

    @property
    def dim(self) -> int:
        return len(self.atoms[0])

    def marginal(self, i: int) -> Discrete:
        return Discrete.from_pairs([a[i] for a in self.atoms], self.probs)

    @property
    def marginals(self) -> tuple:
        return tuple(self.marginal(i) for i in range(self.dim))

    def as_dict(self) -> dict:
        return dict(zip(self.atoms, self.probs))

    def to_json(self) -> dict:
        return {"type": "discrete_joint", "atoms": [[float(x) for x in a] for a in self.atoms],
                "probs": [float(p) for p in self.probs]}


Coupling = UMaps | DiscreteJoint


# ---------------------------------------------------------------------------
# constructions


def _step_levels(Ds: Sequence[Distribution]) -> Optional[list]:
    bps = [D.breakpoints() for D in Ds]
    if any(b is None for b in bps):
        return None
    return bps


def _quantile_map(D: Distribution) -> Callable:
    return lambda u: D.quantile(u)


def comonotonic_version(Ds: Sequence[Distribution]) -> UMaps:
    """T_i(u) = F_i^{-1}(u) for every i."""
    Ds = tuple(Ds)
    if not Ds:
        raise ValueError("need at least one marginal")
    bps = _step_levels(Ds)
    levels = tuple(sorted(set().union(*bps))) if bps is not None else ()
    return UMaps(tuple(_quantile_map(D) for D in Ds), Ds, "comonotonic",
                 levels, bps is not None)


class CtExistence(enum.Enum):
    EXISTS_LOW = "exists_low"
    EXISTS_HIGH = "exists_high"
    EXISTS_PAIRWISE = "exists_pairwise"
    NOT_EXISTS = "not_exists"


def _mass_above_inf(D: Distribution):
    lo, _ = D.support_bounds()
    return 1 - D.cdf(lo) if math.isfinite(lo) else 1


def _mass_below_sup(D: Distribution):
    _, hi = D.support_bounds()
    return D.cdf_left(hi) if math.isfinite(hi) else 1


def countermono_existence(Ds: Sequence[Distribution]) -> CtExistence:
    """Whether the marginals admit a pairwise counter-monotonic coupling.

    With at most two non-degenerate marginals one always exists.  Beyond
    that, either all components but one must sit at their essential infimum
    (the masses above it sum to at most 1), or symmetrically at the top.
    """
    Ds = list(Ds)
    if len(Ds) <= 2 or sum(not D.is_degenerate for D in Ds) <= 2:
        return CtExistence.EXISTS_PAIRWISE
    if sum(_mass_above_inf(D) for D in Ds) <= 1:
        return CtExistence.EXISTS_LOW
    if sum(_mass_below_sup(D) for D in Ds) <= 1:
        return CtExistence.EXISTS_HIGH
    return CtExistence.NOT_EXISTS


def _constant(c):
    return lambda u: np.full(np.shape(u), float(c)) if np.ndim(u) else c


def _reversed_map(D: Distribution) -> Callable:
    return lambda u: D.quantile_right(1 - u)


def _in_interval(u, lo, hi):
    return (lo <= u) & (u < hi) if np.ndim(u) else lo <= u < hi


def _low_map(D: Distribution, start, length):
    base = D.support_bounds()[0]
    offset = 1 - length - start

    def T(u):
        if np.ndim(u):
            u = np.asarray(u, dtype=float)
            inside = _in_interval(u, start, start + length)
            out = np.full(u.shape, float(base))
            if inside.any():
                out[inside] = D.quantile(np.clip(u[inside] + offset, 1e-300, 1 - 1e-16))
            return out
        return D.quantile(u + offset) if start <= u < start + length else base
    return T


def _high_map(D: Distribution, start, length):
    top = D.support_bounds()[1]

    def T(u):
        if np.ndim(u):
            u = np.asarray(u, dtype=float)
            inside = _in_interval(u, start, start + length)
            out = np.full(u.shape, float(top))
            if inside.any():
                out[inside] = D.quantile(np.clip(u[inside] - start, 1e-300, 1 - 1e-16))
            return out
        return D.quantile(u - start) if start <= u < start + length else top
    return T


def countermono_version(Ds: Sequence[Distribution]) -> UMaps:
    """A pairwise counter-monotonic coupling of the marginals.

    Two marginals use F_1^{-1}(u) against the right quantile of the second
    at 1 - u.  With more, each non-degenerate component gets its own interval
    of u (packed left to right in input order) on which it leaves its
    essential infimum (or supremum), and stays there elsewhere.
    """
    Ds = tuple(Ds)
    status = countermono_existence(Ds)
    if status is CtExistence.NOT_EXISTS:
        raise CtNotExists("the marginals admit no counter-monotonic version")
    bps = _step_levels(Ds)

    if status is CtExistence.EXISTS_PAIRWISE:
        active = [i for i, D in enumerate(Ds) if not D.is_degenerate]
        maps, levels = [], set()
        for i, D in enumerate(Ds):
            if i not in active:
                maps.append(_constant(D.support_bounds()[0]))
            elif i == active[0]:
                maps.append(_quantile_map(D))
                if bps is not None:
                    levels |= set(bps[i])
            else:
                maps.append(_reversed_map(D))
                if bps is not None:
                    levels |= {1 - c for c in bps[i]}
        return UMaps(tuple(maps), Ds, "countermonotonic", tuple(sorted(levels)), bps is not None)

    low = status is CtExistence.EXISTS_LOW
    maps, levels, start = [], set(), 0
    for i, D in enumerate(Ds):
        length = _mass_above_inf(D) if low else _mass_below_sup(D)
        if D.is_degenerate or length == 0:
            maps.append(_constant(D.support_bounds()[0]))
            continue
        maps.append(_low_map(D, start, length) if low else _high_map(D, start, length))
        levels |= {start, start + length}
        if bps is not None:
            if low:
                levels |= {c - (1 - length) + start for c in bps[i] if c > 1 - length}
            else:
                levels |= {c + start for c in bps[i] if c < length}
        start += length
    levels = tuple(sorted(v for v in levels if 0 < v < 1))
    return UMaps(tuple(maps), Ds, "countermonotonic", levels, bps is not None)


# ---------------------------------------------------------------------------
# evaluation


def _segments(levels) -> list:
    pts = sorted(set(levels) | {0, 1})
    return list(zip(pts, pts[1:]))


def to_discrete_joint(C: Coupling) -> DiscreteJoint:
    """Exact finite form of a coupling whose maps are step functions."""
    if isinstance(C, DiscreteJoint):
        return C
    if not C.step:
        raise ValueError("coupling maps are not step functions")
    atoms, probs = [], []
    for a, b in _segments(C.levels):
        atoms.append(C.point((a + b) / 2))
        probs.append(b - a)
    return DiscreteJoint.from_pairs(atoms, probs)


def _affine_sum(Ds: Sequence[Distribution]) -> Optional[Distribution]:
    """Comonotonic sum of positive affine images of one base, in closed form."""
    scale, shift, base = 0, 0, None
    for D in Ds:
        a, b, B = D.affine_form()
        if B is not None:
            if base is not None and B != base:
                return None
            base = B
        scale, shift = scale + a, shift + b
    if base is None:
        return PointMass(shift)
    if scale == 1 and shift == 0:
        return base
    return Affine(scale, shift, base)


class GridSum(Distribution):
    """Grid approximation of a sum law that remembers infinite tails.

    The body comes from sorted midpoint evaluations.  When a summand has an
    infinite positive part and every summand is bounded below, the sum has
    an infinite positive part under any coupling; such tails are reported
    as infinite instead of the finite values of the truncated grid law
    (symmetrically for negative parts).
    """

    def __init__(self, approx: Discrete, plus_inf: bool, minus_inf: bool):
        self.approx = approx
        self.plus_inf = plus_inf
        self.minus_inf = minus_inf

    def __repr__(self):
        return (f"GridSum(atoms={len(self.approx.atoms)}, plus_inf={self.plus_inf}, "
                f"minus_inf={self.minus_inf})")

    @classmethod
    def from_marginals(cls, approx: Discrete, marginals: Sequence[Distribution]) -> "GridSum":
        classes = [D.mean_class() for D in marginals]
        bounds = [D.support_bounds() for D in marginals]
        plus = any(m.plus_part_infinite for m in classes) and all(
            math.isfinite(lo) for lo, _ in bounds)
        minus = any(m.minus_part_infinite for m in classes) and all(
            math.isfinite(hi) for _, hi in bounds)
        return cls(approx, plus, minus)

    def quantile(self, t):
        return self.approx.quantile(t)

    def quantile_right(self, t):
        return self.approx.quantile_right(t)

    def cdf(self, x):
        return self.approx.cdf(x)

    def cdf_left(self, x):
        return self.approx.cdf_left(x)

    def support_bounds(self):
        lo, hi = self.approx.support_bounds()
        return (-INF if self.minus_inf else lo), (INF if self.plus_inf else hi)

    def mean_class(self, cfg=DEFAULT_CONFIG):
        if self.plus_inf and self.minus_inf:
            return UNDEFINED
        if self.plus_inf:
            return PLUS_INF
        if self.minus_inf:
            return MINUS_INF
        return self.approx.mean_class(cfg)

    def _tail(self, infinite, values):
        if not infinite:
            return values
        return np.full(np.shape(values), INF) if np.ndim(values) else INF

    def stop_loss_plus(self, w, cfg=DEFAULT_CONFIG):
        return self._tail(self.plus_inf, self.approx.stop_loss_plus(w, cfg))

    def stop_loss_minus(self, w, cfg=DEFAULT_CONFIG):
        return self._tail(self.minus_inf, self.approx.stop_loss_minus(w, cfg))

    def as_discrete(self):
        return None if (self.plus_inf or self.minus_inf) else self.approx

    def to_json(self):
        raise TypeError("grid sum laws have no JSON representation")


def sum_distribution(C: Coupling, cfg: QuadConfig = DEFAULT_CONFIG,
                     grid_n: Optional[int] = None) -> Distribution:
    """Law of the coordinate sum under the coupling.

    Finite joints and step-function maps give the exact discrete law.
    Comonotonic maps add quantiles.  Other maps are approximated by the
    sorted sums at ``grid_n`` midpoints (default ``cfg.grid_n``), held in a
    Discrete law flagged ``exact=False`` and wrapped in ``GridSum`` so that
    infinite tails stay infinite.
    """
    if isinstance(C, DiscreteJoint) or C.step:
        J = to_discrete_joint(C)
        return Discrete.from_pairs([sum(a) for a in J.atoms], J.probs)
    if C.kind == "comonotonic":
        closed = _affine_sum(C.marginals)
        return closed if closed is not None else ComonotonicSum(C.marginals)
    if C.kind == "countermonotonic" and C.dim == 2:
        (a1, b1, B1), (a2, b2, B2) = (D.affine_form() for D in C.marginals)
        if isinstance(B1, Uniform01) and B1 == B2 and a1 == a2:
            return PointMass(a1 + b1 + b2)
    n = grid_n or cfg.grid_n
    u = (np.arange(1, n + 1) - 0.5) / n
    values = C.evaluate(u).sum(axis=1)
    atoms, counts = np.unique(values, return_counts=True)
    approx = Discrete(tuple(atoms.tolist()), tuple((counts / n).tolist()), exact=False)
    return GridSum.from_marginals(approx, C.marginals)


def expectation_of(C: Coupling, phi: Callable, cfg: QuadConfig = DEFAULT_CONFIG,
                   breaks: Sequence[float] = ()) -> MeanClass:
    """E[phi(X_1, ..., X_d)] classified through its positive and negative parts.

    For maps of one uniform this is the integral of phi(T(u)) over (0, 1),
    split at the coupling's levels and any extra ``breaks``.  ``phi`` takes
    d scalar arguments.
    """
    if isinstance(C, DiscreteJoint) or C.step:
        J = to_discrete_joint(C)
        return MeanClass.finite(sum(p * phi(*a) for a, p in zip(J.atoms, J.probs)))

    def g(u):
        return float(phi(*C.point(u)))

    pos = neg = 0.0
    for a, b in _segments(set(C.levels) | set(breaks)):
        a, b = float(a), float(b)
        pos = ext_add(pos, integrate_quantile(lambda u: max(g(u), 0.0), a, b, cfg))
        neg = ext_add(neg, integrate_quantile(lambda u: max(-g(u), 0.0), a, b, cfg))
    return MeanClass.from_parts(pos, neg)


def is_pairwise_countermonotonic(J: DiscreteJoint) -> bool:
    """No coordinate pair moves strictly in the same direction between atoms."""
    pts = np.array(J.atoms, dtype=float)
    d = pts.shape[1]
    for i in range(d):
        di = pts[:, None, i] - pts[None, :, i]
        for j in range(i + 1, d):
            dj = pts[:, None, j] - pts[None, :, j]
            if np.any(di * dj > 0):
                return False
    return True


def marginal_discrepancy(C: UMaps, i: int, n: int = 10_000) -> float:
    """Kolmogorov distance between T_i(U) on an n-point midpoint grid and F_i.

    Values of order 1/n mean the map reproduces its marginal.
    """
    u = (np.arange(1, n + 1) - 0.5) / n
    v = np.sort(C.evaluate(u)[:, i])
    D = C.marginals[i]
    F = np.asarray(D.cdf(v), dtype=float)
    F_left = np.asarray(D.cdf_left(v), dtype=float)
    k = np.arange(1, n + 1) / n
    # empirical cdf at v_(k) lies in [k/n, ...]; true one must straddle it
    upper = np.maximum(0.0, F_left - k)
    lower = np.maximum(0.0, (k - 1 / n) - F)
    return float(max(upper.max(), lower.max()))


def from_json(obj, dist_parser=None) -> Coupling:
    """Parse a coupling spec by its ``type`` field."""
    from .dist import exact_number, from_json as parse_dist
    parse = dist_parser or parse_dist
    kind = obj.get("type") if isinstance(obj, dict) else None
    if kind == "comonotonic":
        return comonotonic_version([parse(m) for m in obj["marginals"]])
    if kind == "countermonotonic":
        return countermono_version([parse(m) for m in obj["marginals"]])
    if kind == "discrete_joint":
        return DiscreteJoint.from_pairs([[exact_number(x) for x in a] for a in obj["atoms"]],
                                        [exact_number(p) for p in obj["probs"]])
    raise ValueError(f"unknown coupling type {kind!r}")
