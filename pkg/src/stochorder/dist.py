"""Univariate laws described through their left quantile functions.

Every law exposes its quantiles and its cdf together with support bounds
and a four-way mean classification.  On top of these it offers the two
stop-loss transforms E[(X-w)+] and E[(X-w)-] and the tail integrals of the
quantile function.
Discrete laws (and anything that reduces to one) evaluate all of these in
closed form; with ``int``/``Fraction`` atoms and probabilities the
arithmetic is exact.
"""

from __future__ import annotations

import bisect
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational, Real
from typing import Callable, Optional, Sequence

import numpy as np

from .extmath import (
    DEFAULT_CONFIG, INF, MINUS_INF, PLUS_INF, UNDEFINED, MeanClass, QuadConfig, ext, ext_mul, integrate_quantile,
)

__all__ = [
    "Distribution", "Discrete", "Uniform01", "Pareto", "Cauchy", "PointMass",
    "Affine", "Mixture", "QuantileFunction", "ComonotonicSum",
    "bernoulli", "from_json", "quantile", "cdf", "support_bounds",
    "mean_class", "stop_loss_plus", "stop_loss_minus",
    "upper_tail_integral", "lower_tail_integral",
]


def _is_rational(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def _check_level(t):
    if np.ndim(t) == 0:
        if not 0 < t < 1:
            raise ValueError(f"quantile level must lie in (0, 1), got {t}")
    elif np.any((np.asarray(t) <= 0) | (np.asarray(t) >= 1)):
        raise ValueError("quantile levels must lie in (0, 1)")


class Distribution(ABC):
    """A law on the real line."""

    # -- quantiles and cdf -------------------------------------------------
    @abstractmethod
    def quantile(self, t):
        """Left quantile inf{x : P(X <= x) >= t}; accepts arrays."""

    def quantile_right(self, t):
        """Right quantile sup{x : P(X < x) <= t}."""
        return self.quantile(t)

    def quantile_upper(self, s):
        """``quantile(1 - s)`` evaluated without cancellation for small s."""
        return self.quantile(1 - np.asarray(s) if np.ndim(s) else 1 - s)

    @abstractmethod
    def cdf(self, x):
        """P(X <= x)."""

    def cdf_left(self, x):
        """P(X < x)."""
        return self.cdf(x)

    @abstractmethod
    def support_bounds(self) -> tuple:
        """(ess-inf, ess-sup) as extended reals."""

    @property
    def is_degenerate(self) -> bool:
        lo, hi = self.support_bounds()
        return lo == hi

    # -- expectations ------------------------------------------------------
    @abstractmethod
    def mean_class(self, cfg: QuadConfig = DEFAULT_CONFIG) -> MeanClass:
        ...

    @abstractmethod
    def stop_loss_plus(self, w, cfg: QuadConfig = DEFAULT_CONFIG):
        """E[(X - w)+] in [0, inf]."""

    @abstractmethod
    def stop_loss_minus(self, w, cfg: QuadConfig = DEFAULT_CONFIG):
        """E[(X - w)-] = E[(w - X)+] in [0, inf]."""

    def upper_tail_integral(self, p, cfg: QuadConfig = DEFAULT_CONFIG):
        """Integral of the quantile function over (p, 1)."""
        _check_level(p)
        x = self.quantile(p)
        return (1 - p) * x + self.stop_loss_plus(x, cfg)

    def lower_tail_integral(self, p, cfg: QuadConfig = DEFAULT_CONFIG):
        """Integral of the quantile function over (0, p)."""
        _check_level(p)
        x = self.quantile(p)
        return p * x - self.stop_loss_minus(x, cfg)

    # -- structure ---------------------------------------------------------
    def as_discrete(self) -> Optional["Discrete"]:
        """Closed-form discrete representation, when the law has one."""
        return None

    def breakpoints(self) -> Optional[tuple]:
        """Levels in (0, 1) where the quantile function may jump.

        ``None`` means the quantile function is not a finite step function.
        """
        d = self.as_discrete()
        return None if d is None else d.breakpoints()

    def affine_form(self) -> tuple:
        """(a, b, base) with self equal in law to a*base + b, a > 0.

        ``base`` is None for point masses (a is then 0).
        """
        return 1, 0, self

    @abstractmethod
    def to_json(self) -> dict:
        ...

    def __neg__(self):
        return Affine(-1, 0, self)


# ---------------------------------------------------------------------------
# discrete laws


@dataclass(frozen=True, eq=False)
class Discrete(Distribution):
    """Finitely many atoms with positive probabilities.

    ``exact`` is False for laws that only approximate another law (grid
    discretizations); order checks then downgrade their certification.
    """

    atoms: tuple
    probs: tuple
    exact: bool = True
    _f: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        atoms = tuple(ext(a) for a in self.atoms)
        probs = tuple(ext(p) for p in self.probs)
        if not atoms or len(atoms) != len(probs):
            raise ValueError("atoms and probs must be non-empty and equally long")
        if any(not math.isfinite(a) for a in atoms):
            raise ValueError("atoms must be finite")
        if any(b <= a for a, b in zip(atoms, atoms[1:])):
            raise ValueError("atoms must be strictly increasing")
        if any(p <= 0 for p in probs):
            raise ValueError("probabilities must be positive")
        total = sum(probs)
        if abs(total - 1) > 1e-12:
            raise ValueError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)
        rational = all(_is_rational(v) for v in atoms + probs)
        cum, acc = [], 0
        for p in probs:
            acc += p
            cum.append(acc)
        self._f.update(
            rational=rational,
            cum=tuple(cum),
            x=np.array(atoms, dtype=float),
            p=np.array(probs, dtype=float),
            cumf=np.array(cum, dtype=float),
        )
        # tail sums for vectorized stop-loss: tail[i] = sum over atoms j >= i
        pf, xf = self._f["p"], self._f["x"]
        self._f["tail_p"] = np.concatenate([np.cumsum(pf[::-1])[::-1], [0.0]])
        self._f["tail_px"] = np.concatenate([np.cumsum((pf * xf)[::-1])[::-1], [0.0]])
        self._f["head_p"] = np.concatenate([[0.0], np.cumsum(pf)])
        self._f["head_px"] = np.concatenate([[0.0], np.cumsum(pf * xf)])
        if rational:
            hp, hpx = [0], [0]
            for a, p in zip(atoms, probs):
                hp.append(hp[-1] + p)
                hpx.append(hpx[-1] + p * a)
            self._f["head_p_exact"] = tuple(hp)
            self._f["head_px_exact"] = tuple(hpx)

    @classmethod
    def from_pairs(cls, atoms: Sequence, probs: Sequence, exact: bool = True) -> "Discrete":
        """Sort and merge atoms, then drop those left without mass."""
        merged: dict = {}
        for a, p in zip(atoms, probs):
            merged[a] = merged.get(a, 0) + p
        keys = sorted(k for k, p in merged.items() if p != 0)
        return cls(tuple(keys), tuple(merged[k] for k in keys), exact)

    @classmethod
    def uniform_on(cls, values: Sequence) -> "Discrete":
        """Equiprobable law on ``values`` (repeats add mass)."""
        n = len(values)
        weight = Fraction(1, n) if all(_is_rational(v) for v in values) else 1.0 / n
        return cls.from_pairs(values, [weight] * n)

    @property
    def rational(self) -> bool:
        return self._f["rational"]

    @property
    def cum(self) -> tuple:
        return self._f["cum"]

    def __eq__(self, other):
        return (isinstance(other, Discrete) and self.atoms == other.atoms
                and self.probs == other.probs)

    def __hash__(self):
        return hash((self.atoms, self.probs))

    def quantile(self, t):
        if np.ndim(t):
            idx = np.searchsorted(self._f["cumf"], t, side="left")
            return self._f["x"][np.minimum(idx, len(self.atoms) - 1)]
        i = bisect.bisect_left(self.cum, t)
        return self.atoms[min(i, len(self.atoms) - 1)]

    def quantile_right(self, t):
        if np.ndim(t):
            idx = np.searchsorted(self._f["cumf"], t, side="right")
            return self._f["x"][np.minimum(idx, len(self.atoms) - 1)]
        i = bisect.bisect_right(self.cum, t)
        return self.atoms[min(i, len(self.atoms) - 1)]

    def cdf(self, x):
        if np.ndim(x):
            idx = np.searchsorted(self._f["x"], x, side="right")
            return self._f["head_p"][idx]
        i = bisect.bisect_right(self.atoms, x)
        return self.cum[i - 1] if i else 0

    def cdf_left(self, x):
        if np.ndim(x):
            idx = np.searchsorted(self._f["x"], x, side="left")
            return self._f["head_p"][idx]
        i = bisect.bisect_left(self.atoms, x)
        return self.cum[i - 1] if i else 0

    def support_bounds(self):
        return self.atoms[0], self.atoms[-1]

    def mean(self):
        return sum(a * p for a, p in zip(self.atoms, self.probs))

    def mean_class(self, cfg=DEFAULT_CONFIG):
        return MeanClass.finite(self.mean())

    def stop_loss_plus(self, w, cfg=DEFAULT_CONFIG):
        if np.ndim(w):
            w = np.asarray(w, dtype=float)
            idx = np.searchsorted(self._f["x"], w, side="right")
            return np.maximum(self._f["tail_px"][idx] - w * self._f["tail_p"][idx], 0.0)
        if self.rational and _is_rational(w):
            i = bisect.bisect_right(self.atoms, w)
            hp, hpx = self._f["head_p_exact"], self._f["head_px_exact"]
            return (hpx[-1] - hpx[i]) - w * (hp[-1] - hp[i])
        return self.stop_loss_plus(np.array([w]), cfg)[0].item()

    def stop_loss_minus(self, w, cfg=DEFAULT_CONFIG):
        if np.ndim(w):
            w = np.asarray(w, dtype=float)
            idx = np.searchsorted(self._f["x"], w, side="left")
            return np.maximum(w * self._f["head_p"][idx] - self._f["head_px"][idx], 0.0)
        if self.rational and _is_rational(w):
            i = bisect.bisect_left(self.atoms, w)
            hp, hpx = self._f["head_p_exact"], self._f["head_px_exact"]
            return w * hp[i] - hpx[i]
        return self.stop_loss_minus(np.array([w]), cfg)[0].item()

    def as_discrete(self):
        return self

    def breakpoints(self):
        return tuple(c for c in self.cum[:-1])

    def to_json(self):
        return {"type": "discrete", "atoms": [float(a) for a in self.atoms],
                "probs": [float(p) for p in self.probs]}


def bernoulli(p) -> Discrete:
    """Law on {0, 1} with P(X = 1) = p, 0 < p < 1."""
    return Discrete((0, 1), (1 - p, p))


@dataclass(frozen=True)
class PointMass(Distribution):
    c: Real

    def __post_init__(self):
        c = ext(self.c)
        if not math.isfinite(c):
            raise ValueError("point mass location must be finite")
        object.__setattr__(self, "c", c)

    def quantile(self, t):
        _check_level(t)
        return np.full(np.shape(t), float(self.c)) if np.ndim(t) else self.c

    def cdf(self, x):
        if np.ndim(x):
            return (np.asarray(x) >= self.c).astype(float)
        return 1 if x >= self.c else 0

    def cdf_left(self, x):
        if np.ndim(x):
            return (np.asarray(x) > self.c).astype(float)
        return 1 if x > self.c else 0

    def support_bounds(self):
        return self.c, self.c

    def mean_class(self, cfg=DEFAULT_CONFIG):
        return MeanClass.finite(self.c)

    def stop_loss_plus(self, w, cfg=DEFAULT_CONFIG):
        if np.ndim(w):
            return np.maximum(self.c - np.asarray(w, dtype=float), 0.0)
        return max(self.c - w, 0)

    def stop_loss_minus(self, w, cfg=DEFAULT_CONFIG):
        if np.ndim(w):
            return np.maximum(np.asarray(w, dtype=float) - self.c, 0.0)
        return max(w - self.c, 0)

    def as_discrete(self):
        return Discrete((self.c,), (1,))

    def affine_form(self):
        return 0, self.c, None

    def to_json(self):
        return {"type": "pointmass", "c": float(self.c)}


# ---------------------------------------------------------------------------
# parametric laws


@dataclass(frozen=True)
class Uniform01(Distribution):
    def quantile(self, t):
        _check_level(t)
        return t

    def quantile_upper(self, s):
        return 1 - s

    def cdf(self, x):
        return np.clip(x, 0.0, 1.0) if np.ndim(x) else min(max(x, 0), 1)

    def support_bounds(self):
        return 0, 1

    def mean_class(self, cfg=DEFAULT_CONFIG):
        return MeanClass.finite(0.5)

    def stop_loss_plus(self, w, cfg=DEFAULT_CONFIG):
        w = np.asarray(w, dtype=float)
        out = np.where(w <= 0, 0.5 - w, np.where(w >= 1, 0.0, 0.5 * (1 - w) ** 2))
        return out if out.ndim else float(out)

    def stop_loss_minus(self, w, cfg=DEFAULT_CONFIG):
        w = np.asarray(w, dtype=float)
        out = np.where(w <= 0, 0.0, np.where(w >= 1, w - 0.5, 0.5 * w ** 2))
        return out if out.ndim else float(out)

    def to_json(self):
        return {"type": "uniform01"}


@dataclass(frozen=True)
class Pareto(Distribution):
    """Survival P(X > x) = x**-alpha on [1, inf)."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("Pareto alpha must be positive")

    def quantile(self, t):
        _check_level(t)
        return np.power(1 - np.asarray(t, dtype=float), -1 / self.alpha) if np.ndim(t) \
            else (1 - t) ** (-1 / self.alpha)

    def quantile_upper(self, s):
        return np.power(np.asarray(s, dtype=float), -1 / self.alpha) if np.ndim(s) \
            else s ** (-1 / self.alpha)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(x < 1, 0.0, 1 - np.power(np.maximum(x, 1.0), -self.alpha))
        return out if out.ndim else float(out)

    def support_bounds(self):
        return 1, INF

    def _mean(self):
        return self.alpha / (self.alpha - 1)

    def mean_class(self, cfg=DEFAULT_CONFIG):
        return PLUS_INF if self.alpha <= 1 else MeanClass.finite(self._mean())

    def stop_loss_plus(self, w, cfg=DEFAULT_CONFIG):
        w = np.asarray(w, dtype=float)
        if self.alpha <= 1:
            out = np.full(w.shape, INF)
        else:
            a = self.alpha
            out = np.where(w <= 1, self._mean() - w,
                           np.power(np.maximum(w, 1.0), 1 - a) / (a - 1))
        return out if out.ndim else float(out)

    def stop_loss_minus(self, w, cfg=DEFAULT_CONFIG):
        # integral of the cdf over [1, w]
        w = np.asarray(w, dtype=float)
        a = self.alpha
        v = np.maximum(w, 1.0)
        if a == 1:
            inner = (v - 1) - np.log(v)
        else:
            inner = (v - 1) - (np.power(v, 1 - a) - 1) / (1 - a)
        out = np.where(w <= 1, 0.0, np.maximum(inner, 0.0))
        return out if out.ndim else float(out)

    def to_json(self):
        return {"type": "pareto", "alpha": float(self.alpha)}


@dataclass(frozen=True)
class Cauchy(Distribution):
    """Standard Cauchy law."""

    def quantile(self, t):
        _check_level(t)
        return np.tan(np.pi * (np.asarray(t, dtype=float) - 0.5)) if np.ndim(t) \
            else math.tan(math.pi * (t - 0.5))

    def quantile_upper(self, s):
        return 1 / np.tan(np.pi * np.asarray(s, dtype=float)) if np.ndim(s) \
            else 1 / math.tan(math.pi * s)

    def cdf(self, x):
        out = 0.5 + np.arctan(np.asarray(x, dtype=float)) / np.pi
        return out if out.ndim else float(out)

    def support_bounds(self):
        return -INF, INF

    def mean_class(self, cfg=DEFAULT_CONFIG):
        return UNDEFINED

    def stop_loss_plus(self, w, cfg=DEFAULT_CONFIG):
        return np.full(np.shape(w), INF) if np.ndim(w) else INF

    def stop_loss_minus(self, w, cfg=DEFAULT_CONFIG):
        return np.full(np.shape(w), INF) if np.ndim(w) else INF

    def to_json(self):
        return {"type": "cauchy"}


# ---------------------------------------------------------------------------
# closure operations


def _scale(a, v):
    """a * v for arrays or scalars, keeping 0 * inf = 0 out of the picture."""
    if np.ndim(v):
        return float(a) * np.asarray(v, dtype=float)
    return ext_mul(a, v)


@dataclass(frozen=True)
class Affine(Distribution):
    """Law of a*X + b for X ~ base and a != 0."""

    a: Real
    b: Real
    base: Distribution

    def __post_init__(self):
        a, b = ext(self.a), ext(self.b)
        if a == 0 or not math.isfinite(a) or not math.isfinite(b):
            raise ValueError("Affine needs finite nonzero scale and finite shift")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def _map(self, x):
        if np.ndim(x):
            return float(self.a) * np.asarray(x, dtype=float) + float(self.b)
        return self.a * x + self.b

    def _pre(self, y):
        if np.ndim(y):
            return (np.asarray(y, dtype=float) - float(self.b)) / float(self.a)
        return (y - self.b) / self.a

    def quantile(self, t):
        _check_level(t)
        if self.a > 0:
            return self._map(self.base.quantile(t))
        return self._map(self.base.quantile_right(1 - np.asarray(t) if np.ndim(t) else 1 - t))

    def quantile_right(self, t):
        if self.a > 0:
            return self._map(self.base.quantile_right(t))
        return self._map(self.base.quantile(1 - np.asarray(t) if np.ndim(t) else 1 - t))

    def quantile_upper(self, s):
        if self.a > 0:
            return self._map(self.base.quantile_upper(s))
        return self._map(self.base.quantile_right(s))

    def cdf(self, x):
        v = self._pre(x)
        if self.a > 0:
            return self.base.cdf(v)
        return 1 - self.base.cdf_left(v)

    def cdf_left(self, x):
        v = self._pre(x)
        if self.a > 0:
            return self.base.cdf_left(v)
        return 1 - self.base.cdf(v)

    def support_bounds(self):
        lo, hi = self.base.support_bounds()
        lo, hi = self.a * lo + self.b, self.a * hi + self.b
        return (lo, hi) if self.a > 0 else (hi, lo)

    def mean_class(self, cfg=DEFAULT_CONFIG):
        return self.base.mean_class(cfg).scaled(self.a, self.b)

    def stop_loss_plus(self, w, cfg=DEFAULT_CONFIG):
        v = self._pre(w)
        if self.a > 0:
            return _scale(self.a, self.base.stop_loss_plus(v, cfg))
        return _scale(-self.a, self.base.stop_loss_minus(v, cfg))

    def stop_loss_minus(self, w, cfg=DEFAULT_CONFIG):
        v = self._pre(w)
        if self.a > 0:
            return _scale(self.a, self.base.stop_loss_minus(v, cfg))
        return _scale(-self.a, self.base.stop_loss_plus(v, cfg))

    def as_discrete(self):
        d = self.base.as_discrete()
        if d is None:
            return None
        atoms = [self.a * x + self.b for x in d.atoms]
        probs = list(d.probs)
        if self.a < 0:
            atoms.reverse()
            probs.reverse()
        return Discrete(tuple(atoms), tuple(probs), d.exact)

    def affine_form(self):
        a0, b0, base = self.base.affine_form()
        if self.a > 0:
            return self.a * a0, self.a * b0 + self.b, base
        return 1, 0, self

    def to_json(self):
        return {"type": "affine", "a": float(self.a), "b": float(self.b),
                "base": self.base.to_json()}


def _bisect_level(f, t, lo, hi, iters=200):
    """Smallest x (approximately) with f(x) >= t for non-decreasing f."""
    if not math.isfinite(lo):
        lo = -1.0
        while f(lo) >= t:
            lo *= 2
            if lo < -1e300:
                return -INF
    if not math.isfinite(hi):
        hi = 1.0
        while f(hi) < t:
            hi *= 2
            if hi > 1e300:
                return INF
    if f(lo) >= t:
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if f(mid) >= t:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class Mixture(Distribution):
    weights: tuple
    components: tuple

    def __post_init__(self):
        weights = tuple(ext(w) for w in self.weights)
        components = tuple(self.components)
        if not components or len(weights) != len(components):
            raise ValueError("mixture needs one positive weight per component")
        if any(w <= 0 for w in weights) or abs(sum(weights) - 1) > 1e-12:
            raise ValueError("mixture weights must be positive and sum to 1")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", components)

    def _vec(self, fn, x):
        if np.ndim(x):
            return np.vectorize(fn, otypes=[float])(x)
        return fn(x)

    def cdf(self, x):
        return self._vec(lambda v: sum(w * c.cdf(v) for w, c in zip(self.weights, self.components)), x)

    def cdf_left(self, x):
        return self._vec(lambda v: sum(w * c.cdf_left(v) for w, c in zip(self.weights, self.components)), x)

    def quantile(self, t):
        _check_level(t)
        d = self.as_discrete()
        if d is not None:
            return d.quantile(t)
        lo, hi = self.support_bounds()
        return self._vec(lambda s: _bisect_level(self.cdf, s, lo, hi), t)

    def quantile_right(self, t):
        d = self.as_discrete()
        if d is not None:
            return d.quantile_right(t)
        lo, hi = self.support_bounds()
        # P(X < x) <= t fails first at the right quantile
        return self._vec(lambda s: _bisect_level(lambda x: self.cdf_left(x) - s > 0 and 1 or 0,
                                                 0.5, lo, hi), t)

    def support_bounds(self):
        bounds = [c.support_bounds() for c in self.components]
        return min(b[0] for b in bounds), max(b[1] for b in bounds)

    def mean_class(self, cfg=DEFAULT_CONFIG):
        classes = [c.mean_class(cfg) for c in self.components]
        plus = any(m.plus_part_infinite for m in classes)
        minus = any(m.minus_part_infinite for m in classes)
        if plus and minus:
            return UNDEFINED
        if plus:
            return PLUS_INF
        if minus:
            return MINUS_INF
        return MeanClass.finite(sum(w * m.value for w, m in zip(self.weights, classes)))

    def _combine(self, values):
        if any(np.ndim(v) for v in values):
            return sum(float(w) * np.asarray(v, dtype=float) for w, v in zip(self.weights, values))
        return sum(ext_mul(w, v) for w, v in zip(self.weights, values))

    def stop_loss_plus(self, w, cfg=DEFAULT_CONFIG):
        return self._combine([c.stop_loss_plus(w, cfg) for c in self.components])

    def stop_loss_minus(self, w, cfg=DEFAULT_CONFIG):
        return self._combine([c.stop_loss_minus(w, cfg) for c in self.components])

    def as_discrete(self):
        parts = [c.as_discrete() for c in self.components]
        if any(p is None for p in parts):
            return None
        atoms, probs = [], []
        for w, d in zip(self.weights, parts):
            atoms.extend(d.atoms)
            probs.extend(w * p for p in d.probs)
        return Discrete.from_pairs(atoms, probs, all(d.exact for d in parts))

    def to_json(self):
        return {"type": "mixture", "weights": [float(w) for w in self.weights],
                "components": [c.to_json() for c in self.components]}


# ---------------------------------------------------------------------------
# laws given only through a quantile function


class QuantileFunction(Distribution):
    """Law defined by an arbitrary non-decreasing left quantile function.

    Transforms are evaluated numerically with endpoint divergence detection.
    ``tail(s)`` should return ``q(1 - s)`` accurately for small s.
    """

    def __init__(self, q: Callable, tail: Optional[Callable] = None,
                 bounds: Optional[tuple] = None, name: str = "quantile_fn"):
        self._q = q
        self._tail = tail
        self._bounds = bounds
        self.name = name

    def __repr__(self):
        return f"QuantileFunction({self.name})"

    def quantile(self, t):
        _check_level(t)
        if np.ndim(t):
            return np.array([self._q(float(s)) for s in np.ravel(t)]).reshape(np.shape(t))
        return self._q(t)

    def quantile_upper(self, s):
        if self._tail is None:
            return super().quantile_upper(s)
        if np.ndim(s):
            return np.array([self._tail(float(v)) for v in np.ravel(s)]).reshape(np.shape(s))
        return self._tail(s)

    def _level(self, x, strict: bool) -> float:
        """Lebesgue measure of {t : q(t) <= x} (or < x when strict)."""
        lo, hi = 0.0, 1.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            v = self._q(mid)
            if v < x or (not strict and v == x):
                lo = mid
            else:
                hi = mid
        return lo

    def cdf(self, x):
        if np.ndim(x):
            return np.array([self._level(float(v), False) for v in np.ravel(x)]).reshape(np.shape(x))
        return self._level(x, False)

    def cdf_left(self, x):
        if np.ndim(x):
            return np.array([self._level(float(v), True) for v in np.ravel(x)]).reshape(np.shape(x))
        return self._level(x, True)

    def support_bounds(self):
        if self._bounds is not None:
            return self._bounds
        return -INF, INF

    def _integral(self, f, f_tail, lo, hi, cfg):
        return integrate_quantile(f, lo, hi, cfg, q_tail=f_tail if hi == 1 else None)

    def _tail_fn(self, g):
        if self._tail is None:
            return None
        return lambda s: g(self._tail(s))

    def mean_class(self, cfg=DEFAULT_CONFIG):
        pos = self._integral(lambda t: max(self._q(t), 0.0),
                             self._tail_fn(lambda v: max(v, 0.0)), 0.0, 1.0, cfg)
        neg = self._integral(lambda t: max(-self._q(t), 0.0),
                             self._tail_fn(lambda v: max(-v, 0.0)), 0.0, 1.0, cfg)
        return MeanClass.from_parts(pos, neg)

    def _stop_loss(self, w, cfg, plus: bool):
        if np.ndim(w):
            return np.array([self._stop_loss(float(v), cfg, plus) for v in np.ravel(w)]).reshape(np.shape(w))
        t0 = self.cdf(w)
        if plus:
            if t0 >= 1:
                return 0.0
            return integrate_quantile(lambda t: max(self._q(t) - w, 0.0), t0, 1.0, cfg,
                                      q_tail=self._tail_fn(lambda v: max(v - w, 0.0)))
        if t0 <= 0:
            return 0.0
        if t0 >= 1:
            return integrate_quantile(lambda t: max(w - self._q(t), 0.0), 0.0, 1.0, cfg,
                                      q_tail=self._tail_fn(lambda v: max(w - v, 0.0)))
        return integrate_quantile(lambda t: max(w - self._q(t), 0.0), 0.0, t0, cfg)

    def stop_loss_plus(self, w, cfg=DEFAULT_CONFIG):
        return self._stop_loss(w, cfg, True)

    def stop_loss_minus(self, w, cfg=DEFAULT_CONFIG):
        return self._stop_loss(w, cfg, False)

    def to_json(self):
        raise TypeError(f"{self!r} has no JSON representation")


class ComonotonicSum(QuantileFunction):
    """Law of X_1 + ... + X_d for a comonotonic vector: quantiles add."""

    def __init__(self, components: Sequence[Distribution]):
        self.components = tuple(components)
        super().__init__(
            q=lambda t: sum(c.quantile(t) for c in self.components),
            tail=lambda s: sum(c.quantile_upper(s) for c in self.components),
            name="comonotonic_sum",
        )

    def __repr__(self):
        return f"ComonotonicSum({list(self.components)!r})"

    def quantile_right(self, t):
        return sum(c.quantile_right(t) for c in self.components)

    def support_bounds(self):
        lo = sum(c.support_bounds()[0] for c in self.components)
        hi = sum(c.support_bounds()[1] for c in self.components)
        return lo, hi

    def mean_class(self, cfg=DEFAULT_CONFIG):
        classes = [c.mean_class(cfg) for c in self.components]
        # near t = 1 the other quantiles are bounded below, so one infinite
        # positive part forces an infinite positive part of the sum
        plus = any(m.plus_part_infinite for m in classes)
        minus = any(m.minus_part_infinite for m in classes)
        if plus and minus:
            return UNDEFINED
        if plus:
            return PLUS_INF
        if minus:
            return MINUS_INF
        return MeanClass.finite(sum(m.value for m in classes))

    def stop_loss_plus(self, w, cfg=DEFAULT_CONFIG):
        if self.mean_class(cfg).plus_part_infinite:
            return np.full(np.shape(w), INF) if np.ndim(w) else INF
        return super().stop_loss_plus(w, cfg)

    def stop_loss_minus(self, w, cfg=DEFAULT_CONFIG):
        if self.mean_class(cfg).minus_part_infinite:
            return np.full(np.shape(w), INF) if np.ndim(w) else INF
        return super().stop_loss_minus(w, cfg)

    def as_discrete(self):
        parts = [c.as_discrete() for c in self.components]
        if any(p is None for p in parts):
            return None
        levels = sorted(set().union(*(p.breakpoints() for p in parts)) | {0, 1})
        atoms, probs = [], []
        for a, b in zip(levels, levels[1:]):
            mid = (a + b) / 2
            atoms.append(sum(p.quantile(mid) for p in parts))
            probs.append(b - a)
        return Discrete.from_pairs(atoms, probs, all(p.exact for p in parts))

    def to_json(self):
        return {"type": "comonotonic_sum", "components": [c.to_json() for c in self.components]}


# ---------------------------------------------------------------------------
# JSON schema


def exact_number(x):
    """JSON number to an exact int or Fraction; decimals are read as written."""
    if isinstance(x, bool):
        raise ValueError(f"expected a number, got {x!r}")
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"expected a finite number, got {x!r}")
        f = Fraction(repr(x))
        return int(f) if f.denominator == 1 else f
    if isinstance(x, str):
        f = Fraction(x)
        return int(f) if f.denominator == 1 else f
    raise ValueError(f"expected a number, got {x!r}")


def from_json(obj) -> Distribution:
    """Parse the JSON distribution schema, e.g. ``{"type": "pareto", "alpha": 0.5}``.

    Decimal numbers anywhere in the input are read as exact rationals, so that
    0.1 means one tenth and discrete checks stay exact.
    """
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError(f"distribution spec must be an object with a 'type': {obj!r}")
    kind = obj["type"]
    try:
        if kind == "discrete":
            return Discrete.from_pairs([exact_number(a) for a in obj["atoms"]],
                                       [exact_number(p) for p in obj["probs"]])
        if kind == "uniform01":
            return Uniform01()
        if kind == "pareto":
            return Pareto(float(obj["alpha"]))
        if kind == "cauchy":
            return Cauchy()
        if kind == "pointmass":
            return PointMass(exact_number(obj["c"]))
        if kind == "affine":
            return Affine(exact_number(obj["a"]), exact_number(obj.get("b", 0)),
                          from_json(obj["base"]))
        if kind == "mixture":
            return Mixture(tuple(exact_number(w) for w in obj["weights"]), tuple(from_json(c) for c in obj["components"]))
        if kind == "comonotonic_sum":
            return ComonotonicSum([from_json(c) for c in obj["components"]])
    except KeyError as exc:
        raise ValueError(f"missing field {exc} in {kind} spec") from None
    raise ValueError(f"unknown distribution type {kind!r}")


# ---------------------------------------------------------------------------
# functional interface


def quantile(D: Distribution, t):
    return D.quantile(t)


def cdf(D: Distribution, x):
    return D.cdf(x)


def support_bounds(D: Distribution):
    return D.support_bounds()


def mean_class(D: Distribution, cfg: QuadConfig = DEFAULT_CONFIG) -> MeanClass:
    return D.mean_class(cfg)


def stop_loss_plus(D: Distribution, w, cfg: QuadConfig = DEFAULT_CONFIG):
    return D.stop_loss_plus(w, cfg)


def stop_loss_minus(D: Distribution, w, cfg: QuadConfig = DEFAULT_CONFIG):
    return D.stop_loss_minus(w, cfg)


def upper_tail_integral(D: Distribution, p, cfg: QuadConfig = DEFAULT_CONFIG):
    return D.upper_tail_integral(p, cfg)


def lower_tail_integral(D: Distribution, p, cfg: QuadConfig = DEFAULT_CONFIG):
    return D.lower_tail_integral(p, cfg)
