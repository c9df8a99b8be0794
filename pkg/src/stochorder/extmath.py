"""Extended-real arithmetic with mean classes and endpoint-aware quadrature.

Extended reals are plain Python numbers (``float``, ``int`` or
``fractions.Fraction``) where ``math.inf`` and ``-math.inf`` stand for the
two infinities.  NaN is never admitted.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from numbers import Real
from typing import Callable, Optional

from scipy import integrate

INF = math.inf

ExtReal = Real


class UndefinedSum(ArithmeticError):
    """Raised for the indeterminate form inf + (-inf)."""


class NonConvergent(ArithmeticError):
    """Quadrature neither stabilized nor certified divergence."""


def ext(x) -> ExtReal:
    """Validate ``x`` as an extended real, rejecting NaN."""
    if isinstance(x, bool) or not isinstance(x, Real):
        x = float(x)
    if x != x:
        raise ValueError("NaN is not an extended real")
    return x


def is_finite(x: ExtReal) -> bool:
    return x not in (INF, -INF)


def ext_add(a: ExtReal, b: ExtReal) -> ExtReal:
    a, b = ext(a), ext(b)
    if (a == INF and b == -INF) or (a == -INF and b == INF):
        raise UndefinedSum(f"{a} + {b}")
    return a + b


def ext_neg(a: ExtReal) -> ExtReal:
    return -ext(a)


def ext_mul(c: ExtReal, a: ExtReal) -> ExtReal:
    """Product with the measure-theoretic convention 0 * inf = 0."""
    c, a = ext(c), ext(a)
    if c == 0 or a == 0:
        return 0
    return c * a


def relaxed_leq(a: ExtReal, b: ExtReal) -> bool:
    """Comparison where ``inf <= x`` and ``x <= -inf`` are always true."""
    a, b = ext(a), ext(b)
    return a == INF or b == -INF or a <= b


def ext_to_json(x):
    """JSON-safe encoding: infinities become the strings ``"inf"``/``"-inf"``."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    if isinstance(x, int):
        return x
    return float(x)


def ext_from_json(x):
    if x == "inf":
        return INF
    if x == "-inf":
        return -INF
    return x


class MeanKind(enum.Enum):
    FINITE = "finite"
    PLUS_INF = "plus_inf"
    MINUS_INF = "minus_inf"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class MeanClass:
    """Classification of E[X] from the pair (E[X+], E[X-])."""

    kind: MeanKind
    value: Optional[ExtReal] = None

    @classmethod
    def finite(cls, v) -> "MeanClass":
        v = ext(v)
        if not is_finite(v):
            raise ValueError("finite mean must be finite")
        return cls(MeanKind.FINITE, v)

    @classmethod
    def from_parts(cls, pos: ExtReal, neg: ExtReal) -> "MeanClass":
        """Build from E[X+] and E[X-], both in [0, inf]."""
        if pos == INF and neg == INF:
            return UNDEFINED
        if pos == INF:
            return PLUS_INF
        if neg == INF:
            return MINUS_INF
        return cls.finite(pos - neg)

    @property
    def is_finite(self) -> bool:
        return self.kind is MeanKind.FINITE

    @property
    def plus_part_infinite(self) -> bool:
        return self.kind in (MeanKind.PLUS_INF, MeanKind.UNDEFINED)

    @property
    def minus_part_infinite(self) -> bool:
        return self.kind in (MeanKind.MINUS_INF, MeanKind.UNDEFINED)

    @property
    def extended(self) -> Optional[ExtReal]:
        """The mean as an extended real, or None when undefined."""
        if self.kind is MeanKind.FINITE:
            return self.value
        if self.kind is MeanKind.PLUS_INF:
            return INF
        if self.kind is MeanKind.MINUS_INF:
            return -INF
        return None

    def scaled(self, a, b=0) -> "MeanClass":
        """Mean class of aX + b for a nonzero real a."""
        if self.kind is MeanKind.FINITE:
            return MeanClass.finite(a * self.value + b)
        if self.kind is MeanKind.UNDEFINED or a > 0:
            return self
        return PLUS_INF if self.kind is MeanKind.MINUS_INF else MINUS_INF

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value}
        if self.value is not None:
            out["value"] = float(self.value)
        return out

    def __str__(self) -> str:
        if self.kind is MeanKind.FINITE:
            return f"Finite({self.value})"
        return {MeanKind.PLUS_INF: "PlusInf", MeanKind.MINUS_INF: "MinusInf",
                MeanKind.UNDEFINED: "Undefined"}[self.kind]


PLUS_INF = MeanClass(MeanKind.PLUS_INF)
MINUS_INF = MeanClass(MeanKind.MINUS_INF)
UNDEFINED = MeanClass(MeanKind.UNDEFINED)


@dataclass(frozen=True)
class QuadConfig:
    """Numerical settings shared by quadrature and grid-based order checks.

    ``divergence_shells`` consecutive dyadic shells whose magnitude does not
    shrink by more than ``divergence_ratio`` certify an infinite endpoint
    integral.
    """

    tol: float = 1e-10
    max_depth: int = 60
    grid_n: int = 1000
    divergence_ratio: float = 0.999
    divergence_shells: int = 40

    def __post_init__(self):
        if not (self.tol > 0 and self.max_depth > 0 and self.grid_n > 0):
            raise ValueError("QuadConfig fields must be strictly positive")
        if self.grid_n < 16:
            raise ValueError("grid_n must be at least 16")
        if not 0 < self.divergence_ratio <= 1:
            raise ValueError("divergence_ratio must lie in (0, 1]")
        if self.divergence_shells < 2:
            raise ValueError("divergence_shells must be at least 2")

    def with_(self, **changes) -> "QuadConfig":
        fields = {**self.__dict__, **changes}
        return QuadConfig(**fields)


DEFAULT_CONFIG = QuadConfig()


def _quad(f, a, b, epsabs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, a, b, epsabs=epsabs, epsrel=1e-13, limit=200)
    return val


def _endpoint_integral(g, width, resolution, cfg: QuadConfig) -> ExtReal:
    """Integrate g(t) over t in (0, width], refining towards t = 0.

    The segment is cut into dyadic shells accumulating at 0.  Shell sums of
    a function monotone near the edge are comparable, so their decay ratio
    either certifies convergence (geometric remainder) or divergence (no
    decay over ``cfg.divergence_shells`` shells).  Shells narrower than
    ``resolution`` are not trusted.
    """
    total = 0.0
    shells: list[float] = []
    ratios: list[float] = []
    shell_tol = cfg.tol / 8
    n = cfg.divergence_shells
    for k in range(cfg.max_depth):
        far = width * 0.5 ** k
        near = width * 0.5 ** (k + 1)
        if near - 0.0 < resolution:
            break
        s = _quad(g, near, far, shell_tol)
        if not math.isfinite(s):
            if math.isnan(s):
                raise NonConvergent("integrand produced NaN")
            return s
        total += s
        if shells and shells[-1] != 0:
            ratios.append(abs(s) / abs(shells[-1]))
        elif shells:
            ratios.append(0.0 if s == 0 else INF)
        shells.append(s)

        if len(ratios) >= n and all(r >= cfg.divergence_ratio for r in ratios[-n:]):
            signs = {math.copysign(1.0, x) for x in shells[-n:] if x != 0}
            if len(signs) == 1:
                return math.copysign(INF, signs.pop())
        if len(shells) >= 3 and shells[-1] == shells[-2] == shells[-3] == 0:
            return total
        if len(ratios) >= 3:
            r = max(ratios[-3:])
            if r < min(cfg.divergence_ratio, 1.0):
                remainder = abs(s) * r / (1 - r)
                if remainder <= cfg.tol / 4:
                    return total + math.copysign(remainder, s)
    return _extrapolate_tail(total, shells, ratios, cfg)


def _extrapolate_tail(total, shells, ratios, cfg: QuadConfig) -> ExtReal:
    """Close off an endpoint integral once refinement runs out of room."""
    if len(ratios) < 4:
        raise NonConvergent("too few shells to classify endpoint behaviour")
    recent = ratios[-4:]
    if min(recent) >= cfg.divergence_ratio:
        return math.copysign(INF, shells[-1])
    if max(recent) < 1 and max(recent) - min(recent) < 1e-2:
        r = recent[-1]
        return total + shells[-1] * r / (1 - r)
    raise NonConvergent("endpoint shells neither stabilized nor diverged")


def _resolution(edge: float) -> float:
    # below this distance from a nonzero edge, t -> edge +- t loses digits
    return 2.0 ** -40 * abs(edge)


def integrate_quantile(q: Callable[[float], float], lo: float, hi: float,
                       cfg: QuadConfig = DEFAULT_CONFIG,
                       q_tail: Optional[Callable[[float], float]] = None) -> ExtReal:
    """Lebesgue integral of ``q`` over ``(lo, hi)``, possibly infinite.

    ``q`` must be monotone near any endpoint where it is unbounded, as
    quantile functions are.  Each half of the interval is refined towards
    its own endpoint.  ``q_tail(s)``, when given, must equal ``q(hi - s)``
    evaluated without cancellation; it lets refinement at ``hi`` go below
    the spacing of doubles near ``hi``.
    """
    if not lo < hi:
        raise ValueError("integrate_quantile needs lo < hi")
    mid = 0.5 * (lo + hi)
    half = mid - lo
    left = _endpoint_integral(lambda t: q(lo + t), half, _resolution(lo), cfg)
    if q_tail is not None:
        right = _endpoint_integral(q_tail, hi - mid, 0.0, cfg)
    else:
        right = _endpoint_integral(lambda t: q(hi - t), hi - mid, _resolution(hi), cfg)
    try:
        return ext_add(left, right)
    except UndefinedSum:
        raise NonConvergent("integral is of the form inf - inf") from None
