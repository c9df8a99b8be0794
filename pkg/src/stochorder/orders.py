"""Deciders for the univariate convex-type orders and the usual stochastic order.

Convex-type orders are decided through the stop-loss family
E[(X-w)+], E[(X-w)-].  When both laws reduce to finitely many atoms the
transforms are piecewise linear with kinks only at atoms, so checking the
atom union is complete and the verdict is certified ``exact``.  Otherwise
the transforms are probed on a quantile-spaced grid, and a ``Holds`` is
evidence rather than proof.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dist import Discrete, Distribution
from .extmath import (
    DEFAULT_CONFIG, INF, NonConvergent, QuadConfig, UndefinedSum, ext_to_json,
    relaxed_leq,
)

__all__ = [
    "Result", "Certification", "Witness", "OrderVerdict", "ConvexTestFn",
    "CxReduction", "check_cx", "check_cx_dagger", "check_icx", "check_dcx",
    "check_st", "check_cx_tails", "lemma1_reduce", "cx_bruteforce_oracle",
    "check_order", "ORDERS",
]


class Result(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Certification:
    """``exact`` (complete closed-form check), ``grid_numeric`` or ``sampled``."""

    level: str
    grid_n: Optional[int] = None
    tol: Optional[float] = None

    @classmethod
    def exact(cls) -> "Certification":
        return cls("exact")

    @classmethod
    def grid(cls, cfg: QuadConfig, grid_n: Optional[int] = None) -> "Certification":
        return cls("grid_numeric", grid_n or cfg.grid_n, cfg.tol)

    @property
    def is_exact(self) -> bool:
        return self.level == "exact"

    def to_dict(self) -> dict:
        out = {"level": self.level}
        if self.grid_n is not None:
            out["grid_n"] = self.grid_n
        if self.tol is not None:
            out["tol"] = self.tol
        return out


@dataclass(frozen=True)
class Witness:
    """Where a defining inequality breaks.

    ``which`` names the family: ``plus``/``minus`` (stop-loss at w = at,
    required lhs <= rhs), ``upper``/``lower`` (tail integrals at p = at;
    upper requires lhs <= rhs, lower requires lhs >= rhs), ``cdf`` (required
    lhs >= rhs) or ``fn`` (expectations of a sampled convex function).
    """

    at: float
    lhs: float
    rhs: float
    which: str

    def to_dict(self) -> dict:
        at = [ext_to_json(v) for v in self.at] if isinstance(self.at, tuple) else ext_to_json(self.at)
        return {"at": at, "lhs": ext_to_json(self.lhs),
                "rhs": ext_to_json(self.rhs), "which": self.which}


@dataclass(frozen=True)
class OrderVerdict:
    order: str
    result: Result
    certification: Certification
    witness: Optional[Witness] = None
    note: str = ""
    certificate: Optional[object] = None
    statistic: Optional[float] = None

    @property
    def holds(self) -> bool:
        return self.result is Result.HOLDS

    @property
    def fails(self) -> bool:
        return self.result is Result.FAILS

    @property
    def inconclusive(self) -> bool:
        return self.result is Result.INCONCLUSIVE

    def to_dict(self) -> dict:
        out = {"order": self.order, "result": self.result.value,
               "certification": self.certification.to_dict()}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.note:
            out["note"] = self.note
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        if self.statistic is not None:
            out["statistic"] = self.statistic
        return out


# ---------------------------------------------------------------------------
# comparison helpers


@dataclass
class _Scan:
    """Running state of a check: first definite failure, else first near-tie."""

    tol: float
    exact: bool
    slack: float = 0.0
    fail: Optional[Witness] = None
    near: Optional[Witness] = None

    def _excess(self, lhs, rhs):
        scale = max(1.0, *(abs(float(v)) for v in (lhs, rhs) if math.isfinite(v)))
        return (float(lhs) - float(rhs)) / scale

    def offer(self, at, lhs, rhs, which, relaxed, reverse=False) -> bool:
        """Record one comparison; return True once a definite failure exists."""
        a, b = (rhs, lhs) if reverse else (lhs, rhs)
        if relaxed_leq(a, b) if relaxed else a <= b:
            return False
        if self.slack and math.isfinite(a) and math.isfinite(b) and a - b <= self.slack:
            return False
        w = Witness(at, lhs, rhs, which)
        if self.exact or a == INF or b == -INF:
            self.fail = w
            return True
        excess = self._excess(a, b)
        if excess > 10 * self.tol:
            self.fail = w
            return True
        if excess > self.tol and self.near is None:
            self.near = w
        return False

    def verdict(self, order, cert, note="") -> OrderVerdict:
        if self.fail is not None:
            return OrderVerdict(order, Result.FAILS, cert, self.fail, note)
        if self.near is not None:
            return OrderVerdict(order, Result.INCONCLUSIVE, cert, self.near,
                                note or "violation within the numerical tolerance band")
        return OrderVerdict(order, Result.HOLDS, cert, None, note)


def _exact_slack(*ds: Discrete) -> float:
    """Rounding allowance for float-valued discrete data (0 if rational)."""
    if all(d.rational for d in ds):
        return 0.0
    scale = max(1.0, *(abs(float(a)) for d in ds for a in (d.atoms[0], d.atoms[-1])))
    return 1e-12 * scale


def _discrete_pair(X: Distribution, Y: Distribution):
    dx, dy = X.as_discrete(), Y.as_discrete()
    if dx is None or dy is None:
        return None
    return dx, dy


def _families(plus: bool, minus: bool):
    fams = []
    if plus:
        fams.append(("plus", "stop_loss_plus"))
    if minus:
        fams.append(("minus", "stop_loss_minus"))
    return fams


# ---------------------------------------------------------------------------
# stop-loss based deciders


def _w_grid(X: Distribution, Y: Distribution, cfg: QuadConfig) -> np.ndarray:
    n = cfg.grid_n
    levels = np.arange(1, n + 1) / (n + 1)
    pts = [np.asarray(X.quantile(levels), dtype=float),
           np.asarray(Y.quantile(levels), dtype=float)]
    for D in (X, Y):
        d = D.as_discrete()
        if d is not None and len(d.atoms) <= 4 * n:
            pts.append(np.asarray(d.atoms, dtype=float))
    w = np.unique(np.concatenate(pts))
    return w[np.isfinite(w)]


def _anchors(X, Y, cfg) -> list:
    out = [0.0]
    for D in (X, Y):
        m = D.mean_class(cfg)
        if m.is_finite:
            out.append(float(m.value))
    return out


def _far_probes(grid: np.ndarray) -> list:
    """Points far outside the bulk, where only mean differences survive."""
    if grid.size == 0:
        return []
    lo, hi = float(grid[0]), float(grid[-1])
    span = max(1.0, hi - lo, abs(lo), abs(hi))
    return [v for k in range(0, 41, 4)
            for v in (lo - span * 2.0 ** k, hi + span * 2.0 ** k)]


def _stop_loss_check(order: str, X: Distribution, Y: Distribution, cfg: QuadConfig,
                     plus: bool, minus: bool, relaxed: bool) -> OrderVerdict:
    pair = _discrete_pair(X, Y)
    fams = _families(plus, minus)

    if pair is not None:
        dx, dy = pair
        exact = dx.exact and dy.exact
        cert = Certification.exact() if exact else Certification.grid(
            cfg, max(len(dx.atoms), len(dy.atoms)))
        scan = _Scan(cfg.tol, exact, _exact_slack(dx, dy) if exact else 0.0)
        points = sorted(set(dx.atoms) | set(dy.atoms))
        for w in points:
            for which, meth in fams:
                if scan.offer(w, getattr(dx, meth)(w), getattr(dy, meth)(w), which, relaxed):
                    return scan.verdict(order, cert)
        return scan.verdict(order, cert)

    cert = Certification.grid(cfg)
    try:
        mx, my = X.mean_class(cfg), Y.mean_class(cfg)
        # families that are vacuous because the right side is +inf everywhere
        # (or, for the relaxed order, the left side is)
        active = []
        for which, meth in fams:
            inf_y = my.plus_part_infinite if which == "plus" else my.minus_part_infinite
            inf_x = mx.plus_part_infinite if which == "plus" else mx.minus_part_infinite
            if inf_y or (relaxed and inf_x):
                continue
            active.append((which, meth))
        note = "" if len(active) == len(fams) else \
            "families with an infinite right side hold identically"
        if not active:
            return OrderVerdict(order, Result.HOLDS, cert, None, note)

        scan = _Scan(cfg.tol, False)
        for w in _anchors(X, Y, cfg):
            for which, meth in active:
                if scan.offer(w, getattr(X, meth)(w, cfg), getattr(Y, meth)(w, cfg), which, relaxed):
                    return scan.verdict(order, cert, note)

        grid = _w_grid(X, Y, cfg)
        for which, meth in active:
            lhs = np.asarray(getattr(X, meth)(grid, cfg), dtype=float)
            rhs = np.asarray(getattr(Y, meth)(grid, cfg), dtype=float)
            bad = ~(lhs <= rhs)
            if relaxed:
                bad &= ~((lhs == INF) | (rhs == -INF))
            for i in np.flatnonzero(bad):
                if scan.offer(float(grid[i]), float(lhs[i]), float(rhs[i]), which, relaxed):
                    return scan.verdict(order, cert, note)

        if mx.is_finite and my.is_finite:
            for w in _far_probes(grid):
                for which, meth in active:
                    if scan.offer(w, getattr(X, meth)(w, cfg), getattr(Y, meth)(w, cfg),
                                  which, relaxed):
                        return scan.verdict(order, cert, note)
        return scan.verdict(order, cert, note)
    except (NonConvergent, UndefinedSum) as exc:
        return OrderVerdict(order, Result.INCONCLUSIVE, cert, None, f"quadrature: {exc}")


class CxReduction(enum.Enum):
    FULL = "full"
    DCX_SUFFICES = "dcx_suffices"
    ICX_SUFFICES = "icx_suffices"
    TRIVIALLY_HOLDS = "trivially_holds"


def lemma1_reduce(X: Distribution, Y: Distribution, cfg: QuadConfig = DEFAULT_CONFIG) -> CxReduction:
    """Which part of the cx check is informative, given the mean class of Y.

    If E[Y+] is infinite every plus-family inequality holds, so cx reduces to
    dcx; symmetrically for E[Y-]; with both infinite cx holds outright.
    """
    m = Y.mean_class(cfg)
    if m.plus_part_infinite and m.minus_part_infinite:
        return CxReduction.TRIVIALLY_HOLDS
    if m.plus_part_infinite:
        return CxReduction.DCX_SUFFICES
    if m.minus_part_infinite:
        return CxReduction.ICX_SUFFICES
    return CxReduction.FULL


def check_cx(X: Distribution, Y: Distribution, cfg: QuadConfig = DEFAULT_CONFIG) -> OrderVerdict:
    """X <=cx Y: both stop-loss families ordered, inf <= inf allowed."""
    return _stop_loss_check("cx", X, Y, cfg, True, True, relaxed=False)


def check_cx_dagger(X: Distribution, Y: Distribution,
                    cfg: QuadConfig = DEFAULT_CONFIG) -> OrderVerdict:
    """Dagger convex order: same families, compared with ``relaxed_leq``."""
    return _stop_loss_check("cx_dagger", X, Y, cfg, True, True, relaxed=True)


def check_icx(X: Distribution, Y: Distribution, cfg: QuadConfig = DEFAULT_CONFIG) -> OrderVerdict:
    return _stop_loss_check("icx", X, Y, cfg, True, False, relaxed=False)


def check_dcx(X: Distribution, Y: Distribution, cfg: QuadConfig = DEFAULT_CONFIG) -> OrderVerdict:
    return _stop_loss_check("dcx", X, Y, cfg, False, True, relaxed=False)


def check_st(X: Distribution, Y: Distribution, cfg: QuadConfig = DEFAULT_CONFIG) -> OrderVerdict:
    """X <=st Y: cdf of X dominates the cdf of Y pointwise."""
    pair = _discrete_pair(X, Y)
    if pair is not None:
        dx, dy = pair
        exact = dx.exact and dy.exact
        cert = Certification.exact() if exact else Certification.grid(cfg)
        scan = _Scan(cfg.tol, exact, 1e-12 if exact and _exact_slack(dx, dy) else 0.0)
        for x in sorted(set(dx.atoms) | set(dy.atoms)):
            if scan.offer(x, dx.cdf(x), dy.cdf(x), "cdf", False, reverse=True):
                break
        return scan.verdict("st", cert)

    cert = Certification.grid(cfg)
    scan = _Scan(cfg.tol, False)
    grid = _w_grid(X, Y, cfg)
    fx = np.asarray(X.cdf(grid), dtype=float)
    fy = np.asarray(Y.cdf(grid), dtype=float)
    for i in np.flatnonzero(fx < fy):
        if scan.offer(float(grid[i]), float(fx[i]), float(fy[i]), "cdf", False, reverse=True):
            break
    return scan.verdict("st", cert)


# ---------------------------------------------------------------------------
# tail-integral formulation


def _discrete_lower_integral(d: Discrete, p):
    """Integral of the quantile function of ``d`` over (0, p), p in [0, 1]."""
    total, prev = 0, 0
    for a, c in zip(d.atoms, d.cum):
        if p <= prev:
            break
        total += a * (min(c, p) - prev)
        prev = c
    return total


def check_cx_tails(X: Distribution, Y: Distribution,
                   cfg: QuadConfig = DEFAULT_CONFIG) -> OrderVerdict:
    """X <=cx Y through the tail integrals of the quantile functions.

    Requires the lower integrals of X to dominate those of Y and the upper
    integrals of X to be dominated, for every level p.
    """
    pair = _discrete_pair(X, Y)
    if pair is not None:
        dx, dy = pair
        exact = dx.exact and dy.exact
        cert = Certification.exact() if exact else Certification.grid(cfg)
        scan = _Scan(cfg.tol, exact, _exact_slack(dx, dy) if exact else 0.0)
        mx, my = dx.mean(), dy.mean()
        # both integrals are piecewise linear in p with kinks at the
        # cumulative probabilities; p = 0 and p = 1 are limits
        for p in sorted({0, 1} | set(dx.cum) | set(dy.cum)):
            lx, ly = _discrete_lower_integral(dx, p), _discrete_lower_integral(dy, p)
            if scan.offer(p, lx, ly, "lower", False, reverse=True):
                break
            if scan.offer(p, mx - lx, my - ly, "upper", False):
                break
        return scan.verdict("cx", cert)

    cert = Certification.grid(cfg)
    scan = _Scan(cfg.tol, False)
    n = cfg.grid_n
    try:
        for k in range(1, n + 1):
            p = k / (n + 1)
            if scan.offer(p, X.lower_tail_integral(p, cfg), Y.lower_tail_integral(p, cfg),
                          "lower", False, reverse=True):
                break
            if scan.offer(p, X.upper_tail_integral(p, cfg), Y.upper_tail_integral(p, cfg),
                          "upper", False):
                break
    except (NonConvergent, UndefinedSum) as exc:
        return OrderVerdict("cx", Result.INCONCLUSIVE, cert, None, f"quadrature: {exc}")
    return scan.verdict("cx", cert)


# ---------------------------------------------------------------------------
# brute-force oracle


@dataclass(frozen=True)
class ConvexTestFn:
    """Piecewise-linear u with u(breakpoints[0]) = intercept.

    ``slopes[0]`` applies left of the first breakpoint and ``slopes[i]``
    between breakpoints i-1 and i; convex iff slopes are non-decreasing.
    """

    breakpoints: tuple
    slopes: tuple
    intercept: float = 0.0

    def __post_init__(self):
        if len(self.slopes) != len(self.breakpoints) + 1:
            raise ValueError("need exactly one more slope than breakpoints")

    @property
    def is_convex(self) -> bool:
        return all(a <= b for a, b in zip(self.slopes, self.slopes[1:]))

    def __call__(self, x):
        b = np.asarray(self.breakpoints, dtype=float)
        s = np.asarray(self.slopes, dtype=float)
        x = np.asarray(x, dtype=float)
        # u(x) = intercept + s0 (x - b0) + sum_i (s_{i+1} - s_i) (x - b_i)+
        out = self.intercept + s[0] * (x - b[0])
        out = out + np.sum(np.diff(s)[:, None] * np.maximum(x[None, ...] - b[:, None], 0.0)
                           .reshape(len(b), -1), axis=0).reshape(x.shape)
        return out


def cx_bruteforce_oracle(X: Discrete, Y: Discrete, n_fns: int = 1000, rng_seed=0,
                         tol: float = 1e-9) -> OrderVerdict:
    """Search for a convex u with E[u(X)] > E[u(Y)] + tol.

    Test functions have kinks at the atom union and sorted standard-normal
    slopes.  ``Holds`` only means no violation was sampled.
    """
    dx, dy = X.as_discrete(), Y.as_discrete()
    if dx is None or dy is None:
        raise TypeError("the brute-force oracle needs discrete laws")
    rng = np.random.default_rng(rng_seed)
    knots = np.array(sorted(set(dx.atoms) | set(dy.atoms)), dtype=float)
    cert = Certification("sampled", n_fns, tol)
    if n_fns <= 0:
        return OrderVerdict("cx", Result.HOLDS, cert, note="no functions sampled")
    slopes = np.sort(rng.standard_normal((n_fns, len(knots) + 1)), axis=1)

    def values(d: Discrete):
        x = np.asarray(d.atoms, dtype=float)
        hinge = np.maximum(x[None, :] - knots[:, None], 0.0)          # knots x atoms
        u = slopes[:, :1] * (x[None, :] - knots[0]) + np.diff(slopes, axis=1) @ hinge
        return u @ np.asarray(d.probs, dtype=float)

    ex, ey = values(dx), values(dy)
    bad = np.flatnonzero(ex > ey + tol)
    if bad.size:
        i = int(bad[0])
        return OrderVerdict("cx", Result.FAILS, cert,
                            Witness(float(i), float(ex[i]), float(ey[i]), "fn"),
                            note=f"sampled convex function #{i} separates the laws")
    return OrderVerdict("cx", Result.HOLDS, cert, note="no violation among sampled functions")


def sampled_test_fn(X: Discrete, Y: Discrete, index: int, n_fns: int, rng_seed=0) -> ConvexTestFn:
    """Rebuild the ``index``-th test function drawn by ``cx_bruteforce_oracle``."""
    rng = np.random.default_rng(rng_seed)
    knots = sorted(set(X.atoms) | set(Y.atoms))
    slopes = np.sort(rng.standard_normal((n_fns, len(knots) + 1)), axis=1)[index]
    return ConvexTestFn(tuple(float(k) for k in knots), tuple(float(s) for s in slopes))


ORDERS = {
    "cx": check_cx,
    "cx_dagger": check_cx_dagger,
    "icx": check_icx,
    "dcx": check_dcx,
    "st": check_st,
}


def check_order(order: str, X: Distribution, Y: Distribution,
                cfg: QuadConfig = DEFAULT_CONFIG) -> OrderVerdict:
    try:
        fn = ORDERS[order]
    except KeyError:
        raise ValueError(f"unknown order {order!r}; choose from {sorted(ORDERS)}") from None
    return fn(X, Y, cfg)
