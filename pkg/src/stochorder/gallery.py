"""Scripted reproductions of the worked examples, as checkable reports.

Each scenario computes a handful of claims (expected vs computed value with a
tolerance) and passes only if every claim does.  Scenarios are deterministic
for a given configuration and seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

import numpy as np
from scipy import integrate

from .couplings import (
    UMaps, comonotonic_version, countermono_version, expectation_of, sum_distribution,
)
from .dist import Affine, Cauchy, Pareto, PointMass, Uniform01
from .extmath import DEFAULT_CONFIG, QuadConfig, ext_from_json, ext_to_json
from .generators import random_discrete, random_joint
from .multiorder import LatticeDist, check_sm_lattice
from .orders import check_cx, check_cx_dagger, check_dcx

__all__ = ["Claim", "ScenarioReport", "UnknownScenario", "SCENARIOS", "run_scenario",
           "run_all", "example1_coupling", "example1_phi"]

GALLERY_GRID_N = 100_000


class UnknownScenario(KeyError):
    pass


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, (int, float, np.floating, np.integer)):
        return ext_to_json(float(v) if not isinstance(v, int) else v)
    return str(v)


@dataclass(frozen=True)
class Claim:
    description: str
    expected: Any
    computed: Any
    passed: bool
    tolerance: float | None = None
    certification: str = ""

    def __post_init__(self):
        object.__setattr__(self, "expected", _jsonable(self.expected))
        object.__setattr__(self, "computed", _jsonable(self.computed))
        object.__setattr__(self, "passed", bool(self.passed))

    def to_dict(self) -> dict:
        out = {"description": self.description, "expected": self.expected,
               "computed": self.computed, "pass": self.passed}
        if self.tolerance is not None:
            out["tolerance"] = self.tolerance
        if self.certification:
            out["certification"] = self.certification
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Claim":
        return cls(d["description"], d["expected"], d["computed"], d["pass"],
                   d.get("tolerance"), d.get("certification", ""))


@dataclass(frozen=True)
class ScenarioReport:
    name: str
    claims: tuple
    seed: int = 0

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.claims)

    def to_dict(self) -> dict:
        return {"name": self.name, "seed": self.seed, "overall": self.overall,
                "claims": [c.to_dict() for c in self.claims]}

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioReport":
        report = cls(d["name"], tuple(Claim.from_dict(c) for c in d["claims"]), d.get("seed", 0))
        if report.overall != d.get("overall", report.overall):
            raise ValueError("stored overall flag disagrees with the claims")
        return report


def _close(expected, computed, tol) -> bool:
    return computed is not None and abs(computed - expected) <= tol


def _verdict_claim(desc, verdict, expected="holds", witness=None) -> Claim:
    ok = verdict.result.value == expected
    if ok and witness is not None:
        w = verdict.witness
        ok = w is not None and all(
            ext_from_json(_jsonable(getattr(w, k))) == v for k, v in witness.items())
    computed = verdict.result.value
    if verdict.witness is not None:
        computed = f"{computed} {verdict.witness.to_dict()}"
    return Claim(desc, expected if witness is None else f"{expected} {witness}", computed, ok,
                 certification=verdict.certification.level)


# ---------------------------------------------------------------------------
# example 1


def example1_phi(x, y, z):
    """1/x 1{0<x<1} + 1/y 1{0<y<1} - 2/z 1{0<z<1}: separable, so supermodular."""
    def part(v, c):
        return c / v if 0 < v < 1 else 0.0
    return part(x, 1.0) + part(y, 1.0) - part(z, 2.0)


def example1_coupling() -> UMaps:
    """X = U, Y = 1 - U and Z = 1 - |2U - 1|.

    With R = |2U - 1| (uniform), W = 1/X + 1/Y = 4 / (1 - R^2) and
    V = 2/Z = 2 / (1 - R) are both increasing in R, so (W, Z) is
    counter-monotonic as required.
    """
    U = Uniform01()
    # 2 min(u, 1 - u) equals 1 - |2u - 1| but is exact in floating point,
    # which keeps 2/Z free of cancellation noise near the endpoints
    maps = (lambda u: u, lambda u: 1 - u, lambda u: 2 * np.minimum(u, 1 - np.asarray(u))
            if np.ndim(u) else 2 * min(u, 1 - u))
    return UMaps(maps, (U, U, U), "general", (0.5,), False)


def _example1(cfg: QuadConfig, seed: int, **_) -> list:
    claims = []
    value = expectation_of(example1_coupling(), example1_phi, cfg)
    target = 2 * math.log(2)
    claims.append(Claim("E[phi(X,Y,Z)] equals 2 log 2", target, value.value,
                        value.is_finite and _close(target, value.value, 1e-6), 1e-6))
    U = Uniform01()
    co = expectation_of(comonotonic_version([U, U, U]), example1_phi, cfg)
    claims.append(Claim("E[phi] under the comonotonic coupling is exactly 0", 0.0, co.value,
                        co.is_finite and co.value == 0, 0.0))
    claims.append(Claim("comonotonic value lies strictly below the constructed one", True,
                        bool(value.is_finite and co.is_finite and co.value < value.value), True))

    W = sum_distribution(countermono_version([Pareto(1), Pareto(1)]), cfg, GALLERY_GRID_N)
    V = Affine(2, 0, Pareto(1))
    for u in (0.1, 0.25, 0.5, 0.75, 0.9):
        exact_w = 4 / (1 - u * u)
        got = W.quantile(u)
        claims.append(Claim(f"F_W^-1({u}) = 4/(1-u^2) (grid of {GALLERY_GRID_N})", exact_w, got,
                            abs(got - exact_w) <= 1e-3 * exact_w, 1e-3,
                            certification="grid_numeric"))
        claims.append(Claim(f"F_V^-1({u}) = 2/(1-u)", 2 / (1 - u), V.quantile(u),
                            _close(2 / (1 - u), V.quantile(u), 1e-12), 1e-12))
    return claims


# ---------------------------------------------------------------------------
# examples 2 to 4


def _example2(cfg: QuadConfig, seed: int, **_) -> list:
    X = Pareto(0.5)
    Y = Affine(-1, 0, X)
    return [
        _verdict_claim("X <=cx-dagger Y", check_cx_dagger(X, Y, cfg)),
        _verdict_claim("Y <=cx-dagger X", check_cx_dagger(Y, X, cfg)),
        _verdict_claim("X <=cx Y fails through E[X+] = inf > 0", check_cx(X, Y, cfg), "fails",
                       {"at": 0.0, "which": "plus", "lhs": math.inf, "rhs": 0.0}),
        _verdict_claim("Y <=cx X fails through E[Y-] = inf > 0", check_cx(Y, X, cfg), "fails",
                       {"at": 0.0, "which": "minus", "lhs": math.inf, "rhs": 0.0}),
    ]


def _example3(cfg: QuadConfig, seed: int, **_) -> list:
    X = Cauchy()
    Y = Affine(2, 0, X)
    claims = [
        _verdict_claim("Cauchy <=cx 2 Cauchy", check_cx(X, Y, cfg)),
        _verdict_claim("2 Cauchy <=cx Cauchy", check_cx(Y, X, cfg)),
    ]
    probes = [-3.0, -1.0, 1.0, 3.0]
    gaps = [abs(X.cdf(x) - Y.cdf(x)) for x in probes]
    claims.append(Claim("the two laws differ: max cdf gap at probe points is positive",
                        ">0", max(gaps), max(gaps) > 0.05))
    return claims


def _example4(cfg: QuadConfig, seed: int, **_) -> list:
    X, Y, Z = Cauchy(), PointMass(0), PointMass(1)
    return [
        _verdict_claim("Y <=cx-dagger X", check_cx_dagger(Y, X, cfg)),
        _verdict_claim("X <=cx-dagger Z", check_cx_dagger(X, Z, cfg)),
        _verdict_claim("Z <=cx-dagger X", check_cx_dagger(Z, X, cfg)),
        _verdict_claim("X <=cx-dagger Y", check_cx_dagger(X, Y, cfg)),
        _verdict_claim("Y <=cx-dagger Z fails (means differ)", check_cx_dagger(Y, Z, cfg), "fails"),
        _verdict_claim("Z <=cx-dagger Y fails (means differ)", check_cx_dagger(Z, Y, cfg), "fails"),
        _verdict_claim("the plain order breaks the chain: X <=cx Z fails",
                       check_cx(X, Z, cfg), "fails"),
    ]


# ---------------------------------------------------------------------------
# example 5: Pareto sums


def _independent_sum_cdf(alpha: float, s: float) -> float:
    """P(X + Y <= s) for iid Pareto(alpha), as an integral over the first quantile."""
    if s <= 2:
        return 0.0
    F = lambda x: 1 - x ** -alpha if x >= 1 else 0.0
    val, _ = integrate.quad(lambda x: alpha * x ** (-alpha - 1) * F(s - x), 1, s - 1,
                            limit=200, epsabs=1e-12)
    return val


def _example5(cfg: QuadConfig, seed: int, cross_check: bool = False, **_) -> list:
    X = Pareto(0.5)
    twice = Affine(2, 0, X)
    ct_sum = sum_distribution(countermono_version([X, X]), cfg, GALLERY_GRID_N)
    grid_cfg = cfg.with_(grid_n=1000)
    verdict = check_dcx(ct_sum, twice, grid_cfg)
    claims = [
        _verdict_claim("counter-monotonic X1 + X2 <=dcx 2X on 1000 probe points "
                       "(grid evidence, not a proof)", verdict),
        Claim("both sides have an infinite positive part", "plus_inf",
              twice.mean_class().kind.value, twice.mean_class().plus_part_infinite),
    ]
    if cross_check:
        probes = [3.0, 5.0, 10.0, 50.0, 200.0]
        worst = min(twice.cdf(s) - _independent_sum_cdf(0.5, s) for s in probes)
        claims.append(Claim("cross-check of the cited st relation: F_2X >= F_(X+Y) for iid "
                            "summands at probe points", ">=0", worst, worst >= -1e-9, 1e-9,
                            certification="grid_numeric"))
    return claims


# ---------------------------------------------------------------------------
# finite-support scenarios


def _sum_means(cfg: QuadConfig, seed: int, **_) -> list:
    rng = np.random.default_rng(seed)
    dx, dy = random_discrete(rng, 6), random_discrete(rng, 6)
    target = dx.mean() + dy.mean()
    means = set()
    for _ in range(50):
        J = random_joint([dx, dy], rng)
        means.add(sum(p * (a + b) for (a, b), p in zip(J.atoms, J.probs)))
    return [Claim("all 50 random couplings give the same mean of X + Y", target,
                  sorted(means), means == {target}, 0.0, "exact")]


def _prop5(cfg: QuadConfig, seed: int, **_) -> list:
    rng = np.random.default_rng(seed)
    claims = []
    for shape in ((3, 3), (4, 4), (2, 2, 2), (3, 3, 3)):
        ok, worst = True, math.inf
        for _ in range(5):
            ms = [random_discrete(rng, k, 0, 9, min_atoms=k) for k in shape]
            A = LatticeDist.from_joint(random_joint(ms, rng))
            v = check_sm_lattice(A, LatticeDist.comonotonic(ms))
            ok &= v.holds
            worst = min(worst, v.statistic if v.statistic is not None else -math.inf)
        claims.append(Claim(f"random laws on {'x'.join(map(str, shape))} grids are <=sm their "
                            "comonotonic version (LP minimum >= -1e-9)", ">=-1e-9", worst, ok,
                            1e-9, "lp_numeric"))
    value = expectation_of(example1_coupling(), example1_phi, cfg)
    claims.append(Claim("off finite support the comonotonic bound fails (uniform example)",
                        "E[phi] > 0 = E[phi co]", value.value,
                        value.is_finite and value.value > 0))
    return claims


SCENARIOS: dict[str, Callable] = {
    "example1_simons3d": _example1,
    "example2_dagger": _example2,
    "example3_cauchy": _example3,
    "example4_transitivity_dagger": _example4,
    "example5_pareto_dcx": _example5,
    "corollary1_simons": _sum_means,
    "prop5_finite_lattice": _prop5,
}


def run_scenario(name: str, cfg: QuadConfig = DEFAULT_CONFIG, seed: int = 0,
                 cross_check: bool = False) -> ScenarioReport:
    try:
        fn = SCENARIOS[name]
    except KeyError:
        raise UnknownScenario(name) from None
    return ScenarioReport(name, tuple(fn(cfg, seed, cross_check=cross_check)), seed)


def run_all(cfg: QuadConfig = DEFAULT_CONFIG, seed: int = 0,
            cross_check: bool = False) -> list[ScenarioReport]:
    return [run_scenario(n, cfg, seed, cross_check) for n in SCENARIOS]
