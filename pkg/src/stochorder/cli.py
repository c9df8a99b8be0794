"""Command-line front end.

Exit codes: 0 holds / success, 1 fails, 2 inconclusive, 64 usage error
(bad arguments or unreadable specs).  JSON output has sorted keys
and echoes the seed, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

import numpy as np

from . import couplings, gallery, multiorder, orders, ot
from .dist import Mixture
from .extmath import DEFAULT_CONFIG, NonConvergent, QuadConfig
from .io import SpecError, dumps, format_number, jsonable, load_spec, parse_coupling, \
    parse_distribution
from .orders import Result

EXIT_HOLDS, EXIT_FAILS, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64
TOL_ENV = "STOCHORDER_TOL"
_RESULT_EXIT = {Result.HOLDS: EXIT_HOLDS, Result.FAILS: EXIT_FAILS,
                Result.INCONCLUSIVE: EXIT_INCONCLUSIVE}


class UsageError(Exception):
    """Bad command line; reported with exit code 64."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0 or v == float("inf"):
        raise argparse.ArgumentTypeError("must be positive and finite")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--grid-n", type=_positive_int, default=None,
                        help=f"probe grid size (default {DEFAULT_CONFIG.grid_n})")
    common.add_argument("--tol", type=_positive_float, default=None,
                        help=f"numeric tolerance (default ${TOL_ENV} or {DEFAULT_CONFIG.tol})")
    common.add_argument("--seed", type=int, default=0, help="random seed (echoed in output)")
    common.add_argument("--format", choices=("json", "text"), default="json")

    p = _Parser(prog="stochorder", description="Verify stochastic orders between laws.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="check X <= Y in an order")
    c.add_argument("order", choices=sorted(orders.ORDERS))
    c.add_argument("X")
    c.add_argument("Y")

    c = sub.add_parser("coupling", parents=[common], help="build a coupling and its sum")
    c.add_argument("spec")
    c.add_argument("--sum", action="store_true", help="report the law of the coordinate sum")
    c.add_argument("--stop-loss", action="append", default=[], metavar="W",
                   help="stop-loss transforms of the sum at W (repeatable)")

    c = sub.add_parser("sm-check", parents=[common], help="supermodular order on a lattice")
    c.add_argument("A")
    c.add_argument("B")
    c.add_argument("--max-cells", type=_positive_int, default=multiorder.DEFAULT_MAX_CELLS)

    c = sub.add_parser("ot", parents=[common], help="extreme costs for a supermodular cost")
    c.add_argument("X")
    c.add_argument("Y")
    c.add_argument("--cost", required=True,
                   help=f"one of {sorted(ot.BUILTIN_COSTS)} or cx_of_sum:<w>")
    c.add_argument("--oracle", action="store_true",
                   help="cross-check with exhaustive assignment (equiprobable atoms)")

    c = sub.add_parser("gallery", parents=[common], help="run worked scenarios")
    c.add_argument("name", help="scenario name or 'all'")
    c.add_argument("--cross-check", action="store_true",
                   help="also run the slower independent cross-checks")

    c = sub.add_parser("curves", parents=[common], help="tail and stop-loss curves as CSV")
    c.add_argument("X")
    c.add_argument("Y")
    return p


def resolve_config(args) -> QuadConfig:
    tol = args.tol
    if tol is None and os.environ.get(TOL_ENV):
        try:
            tol = _positive_float(os.environ[TOL_ENV])
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{TOL_ENV}: {exc}") from None
    changes = {}
    if tol is not None:
        changes["tol"] = tol
    if args.grid_n is not None and args.command != "curves":
        changes["grid_n"] = args.grid_n
    return DEFAULT_CONFIG.with_(**changes)


def _header(args, cfg) -> dict:
    return {"command": args.command, "seed": args.seed, "tol": cfg.tol, "grid_n": cfg.grid_n}


# ---------------------------------------------------------------------------
# commands; each returns (exit code, payload)


def cmd_check(args, cfg):
    X = parse_distribution(load_spec(args.X), cfg)
    Y = parse_distribution(load_spec(args.Y), cfg)
    verdict = orders.check_order(args.order, X, Y, cfg)
    out = _header(args, cfg)
    out.update(order=args.order, verdict=verdict.to_dict())
    return _RESULT_EXIT[verdict.result], out


def cmd_coupling(args, cfg):
    spec = load_spec(args.spec)
    out = _header(args, cfg)
    if isinstance(spec, dict) and spec.get("type") == "countermonotonic":
        marginals = [parse_distribution(m, cfg) for m in spec.get("marginals", [])]
        existence = couplings.countermono_existence(marginals)
        out["existence"] = existence.value
        if existence is couplings.CtExistence.NOT_EXISTS:
            out["error"] = "no counter-monotonic coupling exists for these marginals"
            return EXIT_FAILS, out
    C = parse_coupling(spec, cfg)
    out["coupling"] = {"kind": getattr(C, "kind", "discrete_joint"), "dim": C.dim}
    if isinstance(C, couplings.DiscreteJoint) or C.step:
        out["coupling"]["joint"] = couplings.to_discrete_joint(C).to_json()
    if args.sum or args.stop_loss:
        S = couplings.sum_distribution(C, cfg)
        lo, hi = S.support_bounds()
        D = S.as_discrete()
        summary = {"mean_class": S.mean_class(cfg).to_dict(), "support": [lo, hi],
                   "exact": bool(D is not None and D.exact)}
        if D is not None and len(D.atoms) <= 1000:
            summary["atoms"] = list(D.atoms)
            summary["probs"] = list(D.probs)
        curve = []
        for text in args.stop_loss:
            try:
                w = Fraction(text)
            except ValueError:
                raise UsageError(f"--stop-loss expects a number, got {text!r}") from None
            curve.append({"w": w, "plus": S.stop_loss_plus(w, cfg),
                          "minus": S.stop_loss_minus(w, cfg)})
        if curve:
            summary["stop_loss"] = curve
        out["sum"] = summary
    return EXIT_HOLDS, out


def cmd_sm_check(args, cfg):
    A = multiorder.LatticeDist.from_json(load_spec(args.A))
    B = multiorder.LatticeDist.from_json(load_spec(args.B))
    sm = multiorder.check_sm_lattice(A, B, tol=cfg.tol if cfg.tol != DEFAULT_CONFIG.tol else 1e-9,
                                     max_cells=args.max_cells)
    out = _header(args, cfg)
    out.update(verdict=sm.to_dict(), concordance=multiorder.check_concordance(A, B).to_dict())
    return _RESULT_EXIT[sm.result], out


def cmd_ot(args, cfg):
    X = parse_distribution(load_spec(args.X), cfg)
    Y = parse_distribution(load_spec(args.Y), cfg)
    cost = ot.builtin_cost(args.cost)
    low, high = ot.ot_extremes_supermodular(X, Y, cost, cfg)
    out = _header(args, cfg)
    out.update(cost=cost.name, min=low.to_dict(), max=high.to_dict(),
               spot_check_supermodular=ot.spot_check_supermodular(cost, args.seed))
    code = EXIT_HOLDS
    if args.oracle:
        xs, ys = _equiprobable_atoms(X), _equiprobable_atoms(Y)
        if xs is None or ys is None or len(xs) != len(ys):
            raise UsageError("--oracle needs two equiprobable discrete laws of equal size")
        omin, _ = ot.assignment_oracle(xs, ys, cost, "min")
        omax, _ = ot.assignment_oracle(xs, ys, cost, "max")
        agree = omin == low.value and omax == high.value
        out["oracle"] = {"min": omin, "max": omax, "agree": agree}
        code = EXIT_HOLDS if agree else EXIT_FAILS
    return code, out


def _equiprobable_atoms(D):
    d = D.as_discrete()
    if d is None:
        return None
    smallest = min(d.probs)
    if any((p / smallest) != round(p / smallest) for p in d.probs):
        return None
    return [a for a, p in zip(d.atoms, d.probs) for _ in range(int(round(p / smallest)))]


def cmd_gallery(args, cfg):
    if args.name == "all":
        reports = gallery.run_all(cfg, args.seed, args.cross_check)
    else:
        try:
            reports = [gallery.run_scenario(args.name, cfg, args.seed, args.cross_check)]
        except gallery.UnknownScenario:
            raise UsageError(f"unknown scenario {args.name!r}; choose from "
                             f"{sorted(gallery.SCENARIOS)} or 'all'") from None
    out = _header(args, cfg)
    out["reports"] = [r.to_dict() for r in reports]
    passed = all(r.overall for r in reports)
    out["overall"] = passed
    return (EXIT_HOLDS if passed else EXIT_FAILS), out


def curves_csv(X, Y, cfg: QuadConfig, n: int | None = None) -> str:
    """Two CSV blocks of n rows each on the midpoint grid p_k = (k - 1/2) / n.

    The first tabulates lower and upper quantile tail integrals at p_k; the
    second tabulates stop-loss transforms at the p_k-quantiles of the
    half-half mixture of X and Y, so the probes cover both laws.
    """
    n = n or cfg.grid_n
    ps = (np.arange(1, n + 1) - 0.5) / n
    lines = ["p,lower_tail_X,lower_tail_Y,upper_tail_X,upper_tail_Y"]
    for p in ps:
        row = [p, X.lower_tail_integral(p, cfg), Y.lower_tail_integral(p, cfg),
               X.upper_tail_integral(p, cfg), Y.upper_tail_integral(p, cfg)]
        lines.append(",".join(format_number(v) for v in row))
    lines.append("")
    lines.append("w,slp_X,slp_Y,slm_X,slm_Y")
    mix = Mixture((Fraction(1, 2), Fraction(1, 2)), (X, Y))
    for w in mix.quantile(ps):
        w = float(w)
        row = [w, X.stop_loss_plus(w, cfg), Y.stop_loss_plus(w, cfg),
               X.stop_loss_minus(w, cfg), Y.stop_loss_minus(w, cfg)]
        lines.append(",".join(format_number(v) for v in row))
    return "\n".join(lines) + "\n"


def cmd_curves(args, cfg):
    X = parse_distribution(load_spec(args.X), cfg)
    Y = parse_distribution(load_spec(args.Y), cfg)
    return EXIT_HOLDS, curves_csv(X, Y, cfg, args.grid_n)


COMMANDS = {"check": cmd_check, "coupling": cmd_coupling, "sm-check": cmd_sm_check,
            "ot": cmd_ot, "gallery": cmd_gallery, "curves": cmd_curves}


# ---------------------------------------------------------------------------
# text rendering


def _flatten(prefix, value, lines):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], lines)
    elif isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, lines)
    else:
        lines.append(f"{prefix}: {value}")


def render_text(payload) -> str:
    if isinstance(payload, str):
        return payload
    data = jsonable(payload)
    lines = []
    if "verdict" in data:
        v = data["verdict"]
        lines.append(f"{v['order']}: {v['result']} [{v['certification']['level']}]")
    if "reports" in data:
        for r in data["reports"]:
            lines.append(f"{'PASS' if r['overall'] else 'FAIL'} {r['name']}")
            for c in r["claims"]:
                lines.append(f"  {'ok  ' if c['pass'] else 'FAIL'} {c['description']}: "
                             f"{c['computed']}")
        return "\n".join(lines) + "\n"
    _flatten("", data, lines)
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        code, payload = COMMANDS[args.command](args, cfg)
    except (UsageError, SpecError, couplings.CtNotExists, multiorder.GridTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergent as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(payload, str):
        sys.stdout.write(payload)
    elif args.format == "text":
        sys.stdout.write(render_text(payload))
    else:
        sys.stdout.write(dumps(payload) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
