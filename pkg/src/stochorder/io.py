"""Reading JSON specs and writing deterministic JSON output.

A spec argument is either inline JSON (starting with ``{`` or ``[``), ``-``
for standard input, or a path to a JSON file.  Besides the distribution
types understood by :func:`stochorder.dist.from_json`, a distribution may be
``{"type": "sum", "coupling": {...}}``: the law of the coordinate sum under
a coupling spec.
"""

from __future__ import annotations

import enum
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import couplings, dist
from .dist import Distribution
from .extmath import DEFAULT_CONFIG, QuadConfig

__all__ = ["SpecError", "load_spec", "parse_distribution", "parse_coupling", "jsonable", "dumps"]


class SpecError(ValueError):
    """A spec argument could not be read or parsed."""


def load_spec(arg: str):
    """Inline JSON, ``-`` for standard input, or a file path."""
    text = arg.strip()
    if text == "-":
        source, text = "<stdin>", sys.stdin.read()
    elif text.startswith(("{", "[")):
        source = "<inline>"
    else:
        path = Path(arg)
        if not path.is_file():
            raise SpecError(f"{arg!r} is neither inline JSON nor a readable file")
        source, text = str(path), path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed JSON in {source}: {exc}") from None


def parse_coupling(obj, cfg: QuadConfig = DEFAULT_CONFIG):
    try:
        return couplings.from_json(obj, lambda m: parse_distribution(m, cfg))
    except (KeyError, TypeError) as exc:
        raise SpecError(f"bad coupling spec: {exc}") from None


def parse_distribution(obj, cfg: QuadConfig = DEFAULT_CONFIG) -> Distribution:
    if isinstance(obj, dict) and obj.get("type") == "sum":
        if "coupling" not in obj:
            raise SpecError("sum spec needs a 'coupling'")
        grid_n = obj.get("grid_n")
        return couplings.sum_distribution(parse_coupling(obj["coupling"], cfg), cfg,
                                          int(grid_n) if grid_n else None)
    try:
        return dist.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise SpecError(f"bad distribution spec: {exc}") from None


def jsonable(x):
    """Recursively convert to plain JSON types; infinities become strings."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, enum.Enum):
        return x.value
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2)


def format_number(x) -> str:
    """Plain text for CSV cells: shortest float repr, ``inf``/``-inf``."""
    v = jsonable(x)
    return v if isinstance(v, str) else repr(float(v))

