"""Reading and writing problem instances as JSON (and matrices as CSV).

Rationals travel as strings (``"3"``, ``"-2"``, ``"7/4"``) so that no float
ever touches a value; plain JSON integers are accepted on input.

    {
      "matrix": [["20", "26"], ["30", "13"]],
      "ranking": {"score": "sum", "direction": "dsc"},
      "effect": {"kind": "position", "row": 2},
      "weights": ["1", "1"],
      "distributions": [[["1", "1/2"], ["2", "1/2"]], [["1", "1/2"], ["2", "1/2"]]],
      "base": [1, 2],
      "encoding": "unary"
    }

Only ``matrix`` is required. ``base`` is a ranked row sequence.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .core import ColumnDistribution, Matrix, Permutation, ProductDistribution, WeightVector, format_rational, to_rational
from .errors import InvalidInput
from .pairwise import Encoding
from .ranking import SUM, EffectSpec, RankingSpec

_KEYS = {"matrix", "ranking", "effect", "weights", "distributions", "base", "encoding"}


@dataclass(frozen=True)
class Instance:
    M: Matrix
    spec: RankingSpec = SUM
    effect: EffectSpec | None = None
    weights: WeightVector | None = None
    dist: ProductDistribution | None = None
    base: Permutation | None = None
    encoding: Encoding = Encoding.UNARY


def _rational(v):
    if isinstance(v, float):
        raise InvalidInput(f"floating-point value {v!r}; write rationals as strings like \"3/4\"")
    return to_rational(v)


def parse_instance(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise InvalidInput("instance must be a JSON object")
    unknown = set(data) - _KEYS
    if unknown:
        raise InvalidInput(f"unknown instance keys: {sorted(unknown)}")
    if "matrix" not in data:
        raise InvalidInput("instance needs a matrix")
    try:
        rows = [[_rational(v) for v in row] for row in data["matrix"]]
    except TypeError as exc:
        raise InvalidInput("matrix must be a list of rows") from exc
    M = Matrix.of(rows)
    spec = SUM
    if "ranking" in data:
        r = data["ranking"]
        try:
            spec = RankingSpec(r["score"], r.get("direction", "asc"))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"bad ranking {r!r}") from exc
    effect = None
    if "effect" in data:
        e = data["effect"]
        try:
            effect = EffectSpec(e["kind"], e.get("row"), e.get("k"))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"bad effect {e!r}") from exc
        effect.validate(M.n)
    weights = None
    if "weights" in data:
        weights = tuple(_rational(v) for v in data["weights"])
        if len(weights) != M.m:
            raise InvalidInput(f"{len(weights)} weights for {M.m} columns")
    dist = None
    if "distributions" in data:
        dist = ProductDistribution(
            tuple(ColumnDistribution(tuple((_rational(v), _rational(p)) for v, p in col)) for col in data["distributions"])
        )
        dist.check_width(M.m)
    base = None
    if "base" in data:
        base = Permutation(tuple(data["base"]))
        if base.n != M.n:
            raise InvalidInput(f"base ranks {base.n} rows, matrix has {M.n}")
    try:
        encoding = Encoding(data.get("encoding", "unary"))
    except ValueError as exc:
        raise InvalidInput(f"bad encoding {data.get('encoding')!r}") from exc
    return Instance(M, spec, effect, weights, dist, base, encoding)


def dump_instance(inst: Instance) -> dict:
    data: dict = {
        "matrix": [[format_rational(v) for v in row] for row in inst.M.rows],
        "ranking": {"score": inst.spec.score.value, "direction": inst.spec.direction.value},
    }
    if inst.effect is not None:
        e = {"kind": inst.effect.kind.value}
        if inst.effect.row is not None:
            e["row"] = inst.effect.row
        if inst.effect.k is not None:
            e["k"] = inst.effect.k
        data["effect"] = e
    if inst.weights is not None:
        data["weights"] = [format_rational(v) for v in inst.weights]
    if inst.dist is not None:
        data["distributions"] = [
            [[format_rational(v), format_rational(p)] for v, p in col.support] for col in inst.dist.columns
        ]
    if inst.base is not None:
        data["base"] = list(inst.base.order)
    if inst.encoding is not Encoding.UNARY:
        data["encoding"] = inst.encoding.value
    return data


def load_instance(path: str | Path) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: invalid JSON ({exc})") from exc
    return parse_instance(data)


def read_matrix_csv(path: str | Path) -> Matrix:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [[cell.strip() for cell in row] for row in csv.reader(fh) if any(c.strip() for c in row)]
    return Matrix.of(rows)
