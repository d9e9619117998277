import json
from fractions import Fraction

import pytest

from rankexplain.core import Permutation
from rankexplain.errors import InvalidInput
from rankexplain.golden import BUILTINS, builtin
from rankexplain.instances import dump_instance, load_instance, parse_instance, read_matrix_csv
from rankexplain.pairwise import Encoding
from rankexplain.ranking import MAX_ASC, SUM_DSC, EffectSpec

FULL = {
    "matrix": [["1/2", 3], ["-2", "0"]],
    "ranking": {"score": "max", "direction": "asc"},
    "effect": {"kind": "position", "row": 2},
    "weights": ["1", "1"],
    "distributions": [[["0", "1/3"], ["1", "2/3"]], [["1", "1"]]],
    "base": [2, 1],
    "encoding": "binary",
}


def test_parse_full_instance():
    inst = parse_instance(FULL)
    assert inst.M.rows[0] == (Fraction(1, 2), 3)
    assert inst.spec == MAX_ASC
    assert inst.effect == EffectSpec("position", row=2)
    assert inst.base == Permutation((2, 1))
    assert inst.encoding is Encoding.BINARY


def test_round_trip(tmp_path):
    inst = parse_instance(FULL)
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(dump_instance(inst)))
    assert load_instance(path) == inst


@pytest.mark.parametrize(
    "patch",
    [
        {"matrix": [[0.5, 1]]},
        {"weights": [1.0, 1]},
        {"extra": 1},
        {"weights": ["1"]},
        {"base": [1]},
        {"encoding": "ternary"},
        {"effect": {"kind": "position", "row": 9}},
        {"ranking": {"score": "median"}},
        {"distributions": [[["0", "1/2"]], [["1", "1"]]]},
    ],
)
def test_invalid_instances(patch):
    with pytest.raises(InvalidInput):
        parse_instance({**FULL, **patch})


def test_matrix_is_required_and_json_errors(tmp_path):
    with pytest.raises(InvalidInput):
        parse_instance({"weights": ["1"]})
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(InvalidInput):
        load_instance(bad)


def test_read_matrix_csv(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1, 2/3\n\n-4,5\n")
    M = read_matrix_csv(path)
    assert M.rows == ((1, Fraction(2, 3)), (-4, 5))


def test_builtins_parse():
    for name in BUILTINS:
        builtin(name)
    assert builtin("worked-example").spec == SUM_DSC
    with pytest.raises(InvalidInput):
        builtin("nope")
