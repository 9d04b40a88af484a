import json
import math

import numpy as np
import pytest

from nodimhelly import InputError
from nodimhelly.io import dumps, fmt_float, load_instance, parse_float


def test_fmt_float_roundtrips():
    for x in (0.1, 1 / 3, 2 ** 0.5, 1e-300, -123456.789, 0.78615137775742328):
        assert float(fmt_float(x)) == x
    assert fmt_float(math.inf) == "inf"
    assert fmt_float(-math.inf) == "-inf"
    assert fmt_float(math.nan) == "nan"
    assert fmt_float(1.0) == "1"


def test_dumps_is_valid_json_with_exact_floats():
    obj = {"a": [0.1, 1 / 3], "b": {"c": np.float64(2) ** 0.5, "d": None, "e": True},
           "f": math.inf, "g": np.array([[1.0, 2.0], [3.0, 4.0]]), "h": [], "i": np.int64(3)}
    text = dumps(obj)
    back = json.loads(text)
    assert back["a"] == [0.1, 1 / 3]
    assert back["b"]["c"] == 2 ** 0.5
    assert back["f"] == "inf" and parse_float(back["f"]) == math.inf
    assert back["g"] == [[1.0, 2.0], [3.0, 4.0]]
    assert back["i"] == 3
    assert '"a": [0.10000000000000001, 0.33333333333333331]' in text
    with pytest.raises(TypeError):
        dumps({"x": object()})


def _write(tmp_path, obj):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(path)


def test_load_instance(tmp_path):
    inst = {"space": {"p": 2, "dim": 2, "mode": "euclidean"}, "k": 2,
            "sets": [{"type": "halfspace", "a": [1, 0], "b": 0},
                     {"type": "ball", "center": [0, 0], "radius": 1}]}
    out = load_instance(_write(tmp_path, inst))
    assert out["space"].is_euclidean and out["k"] == 2 and len(out["sets"]) == 2
    inst = {"space": {"p": 3, "dim": 2}, "families": [[{"type": "halfspace", "a": [1, 0], "b": 0}]],
            "points": [[0, 0], [1, 0]]}
    out = load_instance(_write(tmp_path, inst))
    assert out["space"].p == 3 and len(out["families"]) == 1 and out["points"].shape == (2, 2)


@pytest.mark.parametrize("obj,where", [
    ("{not json", "invalid JSON"),
    ([1, 2], "instance"),
    ({"sets": []}, "space"),
    ({"space": {"p": 2}}, "space.dim"),
    ({"space": {"p": 0.5, "dim": 2}}, "space"),
    ({"space": {"p": 2, "dim": 2}, "sets": [{"type": "halfspace", "a": [1], "b": 0}]}, "sets[0].a"),
    ({"space": {"p": 2, "dim": 2}, "sets": []}, "sets"),
    ({"space": {"p": 2, "dim": 2}, "families": [[{"type": "ball", "center": [0, 0]}]]},
     "families[0][0].radius"),
    ({"space": {"p": 2, "dim": 2}, "points": [[0, 0], [1]]}, "points[1]"),
    ({"space": {"p": 2, "dim": 2}, "k": 1.5}, "k"),
])
def test_load_instance_errors(tmp_path, obj, where):
    with pytest.raises(InputError) as err:
        load_instance(_write(tmp_path, obj))
    assert where in str(err.value)


def test_missing_file():
    with pytest.raises(InputError):
        load_instance("/nonexistent/instance.json")
