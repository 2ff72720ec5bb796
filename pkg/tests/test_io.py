import json
from fractions import Fraction
from pathlib import Path

import pytest

from qtoric import io
from qtoric.errors import SchemaError
from qtoric.scalar import Scalar

DOCS = Path(__file__).resolve().parent.parent / "documents"
FAN_DOCS = ["exmax.json", "exmax_irrational.json", "exmax_nonmax.json", "exmax_nonmax_irrational.json",
            "line.json", "quantum_line.json"]


def _minimal():
    return {"schema_version": 1, "calibration": {"d": 2, "columns": [[1, 0], [0, 1]]},
            "cones": [{"rays": []}, {"rays": [0]}]}


@pytest.mark.parametrize("name", FAN_DOCS)
def test_round_trip_is_byte_stable(name):
    text = (DOCS / name).read_text()
    doc = io.parse(text)
    once = io.print_document(doc)
    assert once == text
    again = io.print_document(io.parse(once))
    assert again == once
    assert doc.fan().cal.columns == io.parse(once).fan().cal.columns


def test_missing_calibration_points_at_key():
    obj = _minimal()
    del obj["calibration"]
    with pytest.raises(SchemaError) as info:
        io.parse_obj(obj)
    assert info.value.path == "/calibration"


def test_wrong_type_points_at_entry():
    obj = _minimal()
    obj["calibration"]["columns"][1][0] = [1]
    with pytest.raises(SchemaError) as info:
        io.parse_obj(obj)
    assert info.value.path == "/calibration/columns/1/0"


def test_out_of_range_indices():
    obj = _minimal()
    obj["cones"][1]["rays"] = [5]
    with pytest.raises(SchemaError) as info:
        io.parse_obj(obj)
    assert info.value.path == "/cones/1/rays/0"
    obj = _minimal()
    obj["calibration"]["virtual"] = [0, 7]
    with pytest.raises(SchemaError) as info:
        io.parse_obj(obj)
    assert info.value.path == "/calibration/virtual/1"
    obj = _minimal()
    obj["calibration"]["columns"][0] = [1]
    with pytest.raises(SchemaError) as info:
        io.parse_obj(obj)
    assert info.value.path == "/calibration/columns/0"


def test_rational_literals_are_exact():
    x = io.parse_scalar("1/3", None, "/x")
    assert x.as_fraction() == Fraction(1, 3)
    assert x * 3 == Scalar(1)
    assert io.parse_scalar("0.25").as_fraction() == Fraction(1, 4)
    assert io.print_scalar(x) == "1/3"
    with pytest.raises(SchemaError):
        io.parse_scalar("1/0", None, "/x")
    with pytest.raises(SchemaError):
        io.parse_scalar(True, None, "/x")


def test_poly_scalar_round_trip():
    doc = io.load(DOCS / "exmax_irrational.json")
    a = doc.calibration.columns[3][0]
    lit = io.print_scalar(a * a + a / 2 - 1)
    assert io.parse_scalar(lit, doc.basis) == a * a + a / 2 - 1
    inv = io.print_scalar(1 / (a + 1))
    assert "den" in inv["poly"]
    assert io.parse_scalar(inv, doc.basis) * (a + 1) == Scalar(1, doc.basis)


def test_bad_symbols():
    obj = _minimal()
    obj["symbols"] = [{"name": "a", "enclosure": ["2", "1"]}]
    with pytest.raises(SchemaError) as info:
        io.parse_obj(obj)
    assert info.value.path == "/symbols/0/enclosure"
    obj["symbols"] = [{"name": "a", "enclosure": ["1", "2"], "sqrt": "9"}]
    with pytest.raises(SchemaError) as info:
        io.parse_obj(obj)
    assert info.value.path == "/symbols/0/sqrt"
    obj["symbols"] = [{"name": "a", "enclosure": ["1", "2"]}, {"name": "a", "enclosure": ["1", "2"]}]
    with pytest.raises(SchemaError):
        io.parse_obj(obj)


def test_invalid_json_and_version():
    with pytest.raises(SchemaError):
        io.parse("{not json")
    obj = _minimal()
    obj["schema_version"] = 2
    with pytest.raises(SchemaError) as info:
        io.parse_obj(obj)
    assert info.value.path == "/schema_version"


def test_closure_of_exmax_document():
    raw = {"schema_version": 1, "calibration": {"d": 3, "columns": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, -1, 1]]},
           "cones": [{"rays": [0, 1, 2, 3]}]}
    doc = io.parse_obj(raw)
    assert not doc.fan().validate().passed
    fan = doc.fan(close=True)
    assert len(fan.cones) == 10
    assert fan.validate_calibrated().passed


def test_canonicalize_sorts_and_normalizes():
    obj = _minimal()
    obj["cones"][1]["rays"] = [0]
    obj["calibration"]["columns"][0] = ["2/2", "0.0"]
    text = io.canonicalize(json.dumps(obj))
    assert json.loads(text)["calibration"]["columns"][0] == ["1", "0"]
    assert text == io.canonicalize(text)


def test_morphism_documents():
    src = io.load(DOCS / "line.json")
    m = io.parse_morphism((DOCS / "line_doubling.json").read_text(), src, src)
    assert io.morphism_to_json(m) == {"L": [["2"]], "H": [[2, 0], [0, 2]], "s": {}}
    bad = {"L": [["1", "0"]], "H": [[1, 0], [0, 1]], "s": {}}
    with pytest.raises(SchemaError) as info:
        io.parse_morphism_obj(bad, src, src)
    assert info.value.path == "/L"
