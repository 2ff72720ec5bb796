import re

import pytest

from qtoric.calibration import CalibrationRec
from qtoric.errors import DimUnsupported
from qtoric.fan import QuantumFan
from qtoric.svg import emit_svg

import fanlib


def test_quadrant_drawing():
    svg = emit_svg(fanlib.quadrant_fan())
    assert svg.startswith("<svg") and svg.endswith("</svg>\n")
    assert svg.count('class="ray"') == 4
    assert svg.count('class="cone"') == 4


def test_exmax_drawing():
    svg = emit_svg(fanlib.exmax_fan())
    assert svg.count('class="ray"') == 4
    assert svg.count('class="facet"') >= 4
    for x in re.findall(r'x2="([-0-9.]+)"', svg):
        assert 0 <= float(x) <= 400


def test_quantum_line_drawing():
    fan, _ = fanlib.quantum_line()
    svg = emit_svg(fan)
    assert svg.count('class="ray"') == 2


def test_deterministic():
    assert emit_svg(fanlib.exmax_fan()) == emit_svg(fanlib.exmax_fan())


def test_dimension_four_unsupported():
    cal = CalibrationRec([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(DimUnsupported):
        emit_svg(QuantumFan(cal, [[], [0]]))
