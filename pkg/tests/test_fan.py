from qtoric.calibration import CalibrationRec
from qtoric.fan import QuantumFan, close_fan

import fanlib


def test_calibration_basics():
    cal = CalibrationRec([[1, 0], [0, 1], [1, 1]], virtual=[2])
    assert cal.d == 2 and cal.N == 3
    assert cal.is_standard() and cal.validate_virtual_span()
    assert cal.xi_lattice().rank == 1
    assert cal.gamma_contains([2, 3]) and not cal.gamma_contains(["1/2", 0])
    assert not CalibrationRec([[1, 0], [1, 1]]).is_standard()
    assert not CalibrationRec([[1, 0], [0, 1], [1, 0]], virtual=[0]).is_standard()


def test_irrational_calibration_has_no_relations():
    fan, B = fanlib.exmax_irrational()
    assert fan.cal.xi_lattice().rank == 0
    assert fanlib.exmax_cal().xi_lattice().rank == 1
    assert fan.cal.gamma_contains([B["a"], -B["b"], B["c"]])


def test_virtual_span_failure():
    cal = CalibrationRec([[1, 0], [0, 1], [0, 1]], virtual=[0])
    assert not cal.validate_virtual_span()


def test_exmax_closure_and_validation():
    raw = QuantumFan(fanlib.exmax_cal(), [[0, 1, 2, 3]])
    report = raw.validate()
    assert not report.passed and not report["zero_cone"].passed and not report["face_closure"].passed
    fan = close_fan(raw)
    assert len(fan.cones) == 10 and fan.cones[0] == frozenset(range(4))
    assert fan.validate_calibrated().passed
    assert fan.maximal_cones() == [0]
    assert len(fan.rays()) == 4


def test_overlapping_cones_fail_intersection():
    cal = CalibrationRec([[1, 0], [0, 1], [1, 1]])
    fan = close_fan(QuantumFan(cal, [[0, 1], [0, 2]]))
    report = fan.validate()
    assert not report["intersection"].passed
    assert report["intersection"].witnesses


def test_not_strongly_convex_witness():
    cal = CalibrationRec([[1, 0], [0, 1], [-1, 0]])
    fan = QuantumFan(cal, [[], [0, 2]])
    report = fan.validate()
    assert not report["strongly_convex"].passed
    assert report["strongly_convex"].witnesses == [{"cone": 1, "indices": [0, 2]}]


def test_quadrant_fan_complete():
    fan = fanlib.quadrant_fan()
    assert fan.validate_calibrated().passed
    assert fan.maximal_cones() == [0, 1, 2, 3]
    assert fan.associated_fan()[0] == frozenset()


def test_quantum_line_fan():
    fan, _ = fanlib.quantum_line()
    assert fan.validate_calibrated().passed
    plus, = [i for i in fan.maximal_cones() if fan.indices(i) == frozenset([0])]
    assert fan.cone(plus).contains([5])


def test_generator_set_rejects_duplicate_rays():
    cal = CalibrationRec([[1], [2], [-1]])
    fan = QuantumFan(cal, [[], [0], [2]], A=[0, 1, 2])
    assert not fan.validate_generator_set()
    assert QuantumFan(cal, [[], [0], [2]]).validate_generator_set()


def test_smallest_containing_cone_is_lex_least():
    fan = fanlib.quadrant_fan()
    from qtoric.cone import Cone
    assert fan.smallest_containing_cone(Cone([[1, 0]])) == 4
    assert fan.smallest_containing_cone(Cone([[1, 1]])) == 0
    assert fan.containing_cones(Cone([[0, 1]])) == [0, 5, 1]
