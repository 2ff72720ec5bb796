import random
from itertools import combinations

import pytest

from qtoric.calibration import CalibrationRec
from qtoric.chart import (ChartPresentation, all_basis_subfamilies, bundle_transitions, check_presented_torus,
                          completion_change, face_restriction, forget_calibration, gluing,
                          minimal_permutation, torus_presentation, verify_choice_independence,
                          verify_cocycle, verify_completion_cocycle, verify_round_trip)
from qtoric.errors import DiagramFailure, NoCompletion, NotAFace
from qtoric.fan import QuantumFan, close_fan
from qtoric.linalg import Matrix

import fanlib


def _proportional(u, v):
    return Matrix([list(u), list(v)]).rank() == 1


def test_exmax_chart_kernel_integer():
    fan = fanlib.exmax_fan()
    ch = ChartPresentation(fan, 0)
    assert ch.J == () and ch.rows == (0, 1, 2, 3)
    assert ch.ker_basis == [(-1, 1, -1, 1)]
    assert ch.check_identity()


def test_exmax_chart_kernel_irrational():
    fan, B = fanlib.exmax_irrational()
    ch = ChartPresentation(fan, 0)
    a, b, c = B["a"], B["b"], B["c"]
    assert len(ch.ker_basis) == 1
    assert _proportional(ch.ker_basis[0], (-a, b, -c, 1))
    assert ch.check_identity()


def test_exmax_nonmax_variant():
    B = fanlib.abc_basis()
    a, b, c = B["a"], B["b"], B["c"]
    cal = CalibrationRec([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [a, -b, c, 0]], basis=B)
    fan = close_fan(QuantumFan(cal, [[0, 1, 2, 4]]))
    ch = ChartPresentation(fan, 0)
    assert ch.J == (3,)
    assert ch.rows == (0, 1, 2, 3, 4)
    assert _proportional(ch.ker_basis[0], (-a, b, -c, 0, 1))
    assert len(ch.ker_basis) == 1


def test_minimal_permutation():
    # position 1 keeps its value; the displaced 0 and 2 fill the tail in order
    assert minimal_permutation(5, [1, 3], [4]) == (3, 1, 4, 0, 2)
    assert minimal_permutation(4, [0, 2], []) == (0, 2, 1, 3)
    assert minimal_permutation(3, [0, 1, 2], []) == (0, 1, 2)


def test_choice_independence_exmax():
    for fan in (fanlib.exmax_fan(), fanlib.exmax_irrational()[0]):
        subs = all_basis_subfamilies(fan, 0)
        assert len(subs) == 4
        charts = [ChartPresentation(fan, 0, I_tilde=s) for s in subs]
        for c1, c2 in combinations(charts, 2):
            assert verify_choice_independence(c1, c2)


def test_no_completion():
    cal = CalibrationRec([[1, 0], [0, 1], [2, 0]], virtual=[1])
    fan = QuantumFan(cal, [[], [0]])
    with pytest.raises(NoCompletion):
        ChartPresentation(fan, 1)


def test_face_restriction_exmax():
    fan = fanlib.exmax_fan()
    sigma = ChartPresentation(fan, 0)
    for tau_id in range(1, len(fan.cones)):
        tau = ChartPresentation(fan, tau_id)
        fr = face_restriction(sigma, tau)
        assert sigma.hbar @ fr.F == tau.hbar
        assert set(fr.additive) == set(tau.I)


def test_face_restriction_rejects_non_face():
    fan = fanlib.quadrant_fan()
    with pytest.raises(NotAFace):
        face_restriction(ChartPresentation(fan, 0), ChartPresentation(fan, 6))


def test_gluing_quadrants():
    fan = fanlib.quadrant_fan()
    charts = [ChartPresentation(fan, i) for i in range(4)]
    for s, t in combinations(range(4), 2):
        assert verify_round_trip(charts[s], charts[t])
    for triple in combinations(range(4), 3):
        assert verify_cocycle([charts[i] for i in triple])
    fwd, bwd = gluing(charts[0], charts[1])
    assert fwd.map_reduced @ bwd.map_reduced == Matrix.identity(2)


def test_gluing_quantum_line():
    fan, B = fanlib.quantum_line()
    plus, minus = ChartPresentation(fan, 1), ChartPresentation(fan, 2)
    assert verify_round_trip(plus, minus)
    fwd, _ = gluing(plus, minus)
    assert fwd.map_reduced == Matrix([[-1 / B["alpha"]]])
    trans = bundle_transitions(fan, {1: plus, 2: minus})
    assert all(t.verified for t in trans)


def _three_completions():
    cal = CalibrationRec([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [0, 1, -1]])
    fan = QuantumFan(cal, [[], [0], [1], [0, 1]])
    return fan, [ChartPresentation(fan, 3, J=[j]) for j in (2, 3, 4)]


def test_completion_cocycle():
    fan, (c1, c2, c3) = _three_completions()
    assert len({c.J for c in (c1, c2, c3)}) == 3
    assert verify_completion_cocycle(c1, c2, c3)
    assert completion_change(c1, c1) == Matrix.identity(3)


def test_presented_torus_checks():
    for fan in (fanlib.exmax_fan(), fanlib.quantum_line()[0], fanlib.quadrant_fan()):
        for cid in range(len(fan.cones)):
            check_presented_torus(torus_presentation(ChartPresentation(fan, cid)))


def test_presented_torus_detects_tampering():
    rec = torus_presentation(ChartPresentation(fanlib.exmax_fan(), 0))
    rec.H = [list(r) for r in rec.H]
    rec.H[0][0] = 2
    with pytest.raises(DiagramFailure) as info:
        check_presented_torus(rec)
    assert info.value.identity


def test_band_rank():
    cal = CalibrationRec([[1, 0], [0, 1], [1, 1]])
    fan = close_fan(QuantumFan(cal, [[0, 1]]))
    assert forget_calibration(ChartPresentation(fan, 0)).band_rank == 1
    irr, _ = fanlib.exmax_irrational()
    assert forget_calibration(ChartPresentation(irr, 0)).band_rank == 0


def test_simplicial_charts_have_no_kernel():
    rng = random.Random(3)
    for _ in range(20):
        fan, cid = fanlib.random_simplicial(rng)
        ch = ChartPresentation(fan, cid)
        assert ch.ker_basis == []
        assert ch.check_identity()
