import random

import pytest

from qtoric.errors import BlockFormViolation, KernelNotPreserved, Mismatch
from qtoric.linalg import Matrix, int_matmul
from qtoric.morphism import (FanMorphismRec, chart_family, compose, extract_morphism,
                             glue_compatibility, identity_morphism, induced_chart_morphism,
                             validate_morphism, verify_chart_morphism)

import fanlib


def test_doubling_on_line():
    fan = fanlib.line_fan()
    m = fanlib.scaling_morphism(fan, 2)
    assert validate_morphism(m).passed
    fam = chart_family(m)
    assert all(cm.L_tilde == Matrix([[2]]) and cm.block_M == [[2]] for cm in fam.values())
    assert glue_compatibility(m, fam)[0]
    assert compose(m, m).L == Matrix([[4]])


def test_bad_morphism_reports_witnesses():
    fan = fanlib.line_fan()
    m = FanMorphismRec(fan, fan, Matrix([[-1]]), [[1, 0], [0, 1]])
    report = validate_morphism(m)
    assert not report.passed
    assert not report["diagram"].passed and report["diagram"].witnesses
    assert not report["lifted_cone_mapping"].passed


def test_shape_mismatch():
    fan = fanlib.line_fan()
    with pytest.raises(Mismatch):
        FanMorphismRec(fan, fan, Matrix([[1, 0]]), [[1, 0], [0, 1]])


def test_gamma_image_axiom():
    fan = fanlib.line_fan()
    m = FanMorphismRec(fan, fan, Matrix([["1/2"]]), [[1, 0], [0, 1]])
    report = validate_morphism(m)
    assert not report["gamma_image"].passed


def test_identity_is_neutral():
    for fan in (fanlib.exmax_fan(), fanlib.quadrant_fan(), fanlib.quantum_line()[0]):
        ident = identity_morphism(fan)
        assert validate_morphism(ident).passed
        for sigma in fan.maximal_cones():
            cm = induced_chart_morphism(ident, sigma)
            assert cm.L_tilde == Matrix.identity(len(cm.source.rows))
            assert verify_chart_morphism(cm, ident)


def test_exmax_scaling_chart_data():
    fan, B = fanlib.exmax_irrational()
    m = fanlib.scaling_morphism(fan, 3)
    assert validate_morphism(m).passed
    cm = induced_chart_morphism(m, 0)
    assert cm.L_tilde == Matrix.identity(4).scale(3)
    assert verify_chart_morphism(cm, m)
    L, H = cm.extract()
    assert L == m.L and H == m.H
    assert extract_morphism(chart_family(m)) == (m.L, m.H)


def test_kernel_not_preserved():
    # collapsing e4 onto e1 breaks the kernel direction of the exmax chart
    fan = fanlib.exmax_fan()
    H = [[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0]]
    m = FanMorphismRec(fan, fan, Matrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]]), H)
    assert not validate_morphism(m).passed
    with pytest.raises((KernelNotPreserved, BlockFormViolation)):
        induced_chart_morphism(m, 0, target_cone=0)


def test_block_form_violation():
    fan = fanlib.quadrant_fan()
    # h(2 e0 + e2) = e0 still, but H e0 now has weight on the ray outside the cone
    H = [[2, 0, 0, 0], [0, 1, 0, 0], [1, 0, 1, 0], [0, 0, 0, 1]]
    m = FanMorphismRec(fan, fan, Matrix.identity(2), H)
    assert validate_morphism(m)["diagram"].passed
    assert not validate_morphism(m).passed
    with pytest.raises(BlockFormViolation):
        induced_chart_morphism(m, 0, target_cone=0)


def test_random_pairs_are_valid_and_functorial():
    rng = random.Random(11)
    cache = {}
    for _ in range(60):
        kind, f, g = fanlib.random_morphism_pair(rng, cache)
        assert validate_morphism(f).passed and validate_morphism(g).passed, kind
        assert validate_morphism(compose(g, f)).passed
        assert fanlib.check_functorial(f, g), kind
        assert glue_compatibility(f)[0] and glue_compatibility(compose(g, f))[0]


def test_compose_integer_parts():
    fan = fanlib.quadrant_fan()
    f = fanlib.quadrant_morphism(fan, (1, 0), (1, 1), 1)
    g = fanlib.quadrant_morphism(fan, (0, 1), (-1, 1), 2)
    gf = compose(g, f)
    assert gf.H == int_matmul(g.H, f.H)
    assert gf.L == g.L @ f.L


def test_mismatched_composition():
    a, b = fanlib.line_fan(), fanlib.quadrant_fan()
    with pytest.raises(Mismatch):
        compose(identity_morphism(b), identity_morphism(a))
