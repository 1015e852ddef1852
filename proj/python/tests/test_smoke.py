import math

import pytest

import psl2py as p


def test_matrix_basics():
    h1 = p.PSL2(p.hyperbolic(1.0))
    assert p.conj_type(h1) == p.ConjugacyType.Hyperbolic
    assert p.conj_type(p.rotation(math.pi / 3)) == p.ConjugacyType.Elliptic
    assert p.conj_type([[1.0, 1.0], [0.0, 1.0]]) == p.ConjugacyType.Parabolic
    assert p.PSL2(-p.hyperbolic(1.0)).trace == pytest.approx(2 * math.cosh(1.0))
    q = p.PSL2([[0.0, 1.0], [-1.0, 0.0]])
    assert q.rep.c == 1.0


def test_canonical_lift_of_h1():
    x = p.canonical_hyperbolic_lift(p.PSL2(p.hyperbolic(1.0)))
    assert x.lift == pytest.approx(math.atan(math.tanh(1.0)), abs=1e-12)
    lo, hi = p.displacement_extrema(x)
    assert hi == pytest.approx(math.atan(math.sinh(1.0)) / math.pi, abs=1e-9)
    assert lo == pytest.approx(-hi, abs=1e-9)
    assert str(p.classify_region(x)) == "H(0)"


def test_square_root_round_trip():
    k = p.SL2(1.2, 0.7, -0.3, 0.6583333333333333)
    root = p.psl_sqrt(k)
    assert p.frobenius(p.square(root), k) < 1e-9


def test_classes_of_the_explicit_pair():
    g3 = p.SurfacePresentation.nonorientable(3)
    one = p.PSL2(p.SL2(1, 0, 0, 1))
    trivial = p.Representation(g3, [one, one, one])
    quarter = p.Representation(g3, [p.PSL2(p.rotation(math.pi / 2)), one, one])
    assert p.sw_class_closed(trivial).value == 0
    assert p.sw_class_closed(quarter).value == 1


def test_sampling_and_text_round_trip():
    g4 = p.SurfacePresentation.nonorientable(4)
    r = p.sample_representation(g4, 11, 1)
    assert p.relation_residual(r) < 1e-8
    assert p.sw_class_closed(r).value == 1
    back = p.Representation.from_text(r.to_text())
    assert all(p.distance(a, b) < 1e-12 for a, b in zip(r.images, back.images))


def test_connect_same_class():
    g3 = p.SurfacePresentation.nonorientable(3)
    a, b = p.sample_representation(g3, 3, 0), p.sample_representation(g3, 4, 0)
    path = p.connect_representations(a, b)
    report = p.verify_rep_path(path)
    assert report.passed
    assert report.max_residual <= 1e-6
    assert report.max_step <= 0.05
    assert report.start_class == report.end_class


def test_connect_rejects_different_classes():
    g3 = p.SurfacePresentation.nonorientable(3)
    a, b = p.sample_representation(g3, 3, 0), p.sample_representation(g3, 4, 1)
    with pytest.raises(p.Psl2Error) as info:
        p.connect_representations(a, b)
    assert p.fault_of(info.value) == p.Fault.DifferentClasses


def test_pants_bump_changes_euler_class():
    pants = p.SurfacePresentation.orientable(0, 3)
    seed = 1
    while True:
        r = p.sample_representation(pants, seed)
        if p.in_W(r) and p.euler_relative(r).value == -1:
            break
        seed += 1
    path = p.euler_bump_pants(r)
    assert p.euler_relative(path.samples[-1]).value == 1
    assert p.verify_rep_path(path).passed


def test_bad_input_raises():
    with pytest.raises(p.Psl2Error) as info:
        p.SL2(1, 2, 3, 4)
    assert p.fault_of(info.value) == p.Fault.NonPositiveDeterminant
