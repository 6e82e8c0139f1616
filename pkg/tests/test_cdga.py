from fractions import Fraction as Q

import pytest

from chenloops.cdga import basis_of_degree, differential, make_algebra, multiply, validate
from chenloops.errors import AlgebraInvalid, DegreeOutOfRange, MixedAlgebras
from chenloops.models import cpn_model, sphere_model


def test_example_products(cells_alg):
    a, b, y = cells_alg.element("ω_a"), cells_alg.element("ω_b"), cells_alg.element("ω_y")
    assert multiply(a, b) == cells_alg.element("ω_ab")
    assert multiply(b, a) == -1 * cells_alg.element("ω_ab")
    assert multiply(a, y) == cells_alg.element("ω_w")
    assert multiply(b, y) == cells_alg.element("ω_z")
    assert multiply(a, a) == 0


def test_example_differential(cells_alg):
    assert differential(cells_alg.element("ω_y")) == cells_alg.element("ω_ab")
    assert differential(cells_alg.element("ω_a")) == 0


def test_products_above_cap_vanish(cells_alg):
    assert multiply(cells_alg.element("ω_a"), cells_alg.element("ω_z")) == 0


def test_unit_is_neutral(cells_alg):
    a = cells_alg.element("ω_a")
    assert multiply(cells_alg.unit(), a) == a
    assert multiply(a, cells_alg.unit()) == a


def test_basis_of_degree(cells_alg):
    assert basis_of_degree(cells_alg, 0) == ["1"]
    assert basis_of_degree(cells_alg, 3) == ["ω_a", "ω_b"]
    assert basis_of_degree(cells_alg, 8) == ["ω_w", "ω_z"]
    assert basis_of_degree(cells_alg, 4) == []
    with pytest.raises(DegreeOutOfRange):
        basis_of_degree(cells_alg, 9)


def test_element_degree_kinds(cells_alg):
    assert cells_alg.element("ω_a").degree == 3
    assert (cells_alg.element("ω_a") + cells_alg.element("ω_y")).degree == "mixed"
    assert (cells_alg.element("ω_a") - cells_alg.element("ω_a")).degree is None


def test_mixed_algebras_rejected(cells_alg, s2):
    with pytest.raises(MixedAlgebras):
        multiply(cells_alg.element("ω_a"), s2.element("ω"))


def test_validate_catalog(cells_alg):
    for A in [cells_alg] + [sphere_model(n) for n in range(1, 6)] + [cpn_model(n) for n in range(1, 4)]:
        validate(A)


def test_odd_square_must_vanish():
    with pytest.raises(AlgebraInvalid) as exc:
        make_algebra(6, [("x", 3), ("z", 6)], {("x", "x"): {"z": 1}}, {})
    assert exc.value.axiom == "graded commutativity"


def test_d_squared_detected():
    with pytest.raises(AlgebraInvalid) as exc:
        make_algebra(4, [("a", 2), ("b", 3), ("c", 4)], {}, {"a": {"b": 1}, "b": {"c": 1}})
    assert "d²≠0" in str(exc.value)
    assert "a" in str(exc.value)


def test_leibniz_detected():
    # d(a) = b but d(a·a) = 0 ≠ 2ab
    with pytest.raises(AlgebraInvalid) as exc:
        make_algebra(5, [("a", 2), ("b", 3), ("c", 4), ("ab", 5)], {("a", "a"): {"c": 1}, ("a", "b"): {"ab": 1}},
                     {"a": {"b": 1}})
    assert exc.value.axiom in ("Leibniz", "Leibniz rule")


def test_associativity_detected():
    with pytest.raises(AlgebraInvalid) as exc:
        make_algebra(
            6,
            [("a", 2), ("b", 2), ("c", 2), ("ab", 4), ("bc", 4), ("t", 6)],
            {("a", "b"): {"ab": 1}, ("b", "c"): {"bc": 1}, ("ab", "c"): {"t": 1}, ("a", "bc"): {"t": 2}},
            {},
        )
    assert exc.value.axiom == "associativity"


def test_unknown_label_named():
    with pytest.raises(AlgebraInvalid) as exc:
        make_algebra(4, [("a", 2)], {("a", "a"): {"q": 1}}, {})
    assert "q" in str(exc.value)


def test_degree_mismatch_rejected():
    with pytest.raises(AlgebraInvalid) as exc:
        make_algebra(6, [("a", 2), ("b", 5)], {}, {"a": {"b": 1}})
    assert exc.value.axiom == "degree mismatch"


def test_rational_coefficients():
    A = make_algebra(4, [("x", 2), ("y", 4)], {("x", "x"): {"y": Q(3, 2)}}, {})
    assert multiply(A.element("x"), A.element("x")) == Q(3, 2) * A.element("y")


def test_cpn_truncation():
    A = cpn_model(3)
    w = A.element("ω")
    assert multiply(w, multiply(w, w)) == A.element("ω^3")
    assert multiply(w, A.element("ω^3")) == 0
