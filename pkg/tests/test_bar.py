import warnings
from fractions import Fraction as Q

import pytest

from chenloops.bar import (
    BarComplex,
    BarElement,
    BarWord,
    _DegreeData,
    bar_basis,
    bar_differential,
    cohomology,
    complex_for,
    distortion_exponent,
    min_length_detector,
    same_class_up_to_scalar,
)
from chenloops.errors import CapTooSmall, NoClassFound
from chenloops.linalg import RationalMatrix, kernel_basis, rank
from chenloops.models import cpn_model, sphere_model
from chenloops.cdga import make_algebra


def loop_space_ranks_cpn(n, top):
    """Poincaré series of ΩCP^n: (1 + t) / (1 - t^{2n}), expanded independently."""
    out = [0] * (top + 1)
    for k in range(0, top + 1, 2 * n):
        for e in (0, 1):
            if k + e <= top:
                out[k + e] += 1
    return out


def test_oracle_table_itself():
    assert loop_space_ranks_cpn(2, 8) == [1, 1, 0, 0, 1, 1, 0, 0, 1]


def test_bar_word_degree(cells_alg):
    w = BarWord.of(cells_alg, ["ω_a", "ω_z"])
    assert w.bar_degree == 2 + 7 and w.length == 2
    assert BarWord.of(cells_alg, []).bar_degree == 0


def test_differential_examples(cells_alg):
    assert bar_differential(cells_alg, ["ω_y"]) == BarElement(cells_alg, {("ω_ab",): -1})
    assert bar_differential(cells_alg, ["ω_a", "ω_z"]).is_zero()
    assert bar_differential(cells_alg, []).is_zero()


def test_merge_term_sign(cells_alg):
    # d|a|b| = -|d a|b| ± |ab|; only the merge survives
    d = bar_differential(cells_alg, ["ω_a", "ω_b"])
    assert set(d.terms) == {("ω_ab",)}
    assert abs(d.terms[("ω_ab",)]) == 1


@pytest.mark.parametrize("convention", ["inclusive", "shifted"])
def test_d_squared_zero(cells_alg, convention):
    cx = BarComplex(cells_alg, convention)
    for deg in range(0, 13):
        assert cx.d_squared_violations(deg, cx.default_max_length(deg)) == []


def test_degree_raise_and_length_filtration(cells_alg):
    cx = complex_for(cells_alg)
    for deg in range(0, 12):
        for w in cx.index_words(deg, 6):
            for v in cx.d_index(w):
                assert sum(cells_alg.degrees[i] - 1 for i in v) == deg + 1
                assert len(v) <= len(w)


def test_bar_basis_order(cells_alg):
    words = bar_basis(cells_alg, 9, 6)
    keys = [(w.length, tuple(cells_alg.index[x] for x in w.letters)) for w in words]
    assert keys == sorted(keys)
    assert all(w.bar_degree == 9 for w in words)
    assert len(words) == 22


def test_cap_required_for_degree_one_letters():
    A = make_algebra(2, [("x", 1), ("y", 2)], {}, {})
    with pytest.raises(CapTooSmall):
        bar_basis(A, 1)
    assert len(bar_basis(A, 1, 3)) > 0


def test_two_sphere_cells_degree_9(cells_alg, cells_words):
    rep = cohomology(cells_alg, 9, 6, cells_words)
    assert rep.rank == 1
    assert rep.min_length == 2
    assert rep.representatives[0] == BarElement(cells_alg, {("ω_a", "ω_z"): 1})
    assert (rep.reference.dim_chains, rep.reference.dim_cocycles, rep.reference.dim_coboundaries) == (8, 7, 6)
    assert rep.dim_chains == 22
    assert "NOTE" in rep.to_text()


def test_two_sphere_cells_detector(cells_alg):
    r, x = min_length_detector(cells_alg, 9)
    assert r == 2
    assert same_class_up_to_scalar(cells_alg, x, BarElement(cells_alg, {("ω_a", "ω_z"): 1}))
    assert distortion_exponent(10, r) == 11


def test_detector_with_dual_functional(cells_alg):
    cx = complex_for(cells_alg)
    data = _DegreeData(cx, 9, 6)
    words = [tuple(cells_alg.labels[i] for i in w) for w in data.mid]
    # |ω_a|ω_z| appears in the coboundary d|ω_a|ω_b|ω_y|, so it is not a dual cocycle
    with pytest.raises(ValueError):
        min_length_detector(cells_alg, 9, {("ω_a", "ω_z"): 1})
    # a genuine one: annihilates every coboundary, nonzero on the class
    ann = kernel_basis(RationalMatrix.from_dense(data.boundary_vectors))
    rep = data.vector(BarElement.word(cells_alg, ["ω_a", "ω_z"]))
    phi = next(v for v in ann if sum(a * b for a, b in zip(v, rep)))
    r, x = min_length_detector(cells_alg, 9, {w: c for w, c in zip(words, phi) if c})
    assert r == 2
    assert same_class_up_to_scalar(cells_alg, x, BarElement.word(cells_alg, ["ω_a", "ω_z"]))


def test_a_w_is_cohomologous_to_a_z_or_exact(cells_alg):
    rep = cohomology(cells_alg, 9, 6)
    (x,) = rep.representatives
    assert not x.is_zero()


@pytest.mark.parametrize("n,top", [(2, 6), (3, 8), (4, 9), (5, 12)])
def test_sphere_ranks(n, top):
    A = sphere_model(n)
    for d in range(top + 1):
        expected = 1 if d % (n - 1) == 0 else 0
        assert cohomology(A, d).rank == expected, (n, d)


def test_cp2_table():
    A = cpn_model(2)
    assert [cohomology(A, d).rank for d in range(9)] == loop_space_ranks_cpn(2, 8)


def test_cp2_generator():
    A = cpn_model(2)
    r, x = min_length_detector(A, 4)
    assert r == 2
    assert same_class_up_to_scalar(A, x, BarElement(A, {("ω", "ω^2"): 1}))
    assert bar_differential(A, ["ω", "ω^2"]).is_zero()
    assert distortion_exponent(5, r) == 6


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cpn_detector(n):
    A = cpn_model(n)
    r, x = min_length_detector(A, 2 * n)
    assert r == 2
    top = "ω" if n == 1 else f"ω^{n}"
    assert same_class_up_to_scalar(A, x, BarElement.word(A, ["ω", top]))


def test_no_class(s3):
    with pytest.raises(NoClassFound):
        min_length_detector(s3, 3)


def test_sphere_min_length(s3):
    for k in range(1, 4):
        r, _ = min_length_detector(s3, 2 * k)
        assert r == k


def test_rank_nullity_per_degree(cells_alg):
    cx = complex_for(cells_alg)
    for d in range(0, 12):
        data = _DegreeData(cx, d, 6)
        assert len(data.mid) == len(data.cocycles) + rank(data.d_out)


def test_detector_monotone_in_cap(cells_alg):
    values = [min_length_detector(cells_alg, 9, max_length=cap)[0] for cap in range(2, 7)]
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_stabilization_warning():
    A = make_algebra(2, [("x", 1), ("y", 2)], {}, {})
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = cohomology(A, 1, 1)
    assert rep.stabilized in (True, False)
    if not rep.stabilized:
        assert any("NotStabilized" in str(w.message) for w in caught)


def test_report_serializations(cells_alg, cells_words):
    rep = cohomology(cells_alg, 9, 6, cells_words)
    d = rep.to_dict()
    assert d["rank"] == 1 and d["reference_basis"]["differs_from_full"]
    assert d["representatives"][0]["terms"] == [{"word": ["ω_a", "ω_z"], "coefficient": "1"}]


@pytest.mark.parametrize("n,r,e", [(10, 2, 11), (5, 2, 6), (2, 1, 2), (7, 1, 7)])
def test_distortion_exponent(n, r, e):
    assert distortion_exponent(n, r) == e


@pytest.mark.parametrize("n,r", [(1, 1), (2, 0)])
def test_distortion_exponent_domain(n, r):
    with pytest.raises(ValueError):
        distortion_exponent(n, r)


def test_bar_element_arithmetic(cells_alg):
    x = BarElement.word(cells_alg, ["ω_a", "ω_z"])
    y = BarElement.word(cells_alg, ["ω_b", "ω_w"])
    assert (x + y - x) == y
    assert (Q(2) * x).terms[("ω_a", "ω_z")] == 2
    with pytest.raises(ValueError):
        BarElement(cells_alg, {("ω_a",): 1, ("ω_y",): 1})
