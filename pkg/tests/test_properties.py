"""Randomized property checks."""
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from chenloops import geometry as g
from chenloops import kernels, linalg
from chenloops.forms import block_assignments

small_ints = st.integers(-4, 4)


@st.composite
def int_matrices(draw):
    r, c = draw(st.integers(1, 6)), draw(st.integers(1, 6))
    return [[draw(small_ints) for _ in range(c)] for _ in range(r)]


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_rank_matches_float_rank_and_rank_nullity(rows):
    M = linalg.RationalMatrix.from_dense(rows)
    rk = linalg.rank(M)
    assert rk == np.linalg.matrix_rank(np.array(rows, float))
    K = linalg.kernel_basis(M)
    assert rk + len(K) == M.cols
    A = np.array(rows, dtype=object)
    for v in K:
        assert all(x == 0 for x in A.dot(np.array(v, dtype=object)))


@st.composite
def unit_vectors(draw, n=2):
    v = np.array([draw(st.floats(-1, 1)) for _ in range(n + 1)])
    v[n] += 1.5  # keep away from the antipode of the basepoint
    return v / np.linalg.norm(v)


@settings(max_examples=40, deadline=None)
@given(st.lists(unit_vectors(), min_size=1, max_size=4), st.integers(1, 6))
def test_concat_power_length_is_additive(pts, L):
    gam = g.geodesic_loop([g.basepoint(2)] + pts + [g.basepoint(2)])
    assert math.isclose(g.concat_power(gam, L).length, L * gam.length, rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=40, deadline=None)
@given(unit_vectors(), unit_vectors(), unit_vectors())
def test_geodesic_triangle_inequality(a, b, c):
    ab, bc, ac = (float(g.geodesic_distance(x, y)) for x, y in ((a, b), (b, c), (a, c)))
    assert ac <= ab + bc + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_iterated_sum_is_multilinear(r, T, seed):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=(2, T, r))
    h = rng.uniform(0.05, 0.2, size=T)
    j = int(rng.integers(r))
    f2 = f.copy()
    f2[:, :, j] *= 3.0
    assert np.allclose(kernels.iterated_sum(f2, h), 3 * kernels.iterated_sum(f, h), rtol=1e-10, atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=3))
def test_block_assignment_count(sizes):
    k = sum(sizes)
    count = len(list(block_assignments(k, tuple(sizes))))
    assert count == math.factorial(k) // math.prod(math.factorial(s) for s in sizes)
