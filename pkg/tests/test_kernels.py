import itertools
import math

import numpy as np
import pytest

from chenloops import _fallback, kernels

try:
    from chenloops import _kernels
except ImportError:  # extension not built
    _kernels = None

needs_ext = pytest.mark.skipif(_kernels is None, reason="compiled extension not built")


def brute_iterated_sum(f, h):
    M, T, r = f.shape
    out = np.zeros(M)
    for idx in itertools.combinations_with_replacement(range(T), r):
        w = 1.0
        for g, grp in itertools.groupby(idx):
            m = len(list(grp))
            w *= h[g] ** m / math.factorial(m)
        out += w * np.prod([f[:, idx[j], j] for j in range(r)], axis=0)
    return out


@pytest.mark.parametrize("r", [0, 1, 2, 3, 4])
def test_fallback_matches_brute_force(r):
    rng = np.random.default_rng(r)
    f = rng.normal(size=(4, 6, r))
    h = rng.uniform(0.1, 0.3, size=6)
    expect = brute_iterated_sum(f, h) if r else np.ones(4)
    assert np.allclose(_fallback.iterated_sum(f, h), expect, rtol=1e-12)


@needs_ext
@pytest.mark.parametrize("r", [1, 2, 3, 5])
def test_extension_matches_fallback(r):
    rng = np.random.default_rng(10 + r)
    f = rng.normal(size=(7, 33, r))
    h = np.full(33, 1 / 33)
    assert np.allclose(_kernels.iterated_sum(f, h), _fallback.iterated_sum(f, h), rtol=1e-12, atol=1e-15)


def test_constant_factors_give_simplex_volume():
    T = 40
    for r in (1, 2, 3):
        val = kernels.iterated_sum(np.ones((1, T, r)), np.full(T, 1 / T))[0]
        assert math.isclose(val, 1 / math.factorial(r), rel_tol=1e-12)


def circle(center, normal_axis, radius=1.0, m=200):
    s = np.linspace(0, 2 * np.pi, m, endpoint=False)
    a, b = [i for i in range(3) if i != normal_axis]
    pts = np.zeros((m, 3))
    pts[:, a], pts[:, b] = radius * np.cos(s), radius * np.sin(s)
    return pts + center


def gauss_linking(A, B):
    """Midpoint Gauss double integral, independent of the solid-angle formula."""
    dA = np.roll(A, -1, 0) - A
    dB = np.roll(B, -1, 0) - B
    mA = A + dA / 2
    mB = B + dB / 2
    r = mA[:, None] - mB[None]
    num = np.einsum("ijk,ijk->ij", r, np.cross(dA[:, None], dB[None]))
    return float(np.sum(num / np.linalg.norm(r, axis=-1) ** 3) / (4 * np.pi))


@pytest.mark.parametrize("impl", ["fallback", "ext"])
def test_polygon_linking(impl):
    if impl == "ext" and _kernels is None:
        pytest.skip("compiled extension not built")
    link = _fallback.polygon_linking if impl == "fallback" else _kernels.polygon_linking
    A = circle(np.zeros(3), 2)
    B = circle(np.array([1.0, 0, 0]), 1)
    val = link(A, B)
    assert abs(abs(val) - 1) < 1e-9
    assert abs(val - gauss_linking(A, B)) < 1e-2
    assert math.isclose(link(B, A), val, abs_tol=1e-9)
    assert math.isclose(link(A[::-1], B), -val, abs_tol=1e-9)
    far = circle(np.array([5.0, 0, 0]), 1)
    assert abs(link(A, far)) < 1e-9


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
