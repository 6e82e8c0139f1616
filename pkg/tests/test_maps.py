import math

import numpy as np
import pytest

from chenloops import maps
from chenloops.errors import DimensionMismatch


def sphere_points(n, m=300, seed=0):
    x = np.random.default_rng(seed).normal(size=(m, n + 1))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


ALL = [
    maps.identity(2),
    maps.identity(3),
    maps.rotation(2, 0.7),
    maps.rotation(3, 1.1, 1, 2),
    maps.reflection(2),
    maps.suspension_power(2),
    maps.suspension_power(-3),
    maps.hopf(),
    maps.quaternion_square(),
    maps.conformal_dilation(2, 2.0),
    maps.conformal_dilation(3, 0.5),
    maps.constant(3, 2),
    maps.compose(maps.hopf(), maps.quaternion_square()),
]


@pytest.mark.parametrize("f", ALL, ids=lambda f: f.name)
def test_maps_land_on_sphere_and_fix_basepoint(f):
    y = f.apply(sphere_points(f.source_dim))
    assert np.allclose(np.linalg.norm(y, axis=1), 1)
    pole = np.eye(f.source_dim + 1)[f.source_dim]
    assert np.allclose(f.apply(pole[None])[0], np.eye(f.target_dim + 1)[f.target_dim], atol=1e-12)


@pytest.mark.parametrize("f", ALL, ids=lambda f: f.name)
def test_jacobian_matches_finite_differences_on_tangents(f):
    x = sphere_points(f.source_dim, 20, 1)
    # stay away from the suspension axis where the rule is not smooth
    x = x[np.linalg.norm(x[:, :2], axis=1) > 0.1]
    T = maps.tangent_basis(x)
    J = f.jacobian(x)
    h = 1e-6
    for i in range(T.shape[1]):
        v = T[:, i]
        fd = (f.apply(x + h * v) - f.apply(x - h * v)) / (2 * h)
        assert np.allclose(np.einsum("mab,mb->ma", J, v), fd, atol=1e-5)


@pytest.mark.parametrize("f", ALL, ids=lambda f: f.name)
def test_declared_lipschitz_dominates_sampled(f):
    assert f.sampled_lipschitz(1000, 3) <= f.lipschitz * (1 + 1e-9) + 1e-12


def test_lipschitz_constants_are_attained():
    assert math.isclose(maps.hopf().sampled_lipschitz(4000), 2.0, rel_tol=1e-6)
    assert math.isclose(maps.quaternion_square().sampled_lipschitz(4000), 2.0, rel_tol=1e-6)
    d = maps.conformal_dilation(2, 3.0)
    north = np.array([[0.0, 0.0, 1.0]])
    img = np.einsum("mab,mkb->mka", d.jacobian(north), maps.tangent_basis(north))
    assert np.allclose(np.linalg.svd(img[0], compute_uv=False), 3.0, atol=1e-6)


def test_dilation_south_pole():
    d = maps.conformal_dilation(2, 2.0)
    assert np.allclose(d.apply(np.array([[0.0, 0.0, -1.0]])), [[0, 0, -1]])


def test_validation():
    with pytest.raises(ValueError):
        maps.rotation(2, 0.3, 0, 2)
    with pytest.raises(ValueError):
        maps.linear("bad", 2, np.diag([1, 1, -1.0]))
    with pytest.raises(ValueError):
        maps.suspension_power(0)
    with pytest.raises(ValueError):
        maps.conformal_dilation(2, 0)
    with pytest.raises(DimensionMismatch):
        maps.compose(maps.hopf(), maps.hopf())


@pytest.mark.parametrize("f", ALL, ids=lambda f: f.name)
def test_serialization_roundtrip(f):
    g = maps.map_from_dict(f.to_dict())
    x = sphere_points(f.source_dim, 10, 4)
    assert np.allclose(f.apply(x), g.apply(x))
    assert g.lipschitz == f.lipschitz


def test_unknown_map():
    with pytest.raises(ValueError):
        maps.map_from_dict({"name": "nope"})
    assert "hopf" in maps.catalog_names()
