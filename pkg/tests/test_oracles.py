import numpy as np
import pytest

from chenloops import maps, oracles


def test_icosphere_is_closed_and_oriented():
    V, F = oracles.icosphere(2)
    assert len(F) == 20 * 16
    assert len(V) - 3 * len(F) // 2 + len(F) == 2  # Euler characteristic
    assert np.all(np.linalg.det(V[F]) > 0)


@pytest.mark.parametrize(
    "f, deg",
    [
        (maps.identity(2), 1),
        (maps.reflection(2), -1),
        (maps.rotation(2, 1.0), 1),
        (maps.suspension_power(3), 3),
        (maps.suspension_power(-2), -2),
        (maps.conformal_dilation(2, 2.0), 1),
    ],
    ids=lambda x: getattr(x, "name", str(x)),
)
def test_preimage_degree(f, deg):
    assert oracles.preimage_degree(f, level=5) == deg


def test_preimage_degree_rejects_other_dims():
    with pytest.raises(ValueError):
        oracles.preimage_degree(maps.hopf())


def _projection_jacobian_sign(pole, project):
    x = -pole + 0.3 * np.roll(pole, 1)
    x /= np.linalg.norm(x)
    Q, _ = np.linalg.qr(np.column_stack([x, np.eye(4)]))
    tan = Q[:, 1:4].T
    if np.linalg.det(np.vstack([x, tan])) < 0:
        tan[0] *= -1
    h = 1e-6
    cols = [(project((x + h * v)[None] / np.linalg.norm(x + h * v), pole)[0]
             - project((x - h * v)[None] / np.linalg.norm(x - h * v), pole)[0]) / (2 * h) for v in tan]
    return np.sign(np.linalg.det(np.array(cols)))


def test_corrected_projection_preserves_orientation():
    signs = set()
    for seed in range(6):
        q = np.random.default_rng(seed).normal(size=4)
        q /= np.linalg.norm(q)
        signs.add(oracles.projection_orientation(q))
        assert _projection_jacobian_sign(q, oracles._stereographic) == 1
    assert signs <= {-1.0, 1.0}


def test_hopf_fibre_is_a_great_circle():
    f = maps.hopf()
    y = np.array([0.0, 0.6, 0.8])
    comps = oracles.fibre_components(f, y, starts=8)
    assert len(comps) == 1
    c = comps[0]
    assert np.allclose(f.apply(c), y, atol=1e-9)
    # length of a Hopf fibre is 2 pi
    length = np.sum(np.linalg.norm(np.roll(c, -1, 0) - c, axis=1))
    assert abs(length - 2 * np.pi) < 1e-3


def test_linking_hopf_invariant():
    rep = oracles.linking_hopf(maps.hopf(), starts=16)
    assert rep.components == [1, 1]
    assert abs(rep.value - 1) < 1e-6


def test_linking_hopf_reflected():
    f = maps.compose(maps.hopf(), maps.linear("flip", 3, np.diag([1.0, -1.0, 1.0, 1.0])))
    assert abs(oracles.linking_hopf(f, starts=16).value + 1) < 1e-6
