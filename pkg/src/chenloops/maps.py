"""Catalog of basepoint-preserving maps between round spheres.

Each ``MapSpec`` carries its rule on ambient coordinates, an ambient
Jacobian (analytic where cheap, else a five-point central difference of
the ambient rule, which is exact enough on tangent vectors), and a Lipschitz constant for the round metric.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch


def _fd_jacobian(func, x, h=1e-5):
    x = np.asarray(x, float)
    cols = []
    for j in range(x.shape[-1]):
        e = np.zeros(x.shape[-1])
        e[j] = h
        cols.append((-func(x + 2 * e) + 8 * func(x + e) - 8 * func(x - e) + func(x - 2 * e)) / (12 * h))
    return np.stack(cols, axis=-1)


@dataclass
class MapSpec:
    name: str
    source_dim: int
    target_dim: int
    rule: Callable
    lipschitz: float
    jac: Optional[Callable] = None
    params: dict = field(default_factory=dict)

    def apply(self, x):
        return self.rule(np.asarray(x, float))

    def jacobian(self, x):
        """Ambient Jacobian, shape (..., target+1, source+1). Only its action
        on tangent vectors of the source sphere is meaningful."""
        x = np.asarray(x, float)
        if self.jac is not None:
            return self.jac(x)
        return _fd_jacobian(self.rule, x)

    def to_dict(self):
        return {"name": self.name, **self.params}

    def sampled_lipschitz(self, samples: int = 2000, seed: int = 0) -> float:
        """Largest operator norm of the tangential differential at random points."""
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(samples, self.source_dim + 1))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        basis = tangent_basis(x)
        J = self.jacobian(x)
        img = np.einsum("mab,mkb->mka", J, basis)
        return float(np.max(np.linalg.norm(img, ord=2, axis=(1, 2))))


def tangent_basis(x):
    """Orthonormal basis of T_x S^n for each row of ``x``: shape (M, n, n+1)."""
    x = np.atleast_2d(x)
    M, N = x.shape
    out = np.empty((M, N - 1, N))
    for m in range(M):
        q, _ = np.linalg.qr(np.column_stack([x[m], np.eye(N)]))
        out[m] = q[:, 1:N].T
    return out


def identity(n: int) -> MapSpec:
    return MapSpec("identity", n, n, lambda x: x.copy(), 1.0,
                   lambda x: np.broadcast_to(np.eye(n + 1), x.shape[:-1] + (n + 1, n + 1)).copy(), {"n": n})


def _plane_rotation(n, angle, i=0, j=1):
    R = np.eye(n + 1)
    c, s = math.cos(angle), math.sin(angle)
    R[i, i], R[i, j], R[j, i], R[j, j] = c, -s, s, c
    return R


def linear(name: str, n: int, R, params=None) -> MapSpec:
    """Orthogonal map fixing the north pole, given by its matrix."""
    R = np.array(R, float)
    if R.shape != (n + 1, n + 1) or not np.allclose(R @ R.T, np.eye(n + 1), atol=1e-12):
        raise ValueError("need an orthogonal (n+1)x(n+1) matrix")
    if not np.allclose(R[:, n], np.eye(n + 1)[n], atol=1e-12):
        raise ValueError("matrix must fix the north pole")
    return MapSpec(name, n, n, lambda x: x @ R.T, 1.0,
                   lambda x: np.broadcast_to(R, x.shape[:-1] + R.shape).copy(), params or {"n": n, "matrix": R.tolist()})


def rotation(n: int, angle: float, i: int = 0, j: int = 1) -> MapSpec:
    """Rotation in the (e_i, e_j) plane; both indices must avoid the pole axis."""
    if n in (i, j):
        raise ValueError("rotation plane must not contain the north pole")
    return linear("rotation", n, _plane_rotation(n, angle, i, j), {"n": n, "angle": angle, "i": i, "j": j})


def reflection(n: int) -> MapSpec:
    R = np.eye(n + 1)
    R[0, 0] = -1.0
    return linear("reflection", n, R, {"n": n})


def suspension_power(k: int) -> MapSpec:
    """Suspension of z -> z^k on the equatorial circle of S^2; degree k.

    In cylindrical coordinates (r e^{i phi}, z) the map multiplies phi by k.
    """
    if k == 0:
        raise ValueError("use constant() for degree zero")

    def rule(x):
        z = x[..., 0] + 1j * x[..., 1]
        r = np.abs(z)
        u = np.where(r > 0, z, 1) / np.where(r > 0, r, 1)
        w = r * u**k
        return np.stack([w.real, w.imag, x[..., 2]], axis=-1)

    def jac(x):
        z = x[..., 0] + 1j * x[..., 1]
        r = np.abs(z)
        safe = np.where(r > 0, r, 1.0)
        u = z / safe
        phi = np.angle(u)
        c, s = np.cos(phi), np.sin(phi)
        ck, sk = np.cos(k * phi), np.sin(k * phi)
        J = np.zeros(x.shape[:-1] + (3, 3))
        # R(k phi) diag(1, k) R(-phi) on the horizontal plane
        J[..., 0, 0] = ck * c + k * sk * s
        J[..., 0, 1] = ck * s - k * sk * c
        J[..., 1, 0] = sk * c - k * ck * s
        J[..., 1, 1] = sk * s + k * ck * c
        J[..., 2, 2] = 1.0
        return J

    return MapSpec("suspension", 2, 2, rule, float(abs(k)), jac, {"k": k})


def hopf() -> MapSpec:
    """Hopf fibration S^3 -> S^2 with z1 = x1 + i x2, z2 = x3 + i x4.

    The classical formula (2 z1 conj(z2), |z1|^2 - |z2|^2) is followed by
    diag(1, -1, -1) so that the north pole of S^3 lands on the north pole of
    S^2. The sign choices make the Hopf invariant +1 under the standard
    orientations (checked by the linking-number oracle). Lipschitz constant 2.
    """

    def rule(x):
        z1 = x[..., 0] + 1j * x[..., 1]
        z2 = x[..., 2] + 1j * x[..., 3]
        w = 2 * z1 * np.conj(z2)
        h = np.abs(z1) ** 2 - np.abs(z2) ** 2
        return np.stack([w.real, -w.imag, -h], axis=-1)

    def jac(x):
        a, b, c, d = (x[..., i] for i in range(4))
        J = np.zeros(x.shape[:-1] + (3, 4))
        # w = 2 (a + ib)(c - id) = 2(ac + bd) + 2i(bc - ad)
        J[..., 0, :] = np.stack([2 * c, 2 * d, 2 * a, 2 * b], axis=-1)
        J[..., 1, :] = -np.stack([-2 * d, 2 * c, 2 * b, -2 * a], axis=-1)
        J[..., 2, :] = -np.stack([2 * a, 2 * b, -2 * c, -2 * d], axis=-1)
        return J

    return MapSpec("hopf", 3, 2, rule, 2.0, jac, {})


def quaternion_square() -> MapSpec:
    """q -> q^2 on unit quaternions (scalar part last); degree 2, Lip 2."""

    def rule(x):
        v, a = x[..., :3], x[..., 3:4]
        return np.concatenate([2 * a * v, a * a - np.sum(v * v, axis=-1, keepdims=True)], axis=-1)

    def jac(x):
        v, a = x[..., :3], x[..., 3]
        J = np.zeros(x.shape[:-1] + (4, 4))
        for i in range(3):
            J[..., i, i] = 2 * a
            J[..., i, 3] = 2 * v[..., i]
            J[..., 3, i] = -2 * v[..., i]
        J[..., 3, 3] = 2 * a
        return J

    return MapSpec("quaternion_square", 3, 3, rule, 2.0, jac, {})


def conformal_dilation(n: int, lam: float) -> MapSpec:
    """Stereographic projection from the south pole, scale by lam, project back.

    The map fixes both poles, has degree 1 and Lipschitz constant
    max(lam, 1/lam), attained at the north pole (lam > 1) where the
    differential is lam times an isometry.
    """
    if lam <= 0:
        raise ValueError("dilation factor must be positive")

    def rule(x):
        # w = 2y/(1+|y|^2), z = (1-|y|^2)/(1+|y|^2) with y = lam x'/(1+x_n),
        # multiplied through by (1+x_n)^2 so the south pole needs no special case
        xp, a = x[..., :n], 1 + x[..., n:]
        s2 = np.sum(xp * xp, axis=-1, keepdims=True)
        den = a * a + lam * lam * s2
        out = np.concatenate([2 * lam * xp * a, a * a - lam * lam * s2], axis=-1)
        south = den[..., 0] == 0
        out[south] = 0.0
        out[south, n] = -1.0
        return out / np.where(den == 0, 1.0, den)

    return MapSpec("dilation", n, n, rule, float(max(lam, 1 / lam)), None, {"n": n, "lam": lam})


def constant(source: int, target: int) -> MapSpec:
    pole = np.zeros(target + 1)
    pole[target] = 1.0
    return MapSpec("constant", source, target,
                   lambda x: np.broadcast_to(pole, x.shape[:-1] + (target + 1,)).copy(), 0.0,
                   lambda x: np.zeros(x.shape[:-1] + (target + 1, source + 1)), {"source": source, "target": target})


def compose(f: MapSpec, g: MapSpec) -> MapSpec:
    """f o g."""
    if g.target_dim != f.source_dim:
        raise DimensionMismatch(f"cannot compose {f.name} after {g.name}")

    def jac(x):
        return np.einsum("...ab,...bc->...ac", f.jacobian(g.apply(x)), g.jacobian(x))

    return MapSpec(f"{f.name}*{g.name}", g.source_dim, f.target_dim, lambda x: f.apply(g.apply(x)),
                   f.lipschitz * g.lipschitz, jac, {"outer": f.to_dict(), "inner": g.to_dict()})


_CATALOG = {
    "identity": lambda p: identity(p.get("n", 2)),
    "reflection": lambda p: reflection(p.get("n", 2)),
    "rotation": lambda p: rotation(p.get("n", 2), float(p.get("angle", 0.7)), p.get("i", 0), p.get("j", 1)),
    "suspension": lambda p: suspension_power(int(p.get("k", 2))),
    "hopf": lambda p: hopf(),
    "quaternion_square": lambda p: quaternion_square(),
    "dilation": lambda p: conformal_dilation(p.get("n", 2), float(p.get("lam", 2.0))),
    "constant": lambda p: constant(p.get("source", 3), p.get("target", 2)),
}


def map_from_dict(d) -> MapSpec:
    d = dict(d)
    name = d.pop("name")
    if "outer" in d:
        return compose(map_from_dict(d["outer"]), map_from_dict(d["inner"]))
    if name == "linear":
        return linear("linear", d["n"], d["matrix"])
    if name not in _CATALOG:
        raise ValueError(f"unknown map {name!r}; known: {sorted(_CATALOG)}")
    return _CATALOG[name](d)


def catalog_names():
    return sorted(_CATALOG)
