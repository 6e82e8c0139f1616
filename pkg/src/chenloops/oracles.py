"""Independent reference computations that do not use loop spaces.

* ``preimage_degree``: signed count of the triangles of a fine geodesic mesh
  of S^2 whose image triangle contains a regular value.
* ``linking_hopf``: traces the preimage curves of two regular values of a map
  S^3 -> S^2, projects them stereographically and returns their linking
  number, computed exactly for the polygons.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from . import kernels
from .maps import MapSpec


def icosphere(level: int):
    """Vertices and outward-oriented triangles of a subdivided icosahedron."""
    p = (1 + 5**0.5) / 2
    v = [(-1, p, 0), (1, p, 0), (-1, -p, 0), (1, -p, 0), (0, -1, p), (0, 1, p),
         (0, -1, -p), (0, 1, -p), (p, 0, -1), (p, 0, 1), (-p, 0, -1), (-p, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4), (11, 10, 2),
             (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9), (4, 9, 5),
             (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    verts = [np.array(x, float) / np.linalg.norm(x) for x in v]
    for _ in range(level):
        cache = {}
        new = []

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = verts[a] + verts[b]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    V = np.array(verts)
    Fc = np.array(faces)
    # orient every face outward
    s = np.linalg.det(V[Fc])
    Fc[s < 0] = Fc[s < 0][:, [0, 2, 1]]
    return V, Fc


def preimage_degree(f: MapSpec, level: int = 6, seed: int = 7) -> int:
    """Degree of f: S^2 -> S^2 by counting signed preimages of a random value."""
    if f.source_dim != 2 or f.target_dim != 2:
        raise ValueError("preimage oracle handles S^2 -> S^2 only")
    V, Fc = icosphere(level)
    W = f.apply(V)
    rng = np.random.default_rng(seed)
    y = rng.normal(size=3)
    y /= np.linalg.norm(y)
    a, b, c = W[Fc[:, 0]], W[Fc[:, 1]], W[Fc[:, 2]]
    s0 = np.sign(np.einsum("ij,ij->i", np.cross(a, b), c))
    s1 = np.sign(np.cross(a, b) @ y)
    s2 = np.sign(np.cross(b, c) @ y)
    s3 = np.sign(np.cross(c, a) @ y)
    # small image triangles only: the value must be on the same side as the triangle
    near = (a + b + c) @ y > 0
    inside = near & (s1 == s0) & (s2 == s0) & (s3 == s0)
    return int(np.sum(s0[inside]))


def _dual3(x, g1, g2):
    """tau with tau . z = det[x, g1, g2, z] for all z in R^4."""
    return np.array([np.linalg.det(np.stack([x, g1, g2, e])) for e in np.eye(4)])


def _positive_basis(y):
    a = np.eye(3)[np.argmin(np.abs(y))]
    b1 = a - (a @ y) * y
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(y, b1)
    return b1, b2


def _fibre_tangent(f, x, y):
    J = f.jacobian(x[None])[0]
    b1, b2 = _positive_basis(y)
    g1, g2 = b1 @ J, b2 @ J
    tau = _dual3(x, g1, g2)
    return tau / np.linalg.norm(tau)


def _newton(f, x, y, iters=30, tol=1e-13):
    """Project x onto f^{-1}(y) with minimum-norm steps in the tangent space."""
    b1, b2 = _positive_basis(y)
    for _ in range(iters):
        fx = f.apply(x[None])[0]
        res = np.array([b1 @ (fx - y), b2 @ (fx - y)])
        if np.linalg.norm(fx - y) < tol:
            return x, True
        J = f.jacobian(x[None])[0]
        A = np.stack([b1 @ J, b2 @ J])
        A = A - np.outer(A @ x, x)
        step = np.linalg.lstsq(A, -res, rcond=None)[0]
        x = x + step
        x /= np.linalg.norm(x)
    fx = f.apply(x[None])[0]
    return x, bool(np.linalg.norm(fx - y) < 1e-10)


def trace_fibre(f: MapSpec, x0, y, step: float = 0.02, max_steps: int = 20000) -> np.ndarray:
    """Closed polygon along the preimage component of y through x0."""
    x, ok = _newton(f, np.asarray(x0, float), y)
    if not ok:
        raise RuntimeError("start point did not converge onto the fibre")
    start = x.copy()
    pts = [x]
    travelled = 0.0
    for _ in range(max_steps):
        tau = _fibre_tangent(f, x, y)
        # midpoint predictor
        xm = x + 0.5 * step * tau
        xm /= np.linalg.norm(xm)
        tau_m = _fibre_tangent(f, xm, y)
        xn = x + step * tau_m
        xn /= np.linalg.norm(xn)
        xn, ok = _newton(f, xn, y)
        if not ok:
            raise RuntimeError("corrector failed while tracing a fibre")
        travelled += np.linalg.norm(xn - x)
        x = xn
        if travelled > 3 * step and np.linalg.norm(x - start) < 0.75 * step:
            return np.array(pts)
        pts.append(x)
    raise RuntimeError("fibre did not close")


def fibre_components(f: MapSpec, y, starts: int = 64, seed: int = 0, step: float = 0.02) -> List[np.ndarray]:
    """All preimage components reached from random starting points."""
    rng = np.random.default_rng(seed)
    comps: List[np.ndarray] = []
    for _ in range(starts):
        x = rng.normal(size=4)
        x /= np.linalg.norm(x)
        x, ok = _newton(f, x, y, iters=60)
        if not ok:
            continue
        if any(np.min(np.linalg.norm(c - x, axis=1)) < 2 * step for c in comps):
            continue
        comps.append(trace_fibre(f, x, y, step))
    return comps


def _raw_projection(pts, pole):
    Q, _ = np.linalg.qr(np.column_stack([pole, np.eye(4)]))
    frame = Q[:, 1:4].T
    return (pts @ frame.T) / (1 - pts @ pole)[:, None]


def projection_orientation(pole) -> float:
    """+1 if stereographic projection from ``pole`` preserves orientation
    (S^3 oriented by outward normal first, R^3 standard), else -1."""
    pole = np.asarray(pole, float)
    x = -pole + 0.3 * np.roll(pole, 1)
    x /= np.linalg.norm(x)
    Q, _ = np.linalg.qr(np.column_stack([x, np.eye(4)]))
    tan = Q[:, 1:4].T
    if np.linalg.det(np.vstack([x, tan])) < 0:
        tan[0] *= -1
    h = 1e-6
    cols = []
    for v in tan:
        xp = (x + h * v) / np.linalg.norm(x + h * v)
        xm = (x - h * v) / np.linalg.norm(x - h * v)
        cols.append((_raw_projection(xp[None], pole)[0] - _raw_projection(xm[None], pole)[0]) / (2 * h))
    return float(np.sign(np.linalg.det(np.array(cols))))


def _stereographic(pts, pole):
    out = _raw_projection(pts, pole)
    if projection_orientation(pole) < 0:
        out[:, 0] *= -1
    return out


@dataclass
class LinkingReport:
    value: float
    components: List[int]
    regular_values: List[List[float]]


def linking_hopf(f: MapSpec, seed: int = 3, step: float = 0.02, starts: int = 64) -> LinkingReport:
    """Hopf invariant of f: S^3 -> S^2 as the linking number of two fibres."""
    if f.source_dim != 3 or f.target_dim != 2:
        raise ValueError("linking oracle handles S^3 -> S^2 only")
    rng = np.random.default_rng(seed)
    ys = []
    for _ in range(2):
        y = rng.normal(size=3)
        ys.append(y / np.linalg.norm(y))
    A = fibre_components(f, ys[0], starts, seed, step)
    B = fibre_components(f, ys[1], starts, seed + 1, step)
    allpts = np.concatenate(A + B)
    pole = None
    for _ in range(100):
        p = rng.normal(size=4)
        p /= np.linalg.norm(p)
        if np.min(np.linalg.norm(allpts - p, axis=1)) > 0.2:
            pole = p
            break
    if pole is None:
        raise RuntimeError("no projection pole away from the fibres")
    total = 0.0
    for a in A:
        for b in B:
            total += kernels.polygon_linking(_stereographic(a, pole), _stereographic(b, pole))
    return LinkingReport(total, [len(A), len(B)], [y.tolist() for y in ys])
