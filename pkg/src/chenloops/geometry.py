"""Loops and loop families on round spheres.

Points of S^n are unit vectors in R^{n+1}; the basepoint x0 is the north
pole ``e_n`` (last coordinate 1). A ``Loop`` is a piecewise-geodesic based
loop with arclength-proportional parametrization on [0, 1]. A
``LoopFamily`` is a plot ``U x [0, 1] -> S^n``: it evaluates points together
with their first derivatives in the domain coordinates and in time (a
"jet"), which is all the numerical integration needs.

Domains are products of factors from a small catalog: round spheres S^k in
hyperspherical coordinates, small cubes (local plots) and a point. Meshes
are midpoint grids in the chart coordinates; cells never touch a chart
singularity.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import AntipodalSegment, BasepointMismatch, DimensionMismatch, NotBasedAtX0

UNIT_TOL = 1e-12
_CSTEP = 1e-30


def basepoint(n: int) -> np.ndarray:
    x = np.zeros(n + 1)
    x[n] = 1.0
    return x


def geodesic_distance(p, q):
    """Great-circle distance; stable for nearby and nearly antipodal points."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return 2.0 * np.arctan2(np.linalg.norm(p - q, axis=-1), np.linalg.norm(p + q, axis=-1))


@dataclass(frozen=True)
class SpherePoint:
    n: int
    coords: Tuple[float, ...]

    def __post_init__(self):
        if len(self.coords) != self.n + 1:
            raise DimensionMismatch(f"S^{self.n} point needs {self.n + 1} coordinates")
        if abs(math.fsum(c * c for c in self.coords) - 1.0) > 2 * UNIT_TOL:
            raise ValueError("point is not on the unit sphere")

    @classmethod
    def of(cls, coords) -> "SpherePoint":
        c = tuple(float(x) for x in coords)
        return cls(len(c) - 1, c)

    def array(self) -> np.ndarray:
        return np.array(self.coords)


# ---------------------------------------------------------------------------
# loops


class Loop:
    """Based piecewise-geodesic loop, parametrized proportionally to arclength."""

    def __init__(self, points):
        pts = np.array([p.array() if isinstance(p, SpherePoint) else np.asarray(p, float) for p in points])
        if pts.ndim != 2 or len(pts) < 2:
            raise ValueError("a loop needs at least two control points")
        n = pts.shape[1] - 1
        norms = np.linalg.norm(pts, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("control points must be unit vectors")
        x0 = basepoint(n)
        if np.linalg.norm(pts[0] - x0) > 1e-12 or np.linalg.norm(pts[-1] - x0) > 1e-12:
            raise NotBasedAtX0("loop must start and end at the north pole")
        arcs = geodesic_distance(pts[:-1], pts[1:])
        for i, th in enumerate(arcs):
            if th > math.pi - 1e-9:
                raise AntipodalSegment(f"control points {i} and {i + 1} are antipodal")
        self.n = n
        self.points = pts
        self.arcs = arcs
        self.length = float(math.fsum(arcs))
        keep = arcs > 0
        self._p = pts[:-1][keep]
        self._q = pts[1:][keep]
        self._theta = arcs[keep]
        if self.length > 0:
            cum = np.concatenate([[0.0], np.cumsum(self._theta)]) / self.length
            cum[-1] = 1.0
        else:
            cum = np.array([0.0, 1.0])
        self.breakpoints = tuple(float(b) for b in cum)

    def __len__(self):
        return len(self.points)

    def _segment(self, t):
        bp = np.asarray(self.breakpoints)
        tr = np.real(t)
        seg = np.clip(np.searchsorted(bp, tr, side="right") - 1, 0, len(self._theta) - 1)
        s = (t - bp[seg]) / (bp[seg + 1] - bp[seg])
        return seg, s

    def evaluate(self, t):
        """Points at times ``t`` (real or complex, for complex-step jets)."""
        t = np.asarray(t)
        if self.length == 0:
            return np.broadcast_to(basepoint(self.n), t.shape + (self.n + 1,)).astype(t.dtype if np.iscomplexobj(t) else float)
        seg, s = self._segment(t)
        th = self._theta[seg]
        p, q = self._p[seg], self._q[seg]
        a = np.sin((1 - s) * th) / np.sin(th)
        b = np.sin(s * th) / np.sin(th)
        return a[..., None] * p + b[..., None] * q

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        if self.length == 0:
            return np.zeros(t.shape + (self.n + 1,))
        seg, s = self._segment(t)
        th = self._theta[seg]
        p, q = self._p[seg], self._q[seg]
        dt = np.asarray(self.breakpoints)[seg + 1] - np.asarray(self.breakpoints)[seg]
        k = th / (np.sin(th) * dt)
        return (k * -np.cos((1 - s) * th))[..., None] * p + (k * np.cos(s * th))[..., None] * q

    def to_dict(self):
        return {"kind": "loop", "n": self.n, "control_points": self.points.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["control_points"], dtype=float))


def geodesic_loop(points) -> Loop:
    return Loop(points)


def great_circle(n: int, samples: int = 4) -> Loop:
    """The great circle through x0 in the (e_0, e_n) plane, ``samples`` equal arcs."""
    if samples < 3:
        raise ValueError("need at least 3 arcs to avoid antipodal segments")
    ang = 2 * math.pi * np.arange(samples + 1) / samples
    pts = np.zeros((samples + 1, n + 1))
    pts[:, 0] = np.sin(ang)
    pts[:, n] = np.cos(ang)
    pts[0] = basepoint(n)
    pts[-1] = basepoint(n)
    return Loop(pts)


def concat_power(gamma: Loop, L: int) -> Loop:
    if L < 1:
        raise ValueError("power must be >= 1")
    if L == 1:
        return gamma
    pts = [gamma.points[0]]
    for _ in range(L):
        pts.extend(gamma.points[1:])
    return Loop(np.array(pts))


def concat(g1: Loop, g2: Loop) -> Loop:
    if g1.n != g2.n:
        raise BasepointMismatch("loops live on different spheres")
    return Loop(np.concatenate([g1.points, g2.points[1:]]))


def loop_space_distance(g1: Loop, g2: Loop, samples: int = 2048) -> float:
    """Sup metric: max over t of the spherical distance, sampled on a grid
    that contains every breakpoint of both loops."""
    if g1.n != g2.n:
        raise DimensionMismatch("loops live on different spheres")
    t = np.union1d(np.linspace(0, 1, samples + 1), np.union1d(g1.breakpoints, g2.breakpoints))
    return float(np.max(geodesic_distance(g1.evaluate(t), g2.evaluate(t))))


# ---------------------------------------------------------------------------
# domains and meshes


def _sphere_embed(phi):
    """Hyperspherical coordinates (..., k) -> points (..., k+1); complex ok."""
    k = phi.shape[-1]
    out = []
    prod = np.ones(phi.shape[:-1], dtype=phi.dtype)
    for j in range(k):
        out.append(prod * np.cos(phi[..., j]))
        prod = prod * np.sin(phi[..., j])
    out.append(prod)
    return np.stack(out, axis=-1)


@dataclass
class FactorSample:
    kind: str
    k: int
    points: np.ndarray  # (M, ambient)
    tangents: np.ndarray  # (M, k, ambient): derivative wrt this factor's coords


@dataclass
class Mesh:
    coords: np.ndarray  # (M, D)
    weights: np.ndarray  # (M,)
    factors: List[FactorSample]
    resolution: int

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def offsets(self) -> List[int]:
        out, acc = [], 0
        for f in self.factors:
            out.append(acc)
            acc += f.k
        return out

    def restrict(self, start: int, stop: int) -> "Mesh":
        offs = self.offsets() + [self.dim]
        return Mesh(self.coords[:, offs[start]:offs[stop]], self.weights, self.factors[start:stop], self.resolution)

    def take(self, idx) -> "Mesh":
        return Mesh(
            self.coords[idx],
            self.weights[idx],
            [FactorSample(f.kind, f.k, f.points[idx], f.tangents[idx]) for f in self.factors],
            self.resolution,
        )


@dataclass(frozen=True)
class Domain:
    """Product of catalog factors: ("sphere", k), ("cube", k) or ("point", 0)."""

    factors: Tuple[Tuple[str, int], ...]
    cube_halfwidth: float = 0.1

    @classmethod
    def sphere(cls, k: int) -> "Domain":
        if k < 1:
            raise ValueError("sphere factor needs k >= 1")
        return cls((("sphere", k),))

    @classmethod
    def cube(cls, k: int, halfwidth: float = 0.1) -> "Domain":
        return cls((("cube", k),), halfwidth)

    @classmethod
    def point(cls) -> "Domain":
        return cls((("point", 0),))

    def __mul__(self, other: "Domain") -> "Domain":
        return Domain(self.factors + other.factors, self.cube_halfwidth)

    @property
    def dim(self) -> int:
        return sum(k for _, k in self.factors)

    def _factor_grid(self, kind, k, res):
        if kind == "point":
            return np.zeros((1, 0)), np.ones(1)
        if kind == "cube":
            h = 2 * self.cube_halfwidth / res
            axis = -self.cube_halfwidth + h * (np.arange(res) + 0.5)
            axes = [axis] * k
            w = h**k
        else:
            axes = []
            w = 1.0
            for j in range(k):
                cells = res if j < k - 1 else 2 * res
                span = math.pi if j < k - 1 else 2 * math.pi
                h = span / cells
                axes.append(h * (np.arange(cells) + 0.5))
                w *= h
        grids = np.meshgrid(*axes, indexing="ij")
        coords = np.stack([g.ravel() for g in grids], axis=-1)
        return coords, np.full(len(coords), w)

    def sample(self, coords_by_factor: Sequence[np.ndarray]) -> List[FactorSample]:
        out = []
        for (kind, k), c in zip(self.factors, coords_by_factor):
            m = len(c)
            if kind == "point":
                out.append(FactorSample(kind, 0, np.zeros((m, 0)), np.zeros((m, 0, 0))))
            elif kind == "cube":
                out.append(FactorSample(kind, k, c.copy(), np.broadcast_to(np.eye(k), (m, k, k)).copy()))
            else:
                pts = _sphere_embed(c)
                tan = np.empty((m, k, k + 1))
                for j in range(k):
                    z = c.astype(complex)
                    z[:, j] += 1j * _CSTEP
                    tan[:, j, :] = np.imag(_sphere_embed(z)) / _CSTEP
                out.append(FactorSample(kind, k, pts, tan))
        return out

    def mesh(self, resolution: int) -> Mesh:
        if resolution < 1:
            raise ValueError("mesh resolution must be >= 1")
        grids = [self._factor_grid(kind, k, resolution) for kind, k in self.factors]
        # full tensor product of the factor grids, first factor slowest
        idx = np.meshgrid(*[np.arange(len(g[1])) for g in grids], indexing="ij")
        idx = [i.ravel() for i in idx]
        per_factor = [g[0][i] for g, i in zip(grids, idx)]
        weights = np.ones(len(idx[0]))
        for g, i in zip(grids, idx):
            weights = weights * g[1][i]
        coords = np.concatenate(per_factor, axis=1) if per_factor else np.zeros((1, 0))
        return Mesh(coords, weights, self.sample(per_factor), resolution)

    def mesh_at(self, coords) -> Mesh:
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        if coords.shape[1] != self.dim:
            raise DimensionMismatch(f"domain has dimension {self.dim}, got {coords.shape[1]} coordinates")
        per, acc = [], 0
        for _, k in self.factors:
            per.append(coords[:, acc:acc + k])
            acc += k
        return Mesh(coords, np.ones(len(coords)), self.sample(per), 0)

    def chart_signs(self) -> List[int]:
        """Orientation of each sphere chart relative to the outward-normal one."""
        signs = []
        for kind, k in self.factors:
            if kind != "sphere":
                signs.append(1)
                continue
            c = np.full((1, k), 1.0)
            f = Domain.sphere(k).sample([c])[0]
            m = np.concatenate([f.points[:, None, :], f.tangents], axis=1)[0]
            signs.append(int(np.sign(np.linalg.det(m))))
        return signs

    def to_dict(self):
        return {"factors": [list(f) for f in self.factors], "cube_halfwidth": self.cube_halfwidth}


# ---------------------------------------------------------------------------
# loop families


Jet = Tuple[np.ndarray, np.ndarray, np.ndarray]


def time_grid(breakpoints: Sequence[float], cells_per_piece: int) -> Tuple[np.ndarray, np.ndarray]:
    """Midpoint nodes and widths, uniform inside each smooth time piece."""
    if cells_per_piece < 1:
        raise ValueError("cells_per_piece must be >= 1")
    nodes, widths = [], []
    bp = list(breakpoints)
    for a, b in zip(bp[:-1], bp[1:]):
        if b <= a:
            continue
        h = (b - a) / cells_per_piece
        nodes.append(a + h * (np.arange(cells_per_piece) + 0.5))
        widths.append(np.full(cells_per_piece, h))
    return np.concatenate(nodes), np.concatenate(widths)


class LoopFamily:
    """A plot U x [0,1] -> S^n given by a jet rule.

    Subclasses implement ``jet(mesh, t)`` returning ``(P, dP_du, dP_dt)`` of
    shapes ``(M, T, N)``, ``(M, T, D, N)`` and ``(M, T, N)`` with ``N = n+1``
    and ``D = domain.dim``.
    """

    rule = "abstract"

    def __init__(self, domain: Domain, n: int, breakpoints, orientation: int = 1, coefficient=1):
        self.domain = domain
        self.n = n
        self.breakpoints = tuple(sorted(set(float(b) for b in breakpoints) | {0.0, 1.0}))
        self.orientation = int(orientation)
        self.coefficient = Fraction(coefficient)

    @property
    def dim(self) -> int:
        return self.domain.dim

    def jet(self, mesh: Mesh, t: np.ndarray) -> Jet:  # pragma: no cover - abstract
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def to_dict(self) -> dict:
        d = {
            "rule": self.rule,
            "n": self.n,
            "domain": self.domain.to_dict(),
            "breakpoints": list(self.breakpoints),
            "orientation": self.orientation,
            "coefficient": str(self.coefficient),
        }
        d.update(self.params())
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1, ensure_ascii=False)

    def points(self, u, t) -> np.ndarray:
        return self.jet(self.domain.mesh_at(u), np.atleast_1d(np.asarray(t, float)))[0]

    def slice_length(self, u, cells_per_piece: int = 64) -> float:
        t, w = time_grid(self.breakpoints, cells_per_piece)
        _, _, dt = self.jet(self.domain.mesh_at(u), t)
        return float(np.sum(w * np.linalg.norm(dt[0], axis=-1)))

    def check_slices(self, mesh: Mesh, cells_per_piece: int = 8, tol: float = 1e-9) -> None:
        """Every slice must be a based loop of unit vectors."""
        t = np.array([0.0, 1.0])
        P = self.jet(mesh, t)[0]
        x0 = basepoint(self.n)
        if np.max(np.abs(P - x0)) > tol:
            raise NotBasedAtX0(f"{self.rule}: some slice is not based at x0")
        tn, _ = time_grid(self.breakpoints, cells_per_piece)
        P = self.jet(mesh, tn)[0]
        if np.max(np.abs(np.linalg.norm(P, axis=-1) - 1)) > tol:
            raise ValueError(f"{self.rule}: slice leaves the unit sphere")


class ConstantFamily(LoopFamily):
    """Every slice is the constant loop at x0."""

    rule = "constant"

    def __init__(self, n: int, domain: Optional[Domain] = None):
        super().__init__(domain or Domain.point(), n, ())

    def jet(self, mesh, t):
        M, T, D, N = mesh.size, len(t), mesh.dim, self.n + 1
        P = np.broadcast_to(basepoint(self.n), (M, T, N)).copy()
        return P, np.zeros((M, T, D, N)), np.zeros((M, T, N))


class Sweepout(LoopFamily):
    """Unit family S^{n-1} -> Omega S^n.

    The loop for x in S^{n-1} runs down the meridian through x to the south
    pole, then back up the fixed meridian through -e_0, at constant speed
    2*pi. The slice over x = e_0 is the great circle ``great_circle(n)``.
    Only the first half moves with x, so the map S^{n-1} x [0,1] -> S^n has
    degree one. The orientation is chosen so that this degree is +1 under the
    (domain vectors, then time) convention of fibre integration.
    """

    rule = "sweepout"

    def __init__(self, n: int, reflect: bool = False):
        if n < 2:
            raise ValueError("sweepout needs n >= 2")
        domain = Domain.sphere(n - 1)
        sign = -domain.chart_signs()[0]
        super().__init__(domain, n, (0.5,), orientation=sign)
        self.reflect = bool(reflect)

    def params(self):
        return {"reflect": self.reflect}

    def jet(self, mesh, t):
        f = mesh.factors[0]
        x, tan = f.points, f.tangents
        if self.reflect:
            x = x.copy()
            tan = tan.copy()
            x[:, 0] *= -1
            tan[:, :, 0] *= -1
        M, T, D, N = mesh.size, len(t), mesh.dim, self.n + 1
        t = np.asarray(t, float)
        first = t <= 0.5
        th = np.where(first, 2 * np.pi * t, 2 * np.pi * (1 - t))
        s, c = np.sin(th), np.cos(th)
        e = np.zeros(self.n)
        e[0] = -1.0
        horiz = np.where(first[None, :, None], x[:, None, :], e[None, None, :])  # (M,T,n)
        P = np.empty((M, T, N))
        P[..., : self.n] = s[None, :, None] * horiz
        P[..., self.n] = c[None, :]
        dt = np.empty((M, T, N))
        speed = np.where(first, 2 * np.pi, -2 * np.pi)
        dt[..., : self.n] = (speed * c)[None, :, None] * horiz
        dt[..., self.n] = np.broadcast_to(-speed * s, (M, T))
        du = np.zeros((M, T, D, N))
        du[..., : self.n] = np.where(first[None, :, None, None], s[None, :, None, None] * tan[:, None, :, :], 0.0)
        return P, du, dt

    def slice_loop(self, u) -> Loop:
        """The slice at domain coordinates ``u`` as an explicit geodesic loop."""
        x = self.domain.mesh_at(u).factors[0].points[0].copy()
        if self.reflect:
            x[0] *= -1
        n = self.n
        eq = np.append(x, 0.0)
        e = np.zeros(n + 1)
        e[0] = -1.0
        south = -basepoint(n)
        return Loop([basepoint(n), eq, south, e, basepoint(n)])


class Desuspension(LoopFamily):
    """x -> f o F(x): post-composition of every loop with a sphere map."""

    rule = "desuspend"

    def __init__(self, f, F: LoopFamily):
        if f.source_dim != F.n:
            raise DimensionMismatch(f"map source S^{f.source_dim} but family lives on S^{F.n}")
        if np.linalg.norm(f.apply(basepoint(F.n)) - basepoint(f.target_dim)) > 1e-12:
            raise BasepointMismatch(f"map {f.name} does not fix the basepoint")
        super().__init__(F.domain, f.target_dim, F.breakpoints, F.orientation, F.coefficient)
        self.f = f
        self.inner = F

    def params(self):
        return {"map": self.f.to_dict(), "inner": self.inner.to_dict()}

    def jet(self, mesh, t):
        P, du, dt = self.inner.jet(mesh, t)
        J = self.f.jacobian(P)  # (M,T,N',N)
        return self.f.apply(P), np.einsum("mtab,mtdb->mtda", J, du), np.einsum("mtab,mtb->mta", J, dt)


def desuspend(f, eta: LoopFamily) -> LoopFamily:
    return Desuspension(f, eta)


class ConcatPower(LoopFamily):
    """{L}F: each loop traversed L times in unit time."""

    rule = "concat_power"

    def __init__(self, F: LoopFamily, L: int):
        if L < 1:
            raise ValueError("power must be >= 1")
        bps = [(j + b) / L for j in range(L) for b in F.breakpoints]
        super().__init__(F.domain, F.n, bps, F.orientation, F.coefficient)
        self.inner = F
        self.L = int(L)

    def params(self):
        return {"L": self.L, "inner": self.inner.to_dict()}

    def jet(self, mesh, t):
        t = np.asarray(t, float)
        Lt = self.L * t
        j = np.clip(np.floor(Lt), 0, self.L - 1)
        s = Lt - j
        P, du, dt = self.inner.jet(mesh, s)
        return P, du, self.L * dt


def concat_power_family(F: LoopFamily, L: int) -> LoopFamily:
    return F if L == 1 else ConcatPower(F, L)


class PontryaginProduct(LoopFamily):
    """F . G over the product domain: the F-loop, then the G-loop."""

    rule = "pontryagin"

    def __init__(self, F: LoopFamily, G: LoopFamily):
        if F.n != G.n:
            raise BasepointMismatch("families live on different spheres")
        bps = [b / 2 for b in F.breakpoints] + [0.5 + b / 2 for b in G.breakpoints]
        super().__init__(F.domain * G.domain, F.n, bps, F.orientation * G.orientation, F.coefficient * G.coefficient)
        self.left = F
        self.right = G

    def params(self):
        return {"left": self.left.to_dict(), "right": self.right.to_dict()}

    def jet(self, mesh, t):
        t = np.asarray(t, float)
        nf = len(self.left.domain.factors)
        mf = mesh.restrict(0, nf)
        mg = mesh.restrict(nf, len(mesh.factors))
        first = t <= 0.5
        M, T, D, N = mesh.size, len(t), mesh.dim, self.n + 1
        P = np.empty((M, T, N))
        du = np.zeros((M, T, D, N))
        dt = np.empty((M, T, N))
        df = self.left.domain.dim
        if np.any(first):
            a, b, c = self.left.jet(mf, 2 * t[first])
            P[:, first] = a
            du[:, first, :df] = b
            dt[:, first] = 2 * c
        if np.any(~first):
            a, b, c = self.right.jet(mg, 2 * t[~first] - 1)
            P[:, ~first] = a
            du[:, ~first, df:] = b
            dt[:, ~first] = 2 * c
        return P, du, dt


def pontryagin_product(F: LoopFamily, G: LoopFamily) -> LoopFamily:
    return PontryaginProduct(F, G)


class Reparametrized(LoopFamily):
    """Same loops, time run through an orientation-preserving diffeomorphism
    ``tau`` of [0, 1] that fixes every breakpoint of the inner family."""

    rule = "reparametrize"

    def __init__(self, F: LoopFamily, tau: Callable, dtau: Callable, label: str = "custom"):
        bp = np.asarray(F.breakpoints)
        if np.max(np.abs(tau(bp) - bp)) > 1e-12:
            raise ValueError("reparametrization must fix the breakpoints")
        super().__init__(F.domain, F.n, F.breakpoints, F.orientation, F.coefficient)
        self.inner, self.tau, self.dtau, self.label = F, tau, dtau, label

    def params(self):
        return {"tau": self.label, "inner": self.inner.to_dict()}

    def jet(self, mesh, t):
        t = np.asarray(t, float)
        P, du, dt = self.inner.jet(mesh, self.tau(t))
        return P, du, dt * self.dtau(t)[None, :, None]


class Deformation(LoopFamily):
    """Local plot through a loop: u -> exp_{gamma(t)}(sum_j u_j X_j(t)).

    The domain is a small cube, so the slice at u = 0 is ``gamma`` itself and
    the domain derivatives there are the variation fields. Each X_j is the
    tangential projection of a constant vector, scaled by a time profile that
    vanishes at both ends (keeping every slice based). Jets come from
    complex-step differentiation, exact up to rounding.
    """

    rule = "deformation"

    def __init__(self, gamma: Loop, vectors: Sequence[Sequence[float]], profiles: Sequence[str], halfwidth=0.1):
        if len(vectors) != len(profiles):
            raise ValueError("one profile per variation vector")
        super().__init__(Domain.cube(len(vectors), halfwidth), gamma.n, gamma.breakpoints)
        self.gamma = gamma
        self.vectors = np.array(vectors, dtype=float)
        self.profiles = tuple(profiles)

    def params(self):
        return {"loop": self.gamma.to_dict(), "vectors": self.vectors.tolist(), "profiles": list(self.profiles)}

    _PROFILES = {
        "bump": lambda t: np.sin(np.pi * t) ** 2,
        "wave": lambda t: np.sin(2 * np.pi * t) * np.sin(np.pi * t),
        "bump3": lambda t: np.sin(np.pi * t) ** 2 * np.cos(np.pi * t),
    }

    def _eval(self, u, t):
        p = self.gamma.evaluate(t)  # (T, N)
        V = np.zeros(np.broadcast_shapes(u.shape[:1] + (1,), (1,) + t.shape) + (self.n + 1,), dtype=complex)
        for j, (c, prof) in enumerate(zip(self.vectors, self.profiles)):
            tang = c[None, :] - (p @ c)[:, None] * p  # (T, N)
            V = V + (u[:, j][:, None, None] * self._PROFILES[prof](t)[None, :, None]) * tang[None, :, :]
        s = np.sqrt(np.sum(V * V, axis=-1))
        small = np.abs(s) < 1e-8
        safe = np.where(small, 1.0, s)
        sinc = np.where(small, 1 - s * s / 6, np.sin(safe) / safe)
        return np.cos(s)[..., None] * p[None] + sinc[..., None] * V

    def jet(self, mesh, t):
        u = mesh.coords.astype(complex)
        t = np.asarray(t, float).astype(complex)
        P = np.real(self._eval(u, t))
        D = mesh.dim
        du = np.empty(P.shape[:2] + (D, P.shape[-1]))
        for j in range(D):
            uj = u.copy()
            uj[:, j] += 1j * _CSTEP
            du[:, :, j, :] = np.imag(self._eval(uj, t)) / _CSTEP
        dt = np.imag(self._eval(u, t + 1j * _CSTEP)) / _CSTEP
        return P, du, dt


def standard_deformation(gamma: Loop, k: int, halfwidth: float = 0.1) -> Deformation:
    """A k-parameter deformation of a loop in the (e_0, e_n) plane.

    Variation vectors run through the normal directions e_1, ..., e_{n-1},
    first with the ``bump`` profile, then ``wave``, then ``bump3``.
    """
    n = gamma.n
    normals = [np.eye(n + 1)[i] for i in range(1, n)]
    if not normals:
        raise ValueError("need n >= 2")
    profiles = ["bump", "wave", "bump3"]
    vecs, profs = [], []
    for j in range(k):
        vecs.append(normals[j % len(normals)])
        profs.append(profiles[(j // len(normals)) % len(profiles)])
    return Deformation(gamma, vecs, profs, halfwidth)


# ---------------------------------------------------------------------------
# metric quantities


def _node_grid(F: LoopFamily, cells_per_piece: int):
    return time_grid(F.breakpoints, cells_per_piece)


def slice_lengths(F: LoopFamily, mesh: Mesh, cells_per_piece: int) -> np.ndarray:
    t, w = _node_grid(F, cells_per_piece)
    _, _, dt = F.jet(mesh, t)
    return np.sum(w[None, :] * np.linalg.norm(dt, axis=-1), axis=1)


def suplength(F: LoopFamily, resolution: int = 16, cells_per_piece: int = 32) -> float:
    """Largest slice length over the mesh (converges from below)."""
    mesh = F.domain.mesh(resolution)
    return float(np.max(slice_lengths(F, mesh, cells_per_piece)))


def sup_dilations(F: LoopFamily, mesh: Mesh, cells_per_piece: int) -> np.ndarray:
    """Per mesh point, the product over domain directions of the sup-metric
    speed ``sup_t |dF/du_j|``: an upper-bound flavoured Jacobian of u -> F(u)
    into the loop space with the sup metric."""
    t, _ = _node_grid(F, cells_per_piece)
    _, du, _ = F.jet(mesh, t)
    if du.shape[2] == 0:
        return np.ones(mesh.size)
    speeds = np.max(np.linalg.norm(du, axis=-1), axis=1)  # (M, D)
    return np.prod(speeds, axis=1)


def volume_estimate(F: LoopFamily, resolution: int = 16, cells_per_piece: int = 32) -> float:
    """Riemann sum of the sup-metric Jacobian bound over the domain mesh."""
    mesh = F.domain.mesh(resolution)
    if F.domain.dim == 0:
        return 0.0
    return float(abs(F.coefficient) * np.sum(mesh.weights * sup_dilations(F, mesh, cells_per_piece)))


def family_from_dict(d) -> LoopFamily:
    """Inverse of ``LoopFamily.to_dict`` for the catalog rules."""
    from .maps import map_from_dict

    rule = d["rule"]
    if rule == "sweepout":
        F = Sweepout(d["n"], d.get("reflect", False))
    elif rule == "constant":
        F = ConstantFamily(d["n"], Domain(tuple(tuple(f) for f in d["domain"]["factors"])))
    elif rule == "desuspend":
        F = Desuspension(map_from_dict(d["map"]), family_from_dict(d["inner"]))
    elif rule == "concat_power":
        F = ConcatPower(family_from_dict(d["inner"]), d["L"])
    elif rule == "pontryagin":
        F = PontryaginProduct(family_from_dict(d["left"]), family_from_dict(d["right"]))
    elif rule == "deformation":
        F = Deformation(
            Loop.from_dict(d["loop"]), d["vectors"], d["profiles"], d["domain"].get("cube_halfwidth", 0.1)
        )
    else:
        raise ValueError(f"cannot rebuild family rule {rule!r}")
    F.orientation = d.get("orientation", F.orientation)
    F.coefficient = Fraction(d.get("coefficient", "1"))
    return F
