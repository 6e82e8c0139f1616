"""Numerical iterated integrals on loop families.

The value of the loop-space form ``∫ω_1...ω_r`` on a plot F at u, against
domain vectors v_1..v_k, is

    ∫_{Δ^r} (ω_1 x ... x ω_r)(F_*v_1, ..., F_*v_k, ∂t_1, ..., ∂t_r) dt

with the domain vectors first and the time directions last. Expanding the
product form distributes the pushed-forward vectors over the factors in
blocks (``forms.block_assignments``); each assignment contributes a product
of scalar functions of t_1..t_r, which the ordered-simplex kernel sums
exactly on the midpoint grid. Pairings integrate the coordinate-frame value
over the domain mesh.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .errors import ArityMismatch, BoundViolated, DegreeMismatch, DimensionMismatch, TargetMismatch
from .forms import FormSpec, block_assignments
from .geometry import (
    ConcatPower,
    LoopFamily,
    Mesh,
    Sweepout,
    concat_power_family,
    desuspend,
    loop_space_distance,
    pontryagin_product,
    sup_dilations,
    suplength,
    time_grid,
    volume_estimate,
)
from .maps import MapSpec, tangent_basis

CHUNK = 256

FormTerm = Tuple[float, Sequence[FormSpec]]


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("CHEN_THREADS", "1")))
    except ValueError:
        return 1


def _check_forms(forms: Sequence[FormSpec], F: LoopFamily) -> int:
    for w in forms:
        if w.n != F.n:
            raise TargetMismatch(f"form on S^{w.n} but family maps into S^{F.n}")
    return sum(w.degree for w in forms) - len(forms)


def _density(forms, F: LoopFamily, mesh: Mesh, frame: np.ndarray, t, h) -> np.ndarray:
    """Iterated-integral value at every mesh point against ``frame`` (k, D)."""
    P, du, dt = F.jet(mesh, t)
    k = frame.shape[0]
    W = np.einsum("kd,mtdn->mtkn", frame, du)
    sizes = tuple(w.degree - 1 for w in forms)
    total = np.zeros(mesh.size)
    for sign, blocks in block_assignments(k, sizes):
        fac = np.empty((mesh.size, len(t), len(forms)))
        for i, (w, b) in enumerate(zip(forms, blocks)):
            vecs = np.concatenate([W[:, :, list(b), :], dt[:, :, None, :]], axis=2)
            fac[:, :, i] = w.evaluate(P, vecs)
        total += sign * kernels.iterated_sum(fac, h)
    return total


def eval_iterated_integral(forms: Sequence[FormSpec], F: LoopFamily, u, v, cells_per_piece: int = 48) -> float:
    """Plotwise value of ∫ω_1...ω_r on F at domain point u against vectors v."""
    k = _check_forms(forms, F)
    v = np.atleast_2d(np.asarray(v, float)) if len(v) else np.zeros((0, F.dim))
    if v.shape[0] != k:
        raise ArityMismatch(f"form needs {k} vectors, got {v.shape[0]}")
    if v.shape[1] != F.dim:
        raise DimensionMismatch(f"vectors must have {F.dim} components")
    t, h = time_grid(F.breakpoints, cells_per_piece)
    return float(_density(forms, F, F.domain.mesh_at(u), v, t, h)[0])


@dataclass
class PairingResult:
    value: float
    error_estimate: float
    resolution: int
    cells_per_piece: int
    coarse_value: float

    def __float__(self):
        return float(self.value)

    def to_dict(self):
        return asdict(self)


def _normalize_terms(terms) -> List[Tuple[float, List[FormSpec]]]:
    if terms and isinstance(terms[0], FormSpec):
        return [(1.0, list(terms))]
    return [(float(c), list(fs)) for c, fs in terms]


def _pair_densities(terms, F: LoopFamily, mesh: Mesh, cells: int) -> np.ndarray:
    """Combined density (sum over terms) at each mesh point, chunked."""
    t, h = time_grid(F.breakpoints, cells)
    frame = np.eye(F.dim)
    chunks = [np.arange(s, min(s + CHUNK, mesh.size)) for s in range(0, mesh.size, CHUNK)]

    def work(idx):
        sub = mesh.take(idx)
        out = np.zeros(len(idx))
        for c, forms in terms:
            out += c * _density(forms, F, sub, frame, t, h)
        return out

    threads = thread_count()
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    return np.concatenate(parts)


def _pair_once(terms, F: LoopFamily, resolution: int, cells: int) -> float:
    mesh = F.domain.mesh(resolution)
    dens = _pair_densities(terms, F, mesh, cells)
    # fixed left-to-right reduction over fixed-size chunks
    acc = 0.0
    for s in range(0, mesh.size, CHUNK):
        acc += float(np.dot(mesh.weights[s:s + CHUNK], dens[s:s + CHUNK]))
    return float(F.coefficient) * F.orientation * acc


def pair(terms, F: LoopFamily, resolution: int = 24, cells_per_piece: int = 48) -> PairingResult:
    """Pair a linear combination of iterated integrals with the cycle F.

    ``terms`` is a list of (coefficient, [FormSpec, ...]) or a bare list of
    forms. The error estimate compares against the half-resolution value
    (midpoint rules are second order).
    """
    terms = _normalize_terms(terms)
    for _, forms in terms:
        k = _check_forms(forms, F)
        if k != F.dim:
            raise DegreeMismatch(f"iterated integral has degree {k}, cycle has dimension {F.dim}")
    fine = _pair_once(terms, F, resolution, cells_per_piece)
    coarse = _pair_once(terms, F, max(1, resolution // 2), max(1, cells_per_piece // 2))
    return PairingResult(fine, abs(fine - coarse) / 3.0, resolution, cells_per_piece, coarse)


def degree_via_loops(f: MapSpec, resolution: int = 24, cells_per_piece: int = 48) -> PairingResult:
    """Degree of f: S^n -> S^n as the pairing of ∫ω with the desuspension of f."""
    if f.source_dim != f.target_dim:
        raise DimensionMismatch("degree needs a self-map of a sphere")
    n = f.source_dim
    if n < 2:
        raise ValueError("need n >= 2")
    return pair([FormSpec.volume(n)], desuspend(f, Sweepout(n)), resolution, cells_per_piece)


def hopf_via_loops(f: MapSpec, resolution: int = 24, cells_per_piece: int = 48) -> PairingResult:
    """Hopf invariant of f: S^{2n-1} -> S^n as the pairing of ∫ωω with its desuspension."""
    n = f.target_dim
    if n < 2 or n % 2:
        raise ValueError("Hopf invariant needs an even target dimension n >= 2")
    if f.source_dim != 2 * n - 1:
        raise DimensionMismatch(f"source must be S^{2 * n - 1}")
    w = FormSpec.volume(n)
    return pair([w, w], desuspend(f, Sweepout(2 * n - 1)), resolution, cells_per_piece)


# ---------------------------------------------------------------------------
# norm bounds


@dataclass
class BoundReport:
    r: int
    k: int
    samples: int
    length: float
    norm_product: float
    dilation: float
    rhs: float
    lhs_max: float
    max_ratio: float
    slack: float
    passed: bool
    worst_frame: Optional[list] = None

    def to_dict(self):
        return asdict(self)


def _stacked_dilation(du: np.ndarray, r: int, k: int) -> float:
    """max over ordered node tuples of the product of the top-k singular values
    of the stacked differential u -> (F(u, t_1), ..., F(u, t_r))."""
    D = du.shape[1]
    if k == 0:
        return 1.0
    if k > D:
        return 0.0
    G = np.einsum("tdn,ten->tde", du, du)  # per-node Gram matrices
    T = len(G)
    best = 0.0
    if r == 1:
        ev = np.linalg.eigvalsh(G)
        return float(np.max(np.sqrt(np.prod(np.clip(ev[:, -k:], 0, None), axis=1))))
    import itertools

    # iterate over the first r-1 indices, vectorize the last
    for head in itertools.combinations_with_replacement(range(T), r - 1):
        base = sum(G[i] for i in head)
        tail = G[head[-1]:]
        ev = np.linalg.eigvalsh(base[None] + tail)
        best = max(best, float(np.max(np.sqrt(np.prod(np.clip(ev[:, -k:], 0, None), axis=1)))))
    return best


def check_length_bound(
    forms: Sequence[FormSpec],
    F: LoopFamily,
    u0,
    samples: int = 200,
    seed: int = 0,
    slack: float = 1e-9,
    cells_per_piece: int = 8,
    gamma=None,
    raise_on_violation: bool = True,
) -> BoundReport:
    """Sampled check of the iterated-integral length bound at the slice F(u0).

    For random unit domain vectors v_1..v_k compares |∫ω_1...ω_r (F_*v)| with
    (1/r!) Length^r prod ||ω_i|| Dil_k, where Length and Dil_k are taken on
    the same time nodes as the quadrature, so the inequality is exact for the
    discrete sums (up to rounding) and ``slack`` only absorbs rounding.
    """
    k = _check_forms(forms, F)
    r = len(forms)
    mesh = F.domain.mesh_at(u0)
    if gamma is not None:
        sl = _slice_as_loop(F, u0)
        if sl is not None and loop_space_distance(sl, gamma) > 1e-9:
            raise ValueError("gamma is not the slice of F at u0")
    t, h = time_grid(F.breakpoints, cells_per_piece)
    P, du, dt = F.jet(mesh, t)
    length = float(np.sum(h * np.linalg.norm(dt[0], axis=-1)))
    norms = math.prod(w.sup_norm for w in forms)
    dil = _stacked_dilation(du[0], r, k)
    rhs = length**r / math.factorial(r) * norms * dil
    rng = np.random.default_rng(seed)
    lhs_max, worst, max_ratio = 0.0, None, 0.0
    for _ in range(samples):
        v = rng.normal(size=(k, F.dim))
        if k:
            v /= np.linalg.norm(v, axis=1, keepdims=True)
        val = abs(float(_density(forms, F, mesh, v, t, h)[0]))
        if val > lhs_max:
            lhs_max, worst = val, v.tolist()
        ratio = val / rhs if rhs > 0 else (0.0 if val == 0 else math.inf)
        max_ratio = max(max_ratio, ratio)
    passed = max_ratio <= 1 + slack
    rep = BoundReport(r, k, samples, length, norms, dil, rhs, lhs_max, max_ratio, slack, passed, worst)
    if not passed and raise_on_violation:
        raise BoundViolated("length bound violated", worst, max_ratio)
    return rep


def _slice_as_loop(F: LoopFamily, u0):
    inner, L = F, 1
    while isinstance(inner, ConcatPower):
        L *= inner.L
        inner = inner.inner
    if isinstance(inner, Sweepout):
        from .geometry import concat_power

        return concat_power(inner.slice_loop(u0), L)
    return None


# ---------------------------------------------------------------------------
# integration against a volume estimate


@dataclass
class VolumeBoundReport:
    pairing: float
    volume_estimate: float
    max_sampled_norm: float
    rhs: float
    passed: bool

    def to_dict(self):
        return asdict(self)


def volume_bound_check(terms, F: LoopFamily, resolution: int = 24, cells_per_piece: int = 48, slack: float = 1e-9):
    """|<β, F>| <= volume_estimate(F) * max over slices of the sampled plot
    norm |β(∂u)| / prod_j sup_t |∂F/∂u_j|, all on one mesh."""
    terms = _normalize_terms(terms)
    mesh = F.domain.mesh(resolution)
    dens = _pair_densities(terms, F, mesh, cells_per_piece)
    D = sup_dilations(F, mesh, cells_per_piece)
    c = abs(float(F.coefficient))
    value = c * float(np.dot(mesh.weights, dens))
    vol = c * float(np.sum(mesh.weights * D))
    with np.errstate(divide="ignore", invalid="ignore"):
        norms = np.where(D > 0, np.abs(dens) / np.where(D > 0, D, 1), 0.0)
    mx = float(np.max(norms)) if len(norms) else 0.0
    rhs = vol * mx
    return VolumeBoundReport(abs(value), vol, mx, rhs, abs(value) <= rhs * (1 + slack) + 1e-300)


# ---------------------------------------------------------------------------
# pullback norms


@dataclass
class PullbackReport:
    map_name: str
    lipschitz: float
    samples: int
    max_ratio: float
    extra_ratios: List[float] = field(default_factory=list)
    passed: bool = True

    def to_dict(self):
        return asdict(self)


def lipschitz_pullback_check(f: MapSpec, alpha: FormSpec, samples: int = 500, seed: int = 0, slack: float = 1e-9,
                             extra_points=None, raise_on_violation: bool = True) -> PullbackReport:
    """|f^*α(x)(e_1..e_m)| <= Lip(f)^m ||α|| on random points and orthonormal frames."""
    if alpha.n != f.target_dim:
        raise TargetMismatch("form must live on the target sphere")
    m = alpha.degree
    if m > f.source_dim:
        return PullbackReport(f.name, f.lipschitz, samples, 0.0, [], True)
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(samples, f.source_dim + 1))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    rhs = f.lipschitz**m * alpha.sup_norm

    def ratios(points, frames):
        J = f.jacobian(points)
        img = np.einsum("pab,pkb->pka", J, frames)
        val = np.abs(alpha.evaluate(f.apply(points), img))
        if rhs == 0:
            return np.where(val == 0, 0.0, np.inf)
        return val / rhs

    basis = tangent_basis(x)
    coeff = rng.normal(size=(samples, f.source_dim, f.source_dim))
    q, _ = np.linalg.qr(coeff)
    frames = np.einsum("pij,pin->pjn", q[:, :, :m], basis)
    max_ratio = float(np.max(ratios(x, frames)))
    extra = []
    if extra_points is not None:
        ep = np.atleast_2d(np.asarray(extra_points, float))
        eb = tangent_basis(ep)[:, :m, :]
        extra = [float(r) for r in ratios(ep, eb)]
        max_ratio = max([max_ratio] + extra)
    passed = max_ratio <= 1 + slack
    if not passed and raise_on_violation:
        raise BoundViolated(f"pullback bound violated for {f.name}", None, max_ratio)
    return PullbackReport(f.name, f.lipschitz, samples, max_ratio, extra, passed)


# ---------------------------------------------------------------------------
# sharpness scans


@dataclass
class ScanRow:
    experiment: str
    L: int
    value: float
    error_estimate: float
    suplength: float
    volume_estimate: float

    def to_dict(self):
        return asdict(self)


def scan_family(mode: str, L: int) -> Tuple[List[FormSpec], LoopFamily]:
    w = FormSpec.volume(2)
    xi = Sweepout(2)
    if mode == "degree":
        return [w], concat_power_family(xi, L)
    if mode == "hopf":
        p = concat_power_family(xi, L)
        return [w, w], pontryagin_product(p, p)
    raise ValueError(f"unknown scan mode {mode!r}")


def sharpness_scan(L_values: Sequence[int], mode: str = "degree", resolution: int = 16,
                   cells_per_piece: int = 24) -> List[ScanRow]:
    """Pairings of {L}ξ (degree) or {L}ξ·{L}ξ (hopf) on S^2 for each L."""
    rows = []
    for L in L_values:
        if L < 1:
            raise ValueError("L must be >= 1")
        forms, F = scan_family(mode, L)
        res = pair(forms, F, resolution, cells_per_piece)
        rows.append(ScanRow(mode, int(L), res.value, res.error_estimate,
                            suplength(F, resolution, cells_per_piece), volume_estimate(F, resolution, cells_per_piece)))
    return rows
