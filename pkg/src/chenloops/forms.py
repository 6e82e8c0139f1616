"""Differential forms on round spheres and quadrature rules on the ordered simplex."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np


def sphere_volume(n: int) -> float:
    return 2 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


@dataclass(frozen=True)
class FormSpec:
    """A constant multiple of the normalized volume form of S^n (integral 1),
    or the zero form of some degree (what a wedge above top degree becomes).

    ``evaluate`` takes base points (..., n+1) and tangent vectors
    (..., degree, n+1) and returns c * det[p, w_1, ..., w_n] / Vol(S^n).
    """

    n: int
    degree: int
    scale: float = 1.0
    kind: str = "volume"

    @classmethod
    def volume(cls, n: int) -> "FormSpec":
        if n < 1:
            raise ValueError("sphere dimension must be >= 1")
        return cls(n, n, 1.0, "volume")

    @classmethod
    def zero(cls, n: int, degree: int) -> "FormSpec":
        return cls(n, degree, 0.0, "zero")

    def scaled(self, c: float) -> "FormSpec":
        return FormSpec(self.n, self.degree, self.scale * c, self.kind)

    def wedge(self, other: "FormSpec") -> "FormSpec":
        if other.n != self.n:
            raise ValueError("forms live on different spheres")
        deg = self.degree + other.degree
        if deg > self.n or self.kind == "zero" or other.kind == "zero":
            return FormSpec.zero(self.n, deg)
        raise ValueError("wedge of two positive-degree volume forms exceeds the top degree")

    @property
    def sup_norm(self) -> float:
        """Comass; exact for this catalog."""
        if self.kind == "zero":
            return 0.0
        return abs(self.scale) / sphere_volume(self.n)

    def evaluate(self, points, vectors):
        points = np.asarray(points)
        if self.kind == "zero":
            return np.zeros(points.shape[:-1])
        mat = np.concatenate([points[..., None, :], np.asarray(vectors)], axis=-2)
        return self.scale / sphere_volume(self.n) * np.linalg.det(mat)

    def to_dict(self):
        return {"n": self.n, "degree": self.degree, "scale": self.scale, "kind": self.kind}


@dataclass(frozen=True)
class QuadratureRule:
    """Explicit nodes and weights on {0 <= t_1 <= ... <= t_r <= 1}."""

    r: int
    nodes: np.ndarray  # (K, r)
    weights: np.ndarray  # (K,)
    order: int
    method: str

    def integrate(self, func) -> float:
        return float(np.dot(self.weights, func(self.nodes)))


def simplex_rule(r: int, cells: int, breakpoints=(0.0, 1.0)) -> QuadratureRule:
    """Composite midpoint rule on the ordered grid.

    Tuples of cell midpoints with non-decreasing indices; a run of m equal
    indices in a cell of width h carries h^m / m!, so the weights sum to
    exactly 1/r!. The grid is aligned to ``breakpoints``.
    """
    from .geometry import time_grid

    t, h = time_grid(breakpoints, cells)
    nodes, weights = [], []
    for idx in itertools.combinations_with_replacement(range(len(t)), r):
        w = 1.0
        for g, grp in itertools.groupby(idx):
            m = len(list(grp))
            w *= h[g] ** m / math.factorial(m)
        nodes.append(t[list(idx)])
        weights.append(w)
    return QuadratureRule(r, np.array(nodes).reshape(-1, r), np.array(weights), 2, "ordered-grid")


def monte_carlo_rule(r: int, samples: int, seed: int = 0) -> QuadratureRule:
    """Sorted uniform samples; equal weights 1/(r! samples)."""
    rng = np.random.default_rng(seed)
    nodes = np.sort(rng.uniform(size=(samples, r)), axis=1)
    return QuadratureRule(r, nodes, np.full(samples, 1 / (math.factorial(r) * samples)), 0, "monte-carlo")


def default_rule(r: int, cells: int, seed: Optional[int] = 0, max_nodes: int = 200_000) -> QuadratureRule:
    """Ordered-grid rule when it is small enough, else Monte Carlo."""
    count = math.comb(cells + r - 1, r)
    if r >= 4 and count > max_nodes:
        return monte_carlo_rule(r, max_nodes, seed or 0)
    return simplex_rule(r, cells)


def block_assignments(k: int, sizes: Tuple[int, ...]):
    """Ordered partitions of k domain vectors into blocks of the given sizes.

    Yields ``(sign, blocks)``: listing block 1, time 1, block 2, time 2, ...
    is a permutation of (v_1, ..., v_k, dt_1, ..., dt_r) with that sign.
    """
    if sum(sizes) != k:
        raise ValueError("block sizes must add up to the number of vectors")
    r = len(sizes)

    def rec(remaining, i):
        if i == r:
            yield []
            return
        for chosen in itertools.combinations(remaining, sizes[i]):
            rest = [x for x in remaining if x not in chosen]
            for tail in rec(rest, i + 1):
                yield [chosen] + tail

    for blocks in rec(list(range(k)), 0):
        seq = []
        for i, b in enumerate(blocks):
            seq.extend(b)
            seq.append(k + i)
        inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
        yield (-1) ** inv, tuple(blocks)
