"""Pure numpy versions of the compiled kernels (same signatures)."""
from __future__ import annotations

import numpy as np


def iterated_sum(factors, widths):
    """Ordered-simplex sum of products, one value per mesh row.

    ``factors`` has shape (M, T, r): factor j evaluated at time node i.
    Returns sum over i_1 <= ... <= i_r of prod_j f_j(i_j) times the cell
    weight, where a run of m coincident indices in a cell of width h gets
    h^m / m!. Runs in O(M T r^2) with a prefix recursion.
    """
    f = np.asarray(factors, dtype=np.float64)
    h = np.asarray(widths, dtype=np.float64)
    M, T, r = f.shape
    P = np.zeros((M, r + 1))
    P[:, 0] = 1.0
    for i in range(T):
        fi = f[:, i, :]
        for k in range(r, 0, -1):
            acc = P[:, k].copy()
            prod = np.ones(M)
            for m in range(1, k + 1):
                prod = prod * fi[:, k - m] * (h[i] / m)
                acc += P[:, k - m] * prod
            P[:, k] = acc
    return P[:, r]


def _unit(v):
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / np.where(n < 1e-300, 1.0, n), n[..., 0] < 1e-300


def polygon_linking(A, B):
    """Exact linking number of two closed polygons in R^3.

    Vertices are rows; the last vertex connects back to the first. Sums the
    signed solid angles subtended by every segment pair.
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    p1, p2 = A[:, None, :], np.roll(A, -1, axis=0)[:, None, :]
    p3, p4 = B[None, :, :], np.roll(B, -1, axis=0)[None, :, :]
    r13, r14, r23, r24 = p3 - p1, p4 - p1, p3 - p2, p4 - p2
    ns, bad = zip(*[_unit(np.cross(a, b)) for a, b in ((r13, r14), (r14, r24), (r24, r23), (r23, r13))])
    omega = sum(
        np.arcsin(np.clip(np.sum(ns[q] * ns[(q + 1) % 4], axis=-1), -1.0, 1.0)) for q in range(4)
    )
    s = np.sum(np.cross(p4 - p3, p2 - p1) * r13, axis=-1)
    omega = np.where(np.any(np.stack(bad), axis=0), 0.0, omega * np.sign(s))
    return float(np.sum(omega) / (4 * np.pi))
