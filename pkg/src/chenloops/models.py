"""Catalog of small model algebras used throughout the tests and the CLI."""
from __future__ import annotations

from importlib import resources

from .cdga import FiniteCdga, make_algebra
from .specfile import parse_algebra


def data_path(name: str):
    return resources.files("chenloops") / "data" / name


def sphere_model(n: int) -> FiniteCdga:
    """H*(S^n): one class ω in degree n, ω² = 0, d = 0."""
    if n < 1:
        raise ValueError("sphere dimension must be >= 1")
    return make_algebra(n, [("ω", n)], {}, {}, name=f"S^{n}")


def cpn_model(n: int) -> FiniteCdga:
    """H*(CP^n) = Q[ω]/ω^{n+1} with |ω| = 2 and zero differential."""
    if n < 1:
        raise ValueError("CP^n needs n >= 1")
    labels = ["ω"] + [f"ω^{k}" for k in range(2, n + 1)]
    gens = [(lab, 2 * (k + 1)) for k, lab in enumerate(labels)]
    products = {}
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            if i + j <= n:
                products[(labels[i - 1], labels[j - 1])] = {labels[i + j - 1]: 1}
    return make_algebra(2 * n, gens, products, {}, name=f"CP^{n}")


def two_sphere_cells() -> FiniteCdga:
    return parse_algebra(data_path("two_sphere_cells.toml").read_text(encoding="utf-8"))


def two_sphere_cells_degree9_words():
    text = data_path("two_sphere_cells_degree9_words.txt").read_text(encoding="utf-8")
    return [tuple(line.split("|")) for line in text.splitlines() if line.strip() and not line.startswith("#")]
