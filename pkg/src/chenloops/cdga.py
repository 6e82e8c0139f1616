"""Finite graded-commutative differential algebras over Q.

An algebra is a finite basis of positive-degree elements (the unit is
implicit), a structure-constant table and a differential matrix. Products
that would land above ``degree_cap`` are zero. Every axiom is checked when
the algebra is built, so a ``FiniteCdga`` in hand is always valid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import AlgebraInvalid, DegreeOutOfRange, MixedAlgebras

UNIT = "1"

Combination = Dict[int, Fraction]  # basis index -> coefficient


def _add_into(acc: Combination, other: Mapping[int, Fraction], scale=1) -> None:
    for k, v in other.items():
        s = acc.get(k, 0) + scale * v
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


@dataclass(frozen=True)
class FiniteCdga:
    degree_cap: int
    labels: Tuple[str, ...]
    degrees: Tuple[int, ...]
    # (i, j) -> {k: c}; mirror entries are present, zero products absent
    mult: Mapping[Tuple[int, int], Mapping[int, Fraction]]
    diff: Mapping[int, Mapping[int, Fraction]]
    name: str = ""
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {lab: i for i, lab in enumerate(self.labels)})

    def __len__(self):
        return len(self.labels)

    def degree(self, i: int) -> int:
        return self.degrees[i]

    def product(self, i: int, j: int) -> Mapping[int, Fraction]:
        return self.mult.get((i, j), {})

    def d(self, i: int) -> Mapping[int, Fraction]:
        return self.diff.get(i, {})

    def element(self, coeffs: Union[str, Mapping[str, object]]) -> "Element":
        if isinstance(coeffs, str):
            coeffs = {coeffs: 1}
        return Element(self, coeffs)

    def unit(self) -> "Element":
        return Element(self, {UNIT: 1})

    def basis_of_degree(self, d: int) -> List[str]:
        return basis_of_degree(self, d)

    def has_degree_one(self) -> bool:
        return any(deg == 1 for deg in self.degrees)


class Element:
    """Rational combination of basis labels (``"1"`` is the unit)."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: FiniteCdga, coeffs: Mapping[str, object]):
        self.algebra = algebra
        clean = {}
        for lab, c in coeffs.items():
            if lab != UNIT and lab not in algebra.index:
                raise KeyError(f"unknown basis label {lab!r}")
            c = Fraction(c)
            if c:
                clean[lab] = c
        self.coeffs: Dict[str, Fraction] = clean

    def _deg(self, lab):
        return 0 if lab == UNIT else self.algebra.degrees[self.algebra.index[lab]]

    @property
    def degree(self) -> Union[int, str, None]:
        """Homogeneous degree, ``"mixed"``, or ``None`` for the zero element."""
        degs = {self._deg(lab) for lab in self.coeffs}
        if not degs:
            return None
        if len(degs) == 1:
            return degs.pop()
        return "mixed"

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other):
        if not isinstance(other, Element):
            raise TypeError(f"expected Element, got {type(other).__name__}")
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise MixedAlgebras("elements belong to different algebras")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return Element(self.algebra, out)

    def __neg__(self):
        return Element(self.algebra, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        return Element(self.algebra, {k: Fraction(scalar) * v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        return self.__rmul__(other)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra == other.algebra and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __repr__(self):
        return f"Element({format_combination(self.coeffs)})"


def format_combination(coeffs: Mapping[str, Fraction]) -> str:
    if not coeffs:
        return "0"
    parts = []
    for lab, c in coeffs.items():
        if c == 1:
            term = lab
        elif c == -1:
            term = "-" + lab
        else:
            term = f"{c}*{lab}"
        if parts:
            term = ("- " + term[1:]) if term.startswith("-") else "+ " + term
        parts.append(term)
    return " ".join(parts)


def _as_indexed(x: Element) -> Tuple[Fraction, Combination]:
    A = x.algebra
    unit = x.coeffs.get(UNIT, Fraction(0))
    return unit, {A.index[k]: v for k, v in x.coeffs.items() if k != UNIT}


def _from_indexed(A: FiniteCdga, unit, comb: Mapping[int, Fraction]) -> Element:
    coeffs = {}
    if unit:
        coeffs[UNIT] = unit
    for k, v in comb.items():
        coeffs[A.labels[k]] = v
    return Element(A, coeffs)


def _mul_indexed(A: FiniteCdga, ua, ca: Combination, ub, cb: Combination):
    unit = ua * ub
    out: Combination = {}
    if ua:
        _add_into(out, cb, ua)
    if ub:
        _add_into(out, ca, ub)
    for i, x in ca.items():
        for j, y in cb.items():
            tab = A.mult.get((i, j))
            if tab:
                _add_into(out, tab, x * y)
    return unit, out


def multiply(a: Element, b: Element) -> Element:
    a._check(b)
    A = a.algebra
    ua, ca = _as_indexed(a)
    ub, cb = _as_indexed(b)
    unit, out = _mul_indexed(A, ua, ca, ub, cb)
    return _from_indexed(A, unit, out)


def differential(a: Element) -> Element:
    A = a.algebra
    _, ca = _as_indexed(a)
    out: Combination = {}
    for i, x in ca.items():
        _add_into(out, A.diff.get(i, {}), x)
    return _from_indexed(A, 0, out)


def basis_of_degree(A: FiniteCdga, d: int) -> List[str]:
    if not 0 <= d <= A.degree_cap:
        raise DegreeOutOfRange(f"degree {d} outside [0, {A.degree_cap}]")
    if d == 0:
        return [UNIT]
    return [lab for lab, deg in zip(A.labels, A.degrees) if deg == d]


# ---------------------------------------------------------------------------
# construction + validation


def make_algebra(
    degree_cap: int,
    generators: Sequence[Tuple[str, int]],
    products: Mapping[Tuple[str, str], Mapping[str, object]],
    differentials: Mapping[str, Mapping[str, object]],
    name: str = "",
) -> FiniteCdga:
    """Assemble and eagerly validate an algebra from label-level data.

    ``products`` may list either or both orderings of a pair; the missing
    mirror is filled in with the Koszul sign. Raises ``AlgebraInvalid`` naming
    the first violated axiom.
    """
    if not isinstance(degree_cap, int) or degree_cap < 1:
        raise AlgebraInvalid("degree_cap must be an integer >= 1", str(degree_cap))
    labels = []
    degrees = []
    for lab, deg in generators:
        if lab == UNIT:
            raise AlgebraInvalid("the unit is implicit", lab)
        if lab in labels:
            raise AlgebraInvalid("duplicate label", lab)
        if not isinstance(deg, int) or not 1 <= deg <= degree_cap:
            raise AlgebraInvalid("degree out of range [1, degree_cap]", lab)
        labels.append(lab)
        degrees.append(deg)
    index = {lab: i for i, lab in enumerate(labels)}

    def lookup(lab, where):
        if lab not in index:
            raise AlgebraInvalid("unknown label", f"{lab} in {where}")
        return index[lab]

    def to_comb(raw, where, target_deg):
        comb: Combination = {}
        for lab, c in raw.items():
            k = lookup(lab, where)
            c = Fraction(c)
            if not c:
                continue
            if degrees[k] != target_deg:
                raise AlgebraInvalid("degree mismatch", f"{lab} in {where}")
            comb[k] = comb.get(k, 0) + c
        return {k: v for k, v in comb.items() if v}

    mult: Dict[Tuple[int, int], Combination] = {}
    for (la, lb), raw in products.items():
        i, j = lookup(la, f"{la}*{lb}"), lookup(lb, f"{la}*{lb}")
        target = degrees[i] + degrees[j]
        where = f"{la}*{lb}"
        if target > degree_cap:
            if any(Fraction(c) for c in raw.values()):
                raise AlgebraInvalid("product exceeds degree cap but is nonzero", where)
            continue
        comb = to_comb(raw, where, target)
        sign = _sign(degrees[i] * degrees[j])
        mirror = {k: sign * v for k, v in comb.items()}
        for key, val in (((i, j), comb), ((j, i), mirror)):
            if key in mult and mult[key] != val:
                raise AlgebraInvalid("graded commutativity", f"{labels[key[0]]}*{labels[key[1]]}")
        if i == j and comb != mirror:
            raise AlgebraInvalid("graded commutativity", where)
        if comb:
            mult[(i, j)] = comb
            mult[(j, i)] = mirror
        else:
            mult.setdefault((i, j), {})
            mult.setdefault((j, i), {})
    mult = {k: v for k, v in mult.items() if v}

    diff: Dict[int, Combination] = {}
    for lab, raw in differentials.items():
        i = lookup(lab, f"d({lab})")
        target = degrees[i] + 1
        if target > degree_cap:
            if any(Fraction(c) for c in raw.values()):
                raise AlgebraInvalid("differential exceeds degree cap but is nonzero", lab)
            continue
        comb = to_comb(raw, f"d({lab})", target)
        if comb:
            diff[i] = comb

    A = FiniteCdga(degree_cap, tuple(labels), tuple(degrees), mult, diff, name)
    validate(A)
    return A


def validate(A: FiniteCdga) -> None:
    n = len(A)
    deg = A.degrees
    # graded commutativity (the constructor already mirrors, this is a guard)
    for i, j in iproduct(range(n), repeat=2):
        lhs = dict(A.product(i, j))
        rhs = {k: _sign(deg[i] * deg[j]) * v for k, v in A.product(j, i).items()}
        if lhs != rhs:
            raise AlgebraInvalid("graded commutativity", f"{A.labels[i]}*{A.labels[j]}")
    # associativity
    for i, j, k in iproduct(range(n), repeat=3):
        if deg[i] + deg[j] + deg[k] > A.degree_cap:
            continue
        left: Combination = {}
        for m, c in A.product(i, j).items():
            _add_into(left, A.product(m, k), c)
        right: Combination = {}
        for m, c in A.product(j, k).items():
            _add_into(right, A.product(i, m), c)
        if left != right:
            raise AlgebraInvalid("associativity", f"({A.labels[i]},{A.labels[j]},{A.labels[k]})")
    # d^2 = 0
    for i in range(n):
        dd: Combination = {}
        for m, c in A.d(i).items():
            _add_into(dd, A.d(m), c)
        if dd:
            raise AlgebraInvalid("d²≠0", A.labels[i])
    # Leibniz: d(ab) = (da)b + (-1)^{|a|} a(db)
    for i, j in iproduct(range(n), repeat=2):
        if deg[i] + deg[j] + 1 > A.degree_cap:
            continue
        lhs: Combination = {}
        for m, c in A.product(i, j).items():
            _add_into(lhs, A.d(m), c)
        rhs: Combination = {}
        for m, c in A.d(i).items():
            _add_into(rhs, A.product(m, j), c)
        s = _sign(deg[i])
        for m, c in A.d(j).items():
            _add_into(rhs, A.product(i, m), s * c)
        if lhs != rhs:
            raise AlgebraInvalid("Leibniz", f"{A.labels[i]}*{A.labels[j]}")
