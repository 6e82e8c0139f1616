"""The bar construction B(A) on a finite CDGA.

Words ``a_1|...|a_r`` over the positive-degree basis have bar degree
``sum(deg a_i) - r``. The differential is

    d(a_1|...|a_r) = - sum_i (-1)^{n_i} a_1|...|da_i|...|a_r
                     + sum_{i>=2} (-1)^{n_i} a_1|...|a_{i-1}a_i|...|a_r

with ``n_i = sum_{j<i} (deg a_j - 1)``. The ``"inclusive"`` convention is the
formula above; ``"shifted"`` signs the merge term by ``n_{i-1}`` instead and
is kept only so the d² = 0 check can tell the two apart.

Cohomology is computed exactly from kernel and image of the differential
matrices between consecutive bar degrees, with every word length capped at
``max_length`` (the length filtration is a subcomplex, so the cap is safe).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .cdga import FiniteCdga
from .errors import CapTooSmall, DimensionMismatch, NoClassFound
from .linalg import RationalMatrix, in_span, kernel_basis, rank, rank_of_vectors

IndexWord = Tuple[int, ...]

CONVENTIONS = ("inclusive", "shifted")


@dataclass(frozen=True)
class BarWord:
    letters: Tuple[str, ...]
    bar_degree: int

    @classmethod
    def of(cls, A: FiniteCdga, letters: Sequence[str]) -> "BarWord":
        letters = tuple(letters)
        deg = 0
        for lab in letters:
            if lab not in A.index:
                raise KeyError(f"unknown letter {lab!r}")
            deg += A.degrees[A.index[lab]] - 1
        return cls(letters, deg)

    @property
    def length(self) -> int:
        return len(self.letters)

    def __str__(self):
        return "|".join(self.letters) if self.letters else "[]"


class BarElement:
    """Rational combination of bar words of one bar degree."""

    __slots__ = ("algebra", "terms", "degree")

    def __init__(self, A: FiniteCdga, terms: Mapping[Tuple[str, ...], object], degree: Optional[int] = None):
        self.algebra = A
        clean: Dict[Tuple[str, ...], Fraction] = {}
        degs = set()
        for w, c in terms.items():
            c = Fraction(c)
            if not c:
                continue
            w = tuple(w)
            clean[w] = clean.get(w, Fraction(0)) + c
            degs.add(BarWord.of(A, w).bar_degree)
        self.terms = {w: c for w, c in clean.items() if c}
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous bar element (degrees {sorted(degs)})")
        self.degree = degs.pop() if degs else degree

    @classmethod
    def word(cls, A: FiniteCdga, letters: Sequence[str]) -> "BarElement":
        return cls(A, {tuple(letters): 1})

    @property
    def length(self) -> int:
        """Largest word length present (the filtration level)."""
        return max((len(w) for w in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, BarElement):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return BarElement(self.algebra, out, self.degree)

    def __rmul__(self, s):
        return BarElement(self.algebra, {w: Fraction(s) * c for w, c in self.terms.items()}, self.degree)

    def __neg__(self):
        return (-1) * self

    def __sub__(self, other):
        return self + (-other)

    def to_text(self, style: str = "bar") -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (w, c) in enumerate(self.terms.items()):
            body = ("∫" + " ".join(w)) if style == "integral" else ("|" + "|".join(w) + "|")
            if not w:
                body = "1"
            mag = abs(c)
            term = body if mag == 1 else f"{mag}·{body}"
            if i == 0:
                parts.append(term if c > 0 else "-" + term)
            else:
                parts.append(("+ " if c > 0 else "- ") + term)
        return " ".join(parts)

    def to_dict(self):
        return {
            "degree": self.degree,
            "terms": [{"word": list(w), "coefficient": str(c)} for w, c in self.terms.items()],
        }

    def __repr__(self):
        return f"BarElement({self.to_text()})"


class BarComplex:
    """Enumeration and differential for B(A), cached per algebra."""

    def __init__(self, A: FiniteCdga, convention: str = "inclusive"):
        if convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")
        self.A = A
        self.convention = convention
        self._shift = tuple(d - 1 for d in A.degrees)
        self._words_cache: Dict[Tuple[int, int], List[IndexWord]] = {}
        self._d_cache: Dict[IndexWord, Dict[IndexWord, Fraction]] = {}

    # -- enumeration -----------------------------------------------------
    def default_max_length(self, degree: int) -> int:
        if self.A.has_degree_one():
            raise CapTooSmall("algebra has degree-1 letters; an explicit max_length is required")
        # every letter contributes at least 1 to the bar degree
        return max(degree, 0)

    def index_words(self, degree: int, max_length: int) -> List[IndexWord]:
        key = (degree, max_length)
        hit = self._words_cache.get(key)
        if hit is not None:
            return hit
        out: List[IndexWord] = []
        if degree >= 0:
            n = len(self.A)
            shift = self._shift
            min_shift = min(shift) if shift else 0
            for r in range(0, max_length + 1):
                if r == 0:
                    if degree == 0:
                        out.append(())
                    continue
                if min_shift * r > degree:
                    break

                def rec(prefix, remaining, left):
                    if left == 0:
                        if remaining == 0:
                            out.append(tuple(prefix))
                        return
                    for i in range(n):
                        s = shift[i]
                        if s > remaining or s + min_shift * (left - 1) > remaining:
                            continue
                        prefix.append(i)
                        rec(prefix, remaining - s, left - 1)
                        prefix.pop()

                rec([], degree, r)
        self._words_cache[key] = out
        return out

    def words(self, degree: int, max_length: Optional[int] = None) -> List[BarWord]:
        if max_length is None:
            max_length = self.default_max_length(degree)
        return [self.to_word(w) for w in self.index_words(degree, max_length)]

    def to_word(self, w: IndexWord) -> BarWord:
        return BarWord(tuple(self.A.labels[i] for i in w), sum(self._shift[i] for i in w))

    def to_index(self, letters: Sequence[str]) -> IndexWord:
        return tuple(self.A.index[lab] for lab in letters)

    # -- differential ----------------------------------------------------
    def d_index(self, w: IndexWord) -> Dict[IndexWord, Fraction]:
        hit = self._d_cache.get(w)
        if hit is not None:
            return hit
        A = self.A
        out: Dict[IndexWord, Fraction] = {}

        def add(word, c):
            s = out.get(word, 0) + c
            if s:
                out[word] = s
            else:
                out.pop(word, None)

        r = len(w)
        n_prefix = [0] * (r + 1)  # n_prefix[i] = sum_{j<i} (deg a_j - 1), 0-based i
        for i in range(r):
            n_prefix[i + 1] = n_prefix[i] + self._shift[w[i]]
        for i in range(r):
            sign = -1 if n_prefix[i] % 2 == 0 else 1
            for k, c in A.d(w[i]).items():
                add(w[:i] + (k,) + w[i + 1:], sign * c)
        for i in range(1, r):
            # merge a_{i-1} a_i (0-based); inclusive sign uses n_i, which includes a_{i-1}
            e = n_prefix[i] if self.convention == "inclusive" else n_prefix[i - 1]
            sign = -1 if e % 2 else 1
            for k, c in A.product(w[i - 1], w[i]).items():
                add(w[: i - 1] + (k,) + w[i + 1:], sign * c)
        self._d_cache[w] = out
        return out

    def differential(self, x) -> BarElement:
        """Bar differential of a ``BarWord``, letter tuple or ``BarElement``."""
        if isinstance(x, BarElement):
            terms = x.terms
        elif isinstance(x, BarWord):
            terms = {x.letters: Fraction(1)}
        else:
            terms = {tuple(x): Fraction(1)}
        out: Dict[IndexWord, Fraction] = {}
        deg = None
        for letters, c in terms.items():
            iw = self.to_index(letters)
            deg = sum(self._shift[i] for i in iw) + 1
            for k, v in self.d_index(iw).items():
                s = out.get(k, 0) + c * v
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return BarElement(self.A, {tuple(self.A.labels[i] for i in k): v for k, v in out.items()}, deg)

    def matrix(self, source: Sequence[IndexWord], target: Sequence[IndexWord]) -> RationalMatrix:
        tindex = {w: i for i, w in enumerate(target)}
        M = RationalMatrix(len(target), len(source))
        for j, w in enumerate(source):
            for k, c in self.d_index(w).items():
                try:
                    M[tindex[k], j] = c
                except KeyError:
                    raise DimensionMismatch(f"d({w}) leaves the target basis") from None
        return M

    def d_squared_violations(self, degree: int, max_length: int) -> List[IndexWord]:
        bad = []
        for w in self.index_words(degree, max_length):
            acc: Dict[IndexWord, Fraction] = {}
            for k, c in self.d_index(w).items():
                for k2, c2 in self.d_index(k).items():
                    s = acc.get(k2, 0) + c * c2
                    if s:
                        acc[k2] = s
                    else:
                        acc.pop(k2, None)
            if acc:
                bad.append(w)
        return bad


_complexes: Dict[Tuple[int, str], BarComplex] = {}


def complex_for(A: FiniteCdga, convention: str = "inclusive") -> BarComplex:
    key = (id(A), convention)
    cx = _complexes.get(key)
    if cx is None or cx.A is not A:
        cx = _complexes[key] = BarComplex(A, convention)
    return cx


def bar_basis(A: FiniteCdga, degree: int, max_length: Optional[int] = None) -> List[BarWord]:
    if degree < 0:
        raise ValueError("bar degree must be >= 0")
    if max_length is not None and max_length < 0:
        raise ValueError("max_length must be >= 0")
    return complex_for(A).words(degree, max_length)


def bar_differential(A: FiniteCdga, w) -> BarElement:
    return complex_for(A).differential(w)


# ---------------------------------------------------------------------------
# cohomology


def _primitive(v: Sequence[Fraction]) -> List[Fraction]:
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    lead = next((x for x in ints if x), 1)
    g = g or 1
    if lead < 0:
        g = -g
    return [Fraction(x, g) for x in ints]


@dataclass
class ReferenceCounts:
    words: List[Tuple[str, ...]]
    dim_chains: int
    dim_cocycles: int
    dim_coboundaries: int


@dataclass
class CohomologyReport:
    algebra: str
    degree: int
    max_length: int
    dim_chains: int
    dim_cocycles: int
    dim_coboundaries: int
    representatives: List[BarElement]
    filtration_ranks: Dict[int, int]
    stabilized: bool
    reference: Optional[ReferenceCounts] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return self.dim_cocycles - self.dim_coboundaries

    @property
    def min_length(self) -> Optional[int]:
        for r in sorted(self.filtration_ranks):
            if self.filtration_ranks[r] > 0:
                return r
        return None

    def to_dict(self):
        out = {
            "algebra": self.algebra,
            "degree": self.degree,
            "max_length": self.max_length,
            "dim_chains": self.dim_chains,
            "dim_cocycles": self.dim_cocycles,
            "dim_coboundaries": self.dim_coboundaries,
            "rank": self.rank,
            "min_length": self.min_length,
            "stabilized": self.stabilized,
            "filtration_ranks": {str(k): v for k, v in sorted(self.filtration_ranks.items())},
            "representatives": [r.to_dict() for r in self.representatives],
            "warnings": list(self.warnings),
        }
        if self.reference is not None:
            out["reference_basis"] = {
                "words": ["|".join(w) for w in self.reference.words],
                "dim_chains": self.reference.dim_chains,
                "dim_cocycles": self.reference.dim_cocycles,
                "dim_coboundaries": self.reference.dim_coboundaries,
                "differs_from_full": self.reference.dim_chains != self.dim_chains,
            }
        return out

    def to_text(self) -> str:
        lines = [
            f"algebra: {self.algebra}",
            f"degree {self.degree} (word length <= {self.max_length})",
            f"  chains {self.dim_chains}, cocycles {self.dim_cocycles}, coboundaries {self.dim_coboundaries}",
            f"  rank {self.rank}",
        ]
        for rep in self.representatives:
            lines.append(f"  representative {rep.to_text('integral')}   [{rep.to_text('bar')}]")
        filt = ", ".join(f"r<={k}: {v}" for k, v in sorted(self.filtration_ranks.items()))
        lines.append(f"  length filtration: {filt}")
        lines.append(f"  stabilized: {'yes' if self.stabilized else 'NO'}")
        if self.reference is not None:
            ref = self.reference
            lines.append(
                f"  reference basis ({len(ref.words)} words): chains {ref.dim_chains}, "
                f"cocycles {ref.dim_cocycles}, coboundaries {ref.dim_coboundaries}"
            )
            if ref.dim_chains != self.dim_chains:
                lines.append(
                    f"  NOTE full enumeration has {self.dim_chains} chains, reference basis has {ref.dim_chains}"
                )
        for w in self.warnings:
            lines.append(f"  warning: {w}")
        return "\n".join(lines)


class _DegreeData:
    """Chains, cocycles and coboundaries of one bar degree at a fixed cap."""

    def __init__(self, cx: BarComplex, degree: int, max_length: int):
        self.cx = cx
        self.degree = degree
        self.max_length = max_length
        self.src = cx.index_words(degree - 1, max_length) if degree >= 1 else []
        self.mid = cx.index_words(degree, max_length)
        self.tgt = cx.index_words(degree + 1, max_length)
        self.d_in = cx.matrix(self.src, self.mid)
        self.d_out = cx.matrix(self.mid, self.tgt)
        self.cocycles = kernel_basis(self.d_out)
        dense_in = self.d_in.transpose()
        self.boundary_vectors = [
            [dense_in[j, i] for i in range(len(self.mid))] for j in range(len(self.src))
        ]
        self.boundary_vectors = [v for v in self.boundary_vectors if any(v)]
        self.dim_coboundaries = rank(self.d_in)

    def filtered_cocycles(self, r: int) -> List[List[Fraction]]:
        cols = [j for j, w in enumerate(self.mid) if len(w) <= r]
        if not cols:
            return []
        sub = RationalMatrix(len(self.tgt), len(cols))
        for jj, j in enumerate(cols):
            for i, row in self.d_out.entries.items():
                v = row.get(j)
                if v:
                    sub[i, jj] = v
        out = []
        for kv in kernel_basis(sub):
            full = [Fraction(0)] * len(self.mid)
            for jj, j in enumerate(cols):
                full[j] = kv[jj]
            out.append(full)
        return out

    def single_word_cocycles(self, r: int) -> List[List[Fraction]]:
        out = []
        for j, w in enumerate(self.mid):
            if len(w) == r and not self.cx.d_index(w):
                v = [Fraction(0)] * len(self.mid)
                v[j] = Fraction(1)
                out.append(v)
        return out

    def to_element(self, v: Sequence[Fraction]) -> BarElement:
        A = self.cx.A
        v = _primitive(v)
        return BarElement(A, {tuple(A.labels[i] for i in self.mid[j]): c for j, c in enumerate(v) if c}, self.degree)

    def vector(self, x: BarElement) -> List[Fraction]:
        idx = {w: j for j, w in enumerate(self.mid)}
        v = [Fraction(0)] * len(self.mid)
        for letters, c in x.terms.items():
            key = self.cx.to_index(letters)
            if key not in idx:
                raise DimensionMismatch(f"word {'|'.join(letters)} not in degree {self.degree} chains")
            v[idx[key]] = c
        return v

    def candidates(self, r: int) -> List[List[Fraction]]:
        return self.single_word_cocycles(r) + self.filtered_cocycles(r)


def _resolve_cap(cx: BarComplex, degree: int, max_length: Optional[int]) -> int:
    if max_length is None:
        return cx.default_max_length(degree + 1)
    if max_length < 0:
        raise ValueError("max_length must be >= 0")
    return max_length


def _is_complete(cx: BarComplex, degree: int, cap: int) -> bool:
    return not cx.A.has_degree_one() and cap >= degree + 1


def cohomology(
    A: FiniteCdga,
    degree: int,
    max_length: Optional[int] = None,
    reference_words: Optional[Sequence[Sequence[str]]] = None,
) -> CohomologyReport:
    if degree < 0:
        raise ValueError("bar degree must be >= 0")
    cx = complex_for(A)
    cap = _resolve_cap(cx, degree, max_length)
    data = _DegreeData(cx, degree, cap)
    dim_z = len(data.cocycles)
    dim_b = data.dim_coboundaries

    spanning = list(data.boundary_vectors)
    current = dim_b
    reps: List[BarElement] = []
    filtration: Dict[int, int] = {}
    for r in range(0, cap + 1):
        for v in data.candidates(r):
            if len(reps) == dim_z - dim_b:
                break
            if rank_of_vectors(spanning + [v], len(data.mid)) > current:
                spanning.append(v)
                current += 1
                reps.append(data.to_element(v))
        filtration[r] = current - dim_b

    warn: List[str] = []
    if _is_complete(cx, degree, cap):
        stabilized = True
    elif cap == 0:
        stabilized = False
    else:
        prev = _DegreeData(cx, degree, cap - 1)
        prev_rank = len(prev.cocycles) - prev.dim_coboundaries
        stabilized = prev_rank == dim_z - dim_b
    if not stabilized:
        msg = f"NotStabilized: rank in degree {degree} changed between caps {cap - 1} and {cap}"
        warn.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)

    ref = None
    if reference_words is not None:
        ref = _reference_counts(data, reference_words)

    return CohomologyReport(
        algebra=A.name or "<unnamed>",
        degree=degree,
        max_length=cap,
        dim_chains=len(data.mid),
        dim_cocycles=dim_z,
        dim_coboundaries=dim_b,
        representatives=reps,
        filtration_ranks=filtration,
        stabilized=stabilized,
        reference=ref,
        warnings=warn,
    )


def _reference_counts(data: _DegreeData, words: Sequence[Sequence[str]]) -> ReferenceCounts:
    words = [tuple(w) for w in words]
    vecs = [data.vector(BarElement.word(data.cx.A, w)) for w in words]
    dim_mid = len(data.mid)
    dim_v = rank_of_vectors(vecs, dim_mid)
    # cocycles inside span(words): kernel of d restricted to those columns
    sub = RationalMatrix(len(data.tgt), len(words))
    tindex = {w: i for i, w in enumerate(data.tgt)}
    for j, w in enumerate(words):
        for k, c in data.cx.d_index(data.cx.to_index(w)).items():
            sub[tindex[k], j] = c
    dim_zv = len(words) - rank(sub) - (len(words) - dim_v)
    dim_b = data.dim_coboundaries
    dim_bv = dim_b + dim_v - rank_of_vectors(data.boundary_vectors + vecs, dim_mid)
    return ReferenceCounts(words, dim_v, dim_zv, dim_bv)


def _pair(dual: Mapping[Tuple[str, ...], Fraction], data: _DegreeData, v: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    A = data.cx.A
    for j, c in enumerate(v):
        if c:
            w = tuple(A.labels[i] for i in data.mid[j])
            total += c * Fraction(dual.get(w, 0))
    return total


def min_length_detector(
    A: FiniteCdga,
    degree: int,
    dual_functional: Optional[Mapping[Sequence[str], object]] = None,
    max_length: Optional[int] = None,
) -> Tuple[int, BarElement]:
    """Smallest filtration level carrying a class that is nonzero in H^degree.

    With ``dual_functional`` (a map word -> coefficient, i.e. a cochain on the
    bar chains) the class must also pair nontrivially with it; the functional
    has to vanish on coboundaries, otherwise the pairing is not defined on
    cohomology and ``ValueError`` is raised.
    """
    cx = complex_for(A)
    cap = _resolve_cap(cx, degree, max_length)
    data = _DegreeData(cx, degree, cap)
    if len(data.cocycles) == data.dim_coboundaries:
        raise NoClassFound(f"bar cohomology vanishes in degree {degree}")
    dual = None
    if dual_functional is not None:
        dual = {tuple(k): Fraction(v) for k, v in dual_functional.items()}
        if any(_pair(dual, data, b) for b in data.boundary_vectors):
            raise ValueError("dual functional does not vanish on coboundaries")
    for r in range(0, cap + 1):
        for v in data.candidates(r):
            if dual is not None:
                if _pair(dual, data, v):
                    return r, data.to_element(v)
            else:
                exact = bool(data.boundary_vectors) and in_span(v, data.boundary_vectors)[0]
                if not exact:
                    return r, data.to_element(v)
    raise NoClassFound(f"no cocycle in degree {degree} pairs nontrivially with the functional")


def same_class_up_to_scalar(A: FiniteCdga, x: BarElement, y: BarElement, max_length: Optional[int] = None) -> bool:
    """True when x and y are nonzero multiples of each other modulo coboundaries."""
    if x.degree != y.degree:
        return False
    cx = complex_for(A)
    cap = _resolve_cap(cx, x.degree, max_length)
    data = _DegreeData(cx, x.degree, cap)
    vx, vy = data.vector(x), data.vector(y)
    B = data.boundary_vectors
    dim = len(data.mid)
    rb = rank_of_vectors(B, dim)
    rx = rank_of_vectors(B + [vx], dim)
    ry = rank_of_vectors(B + [vy], dim)
    rxy = rank_of_vectors(B + [vx, vy], dim)
    return rx == rb + 1 and ry == rb + 1 and rxy == rb + 1


def distortion_exponent(n: int, r: int) -> int:
    """Exponent of the O(L^{n-1+r}) distortion bound for a class in pi_n."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if r < 1:
        raise ValueError("r must be >= 1")
    return n - 1 + r
