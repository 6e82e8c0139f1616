"""Reading and writing algebra files.

Grammar (TOML)::

    name = "optional free text"
    degree_cap = 8

    [generators]            # basis elements in order: label = degree
    "ω_a" = 3
    "ω_b" = 3

    [products]              # "lhs * rhs" = combination
    "ω_a * ω_b" = "ω_ab"

    [differentials]         # label = combination
    "ω_y" = "ω_ab"

A combination is ``0`` or a sum of terms ``[coef *] label`` joined by ``+``
or ``-``; ``coef`` is an integer or ``p/q``. Labels may not contain
whitespace, ``*``, ``+``, ``-`` or ``/`` and may not start with a digit.
Unlisted products and differentials are zero, and the graded-commutative
mirror of every listed product is filled in automatically.

``dump_algebra`` writes the canonical form (basis order, one entry per
unordered product pair, nonzero data only); ``load`` followed by ``dump``
reproduces that text byte for byte.
"""
from __future__ import annotations

import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, Mapping, Union

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

from .cdga import FiniteCdga, make_algebra
from .errors import ParseError

_LABEL = r"[^\s*+\-/\d][^\s*+\-/]*"
_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?:(?P<coef>\d+(?:/\d+)?)\s*\*\s*)?(?P<label>" + _LABEL + r")\s*"
)
_LABEL_RE = re.compile(_LABEL + r"\Z")


def parse_combination(text: str) -> Dict[str, Fraction]:
    text = text.strip()
    if text == "0":
        return {}
    if not text:
        raise ParseError("empty combination")
    out: Dict[str, Fraction] = {}
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse combination {text!r} at offset {pos}")
        if not first and m.group("sign") is None:
            raise ParseError(f"missing '+' or '-' between terms in {text!r}")
        try:
            c = Fraction(m.group("coef") or 1)
        except ZeroDivisionError:
            raise ParseError(f"zero denominator in {text!r}") from None
        if m.group("sign") == "-":
            c = -c
        lab = m.group("label")
        out[lab] = out.get(lab, Fraction(0)) + c
        pos = m.end()
        first = False
    return {k: v for k, v in out.items() if v}


def format_coefficient_term(lab: str, c: Fraction, first: bool) -> str:
    mag = abs(c)
    body = lab if mag == 1 else f"{mag}*{lab}"
    if first:
        return body if c > 0 else "-" + body
    return ("+ " if c > 0 else "- ") + body


def format_combination(comb: Mapping[str, Fraction]) -> str:
    if not comb:
        return "0"
    return " ".join(format_coefficient_term(k, v, i == 0) for i, (k, v) in enumerate(comb.items()))


def parse_algebra(text: str) -> FiniteCdga:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"invalid TOML: {exc}") from exc
    unknown = set(doc) - {"name", "degree_cap", "generators", "products", "differentials"}
    if unknown:
        raise ParseError(f"unknown top-level keys: {sorted(unknown)}")
    if "degree_cap" not in doc:
        raise ParseError("missing degree_cap")
    cap = doc["degree_cap"]
    if not isinstance(cap, int) or isinstance(cap, bool):
        raise ParseError("degree_cap must be an integer")
    gens_raw = doc.get("generators")
    if not isinstance(gens_raw, dict) or not gens_raw:
        raise ParseError("missing or empty [generators] section")
    gens = []
    for lab, deg in gens_raw.items():
        if not _LABEL_RE.match(lab):
            raise ParseError(f"illegal label {lab!r}")
        if not isinstance(deg, int) or isinstance(deg, bool):
            raise ParseError(f"degree of {lab!r} must be an integer")
        gens.append((lab, deg))
    products = {}
    for key, val in doc.get("products", {}).items():
        parts = key.split("*")
        if len(parts) != 2 or not all(p.strip() for p in parts):
            raise ParseError(f"product key {key!r} must look like 'a * b'")
        if not isinstance(val, str):
            raise ParseError(f"product value for {key!r} must be a string")
        pair = (parts[0].strip(), parts[1].strip())
        if pair in products:
            raise ParseError(f"product {key!r} listed twice")
        products[pair] = parse_combination(val)
    diffs = {}
    for lab, val in doc.get("differentials", {}).items():
        if not isinstance(val, str):
            raise ParseError(f"differential of {lab!r} must be a string")
        diffs[lab] = parse_combination(val)
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ParseError("name must be a string")
    return make_algebra(cap, gens, products, diffs, name=name)


def load_algebra(path: Union[str, Path]) -> FiniteCdga:
    return parse_algebra(Path(path).read_text(encoding="utf-8"))


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dump_algebra(A: FiniteCdga) -> str:
    lines = []
    if A.name:
        lines.append(f"name = {_q(A.name)}")
    lines.append(f"degree_cap = {A.degree_cap}")
    lines.append("")
    lines.append("[generators]")
    for lab, deg in zip(A.labels, A.degrees):
        lines.append(f"{_q(lab)} = {deg}")
    lines.append("")
    lines.append("[products]")
    n = len(A)
    for i in range(n):
        for j in range(i, n):
            comb = A.product(i, j)
            if comb:
                named = {A.labels[k]: comb[k] for k in sorted(comb)}
                lines.append(f"{_q(A.labels[i] + ' * ' + A.labels[j])} = {_q(format_combination(named))}")
    lines.append("")
    lines.append("[differentials]")
    for i in range(n):
        comb = A.d(i)
        if comb:
            named = {A.labels[k]: comb[k] for k in sorted(comb)}
            lines.append(f"{_q(A.labels[i])} = {_q(format_combination(named))}")
    return "\n".join(lines) + "\n"
