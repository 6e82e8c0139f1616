from fractions import Fraction

import pytest

from chenloops.errors import AlgebraInvalid, ParseError
from chenloops.models import data_path
from chenloops.specfile import dump_algebra, load_algebra, parse_algebra, parse_combination


def test_parse_combination_forms():
    assert parse_combination("0") == {}
    assert parse_combination("ω_a") == {"ω_a": 1}
    assert parse_combination("2*x - 1/3*y + z") == {"x": 2, "y": Fraction(-1, 3), "z": 1}


@pytest.mark.parametrize("bad", ["", "2*", "x y", "1/0*x", "+", "3"])
def test_parse_combination_rejects(bad):
    with pytest.raises(ParseError):
        parse_combination(bad)


def test_roundtrip_is_byte_identical():
    for name in ("two_sphere_cells.toml", "s3.toml", "cp2.toml"):
        A = load_algebra(data_path(name))
        text = dump_algebra(A)
        assert dump_algebra(parse_algebra(text)) == text
        assert parse_algebra(text) == A


def test_missing_sections():
    with pytest.raises(ParseError):
        parse_algebra("name = 'x'")
    with pytest.raises(ParseError):
        parse_algebra("degree_cap = 3")


def test_bad_toml():
    with pytest.raises(ParseError):
        parse_algebra("degree_cap = = 3")


def test_unknown_key():
    with pytest.raises(ParseError):
        parse_algebra('degree_cap = 3\nfoo = 1\n[generators]\n"x" = 3\n')


def test_axiom_violation_surfaces():
    text = 'degree_cap = 4\n[generators]\n"a" = 2\n"b" = 3\n"c" = 4\n[differentials]\n"a" = "b"\n"b" = "c"\n'
    with pytest.raises(AlgebraInvalid):
        parse_algebra(text)


def test_product_key_shape():
    with pytest.raises(ParseError):
        parse_algebra('degree_cap = 4\n[generators]\n"a" = 2\n[products]\n"a" = "a"\n')
