import pytest
from hypothesis import given

from nonsing.constructors import Poset, poset_nerve, standard_simplex
from nonsing.corpus import corpus, q_example
from nonsing.io import (
    ParseError,
    emit_pairs,
    emit_poset,
    emit_smap,
    emit_smap_list,
    emit_sset,
    format_simplex,
    parse_pairs,
    parse_poset,
    parse_simplex,
    parse_smap,
    parse_smap_list,
    parse_sset,
)
from nonsing.mapping import enumerate_maps
from nonsing.sset import SSetError, Simplex
from strategies import random_quotients

D1 = """sset v1
cell 0 dim=0 faces=[]
cell 1 dim=0 faces=[]
cell 0_1 dim=1 faces=[(1, [0]), (0, [0])]
"""


def test_parse_example():
    X = parse_sset(D1)
    assert X.counts() == (2, 1)
    assert emit_sset(X) == D1


def test_sset_round_trip_corpus():
    for X in corpus():
        text = emit_sset(X)
        Y = parse_sset(text)
        assert Y.counts() == X.counts()
        assert emit_sset(Y) == text


@given(random_quotients())
def test_sset_round_trip_random(triple):
    _, Q, _ = triple
    text = emit_sset(Q)
    assert emit_sset(parse_sset(text)) == text


def test_comments_and_blank_lines():
    text = "# a segment\n\nsset v1\ncell 0 dim=0 faces=[]  # left end\n\ncell 1 dim=0 faces=[]\n"
    assert parse_sset(text).counts() == (2,)


def test_simplex_format():
    x = Simplex("0_2", (0, 0, 1))
    assert format_simplex(x) == "(0_2, [0, 0, 1])"
    assert parse_simplex(" ( 0_2 ,[0,0,1] ) ") == x


@pytest.mark.parametrize(
    "text,line,match",
    [
        ("", 1, "missing header"),
        ("sset v2\n", 1, "expected header"),
        ("sset v1\ncell 0 dim=0 faces=[]\ncell oops\n", 3, "expected 'cell"),
        ("sset v1\ncell 0 dim=0 faces=[]\ncell 0 dim=0 faces=[]\n", 3, "duplicate"),
        ("sset v1\ncell a dim=0 faces=[]\ncell e dim=1 faces=[(a, [0]), (b, [0])]\n", 3, "unknown cell 'b'"),
        ("sset v1\ncell a dim=0 faces=[]\ncell e dim=1 faces=[(a, [0,,0]), (a, [0])]\n", 3, "bad operator"),
        ("sset v1\ncell a dim=0 faces=[]\ncell e dim=1 faces=[(a, []), (a, [0])]\n", 3, "empty operator"),
        ("sset v1\ncell a dim=0 faces=[]\ncell e dim=1 faces=[(a, [0]) junk]\n", 3, "malformed face list"),
    ],
)
def test_sset_parse_errors(text, line, match):
    with pytest.raises(ParseError, match=match) as info:
        parse_sset(text)
    assert info.value.lineno == line
    assert str(info.value).startswith(f"line {line}:")


def test_semantic_error_without_line_is_sset_error():
    with pytest.raises(SSetError):
        parse_sset("sset v1\ncell a dim=0 faces=[]\ncell e dim=1 faces=[(a, [0])]\n")


def test_smap_round_trip():
    d1, d2 = standard_simplex(1), standard_simplex(2)
    maps = enumerate_maps(d1, d2)
    for f in maps:
        assert parse_smap(emit_smap(f), d1, d2) == f
    text = emit_smap_list(maps)
    assert parse_smap_list(text, d1, d2) == maps
    assert text.count("---") == len(maps) - 1


def test_smap_parse_errors():
    d1 = standard_simplex(1)
    with pytest.raises(ParseError, match="sent twice"):
        parse_smap("smap v1\nsend 0 -> (0, [0])\nsend 0 -> (1, [0])\n", d1, d1)
    with pytest.raises(ParseError, match="line 2"):
        parse_smap("smap v1\nsend 0 => (0, [0])\n", d1, d1)
    with pytest.raises(SSetError, match="natural"):
        parse_smap("smap v1\nsend 0 -> (1, [0])\nsend 1 -> (0, [0])\nsend 0_1 -> (0_1, [0, 1])\n", d1, d1)


def test_poset_round_trip():
    P = Poset.grid(2, 1)
    Q = parse_poset(emit_poset(P))
    assert Q.elements == P.elements and Q.le == P.le
    R = parse_poset("poset v1\nle a b\nelem c\n")
    assert R.elements == ["a", "b", "c"]
    assert poset_nerve(R).counts() == (3, 1)
    assert parse_poset(emit_poset(R)).le == R.le


def test_poset_parse_errors():
    with pytest.raises(ParseError, match="line 2"):
        parse_poset("poset v1\nlt a b\n")
    with pytest.raises(ParseError, match="antisymmetric"):
        parse_poset("poset v1\nle a b\nle b a\n")


def test_pairs_round_trip():
    Q = q_example()
    pairs = [(Q.simplex(Q.vertex_ids()[0]), Q.simplex(Q.vertex_ids()[1])),
             (Simplex("0_1", (0, 1)), Simplex("x", (0, 0)))]
    assert parse_pairs(emit_pairs(pairs)) == pairs
    with pytest.raises(ParseError, match="line 2"):
        parse_pairs("pairs v1\npair (a, [0])\n")
