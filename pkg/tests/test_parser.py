import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from excpot.exactnum import GaussianRational
from excpot.mech import exceptional_potential
from excpot.parser import ParseError, parse, parse_constant, render, tokenize
from excpot.poly import BIHOM, NATURAL, Poly

big = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)
wide_polys = st.dictionaries(
    st.tuples(*[st.integers(0, 12)] * 4), st.builds(GaussianRational, big, big), max_size=6
)


def kinds(text):
    return [t.kind for t in tokenize(text)]


def test_tokenize_examples():
    assert kinds("q1+i*q2") == ["ident", "plus", "imag", "star", "ident"]
    assert tokenize("") == []
    toks = tokenize("(q2-i*q1)^2")
    # ( q2 - i * q1 ) ^ 2
    assert len(toks) == 9 and [t.kind for t in toks[-2:]] == ["caret", "integer"] and toks[-1].text == "2"
    assert kinds("ii + i2") == ["ident", "plus", "ident"]


def test_tokenize_bad_character():
    with pytest.raises(ParseError) as info:
        tokenize("q1 + $")
    assert info.value.offset == 5


def test_parse_examples():
    assert parse("i^4") == 1
    V = parse("(q2-i*q1)^2*(q2+i*q1)^5")
    assert V == exceptional_potential(7, 2) and len(V) == 8
    assert parse("2*y1*y2", BIHOM) == 2 * Poly.var("y1", BIHOM) * Poly.var("y2", BIHOM)


def test_precedence():
    assert parse("-q1^2") == -(parse("q1") ** 2)
    assert parse("2^3^2") == 2**9
    assert parse("q1+q2*p1") == parse("q1+(q2*p1)")
    assert parse("q1/2*q2") == parse("(q1*q2)/2")
    assert parse("q1 - q2 - p1") == parse("(q1 - q2) - p1")


def test_constant_folding():
    assert parse("(1+i)^2/(2*i) * q1") == parse("q1")
    assert parse_constant("(3+4*i)/5") == GaussianRational("3/5", "4/5")


@pytest.mark.parametrize(
    "text",
    ["q1/q2", "q1/0", "q1^-1", "q1^q2", "x1 + q1", "q1 +", "(q1", "q1)", "", "q1 q2", "*q1", "q1^(1/2)"],
)
def test_rejections_carry_offsets(text):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert 0 <= info.value.offset <= len(text.encode())


def test_render_examples():
    assert render(Poly.zero()) == "0"
    assert render(parse("2*y1*y2", BIHOM)) == "2*y1*y2"
    assert render(parse("-q1 + (1/2 - i)*q2^3")) == "(1/2 - i)*q2^3 - q1"


@given(wide_polys)
@settings(max_examples=1000, deadline=None)
def test_round_trip(terms):
    f = Poly(terms, NATURAL)
    assert parse(render(f)) == f


@given(st.sampled_from(["q1", "q2", "p1", "p2", "(q1-i*p2)", "3", "i"]), st.sampled_from(["q1", "p2", "(2*q2+1)"]),
       st.sampled_from(["p1", "(i*q1)", "q2^2"]))
def test_precedence_substitutions(a, b, c):
    assert parse(f"{a}+{b}*{c}") == parse(f"{a}+({b}*{c})")
