import pytest

from acdeduce.parse import (
    ParseError,
    UnknownSymbol,
    format_term,
    parse_context,
    parse_knowledge,
    parse_term,
)
from acdeduce.terms import HOLE, App, Name


def test_infix_and_prefix(AG, P):
    assert P("a + b") == P("(b) + a")
    assert P("i(a) + 0 + b") == AG.signature.app("+", App("i", (Name("a"),)), App("0", ()), Name("b"))


def test_constructor_sugar(BLIND):
    sig = BLIND.signature
    assert parse_term("<a, b>", sig) == parse_term("pair(a, b)", sig)
    assert parse_term("{m}_k", sig) == parse_term("enc(m, k)", sig)


def test_round_trip(BLIND):
    sig = BLIND.signature
    for text in ["a + b + i(c)", "sign(blind(m, r), k)", "pair(a + b, enc(m, k))", "0"]:
        t = parse_term(text, sig)
        assert parse_term(format_term(t, sig), sig) == t


def test_errors_carry_position(AG):
    with pytest.raises(UnknownSymbol) as e:
        parse_term("f(a)", AG.signature)
    assert "f" in str(e.value) and e.value.column == 1
    with pytest.raises(ParseError):
        parse_term("a +", AG.signature)
    with pytest.raises(ParseError):
        parse_term("i(a, b)", AG.signature)


def test_context_holes(AG):
    c = parse_context("_ + i(_)", AG.signature)
    assert sum(1 for a in c.args if a == HOLE) == 1
    assert format_term(c, AG.signature) == "i(_) + _"


def test_knowledge_file(AG):
    text = "# known terms\nname k public\nname a private\nknow a + b\nknow i(b)\n"
    sig, kn = parse_knowledge(text, AG.signature)
    assert sig.is_public(Name("k")) and not sig.is_public(Name("a"))
    assert kn.terms == [parse_term("a + b", sig), parse_term("i(b)", sig)]
    with pytest.raises(ParseError) as e:
        parse_knowledge("know a\nbogus line\n", AG.signature)
    assert e.value.line == 2
