"""Lexer, parser, resolver, and pretty-printer tests."""

import pathlib
import random

import pytest

from fgc.ast import (
    App,
    Forall,
    IntLit,
    Lam,
    ListLit,
    PathE,
    Prim,
    TVar,
    TyApp,
)
from fgc.parser import (
    ParseError,
    parse_program,
    parse_type,
    pretty,
    pretty_type,
)

from gen import random_expr

PROGRAMS = sorted(
    (pathlib.Path(__file__).parent.parent / "programs").glob("*.fg"))


def roundtrips(src: str) -> bool:
    e = parse_program(src)
    return pretty(parse_program(pretty(e))) == pretty(e)


def test_corpus_roundtrip():
    assert PROGRAMS
    for path in PROGRAMS:
        assert roundtrips(path.read_text()), path.name


def test_random_roundtrip():
    rng = random.Random(42)
    for _ in range(500):
        e = random_expr(rng, 4)
        s = pretty(e)
        assert pretty(parse_program(s)) == s, s


def test_precedence():
    e = parse_program("1 + 2 * 3")
    assert pretty(e) == "1 + 2 * 3"
    assert isinstance(e, Prim) and e.op == "+"
    e = parse_program("(1 + 2) * 3")
    assert isinstance(e, Prim) and e.op == "*"
    # application binds tighter than operators and associates left
    e = parse_program("lam f: int -> int -> int. f 1 2 + 3")
    body = e.body
    assert isinstance(body, Prim) and body.op == "+"
    assert isinstance(body.args[0], App)


def test_type_syntax():
    assert pretty_type(parse_type("int -> int -> int")) \
        == "int -> int -> int"
    t = parse_type("(int -> int) -> int")
    assert pretty_type(t) == "(int -> int) -> int"
    t = parse_type("forall a. list a -> a")
    assert isinstance(t, Forall)
    assert pretty_type(parse_type("list (list int)")) == "list list int"
    assert pretty_type(parse_type("list (int -> int)")) \
        == "list (int -> int)"
    assert pretty_type(parse_type("Seq<list int>.E")) == "Seq<list int>.E"
    assert pretty_type(parse_type("Monoid<a> => a -> a")) \
        == "Monoid<a> => a -> a"


def test_type_application_vs_list():
    e = parse_program("(Lam a. lam x: a. x)[int] 3")
    assert isinstance(e, App) and isinstance(e.fn, TyApp)
    e = parse_program("(lam x: list int. x) [1, 2]")
    assert isinstance(e, App) and isinstance(e.arg, ListLit)


def test_empty_list_requires_annotation():
    assert isinstance(parse_program("nil[int]"), ListLit)
    with pytest.raises(ParseError) as exc:
        parse_program("lam x: list int. []")
    assert any(d.code == "P004" for d in exc.value.diagnostics)


def test_builtins_resolve_to_primitives():
    e = parse_program("lam xs: list int. head xs")
    assert isinstance(e.body, Prim) and e.body.op == "head"
    # a local binding takes priority over the built-in
    e = parse_program("lam head: int. head")
    assert isinstance(e.body, PathE)


def test_shadowed_type_binders_renamed_apart():
    e = parse_program("Lam a. Lam a. lam x: a. x")
    inner = e.body
    outer_name, inner_name = e.binder, inner.binder
    assert inner_name != outer_name
    assert inner.body.ann == TVar(inner_name)


def test_syntax_errors():
    cases = {
        "let x = in 3": "P001",
        "1 +": "P002",
        "head": "P003",
        "lam x: int. x ?": "P012",
    }
    for src, code in cases.items():
        with pytest.raises(ParseError) as exc:
            parse_program(src)
        assert any(d.code == code for d in exc.value.diagnostics), src


def test_scope_errors():
    with pytest.raises(ParseError) as exc:
        parse_program("lam x: nosuch. x")
    assert exc.value.diagnostics[0].code == "P010"
    with pytest.raises(ParseError) as exc:
        parse_program("nosuch")
    assert exc.value.diagnostics[0].code == "P011"
    with pytest.raises(ParseError) as exc:
        parse_program("concept C<a> { ; ; f : a, f : a } in 1")
    assert exc.value.diagnostics[0].code == "P013"


def test_multiple_errors_reported():
    with pytest.raises(ParseError) as exc:
        parse_program("let x = in let y = in 3")
    assert len(exc.value.diagnostics) >= 2


def test_comments_and_literals():
    e = parse_program("// a comment\n42 // trailing\n")
    assert e == IntLit(42)
    assert pretty(parse_program("[1, 2, 3]")) == "[1, 2, 3]"


def test_declarations_roundtrip():
    src = ("concept Eq<a> { ; ; eq : a -> a -> bool } in "
           "model Eq<int> { ; eq = lam x: int. lam y: int. x == y } in "
           "type T = int in "
           "Eq<T>.eq 1 2")
    assert roundtrips(src)
