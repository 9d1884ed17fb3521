"""Syntax-tree operations: free variables, substitution, alpha equality."""

import random

from fgc.ast import (
    Arrow,
    AssocPath,
    BoolT,
    ConceptC,
    Constrained,
    Forall,
    IntT,
    ListT,
    ModelId,
    SameType,
    TVar,
    alpha_equal,
    constraint_alpha_equal,
    free_type_vars,
    fresh_name,
    substitute_type,
)

from gen import random_type

A, B, C = TVar("a"), TVar("b"), TVar("c")


def test_free_type_vars():
    assert free_type_vars(IntT()) == set()
    assert free_type_vars(Arrow(A, ListT(B))) == {"a", "b"}
    assert free_type_vars(Forall("a", Arrow(A, B))) == {"b"}
    assert free_type_vars(
        AssocPath(ModelId("Seq", (A,)), "E")) == {"a"}
    assert free_type_vars(
        Constrained(ConceptC(ModelId("Eq", (A,))), B)) == {"a", "b"}


def test_substitute_basic():
    assert substitute_type(Arrow(A, B), "a", IntT()) == Arrow(IntT(), B)
    # bound occurrences are untouched
    assert substitute_type(Forall("a", A), "a", IntT()) == Forall("a", A)


def test_substitute_capture_avoiding():
    # [a := b] must not let the b binder capture the substituted b
    t = Forall("b", Arrow(A, B))
    got = substitute_type(t, "a", B)
    assert alpha_equal(got, Forall("c", Arrow(B, C)))
    assert not alpha_equal(got, Forall("b", Arrow(B, B)))


def test_substitute_under_path_and_constraint():
    p = AssocPath(ModelId("Seq", (A,)), "E")
    assert substitute_type(p, "a", IntT()) == AssocPath(
        ModelId("Seq", (IntT(),)), "E")
    t = Constrained(SameType(A, IntT()), A)
    assert substitute_type(t, "a", BoolT()) == Constrained(
        SameType(BoolT(), IntT()), BoolT())


def test_alpha_equal():
    assert alpha_equal(Forall("a", Arrow(A, A)), Forall("b", Arrow(B, B)))
    assert not alpha_equal(Forall("a", Arrow(A, A)),
                           Forall("a", Arrow(A, IntT())))
    # free variables must match by name
    assert not alpha_equal(A, B)
    assert alpha_equal(A, TVar("a"))


def test_constraint_alpha_equal():
    ca = ConceptC(ModelId("Eq", (Forall("a", A),)))
    cb = ConceptC(ModelId("Eq", (Forall("z", TVar("z")),)))
    assert constraint_alpha_equal(ca, cb)
    assert not constraint_alpha_equal(ca, ConceptC(ModelId("Ord", (A,))))
    assert constraint_alpha_equal(SameType(A, B), SameType(A, B))
    assert not constraint_alpha_equal(SameType(A, B), SameType(B, A))


def test_fresh_name():
    assert fresh_name("a", {"a"}) != "a"
    avoid = {"a", "a1", "a2"}
    assert fresh_name("a", avoid) not in avoid


def test_substitution_identity_property():
    # substituting for a variable that is not free is the identity
    rng = random.Random(7)
    for _ in range(200):
        t = random_type(rng, 4, ("a", "b"))
        if "zz" not in free_type_vars(t):
            assert substitute_type(t, "zz", IntT()) == t


def test_substitution_removes_variable():
    rng = random.Random(8)
    for _ in range(200):
        t = random_type(rng, 4, ("a", "b"))
        got = substitute_type(t, "a", IntT())
        assert "a" not in free_type_vars(got)


def test_alpha_equal_is_equivalence():
    rng = random.Random(9)
    ts = [random_type(rng, 3, ("a",)) for _ in range(30)]
    for t in ts:
        assert alpha_equal(t, t)
    for s in ts:
        for t in ts:
            assert alpha_equal(s, t) == alpha_equal(t, s)
