"""Environment entries, constraint expansion, and qualified-path lookup."""

import pytest

from fgc.ast import (
    Arrow,
    BoolT,
    ConceptC,
    ConceptInfo,
    IntT,
    ListT,
    ModelId,
    ModelInfo,
    SameType,
    TVar,
    constraint_alpha_equal,
)
from fgc.env import (
    ConceptEntry,
    ConstraintEntry,
    Env,
    ModelEntry,
    TermBind,
    TypeEq,
    TypeVarBind,
    UnknownConceptError,
    UnknownMemberError,
    UnsatisfiedConstraintError,
    concept_subst,
    flat,
    lookup_path,
    satisfies,
)
from fgc.ast import AssocPath

A = TVar("a")

SEMIGROUP = ConceptInfo(
    "Semigroup", ("a",), (), (), (("binary_op", Arrow(A, Arrow(A, A))),))
MONOID = ConceptInfo(
    "Monoid", ("a",), (), (ConceptC(ModelId("Semigroup", (A,))),),
    (("identity_elt", A),))
SEQ = ConceptInfo(
    "Seq", ("S",), ("E",), (),
    (("isnull", Arrow(TVar("S"), BoolT())),
     ("head", Arrow(TVar("S"), TVar("E"))),
     ("tail", Arrow(TVar("S"), TVar("S")))))


def base_env() -> Env:
    return Env().push_all(
        [ConceptEntry(SEMIGROUP), ConceptEntry(MONOID), ConceptEntry(SEQ)])


def test_lookup_term_most_recent_first():
    env = Env().push(TermBind("x", IntT())).push(TermBind("x", BoolT()))
    assert env.lookup_term("x") == BoolT()
    assert env.lookup_term("y") is None


def test_env_is_persistent():
    env = Env().push(TermBind("x", IntT()))
    env.push(TermBind("x", BoolT()))
    assert env.lookup_term("x") == IntT()


def test_concept_subst():
    sigma = concept_subst(SEQ, ModelId("Seq", (ListT(IntT()),)))
    assert sigma["S"] == ListT(IntT())
    assert sigma["E"] == AssocPath(ModelId("Seq", (ListT(IntT()),)), "E")


def test_flat_expands_nested_constraints():
    env = base_env()
    out = flat(env, ConceptC(ModelId("Monoid", (IntT(),))))
    assert len(out) == 2
    assert constraint_alpha_equal(out[0], ConceptC(ModelId("Monoid",
                                                           (IntT(),))))
    assert constraint_alpha_equal(out[1], ConceptC(ModelId("Semigroup",
                                                           (IntT(),))))


def test_flat_deduplicates():
    # a concept requiring Semigroup twice (directly and through Monoid)
    both = ConceptInfo(
        "Both", ("a",), (),
        (ConceptC(ModelId("Semigroup", (A,))),
         ConceptC(ModelId("Monoid", (A,)))), ())
    env = base_env().push(ConceptEntry(both))
    out = flat(env, ConceptC(ModelId("Both", (IntT(),))))
    names = [c.model.concept for c in out]
    assert names == ["Both", "Semigroup", "Monoid"]


def test_flat_same_type_member():
    c = ConceptInfo("Pinned", ("a",), ("T",),
                    (SameType(TVar("T"), TVar("a")),), ())
    env = base_env().push(ConceptEntry(c))
    out = flat(env, ConceptC(ModelId("Pinned", (IntT(),))))
    assert isinstance(out[1], SameType)
    # the associated type is substituted to a path through the model id
    assert out[1].lhs == AssocPath(ModelId("Pinned", (IntT(),)), "T")
    assert out[1].rhs == IntT()


def test_flat_unknown_concept():
    with pytest.raises(UnknownConceptError):
        flat(Env(), ConceptC(ModelId("Nope", (IntT(),))))


def test_satisfies_via_model_and_assumption():
    mid = ModelId("Semigroup", (IntT(),))
    minfo = ModelInfo("Semigroup", (IntT(),), (), ())
    env = base_env()
    assert not satisfies(env, ConceptC(mid))
    assert satisfies(env.push(ModelEntry(mid, minfo)), ConceptC(mid))
    assert satisfies(env.push(ConstraintEntry(ConceptC(mid))), ConceptC(mid))


def test_satisfies_up_to_provable_equality():
    mid_a = ModelId("Semigroup", (A,))
    env = (base_env()
           .push(TypeVarBind("a"))
           .push(ConstraintEntry(ConceptC(mid_a)))
           .push(TypeEq(TVar("b"), A)))
    # b is provably equal to a, so Semigroup<b> is satisfied
    assert satisfies(env, ConceptC(ModelId("Semigroup", (TVar("b"),))))
    assert not satisfies(env, ConceptC(ModelId("Semigroup", (IntT(),))))


def test_satisfies_same_type():
    env = Env().push(TypeEq(TVar("b"), IntT()))
    assert satisfies(env, SameType(TVar("b"), IntT()))
    assert not satisfies(env, SameType(TVar("b"), BoolT()))


def test_lookup_path_member():
    mid = ModelId("Semigroup", (IntT(),))
    env = base_env().push(ModelEntry(mid, ModelInfo(
        "Semigroup", (IntT(),), (), ())))
    t = lookup_path(env, (mid,), "binary_op")
    assert t == Arrow(IntT(), Arrow(IntT(), IntT()))


def test_lookup_path_nested():
    smid = ModelId("Semigroup", (IntT(),))
    mmid = ModelId("Monoid", (IntT(),))
    env = base_env().push_all([
        ModelEntry(smid, ModelInfo("Semigroup", (IntT(),), (), ())),
        ModelEntry(mmid, ModelInfo("Monoid", (IntT(),), (), ()))])
    # Monoid<int>.Semigroup<int>.binary_op goes through the nested constraint
    t = lookup_path(env, (mmid, smid), "binary_op")
    assert t == Arrow(IntT(), Arrow(IntT(), IntT()))


def test_lookup_path_assoc_substitution():
    mid = ModelId("Seq", (ListT(IntT()),))
    env = base_env().push(ModelEntry(mid, ModelInfo(
        "Seq", (ListT(IntT()),), (("E", IntT()),), ())))
    t = lookup_path(env, (mid,), "head")
    assert t == Arrow(ListT(IntT()), AssocPath(mid, "E"))


def test_lookup_path_errors():
    env = base_env()
    with pytest.raises(UnknownMemberError):
        lookup_path(env, (), "missing")
    with pytest.raises(UnknownConceptError):
        lookup_path(env, (ModelId("Nope", (IntT(),)),), "f")
    with pytest.raises(UnsatisfiedConstraintError):
        lookup_path(env, (ModelId("Semigroup", (IntT(),)),), "binary_op")
    mid = ModelId("Semigroup", (IntT(),))
    env2 = env.push(ModelEntry(mid, ModelInfo("Semigroup", (IntT(),),
                                              (), ())))
    with pytest.raises(UnknownMemberError):
        lookup_path(env2, (mid,), "nope")


def test_restrict_drops_terms_and_models():
    mid = ModelId("Semigroup", (IntT(),))
    env = (base_env()
           .push(TermBind("x", IntT()))
           .push(ModelEntry(mid, ModelInfo("Semigroup", (IntT(),), (), ())))
           .push(ConstraintEntry(ConceptC(mid)))
           .push(TypeEq(TVar("b"), IntT())))
    r = env.restrict()
    assert r.lookup_term("x") is None
    assert r.find_concept("Semigroup") is not None
    # the assumption survives but the model declaration does not
    assert list(r.concept_candidates("Semigroup")) == [mid]
    assert ("b" in r.alias_names())


def test_equations_in_declaration_order():
    env = (Env()
           .push(TypeEq(TVar("b"), IntT()))
           .push(ConstraintEntry(SameType(TVar("c"), BoolT()))))
    assert env.equations() == [(TVar("b"), IntT()), (TVar("c"), BoolT())]
