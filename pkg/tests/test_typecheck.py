"""Type checker: corpus programs, one test per diagnostic code, and
cascade suppression."""

import pytest

from fgc.ast import Arrow, IntT, ListT, Type
from fgc.parser import parse_program, pretty_type
from fgc.typecheck import check_program

from corpus import EXPECTED_CODES, load, well_typed_names


def check_src(src: str):
    return check_program(parse_program(src))


def codes_of(src: str):
    result = check_src(src)
    assert isinstance(result, list), f"expected a rejection, got {result!r}"
    return [d.code for d in result]


@pytest.mark.parametrize("name", well_typed_names())
def test_corpus_accepts(name):
    result = check_program(parse_program(load(name), name))
    assert isinstance(result, Type), [str(d) for d in result]


@pytest.mark.parametrize("name", sorted(EXPECTED_CODES))
def test_corpus_rejects_with_exact_codes(name):
    result = check_program(parse_program(load(name), name))
    assert isinstance(result, list)
    assert [d.code for d in result] == EXPECTED_CODES[name]


def test_golden_program_types():
    assert check_src(load("foldl.fg")) == IntT()
    t = check_src("lam xs: list int. head xs")
    assert t == Arrow(ListT(IntT()), IntT())
    t = check_src("Lam a. lam x: a. x")
    assert pretty_type(t) == "forall a. a -> a"


def test_t001_argument_mismatch_message():
    result = check_src(load("illtyped_polyapp.fg"))
    assert [d.code for d in result] == ["T001"]
    assert result[0].message \
        == "the parameter type is a but the argument type is int"


def test_t001_operand_and_branch_mismatches():
    assert codes_of("1 + true") == ["T001"]
    assert codes_of("if true then 1 else false") == ["T001"]
    assert codes_of("[1, true]") == ["T001"]


def test_t002_applying_a_non_function():
    assert codes_of("1 2") == ["T002"]
    assert codes_of("fix 3") == ["T002"]


def test_t003_unsatisfied_constraint():
    src = ("concept Eq<a> { ; ; eq : a -> a -> bool } in "
           "Eq<int>.eq 1 2")
    assert codes_of(src) == ["T003"]


def test_t004_unknown_concept_and_arity():
    assert codes_of("Nope<int>.f 1") == ["T004"]
    src = ("concept Eq<a> { ; ; eq : a -> a -> bool } in "
           "model Eq<int, int> { ; eq = 0 } in 1")
    assert codes_of(src) == ["T004"]


def test_t005_missing_model_member():
    assert codes_of(load("broken_model_missing_member.fg")) == ["T005"]


def test_t006_wrong_member_type():
    assert codes_of(load("broken_model_wrong_member_type.fg")) == ["T006"]


def test_t007_extra_model_member():
    src = ("concept Eq<a> { ; ; eq : a -> a -> bool } in "
           "model Eq<int> { ; eq = lam x: int. lam y: int. x == y, "
           "extra = 0 } in 1")
    assert codes_of(src) == ["T007"]


def test_t008_type_application_of_non_polymorphic_term():
    assert codes_of("3[int]") == ["T008"]


def test_t009_unannotated_lambda_needs_arrow_context():
    assert codes_of("let f = lam x. x in 1") == ["T009"]


def test_t010_non_boolean_condition():
    assert codes_of("if 1 then 2 else 3") == ["T010"]


def test_t011_missing_assoc_binding():
    assert codes_of(load("broken_model_missing_assoc.fg")) == ["T011"]


def test_same_type_constraints_enable_conversion():
    src = "Lam a. (a == int => lam x: a. x + 1)"
    result = check_src(src)
    assert isinstance(result, Type)
    # without the constraint the same body is rejected
    assert codes_of("Lam a. lam x: a. x + 1") == ["T001"]


def test_alias_is_transparent():
    assert check_src("type T = int in lam x: T. x + 1") \
        == Arrow(IntT(), IntT())


def test_error_does_not_cascade():
    # one mistake, one diagnostic, even though the result feeds onward
    assert codes_of("let x = 1 + true in x + x + x") == ["T001"]
    assert codes_of("(lam f: int -> int. f (f 1)) (1 2)") == ["T002"]


def test_model_satisfies_its_own_uses():
    src = ("concept Eq<a> { ; ; eq : a -> a -> bool } in "
           "model Eq<int> { ; eq = lam x: int. lam y: int. x == y } in "
           "Eq<int>.eq 1 2")
    result = check_src(src)
    assert isinstance(result, Type)


def test_constraint_scope_is_lexical():
    src = ("concept Eq<a> { ; ; eq : a -> a -> bool } in "
           "let f = (Lam a. Eq<a> => lam x: a. Eq<a>.eq x x) in "
           "Eq<int>.eq 1 2")
    # the assumption inside f does not leak out; no model for int exists
    assert codes_of(src) == ["T003"]
