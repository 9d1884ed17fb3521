"""Type synthesis and checking for the surface language.

The checker is syntax-directed: constrained types are introduced explicitly
by the `C => e` form and eliminated lazily — a constraint is discharged only
when the surrounding context demands a specific type shape (function
position, instantiation subject, condition, comparison against another
type).  Type equality is decided by the congruence closure built from the
environment's equations.

Diagnostic codes (closed set):
  T001  application / comparison mismatch
  T002  non-function applied
  T003  unsatisfied constraint
  T004  unknown concept (or concept arity mismatch)
  T005  model member missing
  T006  model member type mismatch
  T007  unknown member
  T008  non-universal instantiated
  T009  annotation required
  T010  condition not bool
  T011  model associated-type binding missing or unknown
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ast import (
    App,
    Arrow,
    AssocPath,
    BoolLit,
    BoolT,
    ConceptC,
    ConceptDecl,
    Constrained,
    ConstrainedE,
    Constraint,
    Expr,
    Fix,
    Forall,
    If,
    IntLit,
    IntT,
    Lam,
    Let,
    ListLit,
    ListT,
    ModelDecl,
    ModelId,
    ModelInfo,
    PathE,
    Prim,
    SameType,
    SourceSpan,
    TVar,
    TyApp,
    TyLam,
    Type,
    TypeAlias,
    substitute_constraint,
    substitute_type,
    substitute_type_map,
)
from .env import (
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
    flat,
    lookup_path,
    satisfies,
)
from .parser import pretty_constraint, pretty_type
from .typeq import ClosureState, NoRepresentativeError


@dataclass(frozen=True)
class TypeDiagnostic:
    span: Optional[SourceSpan]
    code: str
    message: str
    notes: tuple = ()

    def __str__(self) -> str:
        where = str(self.span) if self.span else "<unknown>"
        out = f"{where}: error[{self.code}]: {self.message}"
        for nspan, ntext in self.notes:
            nwhere = str(nspan) if nspan else "<unknown>"
            out += f"\n  {nwhere}: note: {ntext}"
        return out


@dataclass(frozen=True)
class ErrT(Type):
    """Placeholder type assigned after an error; equal to every type so a
    single mistake does not cascade into follow-on diagnostics."""


ERR = ErrT()


def contains_err(t: Type) -> bool:
    match t:
        case ErrT():
            return True
        case IntT() | BoolT() | TVar():
            return False
        case ListT(elem):
            return contains_err(elem)
        case Arrow(dom, cod):
            return contains_err(dom) or contains_err(cod)
        case Forall(_, body):
            return contains_err(body)
        case Constrained(constraint, body):
            return _constraint_err(constraint) or contains_err(body)
        case AssocPath(model, rest):
            if any(contains_err(a) for a in model.type_args):
                return True
            return isinstance(rest, AssocPath) and contains_err(rest)
    raise TypeError(f"unexpected type node: {t!r}")


def _has_path(t: Type) -> bool:
    match t:
        case AssocPath():
            return True
        case IntT() | BoolT() | TVar() | ErrT():
            return False
        case ListT(elem):
            return _has_path(elem)
        case Arrow(dom, cod):
            return _has_path(dom) or _has_path(cod)
        case Forall(_, body):
            return _has_path(body)
        case Constrained(constraint, body):
            if _has_path(body):
                return True
            match constraint:
                case ConceptC(model):
                    return any(_has_path(a) for a in model.type_args)
                case SameType(lhs, rhs):
                    return _has_path(lhs) or _has_path(rhs)
    raise TypeError(f"unexpected type node: {t!r}")


def _constraint_err(c: Constraint) -> bool:
    match c:
        case ConceptC(model):
            return any(contains_err(a) for a in model.type_args)
        case SameType(lhs, rhs):
            return contains_err(lhs) or contains_err(rhs)
    raise TypeError(f"unexpected constraint node: {c!r}")


class Checker:
    def __init__(self):
        self.diags = []
        self._closures = {}

    # -- infrastructure

    def err(self, span, code, message, notes=()):
        self.diags.append(TypeDiagnostic(span, code, message, tuple(notes)))

    def closure(self, env: Env) -> ClosureState:
        key = (tuple(env.equations()), frozenset(env.alias_names()))
        st = self._closures.get(key)
        if st is None:
            st = ClosureState(equations=key[0], alias_names=key[1])
            self._closures[key] = st
        return st

    def equal(self, env: Env, a: Type, b: Type) -> bool:
        if contains_err(a) or contains_err(b):
            return True
        return self.closure(env).types_equal(a, b)

    def discharge(self, env: Env, t: Type) -> Type:
        """Strip satisfied constraints off the front of t."""
        while isinstance(t, Constrained) and satisfies(
                env, t.constraint, self.closure(env)):
            t = t.body
        return t

    def _shape(self, env: Env, t: Type, want) -> Optional[Type]:
        """Expose t as an instance of the constructor class `want`, first
        discharging satisfied constraints, then canonicalizing through the
        environment's equations."""
        if contains_err(t):
            return None
        t = self.discharge(env, t)
        if isinstance(t, want):
            return t
        try:
            c = self.closure(env).canonical(t)
        except NoRepresentativeError:
            return None
        if isinstance(c, want):
            return c
        return None

    def satisfy(self, env: Env, c: Constraint, span) -> bool:
        """Constraint satisfaction with a T003/T004 diagnostic on failure."""
        if _constraint_err(c):
            return True
        if isinstance(c, ConceptC):
            info = env.find_concept(c.model.concept)
            if info is None:
                self.err(span, "T004",
                         f"unknown concept {c.model.concept!r}")
                return False
            if len(info.type_params) != len(c.model.type_args):
                self.err(span, "T004",
                         f"concept {c.model.concept!r} takes "
                         f"{len(info.type_params)} type argument(s), got "
                         f"{len(c.model.type_args)}")
                return False
        if satisfies(env, c, self.closure(env)):
            return True
        self.err(span, "T003",
                 f"unsatisfied constraint {self._show_constraint(env, c)}")
        return False

    def _show_constraint(self, env: Env, c: Constraint) -> str:
        try:
            c = self.closure(env).canonical_constraint(c)
        except NoRepresentativeError:
            pass
        return pretty_constraint(c)

    def _assume(self, env: Env, c: Constraint, span) -> Optional[Env]:
        """Extend env with the flat expansion of an assumed constraint."""
        try:
            expanded = flat(env, c)
        except UnknownConceptError as exc:
            self.err(span, "T004", str(exc))
            return None
        if isinstance(c, ConceptC):
            info = env.find_concept(c.model.concept)
            if len(info.type_params) != len(c.model.type_args):
                self.err(span, "T004",
                         f"concept {c.model.concept!r} takes "
                         f"{len(info.type_params)} type argument(s), got "
                         f"{len(c.model.type_args)}")
                return None
        return env.push_all(ConstraintEntry(fc) for fc in expanded)

    # -- synthesis

    def infer(self, env: Env, e: Expr) -> Type:
        match e:
            case IntLit():
                return IntT()
            case BoolLit():
                return BoolT()
            case PathE(prefix, name):
                try:
                    return lookup_path(env, prefix, name)
                except UnsatisfiedConstraintError as exc:
                    self.err(e.span, "T003",
                             "unsatisfied constraint "
                             f"{self._show_constraint(env, exc.constraint)}")
                except UnknownConceptError as exc:
                    self.err(e.span, "T004", str(exc))
                except UnknownMemberError as exc:
                    self.err(e.span, "T007", str(exc))
                return ERR
            case Lam(param, ann, body):
                if ann is None:
                    self.err(e.span, "T009",
                             f"parameter {param!r} needs a type annotation "
                             "here")
                    self.infer(env.push(TermBind(param, ERR)), body)
                    return ERR
                cod = self.infer(env.push(TermBind(param, ann)), body)
                return Arrow(ann, cod)
            case App(fn, arg):
                tf = self.infer(env, fn)
                arrow = self._shape(env, tf, Arrow)
                if arrow is None:
                    if not contains_err(tf):
                        self.err(fn.span, "T002",
                                 "applied a non-function of type "
                                 f"{pretty_type(self.discharge(env, tf))}")
                    self.infer(env, arg)
                    return ERR
                ta = self.infer(env, arg)
                if not (self.equal(env, arrow.dom, ta)
                        or self.equal(env, arrow.dom,
                                      self.discharge(env, ta))):
                    self.err(e.span, "T001",
                             "the parameter type is "
                             f"{pretty_type(arrow.dom)} but the argument "
                             f"type is {pretty_type(ta)}")
                    return ERR
                return arrow.cod
            case TyLam(binder, body):
                t = self.infer(env.push(TypeVarBind(binder)), body)
                return Forall(binder, t)
            case TyApp(subject, arg):
                ts = self.infer(env, subject)
                fa = self._shape(env, ts, Forall)
                if fa is None:
                    if not contains_err(ts):
                        self.err(subject.span, "T008",
                                 "instantiated a non-universal of type "
                                 f"{pretty_type(self.discharge(env, ts))}")
                    return ERR
                return substitute_type(fa.body, fa.binder, arg)
            case ConstrainedE(constraint, body):
                env2 = self._assume(env, constraint, e.span)
                if env2 is None:
                    self.infer(env, body)
                    return ERR
                return Constrained(constraint, self.infer(env2, body))
            case ConceptDecl(info, rest):
                for nc in info.nested:
                    if isinstance(nc, ConceptC) and env.find_concept(
                            nc.model.concept) is None and nc.model.concept \
                            != info.name:
                        self.err(info.span, "T004",
                                 f"unknown concept {nc.model.concept!r} in "
                                 f"constraints of {info.name!r}")
                return self.infer(env.push(ConceptEntry(info)), rest)
            case ModelDecl(info, rest):
                env2 = self.check_model(env, info, info.span)
                if env2 is None:
                    return self.infer(env, rest)
                t = self.infer(env2, rest)
                # the model's associated-type equations go out of scope
                # here, so resolve any paths through them in the result
                if not contains_err(t) and _has_path(t):
                    try:
                        t = self.closure(env2).canonical(t)
                    except NoRepresentativeError:
                        pass
                return t
            case TypeAlias(name, rhs, rest):
                t = self.infer(env.push(TypeEq(TVar(name), rhs)), rest)
                if contains_err(t):
                    return t
                return substitute_type(t, name, rhs)
            case Let(name, bound, rest):
                tb = self.infer(env, bound)
                return self.infer(env.push(TermBind(name, tb)), rest)
            case Fix(body):
                tb = self.infer(env, body)
                arrow = self._shape(env, tb, Arrow)
                if arrow is None:
                    if not contains_err(tb):
                        self.err(e.span, "T002",
                                 "fix needs a function, got "
                                 f"{pretty_type(self.discharge(env, tb))}")
                    return ERR
                if not self.equal(env, arrow.dom, arrow.cod):
                    self.err(e.span, "T001",
                             "fix needs matching argument and result "
                             f"types, got {pretty_type(arrow)}")
                    return ERR
                return arrow.dom
            case If(cond, thn, els):
                tc = self.infer(env, cond)
                if self._shape(env, tc, BoolT) is None:
                    self.err(cond.span, "T010",
                             "condition has type "
                             f"{pretty_type(self.discharge(env, tc))}, "
                             "not bool")
                tt = self.infer(env, thn)
                te = self.infer(env, els)
                if self.equal(env, tt, te):
                    return tt
                if self.equal(env, self.discharge(env, tt),
                              self.discharge(env, te)):
                    return self.discharge(env, tt)
                self.err(e.span, "T001",
                         f"branches have types {pretty_type(tt)} and "
                         f"{pretty_type(te)}")
                return ERR
            case ListLit(elems, elem_type):
                if not elems:
                    return ListT(elem_type)
                t0 = self.infer(env, elems[0])
                for x in elems[1:]:
                    tx = self.infer(env, x)
                    if not (self.equal(env, t0, tx) or self.equal(
                            env, t0, self.discharge(env, tx))):
                        self.err(x.span, "T001",
                                 "list element has type "
                                 f"{pretty_type(tx)}, expected "
                                 f"{pretty_type(t0)}")
                return ListT(t0)
            case Prim(op, args):
                return self.infer_prim(env, e, op, args)
        raise TypeError(f"unexpected expression node: {e!r}")

    def infer_prim(self, env: Env, e: Expr, op: str, args: tuple) -> Type:
        if op in ("+", "-", "*", "<", "=="):
            for a in args:
                ta = self.infer(env, a)
                if self._shape(env, ta, IntT) is None \
                        and not contains_err(ta):
                    self.err(a.span, "T001",
                             f"operator {op!r} needs int operands, got "
                             f"{pretty_type(self.discharge(env, ta))}")
            return IntT() if op in ("+", "-", "*") else BoolT()
        if op in ("isnil", "head", "tail"):
            ta = self.infer(env, args[0])
            lst = self._shape(env, ta, ListT)
            if lst is None:
                if not contains_err(ta):
                    self.err(args[0].span, "T001",
                             f"{op} needs a list, got "
                             f"{pretty_type(self.discharge(env, ta))}")
                return BoolT() if op == "isnil" else ERR
            if op == "isnil":
                return BoolT()
            return lst.elem if op == "head" else lst
        if op == "cons":
            th = self.infer(env, args[0])
            tt = self.infer(env, args[1])
            if contains_err(th) or contains_err(tt):
                return ListT(th)
            if not (self.equal(env, tt, ListT(th)) or self.equal(
                    env, self.discharge(env, tt), ListT(th))):
                self.err(e.span, "T001",
                         f"cons of {pretty_type(th)} onto "
                         f"{pretty_type(tt)}")
            return ListT(th)
        raise TypeError(f"unknown primitive {op!r}")

    # -- checking mode

    def check(self, env: Env, e: Expr, expected: Type, code: str = "T001",
              subject: str = "expression") -> None:
        """Check e against expected; unannotated lambdas take their domain
        from the expected arrow type."""
        if contains_err(expected):
            self.infer(env, e)
            return
        expected = self.discharge(env, expected)
        match e:
            case Lam(param, ann, body):
                arrow = self._shape(env, expected, Arrow)
                if arrow is None:
                    if ann is None:
                        self.err(e.span, "T009",
                                 f"parameter {param!r} needs a type "
                                 "annotation: expected type "
                                 f"{pretty_type(expected)} is not a "
                                 "function type")
                        return
                    self._check_via_infer(env, e, expected, code, subject)
                    return
                if ann is not None and not self.equal(env, ann, arrow.dom):
                    self.err(e.span, code,
                             f"{subject} takes {pretty_type(ann)} but "
                             f"{pretty_type(arrow.dom)} was expected")
                    return
                bound = ann if ann is not None else arrow.dom
                self.check(env.push(TermBind(param, bound)), body,
                           arrow.cod, code, subject)
                return
            case TyLam(binder, body):
                fa = self._shape(env, expected, Forall)
                if fa is None:
                    self._check_via_infer(env, e, expected, code, subject)
                    return
                inner = substitute_type(fa.body, fa.binder, TVar(binder))
                self.check(env.push(TypeVarBind(binder)), body, inner,
                           code, subject)
                return
            case ConstrainedE(constraint, body):
                if isinstance(expected, Constrained) and self.closure(
                        env).constraints_equal(constraint,
                                               expected.constraint):
                    env2 = self._assume(env, constraint, e.span)
                    if env2 is not None:
                        self.check(env2, body, expected.body, code, subject)
                    return
                self._check_via_infer(env, e, expected, code, subject)
                return
            case If(cond, thn, els):
                tc = self.infer(env, cond)
                if self._shape(env, tc, BoolT) is None \
                        and not contains_err(tc):
                    self.err(cond.span, "T010",
                             "condition has type "
                             f"{pretty_type(self.discharge(env, tc))}, "
                             "not bool")
                self.check(env, thn, expected, code, subject)
                self.check(env, els, expected, code, subject)
                return
            case Let(name, bound, rest):
                tb = self.infer(env, bound)
                self.check(env.push(TermBind(name, tb)), rest, expected,
                           code, subject)
                return
        self._check_via_infer(env, e, expected, code, subject)

    def _check_via_infer(self, env, e, expected, code, subject):
        t = self.infer(env, e)
        if self.equal(env, t, expected):
            return
        if self.equal(env, self.discharge(env, t), expected):
            return
        self.err(e.span, code,
                 f"{subject} has type {pretty_type(t)}, expected "
                 f"{pretty_type(expected)}")

    # -- declarations

    def check_model(self, env: Env, info: ModelInfo, span) -> Optional[Env]:
        cinfo = env.find_concept(info.concept)
        if cinfo is None:
            self.err(span, "T004", f"unknown concept {info.concept!r}")
            return None
        if len(cinfo.type_params) != len(info.type_args):
            self.err(span, "T004",
                     f"concept {info.concept!r} takes "
                     f"{len(cinfo.type_params)} type argument(s), got "
                     f"{len(info.type_args)}")
            return None
        ok = True
        bound_assocs = dict(info.assoc_binds)
        for b in cinfo.assoc_types:
            if b not in bound_assocs:
                self.err(span, "T011",
                         f"model of {info.concept!r} does not bind "
                         f"associated type {b!r}")
                ok = False
        for b in bound_assocs:
            if b not in cinfo.assoc_types:
                self.err(span, "T011",
                         f"model of {info.concept!r} binds {b!r}, which is "
                         "not an associated type of the concept")
                ok = False
        declared = dict(cinfo.members)
        bound_members = dict(info.member_binds)
        for name in declared:
            if name not in bound_members:
                self.err(span, "T005",
                         f"model of {info.concept!r} does not define "
                         f"member {name!r}")
                ok = False
        for name in bound_members:
            if name not in declared:
                self.err(span, "T007",
                         f"model of {info.concept!r} defines {name!r}, "
                         "which is not a member of the concept")
                ok = False
        if not ok:
            return None
        sigma = dict(zip(cinfo.type_params, info.type_args))
        for b, t in info.assoc_binds:
            sigma[b] = t
        for nc in cinfo.nested:
            if not self.satisfy(env, substitute_constraint(nc, sigma), span):
                ok = False
        for name, body in info.member_binds:
            expected = substitute_type_map(declared[name], sigma)
            self.check(env, body, expected, code="T006",
                       subject=f"member {name!r}")
        if not ok:
            return None
        mid = ModelId(info.concept, info.type_args)
        out = env.push(ModelEntry(mid, info))
        for b, t in info.assoc_binds:
            out = out.push(TypeEq(AssocPath(mid, b), t))
        return out


def check_program(e: Expr):
    """Infer the type of a whole program under the empty environment.

    Returns the program type on success, or the list of TypeDiagnostic on
    failure.
    """
    checker = Checker()
    t = checker.infer(Env(), e)
    if checker.diags:
        return checker.diags
    return t
