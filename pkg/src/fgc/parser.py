"""Concrete syntax: lexer, parser, scope resolution, and pretty-printer.

The parser produces fully scope-resolved trees: every type variable refers
to an enclosing binder (shadowed type binders are renamed apart), unbound
term identifiers that name a built-in operator become Prim nodes, and all
nodes carry source spans.

Diagnostic codes (closed set):
  P001  unexpected token
  P002  unexpected end of input
  P003  built-in operator applied to too few arguments
  P004  empty list literal requires nil[T]
  P010  unknown type name
  P011  unknown term name
  P012  invalid character
  P013  duplicate name in declaration
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Optional

from .ast import (
    App,
    Arrow,
    AssocPath,
    BoolLit,
    BoolT,
    ConceptC,
    ConceptDecl,
    ConceptInfo,
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
    PRIM_ARITY,
    PRIM_NAMES,
    SameType,
    SourceSpan,
    TVar,
    TyApp,
    TyLam,
    Type,
    TypeAlias,
    fresh_name,
)

KEYWORDS = {
    "concept", "model", "type", "let", "in", "lam", "Lam", "fix",
    "if", "then", "else", "forall", "true", "false", "nil", "list",
    "int", "bool",
}

PUNCT = [
    "==", "=>", "->", "(", ")", "{", "}", "[", "]", "<", ">",
    ".", ",", ";", ":", "=", "+", "-", "*",
]


@dataclass(frozen=True)
class ParseDiagnostic:
    span: SourceSpan
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.span}: error[{self.code}]: {self.message}"


class ParseError(Exception):
    """Raised by parse_program; carries one diagnostic per syntax error."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class Token:
    kind: str  # "id" | "int" | "kw" | "punct" | "eof"
    text: str
    span: SourceSpan


# ---------------------------------------------------------------- lexer


def tokenize(src: str, filename: str) -> list:
    toks = []
    line, col = 1, 1
    i, n = 0, len(src)
    ident_start = string.ascii_letters + "_"
    ident_rest = ident_start + string.digits

    def span(l0, c0, l1, c1):
        return SourceSpan(filename, l0, c0, l1, c1)

    while i < n:
        ch = src[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if src.startswith("//", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        l0, c0 = line, col
        if ch in string.digits:
            j = i
            while j < n and src[j] in string.digits:
                j += 1
            text = src[i:j]
            col += j - i
            toks.append(Token("int", text, span(l0, c0, line, col - 1)))
            i = j
            continue
        if ch in ident_start:
            j = i
            while j < n and src[j] in ident_rest:
                j += 1
            text = src[i:j]
            col += j - i
            kind = "kw" if text in KEYWORDS else "id"
            toks.append(Token(kind, text, span(l0, c0, line, col - 1)))
            i = j
            continue
        for p in PUNCT:
            if src.startswith(p, i):
                col += len(p)
                toks.append(Token("punct", p, span(l0, c0, line, col - 1)))
                i += len(p)
                break
        else:
            raise ParseError(
                [ParseDiagnostic(span(l0, c0, line, col), "P012",
                                 f"invalid character {ch!r}")]
            )
    toks.append(Token("eof", "", span(line, col, line, col)))
    return toks


# ---------------------------------------------------------------- parser


class _PError(Exception):
    def __init__(self, diag: ParseDiagnostic):
        self.diag = diag


class _Parser:
    def __init__(self, toks, filename):
        self.toks = toks
        self.pos = 0
        self.filename = filename

    # -- token helpers

    def peek(self, k=0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind in ("kw", "punct") and t.text == text

    def take(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def eat(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.take()
        return None

    def expect(self, text: str) -> Token:
        if self.at(text):
            return self.take()
        self.fail(f"expected {text!r}")

    def expect_id(self) -> Token:
        t = self.peek()
        if t.kind == "id":
            return self.take()
        self.fail("expected an identifier")

    def fail(self, msg: str):
        t = self.peek()
        if t.kind == "eof":
            raise _PError(ParseDiagnostic(t.span, "P002",
                                          f"unexpected end of input: {msg}"))
        raise _PError(ParseDiagnostic(t.span, "P001",
                                      f"{msg}, found {t.text!r}"))

    def join(self, a: SourceSpan, b: SourceSpan) -> SourceSpan:
        return SourceSpan(a.file, a.start_line, a.start_col,
                          b.end_line, b.end_col)

    def last_span(self) -> SourceSpan:
        return self.toks[max(0, self.pos - 1)].span

    # -- types

    def type_(self) -> Type:
        start = self.peek().span
        t = self.arrow_type()
        if self.at("=="):
            self.take()
            rhs = self.arrow_type()
            self.expect("=>")
            body = self.type_()
            sp = self.join(start, self.last_span())
            return Constrained(SameType(t, rhs, span=sp), body, span=sp)
        return t

    def arrow_type(self) -> Type:
        start = self.peek().span
        t = self.prefix_type()
        if self.at("->"):
            self.take()
            cod = self.type_()
            return Arrow(t, cod, span=self.join(start, self.last_span()))
        return t

    def prefix_type(self) -> Type:
        start = self.peek().span
        if self.eat("list"):
            elem = self.prefix_type()
            return ListT(elem, span=self.join(start, self.last_span()))
        if self.eat("forall"):
            b = self.expect_id()
            self.expect(".")
            body = self.type_()
            return Forall(b.text, body, span=self.join(start, self.last_span()))
        return self.atom_type()

    def atom_type(self) -> Type:
        t = self.peek()
        if t.kind == "kw" and t.text == "int":
            self.take()
            return IntT(span=t.span)
        if t.kind == "kw" and t.text == "bool":
            self.take()
            return BoolT(span=t.span)
        if self.eat("("):
            inner = self.type_()
            self.expect(")")
            return inner
        if t.kind == "id":
            self.take()
            if self.at("<"):
                mid = self.model_args(t)
                if self.eat("."):
                    return self.type_path(mid, t.span)
                # a concept application in type position must be a constraint
                self.expect("=>")
                body = self.type_()
                sp = self.join(t.span, self.last_span())
                return Constrained(ConceptC(mid, span=mid.span), body, span=sp)
            return TVar(t.text, span=t.span)
        self.fail("expected a type")

    def model_args(self, head: Token) -> ModelId:
        self.expect("<")
        args = [self.type_()]
        while self.eat(","):
            args.append(self.type_())
        self.expect(">")
        return ModelId(head.text, tuple(args),
                       span=self.join(head.span, self.last_span()))

    def type_path(self, mid: ModelId, start: SourceSpan) -> AssocPath:
        name = self.expect_id()
        if self.at("<"):
            inner_mid = self.model_args(name)
            self.expect(".")
            rest = self.type_path(inner_mid, name.span)
            return AssocPath(mid, rest, span=self.join(start, self.last_span()))
        return AssocPath(mid, name.text, span=self.join(start, name.span))

    # -- constraints

    def constraint(self) -> Constraint:
        start = self.peek().span
        t = self.peek()
        if t.kind == "id" and self.peek(1).kind == "punct" and self.peek(1).text == "<":
            save = self.pos
            try:
                self.take()
                mid = self.model_args(t)
                if not self.at("."):
                    return ConceptC(mid, span=mid.span)
            except _PError:
                pass
            self.pos = save
        lhs = self.arrow_type()
        self.expect("==")
        rhs = self.arrow_type()
        return SameType(lhs, rhs, span=self.join(start, self.last_span()))

    # -- expressions

    def expr(self) -> Expr:
        start = self.peek().span
        if self.eat("concept"):
            return self.concept_decl(start)
        if self.eat("model"):
            return self.model_decl(start)
        if self.eat("type"):
            name = self.expect_id()
            self.expect("=")
            rhs = self.type_()
            self.expect("in")
            rest = self.expr()
            return TypeAlias(name.text, rhs, rest,
                             span=self.join(start, self.last_span()))
        if self.eat("let"):
            name = self.expect_id()
            self.expect("=")
            bound = self.expr()
            self.expect("in")
            rest = self.expr()
            return Let(name.text, bound, rest,
                       span=self.join(start, self.last_span()))
        if self.eat("lam"):
            name = self.expect_id()
            ann = None
            if self.eat(":"):
                ann = self.type_()
            self.expect(".")
            body = self.expr()
            return Lam(name.text, ann, body,
                       span=self.join(start, self.last_span()))
        if self.eat("Lam"):
            name = self.expect_id()
            self.expect(".")
            body = self.expr()
            return TyLam(name.text, body,
                         span=self.join(start, self.last_span()))
        if self.eat("fix"):
            body = self.expr()
            return Fix(body, span=self.join(start, self.last_span()))
        if self.eat("if"):
            cond = self.expr()
            self.expect("then")
            thn = self.expr()
            self.expect("else")
            els = self.expr()
            return If(cond, thn, els, span=self.join(start, self.last_span()))
        ce = self.try_constrained_expr()
        if ce is not None:
            return ce
        return self.cmp_expr()

    def try_constrained_expr(self) -> Optional[Expr]:
        save = self.pos
        start = self.peek().span
        try:
            c = self.constraint()
            self.expect("=>")
        except _PError:
            self.pos = save
            return None
        body = self.expr()
        return ConstrainedE(c, body, span=self.join(start, self.last_span()))

    def cmp_expr(self) -> Expr:
        start = self.peek().span
        e = self.add_expr()
        while self.at("<") or self.at("=="):
            op = self.take().text
            rhs = self.add_expr()
            e = Prim(op, (e, rhs), span=self.join(start, self.last_span()))
        return e

    def add_expr(self) -> Expr:
        start = self.peek().span
        e = self.mul_expr()
        while self.at("+") or self.at("-"):
            op = self.take().text
            rhs = self.mul_expr()
            e = Prim(op, (e, rhs), span=self.join(start, self.last_span()))
        return e

    def mul_expr(self) -> Expr:
        start = self.peek().span
        e = self.app_expr()
        while self.at("*"):
            self.take()
            rhs = self.app_expr()
            e = Prim("*", (e, rhs), span=self.join(start, self.last_span()))
        return e

    def app_expr(self) -> Expr:
        start = self.peek().span
        e = self.atom()
        while True:
            if self.at("["):
                # type application; falls back to a list-literal argument
                save = self.pos
                self.take()
                try:
                    ty = self.type_()
                    self.expect("]")
                    e = TyApp(e, ty, span=self.join(start, self.last_span()))
                    continue
                except _PError:
                    self.pos = save
                    arg = self.atom()
                    e = App(e, arg, span=self.join(start, self.last_span()))
                    continue
            if self.starts_atom():
                arg = self.atom()
                e = App(e, arg, span=self.join(start, self.last_span()))
                continue
            return e

    def starts_atom(self) -> bool:
        t = self.peek()
        if t.kind in ("int", "id"):
            return True
        if t.kind == "kw" and t.text in ("true", "false", "nil"):
            return True
        if t.kind == "punct" and t.text == "(":
            return True
        return False

    def atom(self) -> Expr:
        t = self.peek()
        if t.kind == "int":
            self.take()
            return IntLit(int(t.text), span=t.span)
        if t.kind == "kw" and t.text in ("true", "false"):
            self.take()
            return BoolLit(t.text == "true", span=t.span)
        if t.kind == "kw" and t.text == "nil":
            self.take()
            self.expect("[")
            ty = self.type_()
            self.expect("]")
            return ListLit((), ty, span=self.join(t.span, self.last_span()))
        if self.eat("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.at("["):
            lb = self.take()
            if self.at("]"):
                self.take()
                raise _PError(ParseDiagnostic(
                    lb.span, "P004",
                    "empty list literal requires an element type: use nil[T]"))
            elems = [self.expr()]
            while self.eat(","):
                elems.append(self.expr())
            self.expect("]")
            return ListLit(tuple(elems), None,
                           span=self.join(lb.span, self.last_span()))
        if t.kind == "id":
            return self.path_expr()
        self.fail("expected an expression")

    def path_expr(self) -> Expr:
        start = self.peek().span
        prefix = []
        while True:
            t = self.expect_id()
            if self.at("<"):
                save = self.pos
                try:
                    mid = self.model_args(t)
                    self.expect(".")
                    prefix.append(mid)
                    continue
                except _PError:
                    self.pos = save
            return PathE(tuple(prefix), t.text,
                         span=self.join(start, t.span))

    # -- declarations

    def concept_decl(self, start: SourceSpan) -> Expr:
        name = self.expect_id()
        self.expect("<")
        params = [self.expect_id().text]
        while self.eat(","):
            params.append(self.expect_id().text)
        self.expect(">")
        self.expect("{")
        assocs = []
        if not self.at(";"):
            assocs.append(self.expect_id().text)
            while self.eat(","):
                assocs.append(self.expect_id().text)
        self.expect(";")
        nested = []
        if not self.at(";"):
            nested.append(self.constraint())
            while self.eat(","):
                nested.append(self.constraint())
        self.expect(";")
        members = []
        if not self.at("}"):
            members.append(self.member_sig())
            while self.eat(","):
                members.append(self.member_sig())
        self.expect("}")
        info_span = self.join(start, self.last_span())
        self.expect("in")
        rest = self.expr()
        info = ConceptInfo(name.text, tuple(params), tuple(assocs),
                           tuple(nested), tuple(members), span=info_span)
        return ConceptDecl(info, rest, span=self.join(start, self.last_span()))

    def member_sig(self):
        name = self.expect_id()
        self.expect(":")
        ty = self.type_()
        return (name.text, ty)

    def model_decl(self, start: SourceSpan) -> Expr:
        name = self.expect_id()
        self.expect("<")
        args = [self.type_()]
        while self.eat(","):
            args.append(self.type_())
        self.expect(">")
        self.expect("{")
        assoc_binds = []
        if not self.at(";"):
            assoc_binds.append(self.assoc_bind())
            while self.eat(","):
                assoc_binds.append(self.assoc_bind())
        self.expect(";")
        member_binds = []
        if not self.at("}"):
            member_binds.append(self.member_bind())
            while self.eat(","):
                member_binds.append(self.member_bind())
        self.expect("}")
        info_span = self.join(start, self.last_span())
        self.expect("in")
        rest = self.expr()
        info = ModelInfo(name.text, tuple(args), tuple(assoc_binds),
                         tuple(member_binds), span=info_span)
        return ModelDecl(info, rest, span=self.join(start, self.last_span()))

    def assoc_bind(self):
        name = self.expect_id()
        self.expect("=")
        ty = self.type_()
        return (name.text, ty)

    def member_bind(self):
        name = self.expect_id()
        self.expect("=")
        e = self.expr()
        return (name.text, e)


# ---------------------------------------------------------------- resolver


class _Resolver:
    """Checks that names are bound, renames shadowed type binders apart,
    and turns unbound built-in identifiers into Prim nodes."""

    def __init__(self):
        self.diags = []

    def err(self, span, code, msg):
        self.diags.append(ParseDiagnostic(span or _NOSPAN, code, msg))

    # tymap: source type name -> resolved name; terms: set of bound term names
    def type(self, t: Type, tymap: dict, terms) -> Type:
        match t:
            case IntT() | BoolT():
                return t
            case TVar(name):
                if name not in tymap:
                    self.err(t.span, "P010", f"unknown type name {name!r}")
                    return t
                return TVar(tymap[name], span=t.span)
            case ListT(elem):
                return ListT(self.type(elem, tymap, terms), span=t.span)
            case Arrow(dom, cod):
                return Arrow(self.type(dom, tymap, terms),
                             self.type(cod, tymap, terms), span=t.span)
            case Forall(binder, body):
                tymap2, b2 = self.bind_tyvar(tymap, binder)
                return Forall(b2, self.type(body, tymap2, terms), span=t.span)
            case Constrained(constraint, body):
                return Constrained(self.constraint(constraint, tymap, terms),
                                   self.type(body, tymap, terms), span=t.span)
            case AssocPath():
                return self.path_type(t, tymap, terms)
        raise TypeError(f"unexpected type node: {t!r}")

    def path_type(self, t: AssocPath, tymap, terms) -> AssocPath:
        mid = self.model_id(t.model, tymap, terms)
        rest = t.rest
        if isinstance(rest, AssocPath):
            rest = self.path_type(rest, tymap, terms)
        return AssocPath(mid, rest, span=t.span)

    def model_id(self, m: ModelId, tymap, terms) -> ModelId:
        return ModelId(m.concept,
                       tuple(self.type(a, tymap, terms) for a in m.type_args),
                       span=m.span)

    def constraint(self, c: Constraint, tymap, terms) -> Constraint:
        match c:
            case ConceptC(model):
                return ConceptC(self.model_id(model, tymap, terms), span=c.span)
            case SameType(lhs, rhs):
                return SameType(self.type(lhs, tymap, terms),
                                self.type(rhs, tymap, terms), span=c.span)
        raise TypeError(f"unexpected constraint node: {c!r}")

    def bind_tyvar(self, tymap: dict, name: str):
        if name in tymap.values() or name in tymap:
            newname = fresh_name(name, set(tymap) | set(tymap.values()))
        else:
            newname = name
        tymap2 = dict(tymap)
        tymap2[name] = newname
        return tymap2, newname

    def expr(self, e: Expr, tymap: dict, terms: frozenset) -> Expr:
        match e:
            case IntLit() | BoolLit():
                return e
            case Lam(param, ann, body):
                ann2 = self.type(ann, tymap, terms) if ann is not None else None
                return Lam(param, ann2,
                           self.expr(body, tymap, terms | {param}), span=e.span)
            case App(fn, arg):
                return self.app_spine(e, tymap, terms)
            case TyLam(binder, body):
                tymap2, b2 = self.bind_tyvar(tymap, binder)
                return TyLam(b2, self.expr(body, tymap2, terms), span=e.span)
            case TyApp(subject, arg):
                return TyApp(self.expr(subject, tymap, terms),
                             self.type(arg, tymap, terms), span=e.span)
            case ConstrainedE(constraint, body):
                return ConstrainedE(self.constraint(constraint, tymap, terms),
                                    self.expr(body, tymap, terms), span=e.span)
            case PathE():
                return self.path_expr(e, tymap, terms, n_args=0)
            case ConceptDecl(info, rest):
                info2 = self.concept_info(info, tymap, terms)
                return ConceptDecl(info2, self.expr(rest, tymap, terms),
                                   span=e.span)
            case ModelDecl(info, rest):
                info2 = self.model_info(info, tymap, terms)
                return ModelDecl(info2, self.expr(rest, tymap, terms),
                                 span=e.span)
            case TypeAlias(name, rhs, rest):
                rhs2 = self.type(rhs, tymap, terms)
                tymap2, n2 = self.bind_tyvar(tymap, name)
                return TypeAlias(n2, rhs2, self.expr(rest, tymap2, terms),
                                 span=e.span)
            case Let(name, bound, rest):
                return Let(name, self.expr(bound, tymap, terms),
                           self.expr(rest, tymap, terms | {name}), span=e.span)
            case Fix(body):
                return Fix(self.expr(body, tymap, terms), span=e.span)
            case If(cond, thn, els):
                return If(self.expr(cond, tymap, terms),
                          self.expr(thn, tymap, terms),
                          self.expr(els, tymap, terms), span=e.span)
            case ListLit(elems, elem_type):
                et = self.type(elem_type, tymap, terms) if elem_type is not None else None
                return ListLit(tuple(self.expr(x, tymap, terms) for x in elems),
                               et, span=e.span)
            case Prim(op, args):
                return Prim(op, tuple(self.expr(a, tymap, terms) for a in args),
                            span=e.span)
        raise TypeError(f"unexpected expression node: {e!r}")

    def app_spine(self, e: App, tymap, terms) -> Expr:
        # flatten the application spine so an unbound built-in head can
        # absorb its arguments into a Prim node
        spine = []
        head = e
        while isinstance(head, App):
            spine.append(head)
            head = head.fn
        args = [a.arg for a in reversed(spine)]
        if (isinstance(head, PathE) and not head.prefix
                and head.name in PRIM_NAMES and head.name not in terms):
            arity = PRIM_ARITY[head.name]
            if len(args) < arity:
                self.err(head.span, "P003",
                         f"built-in {head.name!r} needs {arity} argument(s)")
                return Prim(head.name,
                            tuple(self.expr(a, tymap, terms) for a in args),
                            span=e.span)
            prim = Prim(head.name,
                        tuple(self.expr(a, tymap, terms) for a in args[:arity]),
                        span=e.span)
            out = prim
            for a in args[arity:]:
                out = App(out, self.expr(a, tymap, terms), span=e.span)
            return out
        out = self.expr(head, tymap, terms)
        for a in args:
            out = App(out, self.expr(a, tymap, terms), span=e.span)
        return out

    def path_expr(self, e: PathE, tymap, terms, n_args: int) -> Expr:
        if not e.prefix:
            if e.name in terms:
                return e
            if e.name in PRIM_NAMES:
                # bare built-in without arguments
                self.err(e.span, "P003",
                         f"built-in {e.name!r} needs "
                         f"{PRIM_ARITY[e.name]} argument(s)")
                return e
            self.err(e.span, "P011", f"unknown term name {e.name!r}")
            return e
        prefix = tuple(self.model_id(m, tymap, terms) for m in e.prefix)
        return PathE(prefix, e.name, span=e.span)

    def concept_info(self, info: ConceptInfo, tymap, terms) -> ConceptInfo:
        for group, what in ((info.type_params, "type parameter"),
                            (info.assoc_types, "associated type"),
                            (tuple(n for n, _ in info.members), "member")):
            seen = set()
            for name in group:
                if name in seen:
                    self.err(info.span, "P013",
                             f"duplicate {what} {name!r} in concept "
                             f"{info.name!r}")
                seen.add(name)
        inner = dict(tymap)
        for p in info.type_params:
            inner[p] = p
        for b in info.assoc_types:
            inner[b] = b
        nested = tuple(self.constraint(c, inner, terms) for c in info.nested)
        members = tuple((n, self.type(t, inner, terms)) for n, t in info.members)
        return ConceptInfo(info.name, info.type_params, info.assoc_types,
                           nested, members, span=info.span)

    def model_info(self, info: ModelInfo, tymap, terms) -> ModelInfo:
        seen = set()
        for name, _ in info.assoc_binds:
            if name in seen:
                self.err(info.span, "P013",
                         f"duplicate associated-type binding {name!r}")
            seen.add(name)
        seen = set()
        for name, _ in info.member_binds:
            if name in seen:
                self.err(info.span, "P013",
                         f"duplicate member binding {name!r}")
            seen.add(name)
        args = tuple(self.type(a, tymap, terms) for a in info.type_args)
        assoc = tuple((n, self.type(t, tymap, terms))
                      for n, t in info.assoc_binds)
        membs = tuple((n, self.expr(x, tymap, terms))
                      for n, x in info.member_binds)
        return ModelInfo(info.concept, args, assoc, membs, span=info.span)


_NOSPAN = SourceSpan("<unknown>", 1, 1, 1, 1)


# ---------------------------------------------------------------- driver


def parse_program(src: str, filename: str = "<input>") -> Expr:
    """Parse and scope-resolve a whole program.

    Raises ParseError with one diagnostic per syntax or scope error; on a
    syntax error, parsing resumes at the next declaration keyword so that
    multiple errors can be reported.
    """
    toks = tokenize(src, filename)
    p = _Parser(toks, filename)
    diags = []
    tree = None
    try:
        tree = p.expr()
        if p.peek().kind != "eof":
            p.fail("expected end of input")
    except _PError as exc:
        diags.append(exc.diag)
        # panic-mode recovery: resume at the next declaration keyword
        while diags and p.peek().kind != "eof":
            p.take()
            while p.peek().kind != "eof" and not (
                p.peek().kind == "kw"
                and p.peek().text in ("concept", "model", "type", "let")
            ):
                p.take()
            if p.peek().kind == "eof":
                break
            try:
                p.expr()
                break
            except _PError as exc2:
                diags.append(exc2.diag)
    if diags:
        raise ParseError(diags)
    r = _Resolver()
    resolved = r.expr(tree, {}, frozenset())
    if r.diags:
        raise ParseError(r.diags)
    return resolved


def parse_type(src: str, filename: str = "<type>") -> Type:
    """Parse a standalone type (unresolved); used by tests and tooling."""
    toks = tokenize(src, filename)
    p = _Parser(toks, filename)
    try:
        t = p.type_()
        if p.peek().kind != "eof":
            p.fail("expected end of input")
    except _PError as exc:
        raise ParseError([exc.diag]) from None
    return t


# ---------------------------------------------------------------- pretty


# type precedence: 0 constrained, 1 arrow, 2 prefix, 3 atom
def pretty_type(t: Type, prec: int = 0) -> str:
    match t:
        case IntT():
            return "int"
        case BoolT():
            return "bool"
        case TVar(name):
            return name
        case ListT(elem):
            s = f"list {pretty_type(elem, 2)}"
            return _paren(s, 2 < prec)
        case Arrow(dom, cod):
            s = f"{pretty_type(dom, 2)} -> {pretty_type(cod, 1)}"
            return _paren(s, 1 < prec)
        case Forall(binder, body):
            s = f"forall {binder}. {pretty_type(body, 0)}"
            return _paren(s, 0 < prec)
        case Constrained(constraint, body):
            s = f"{pretty_constraint(constraint)} => {pretty_type(body, 0)}"
            return _paren(s, 0 < prec)
        case AssocPath(model, rest):
            rest_s = rest if isinstance(rest, str) else pretty_type(rest, 3)
            return f"{pretty_model(model)}.{rest_s}"
    raise TypeError(f"unexpected type node: {t!r}")


def pretty_model(m: ModelId) -> str:
    return f"{m.concept}<{', '.join(pretty_type(a, 0) for a in m.type_args)}>"


def pretty_constraint(c: Constraint) -> str:
    match c:
        case ConceptC(model):
            return pretty_model(model)
        case SameType(lhs, rhs):
            return f"{pretty_type(lhs, 1)} == {pretty_type(rhs, 1)}"
    raise TypeError(f"unexpected constraint node: {c!r}")


def _paren(s: str, yes: bool) -> str:
    return f"({s})" if yes else s


# expr precedence: 0 top, 1 cmp, 2 add, 3 mul, 4 app, 5 atom
_BINOP_PREC = {"<": 1, "==": 1, "+": 2, "-": 2, "*": 3}


def pretty(e: Expr, prec: int = 0) -> str:
    match e:
        case IntLit(value):
            return str(value)
        case BoolLit(value):
            return "true" if value else "false"
        case PathE(prefix, name):
            return "".join(f"{pretty_model(m)}." for m in prefix) + name
        case Lam(param, ann, body):
            annot = f": {pretty_type(ann, 0)}" if ann is not None else ""
            return _paren(f"lam {param}{annot}. {pretty(body, 0)}", 0 < prec)
        case TyLam(binder, body):
            return _paren(f"Lam {binder}. {pretty(body, 0)}", 0 < prec)
        case App(fn, arg):
            arg_s = pretty(arg, 5)
            if isinstance(arg, ListLit) and arg.elems:
                arg_s = f"({arg_s})"  # avoid confusion with type application
            return _paren(f"{pretty(fn, 4)} {arg_s}", 4 < prec)
        case TyApp(subject, arg):
            return _paren(f"{pretty(subject, 4)}[{pretty_type(arg, 0)}]",
                          4 < prec)
        case ConstrainedE(constraint, body):
            return _paren(f"{pretty_constraint(constraint)} => "
                          f"{pretty(body, 0)}", 0 < prec)
        case ConceptDecl(info, rest):
            return _paren(f"{pretty_concept(info)} in {pretty(rest, 0)}",
                          0 < prec)
        case ModelDecl(info, rest):
            return _paren(f"{pretty_model_decl(info)} in {pretty(rest, 0)}",
                          0 < prec)
        case TypeAlias(name, rhs, rest):
            return _paren(f"type {name} = {pretty_type(rhs, 0)} in "
                          f"{pretty(rest, 0)}", 0 < prec)
        case Let(name, bound, rest):
            return _paren(f"let {name} = {pretty(bound, 0)} in "
                          f"{pretty(rest, 0)}", 0 < prec)
        case Fix(body):
            return _paren(f"fix {pretty(body, 0)}", 0 < prec)
        case If(cond, thn, els):
            return _paren(f"if {pretty(cond, 0)} then {pretty(thn, 0)} "
                          f"else {pretty(els, 0)}", 0 < prec)
        case ListLit(elems, elem_type):
            if not elems:
                return f"nil[{pretty_type(elem_type, 0)}]"
            return "[" + ", ".join(pretty(x, 0) for x in elems) + "]"
        case Prim(op, args):
            if op in _BINOP_PREC:
                p = _BINOP_PREC[op]
                return _paren(f"{pretty(args[0], p)} {op} "
                              f"{pretty(args[1], p + 1)}", p < prec)
            s = op + "".join(f" {pretty(a, 5)}" for a in args)
            return _paren(s, 4 < prec)
    raise TypeError(f"unexpected expression node: {e!r}")


def pretty_concept(info: ConceptInfo) -> str:
    assocs = ", ".join(info.assoc_types)
    nested = ", ".join(pretty_constraint(c) for c in info.nested)
    members = ", ".join(f"{n} : {pretty_type(t, 0)}" for n, t in info.members)
    return (f"concept {info.name}<{', '.join(info.type_params)}> "
            f"{{ {assocs} ; {nested} ; {members} }}")


def pretty_model_decl(info: ModelInfo) -> str:
    args = ", ".join(pretty_type(a, 0) for a in info.type_args)
    assocs = ", ".join(f"{n} = {pretty_type(t, 0)}" for n, t in info.assoc_binds)
    members = ", ".join(f"{n} = {pretty(x, 0)}" for n, x in info.member_binds)
    return f"model {info.concept}<{args}> {{ {assocs} ; {members} }}"
