"""Type equality via congruence closure.

Types are interned into a node table in a nameless (positional-binder)
form, so alpha-equivalent types share a node and congruence under binders
is plain constructor congruence.  Equality assumptions seed a union-find
which is kept closed under congruence; interning a new term after
construction re-saturates incrementally.
"""

from __future__ import annotations

from .ast import (
    Arrow,
    AssocPath,
    BoolT,
    ConceptC,
    Constrained,
    Constraint,
    Forall,
    IntT,
    ListT,
    ModelId,
    SameType,
    TVar,
    Type,
)


class NoRepresentativeError(Exception):
    """Raised when a canonical representative cannot be rebuilt (cyclic
    equation class with no ground member)."""


# preference order when choosing a class representative; lower is better
_PRIO = {
    "int": 0, "bool": 0, "list": 0, "arrow": 0, "forall": 0, "cimp": 0,
    "bvar": 0, "leaf": 0, "cc": 0, "st": 0,
    "var": 1,
    "assoc": 2,
}
_ALIAS_PRIO = 3


class ClosureState:
    def __init__(self, equations=(), alias_names=()):
        self.nodes = []       # id -> (tag, payload, children ids)
        self.node_ids = {}    # (tag, payload, children) -> id
        self.parent = []
        self.rank = []
        self.use = []         # root id -> parent node ids (valid at roots)
        self.members = []     # root id -> member node ids (valid at roots)
        self.sigtab = {}      # (tag, payload, child reps) -> node id
        self.alias_names = frozenset(alias_names)
        for lhs, rhs in equations:
            self.merge_types(lhs, rhs)

    @classmethod
    def from_env(cls, env) -> "ClosureState":
        return cls(equations=env.equations(), alias_names=env.alias_names())

    # -- union-find

    def find(self, i: int) -> int:
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def _node(self, tag: str, payload, children: tuple) -> int:
        key = (tag, payload, children)
        nid = self.node_ids.get(key)
        if nid is not None:
            return nid
        nid = len(self.nodes)
        self.nodes.append(key)
        self.node_ids[key] = nid
        self.parent.append(nid)
        self.rank.append(0)
        self.use.append([])
        self.members.append([nid])
        for c in set(children):
            self.use[self.find(c)].append(nid)
        sig = (tag, payload, tuple(self.find(c) for c in children))
        other = self.sigtab.get(sig)
        if other is None:
            self.sigtab[sig] = nid
        else:
            self._merge(nid, other)
        return nid

    def _merge(self, a: int, b: int) -> None:
        queue = [(a, b)]
        while queue:
            x, y = queue.pop()
            rx, ry = self.find(x), self.find(y)
            if rx == ry:
                continue
            if self.rank[rx] < self.rank[ry]:
                rx, ry = ry, rx
            if self.rank[rx] == self.rank[ry]:
                self.rank[rx] += 1
            # absorb ry into rx
            self.parent[ry] = rx
            self.members[rx].extend(self.members[ry])
            self.members[ry] = []
            pending = self.use[ry]
            self.use[ry] = []
            for pnode in pending:
                tag, payload, children = self.nodes[pnode]
                sig = (tag, payload, tuple(self.find(c) for c in children))
                other = self.sigtab.get(sig)
                if other is None:
                    self.sigtab[sig] = pnode
                elif self.find(other) != self.find(pnode):
                    queue.append((other, pnode))
            self.use[rx].extend(pending)

    # -- interning

    def intern(self, t: Type, bound: tuple = ()) -> int:
        match t:
            case IntT():
                return self._node("int", None, ())
            case BoolT():
                return self._node("bool", None, ())
            case TVar(name):
                if name in bound:
                    k = len(bound) - 1 - max(
                        i for i, b in enumerate(bound) if b == name)
                    return self._node("bvar", k, ())
                return self._node("var", name, ())
            case ListT(elem):
                return self._node("list", None, (self.intern(elem, bound),))
            case Arrow(dom, cod):
                return self._node(
                    "arrow", None,
                    (self.intern(dom, bound), self.intern(cod, bound)))
            case Forall(binder, body):
                return self._node(
                    "forall", None, (self.intern(body, bound + (binder,)),))
            case Constrained(constraint, body):
                return self._node(
                    "cimp", None,
                    (self.intern_constraint(constraint, bound),
                     self.intern(body, bound)))
            case AssocPath(model, rest):
                if isinstance(rest, str):
                    rid = self._node("leaf", rest, ())
                else:
                    rid = self.intern(rest, bound)
                args = tuple(self.intern(a, bound) for a in model.type_args)
                return self._node("assoc", model.concept, args + (rid,))
        raise TypeError(f"unexpected type node: {t!r}")

    def intern_constraint(self, c: Constraint, bound: tuple = ()) -> int:
        match c:
            case ConceptC(model):
                args = tuple(self.intern(a, bound) for a in model.type_args)
                return self._node("cc", model.concept, args)
            case SameType(lhs, rhs):
                return self._node(
                    "st", None,
                    (self.intern(lhs, bound), self.intern(rhs, bound)))
        raise TypeError(f"unexpected constraint node: {c!r}")

    # -- queries

    def merge_types(self, a: Type, b: Type) -> None:
        self._merge(self.intern(a), self.intern(b))

    def types_equal(self, a: Type, b: Type) -> bool:
        ia, ib = self.intern(a), self.intern(b)
        return self.find(ia) == self.find(ib)

    def model_ids_equal(self, a: ModelId, b: ModelId) -> bool:
        return (
            a.concept == b.concept
            and len(a.type_args) == len(b.type_args)
            and all(self.types_equal(x, y)
                    for x, y in zip(a.type_args, b.type_args))
        )

    def constraints_equal(self, a: Constraint, b: Constraint) -> bool:
        ia, ib = self.intern_constraint(a), self.intern_constraint(b)
        return self.find(ia) == self.find(ib)

    # -- canonical representatives

    def canonical(self, t: Type) -> Type:
        """A deterministic representative of t's class, preferring terms
        without associated-type paths and without alias variables."""
        root = self.find(self.intern(t))
        return self._rebuild(root, frozenset(), 0)

    def _prio(self, nid: int) -> int:
        tag, payload, _ = self.nodes[nid]
        if tag == "var" and payload in self.alias_names:
            return _ALIAS_PRIO
        return _PRIO[tag]

    def _rebuild(self, root: int, busy: frozenset, depth: int) -> Type:
        if root in busy:
            raise NoRepresentativeError("cyclic type equation class")
        busy = busy | {root}
        candidates = sorted(self.members[self.find(root)],
                            key=lambda n: (self._prio(n), n))
        last_err = None
        for nid in candidates:
            try:
                return self._rebuild_node(nid, busy, depth)
            except NoRepresentativeError as exc:
                last_err = exc
        raise last_err or NoRepresentativeError("empty class")

    def _rebuild_node(self, nid: int, busy: frozenset, depth: int) -> Type:
        tag, payload, children = self.nodes[nid]
        sub = lambda c, d=depth: self._rebuild(self.find(c), busy, d)
        if tag == "int":
            return IntT()
        if tag == "bool":
            return BoolT()
        if tag == "var":
            return TVar(payload)
        if tag == "bvar":
            return TVar(f"${depth - 1 - payload}")
        if tag == "list":
            return ListT(sub(children[0]))
        if tag == "arrow":
            return Arrow(sub(children[0]), sub(children[1]))
        if tag == "forall":
            return Forall(f"${depth}", sub(children[0], depth + 1))
        if tag == "cimp":
            return Constrained(self._rebuild_cnode(children[0], busy, depth),
                               sub(children[1]))
        if tag == "assoc":
            args = tuple(sub(c) for c in children[:-1])
            rtag, rpayload, _ = self.nodes[self.find(children[-1])]
            if rtag == "leaf":
                rest = rpayload
            else:
                rest = sub(children[-1])
                if not isinstance(rest, AssocPath):
                    raise NoRepresentativeError(
                        "path tail rebuilt to a non-path")
            return AssocPath(ModelId(payload, args), rest)
        if tag == "leaf":
            raise NoRepresentativeError("bare associated-type name")
        raise NoRepresentativeError(f"cannot rebuild node kind {tag!r}")

    def _rebuild_cnode(self, cid: int, busy: frozenset, depth: int):
        # constraint nodes are never merged with type nodes; rebuild the
        # node itself (its class is a singleton up to congruence)
        tag, payload, children = self.nodes[cid]
        if tag == "cc":
            args = tuple(self._rebuild(self.find(c), busy, depth)
                         for c in children)
            return ConceptC(ModelId(payload, args))
        if tag == "st":
            return SameType(self._rebuild(self.find(children[0]), busy, depth),
                            self._rebuild(self.find(children[1]), busy, depth))
        raise NoRepresentativeError(f"cannot rebuild constraint {tag!r}")

    def canonical_constraint(self, c: Constraint) -> Constraint:
        match c:
            case ConceptC(model):
                return ConceptC(ModelId(
                    model.concept,
                    tuple(self.canonical(a) for a in model.type_args)))
            case SameType(lhs, rhs):
                return SameType(self.canonical(lhs), self.canonical(rhs))
        raise TypeError(f"unexpected constraint node: {c!r}")


# ---------------------------------------------------------------- keys


def nameless(t: Type, bound: tuple = ()) -> tuple:
    """A hashable, alpha-invariant structural key for a type."""
    match t:
        case IntT():
            return ("int",)
        case BoolT():
            return ("bool",)
        case TVar(name):
            if name in bound:
                k = len(bound) - 1 - max(
                    i for i, b in enumerate(bound) if b == name)
                return ("bvar", k)
            return ("var", name)
        case ListT(elem):
            return ("list", nameless(elem, bound))
        case Arrow(dom, cod):
            return ("arrow", nameless(dom, bound), nameless(cod, bound))
        case Forall(binder, body):
            return ("forall", nameless(body, bound + (binder,)))
        case Constrained(constraint, body):
            return ("cimp", nameless_constraint(constraint, bound),
                    nameless(body, bound))
        case AssocPath(model, rest):
            r = rest if isinstance(rest, str) else nameless(rest, bound)
            return ("assoc", model.concept,
                    tuple(nameless(a, bound) for a in model.type_args), r)
    raise TypeError(f"unexpected type node: {t!r}")


def nameless_constraint(c: Constraint, bound: tuple = ()) -> tuple:
    match c:
        case ConceptC(model):
            return ("cc", model.concept,
                    tuple(nameless(a, bound) for a in model.type_args))
        case SameType(lhs, rhs):
            return ("st", nameless(lhs, bound), nameless(rhs, bound))
    raise TypeError(f"unexpected constraint node: {c!r}")
