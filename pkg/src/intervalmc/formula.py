"""Formula trees shared by the interval logics (HS, DHS) and the hybrid logics (CHL, SCHL).

All nodes are frozen dataclasses, so formulas hash and compare structurally and can
be used freely as dictionary keys and memo entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional


class FragmentError(ValueError):
    """Raised when a formula lies outside the fragment an operation supports."""


class Cmp(Enum):
    LT = "<"
    LE = "<="
    EQ = "="
    GT = ">"
    GE = ">="


_INVERSE = {Cmp.LT: Cmp.GT, Cmp.GT: Cmp.LT, Cmp.LE: Cmp.GE, Cmp.GE: Cmp.LE, Cmp.EQ: Cmp.EQ}


@dataclass(frozen=True)
class Constraint:
    """A comparison ``d op c`` on a distance or length difference ``d``."""

    op: Cmp
    c: int

    def holds(self, d: int) -> bool:
        match self.op:
            case Cmp.LT:
                return d < self.c
            case Cmp.LE:
                return d <= self.c
            case Cmp.EQ:
                return d == self.c
            case Cmp.GT:
                return d > self.c
            case Cmp.GE:
                return d >= self.c
        raise AssertionError(self.op)

    def invert(self) -> "Constraint":
        """The map written (~c)^-1: mirror the comparator and negate the constant."""
        return Constraint(_INVERSE[self.op], -self.c)

    def interval(self, lo: int = 1) -> tuple[int, Optional[int]]:
        """Integer range ``[a, b]`` (``b`` None for unbounded) of distances ``d >= lo`` satisfying it.

        An empty range is returned as ``(1, 0)``-style pairs with ``a > b``.
        """
        match self.op:
            case Cmp.LT:
                return lo, self.c - 1
            case Cmp.LE:
                return lo, self.c
            case Cmp.EQ:
                return max(lo, self.c), self.c
            case Cmp.GT:
                return max(lo, self.c + 1), None
            case Cmp.GE:
                return max(lo, self.c), None
        raise AssertionError(self.op)

    def __str__(self) -> str:
        return f"{{{self.op.value}{self.c}}}"


RELATIONS = ("A", "L", "B", "E", "D", "O", "Abar", "Lbar", "Bbar", "Ebar", "Dbar", "Obar")
SIMPLE_RELATIONS = frozenset({"B", "E", "D", "Bbar", "Ebar", "Dbar"})
TEMPORAL_OPS = ("F", "P", "G", "H")


def inverse_relation(rel: str) -> str:
    return rel[:-3] if rel.endswith("bar") else rel + "bar"


class Formula:
    """Base class; concrete node types are the frozen dataclasses below."""

    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __and__(self, other: "Formula") -> "Formula":
        return And((self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Or((self, other))

    def __invert__(self) -> "Formula":
        return Not(self)

    def __str__(self) -> str:
        from .syntax import to_text

        return to_text(self)

    def subformulas(self) -> Iterator["Formula"]:
        """Every node of the tree, parents before children (repeats included)."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children()))


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    child: Formula

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class HsMod(Formula):
    """``<X>`` (existential) or ``[X]`` (universal), optionally constrained by |J| - |I| op c."""

    rel: str
    universal: bool
    constraint: Optional[Constraint]
    child: Formula

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"unknown interval relation {self.rel!r}")

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class ChlTemp(Formula):
    """F/P (strict future/past, existential) and G/H (their universal duals)."""

    op: str
    constraint: Optional[Constraint]
    child: Formula

    def __post_init__(self):
        if self.op not in TEMPORAL_OPS:
            raise ValueError(f"unknown temporal operator {self.op!r}")

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Binder(Formula):
    var: str
    child: Formula

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Swap(Formula):
    var: str
    child: Formula

    def children(self):
        return (self.child,)


TRUE = Top()
FALSE = Not(TRUE)


# -- small constructors -------------------------------------------------------


def conj(*args: Formula) -> Formula:
    if not args:
        return TRUE
    return args[0] if len(args) == 1 else And(tuple(args))


def disj(*args: Formula) -> Formula:
    if not args:
        return FALSE
    return args[0] if len(args) == 1 else Or(tuple(args))


def implies(a: Formula, b: Formula) -> Formula:
    return Or((Not(a), b))


def dia(rel: str, child: Formula, constraint: Optional[Constraint] = None) -> HsMod:
    return HsMod(rel, False, constraint, child)


def box(rel: str, child: Formula, constraint: Optional[Constraint] = None) -> HsMod:
    return HsMod(rel, True, constraint, child)


def temp(op: str, child: Formula, constraint: Optional[Constraint] = None) -> ChlTemp:
    return ChlTemp(op, constraint, child)


def le(c: int) -> Constraint:
    return Constraint(Cmp.LE, c)


def ge(c: int) -> Constraint:
    return Constraint(Cmp.GE, c)


def len_k(k: int) -> Formula:
    """Holds exactly on intervals of length k (k >= 1)."""
    if k < 1:
        raise ValueError("interval lengths start at 1")
    body: Formula = TRUE
    for _ in range(k - 1):
        body = dia("B", body)
    nope: Formula = Not(TRUE)
    for _ in range(k):
        nope = box("B", nope)
    return And((body, nope))


# -- classification -----------------------------------------------------------


@dataclass(frozen=True)
class FragmentDescriptor:
    family: str
    variables: int
    monotonic: bool
    simple: bool
    constrained_relations: frozenset = field(default_factory=frozenset)


def constraints_of(phi: Formula) -> list[Constraint]:
    out = []
    for node in phi.subformulas():
        if isinstance(node, (HsMod, ChlTemp)) and node.constraint is not None:
            out.append(node.constraint)
    return out


def variables_of(phi: Formula) -> frozenset[str]:
    names = set()
    for node in phi.subformulas():
        match node:
            case Var(name) | Binder(name, _) | Swap(name, _):
                names.add(name)
    return frozenset(names)


def is_monotonic(phi: Formula) -> bool:
    return all(k.op is not Cmp.EQ for k in constraints_of(phi))


def in_simple(phi: Formula) -> bool:
    return all(
        node.rel in SIMPLE_RELATIONS
        for node in phi.subformulas()
        if isinstance(node, HsMod) and node.constraint is not None
    )


def free_vars(phi: Formula) -> frozenset[str]:
    match phi:
        case Var(name):
            return frozenset({name})
        case Binder(name, child) | Swap(name, child):
            return free_vars(child) - {name}
        case _:
            out: frozenset[str] = frozenset()
            for ch in phi.children():
                out |= free_vars(ch)
            return out


def is_sentence(phi: Formula) -> bool:
    return not free_vars(phi)


def classify(phi: Formula) -> FragmentDescriptor:
    has_hs = has_chl = has_swap = False
    rels = set()
    for node in phi.subformulas():
        match node:
            case HsMod(rel, _, k, _):
                has_hs = True
                if k is not None:
                    rels.add(rel)
            case Swap():
                has_chl = has_swap = True
            case ChlTemp() | Binder() | Var():
                has_chl = True
    if has_hs and has_chl:
        raise FragmentError("formula mixes interval modalities with hybrid operators")
    if has_hs:
        family = "DHS" if rels else "HS"
    elif has_swap:
        family = "SCHL"
    else:
        # A purely Boolean formula is read as CHL (evaluated at a position).
        family = "CHL"
    return FragmentDescriptor(
        family=family,
        variables=len(variables_of(phi)),
        monotonic=is_monotonic(phi),
        simple=in_simple(phi),
        constrained_relations=frozenset(rels),
    )


def is_dhs(phi: Formula) -> bool:
    return classify(phi).family in ("DHS", "HS")


def temporal_nodes(phi: Formula) -> int:
    return sum(isinstance(n, (HsMod, ChlTemp)) for n in phi.subformulas())


def max_constant(phi: Formula) -> int:
    return max((abs(k.c) for k in constraints_of(phi)), default=0)


# -- size -----------------------------------------------------------------------


def _shape(phi: Formula, memo: dict) -> tuple:
    """A hashable shape that identifies And/Or nodes up to child order."""
    got = memo.get(id(phi))
    if got is not None:
        return got[1]
    match phi:
        case And(args) | Or(args):
            key = (type(phi).__name__, tuple(sorted((_shape(a, memo) for a in args), key=repr)))
        case Top() | Prop() | Var():
            key = (type(phi).__name__, getattr(phi, "name", ""))
        case HsMod(rel, univ, k, child):
            key = ("HsMod", rel, univ, k and (k.op.value, k.c), _shape(child, memo))
        case ChlTemp(op, k, child):
            key = ("ChlTemp", op, k and (k.op.value, k.c), _shape(child, memo))
        case Binder(v, child) | Swap(v, child):
            key = (type(phi).__name__, v, _shape(child, memo))
        case Not(child):
            key = ("Not", _shape(child, memo))
        case _:
            raise TypeError(phi)
    memo[id(phi)] = (phi, key)
    return key


def distinct_subformulas(phi: Formula) -> int:
    memo: dict = {}
    return len({_shape(node, memo) for node in phi.subformulas()})


def bits(c: int) -> int:
    return max(1, abs(c).bit_length())


def size(phi: Formula) -> int:
    """Distinct subformulas times the bit length of the largest constant."""
    return distinct_subformulas(phi) * bits(max_constant(phi))
