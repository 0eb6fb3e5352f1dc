"""Monotonic normal form for one-variable constrained hybrid logic, and dualisation.

In MNF negation sits only on T, propositions and variables, and every constrained
temporal operator has the shape ``O{<=c}`` with ``c >= 1``.
"""

from __future__ import annotations

from .formula import (
    FALSE,
    TRUE,
    And,
    Binder,
    ChlTemp,
    Cmp,
    Constraint,
    Formula,
    FragmentError,
    HsMod,
    Not,
    Or,
    Prop,
    Swap,
    Top,
    Var,
)

_DUAL_OP = {"F": "G", "G": "F", "P": "H", "H": "P"}


def _le(c: int) -> Constraint:
    return Constraint(Cmp.LE, c)


def _normal_temp(op: str, k: Constraint | None, body: Formula) -> Formula:
    """Rewrite ``op{k} body`` (body already in MNF) into MNF shape."""
    if k is None:
        return ChlTemp(op, None, body)
    existential = op in ("F", "P")
    match k.op:
        case Cmp.EQ:
            raise FragmentError(f"equality constraint {op}{k} is not monotonic")
        case Cmp.LT:
            k = _le(k.c - 1)
        case Cmp.GE:
            k = Constraint(Cmp.GT, k.c - 1)
    if k.op is Cmp.LE:
        if k.c <= 0:
            # No strictly positive distance is <= 0: F/P are false, G/H vacuous.
            return FALSE if existential else TRUE
        return ChlTemp(op, k, body)
    # k.op is GT from here on.
    c = k.c
    if c <= 0:
        return ChlTemp(op, None, body)
    match op:
        case "F":
            return ChlTemp("G", _le(c), ChlTemp("F", None, body))
        case "G":
            return ChlTemp("F", _le(c), ChlTemp("G", None, body))
        case "P":
            return And((ChlTemp("P", None, TRUE), ChlTemp("H", _le(c), ChlTemp("P", None, body))))
        case "H":
            # H{>c} b fails the textbook rewrite P{<=c} H b at position 0, where the
            # left side is vacuously true; H ~T marks exactly that position.
            return Or((ChlTemp("H", None, FALSE), ChlTemp("P", _le(c), ChlTemp("H", None, body))))
    raise AssertionError(op)


def to_mnf(phi: Formula) -> Formula:
    """Monotonic normal form of a CHL/SCHL formula (semantics preserved)."""
    return _mnf(phi, False)


def _mnf(phi: Formula, neg: bool) -> Formula:
    match phi:
        case Top() | Prop() | Var():
            return Not(phi) if neg else phi
        case Not(child):
            return _mnf(child, not neg)
        case And(args):
            parts = tuple(_mnf(a, neg) for a in args)
            return Or(parts) if neg else And(parts)
        case Or(args):
            parts = tuple(_mnf(a, neg) for a in args)
            return And(parts) if neg else Or(parts)
        case ChlTemp(op, k, child):
            return _normal_temp(_DUAL_OP[op] if neg else op, k, _mnf(child, neg))
        case Binder(v, child):
            return Binder(v, _mnf(child, neg))
        case Swap(v, child):
            return Swap(v, _mnf(child, neg))
        case HsMod():
            raise FragmentError("interval modalities have no hybrid normal form; translate first")
    raise TypeError(phi)


def is_mnf(phi: Formula) -> bool:
    for node in phi.subformulas():
        match node:
            case Not(child) if not isinstance(child, (Top, Prop, Var)):
                return False
            case ChlTemp(_, k, _) if k is not None and (k.op is not Cmp.LE or k.c < 1):
                return False
            case HsMod():
                return False
    return True


def dual(phi: Formula) -> Formula:
    """The MNF of the negation of an MNF formula, computed syntactically."""
    match phi:
        case Top() | Prop() | Var():
            return Not(phi)
        case Not(child) if isinstance(child, (Top, Prop, Var)):
            return child
        case And(args):
            return Or(tuple(dual(a) for a in args))
        case Or(args):
            return And(tuple(dual(a) for a in args))
        case ChlTemp(op, k, child):
            return ChlTemp(_DUAL_OP[op], k, dual(child))
        case Binder(v, child):
            return Binder(v, dual(child))
        case Swap(v, child):
            return Swap(v, dual(child))
    raise FragmentError(f"dual expects an MNF formula, got {phi!r}")


# -- negation normal form for interval formulas ------------------------------


def hs_nnf(phi: Formula, neg: bool = False) -> Formula:
    """Push negations in an HS/DHS formula down to propositions and T.

    Universal modalities are kept as first-class ``[X]`` nodes.
    """
    match phi:
        case Top() | Prop():
            return Not(phi) if neg else phi
        case Not(child):
            return hs_nnf(child, not neg)
        case And(args):
            parts = tuple(hs_nnf(a, neg) for a in args)
            return Or(parts) if neg else And(parts)
        case Or(args):
            parts = tuple(hs_nnf(a, neg) for a in args)
            return And(parts) if neg else Or(parts)
        case HsMod(rel, universal, k, child):
            return HsMod(rel, universal != neg, k, hs_nnf(child, neg))
    raise FragmentError(f"not an interval formula: {phi!r}")


def expand_boxes(phi: Formula) -> Formula:
    """Replace every ``[X]psi`` by ``~<X>~psi``."""
    match phi:
        case HsMod(rel, True, k, child):
            return Not(HsMod(rel, False, k, Not(expand_boxes(child))))
        case HsMod(rel, False, k, child):
            return HsMod(rel, False, k, expand_boxes(child))
        case Not(child):
            return Not(expand_boxes(child))
        case And(args):
            return And(tuple(expand_boxes(a) for a in args))
        case Or(args):
            return Or(tuple(expand_boxes(a) for a in args))
        case ChlTemp(op, k, child):
            return ChlTemp(op, k, expand_boxes(child))
        case Binder(v, child):
            return Binder(v, expand_boxes(child))
        case Swap(v, child):
            return Swap(v, expand_boxes(child))
    return phi
