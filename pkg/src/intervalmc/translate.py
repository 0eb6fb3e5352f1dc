"""Formula-to-formula translations between the interval and hybrid logics.

Interval side to hybrid side: the two endpoints of the current interval are carried
by one position variable and the current position. Hybrid side back to intervals:
the same reading run in reverse. All translations are checked against the oracle in
the test suite; nothing here evaluates formulas.
"""

from __future__ import annotations

from typing import Optional

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
    dia,
    disj,
    is_dhs,
    len_k,
    variables_of,
)
from .mnf import expand_boxes
from .syntax import to_text

ABB_RELATIONS = frozenset({"A", "B", "Bbar"})
CORE_RELATIONS = frozenset({"B", "E", "Bbar", "Ebar"})


def _inv(k: Optional[Constraint]) -> Optional[Constraint]:
    return None if k is None else k.invert()


def _one_var(phi: Formula, default: str = "x") -> str:
    names = variables_of(phi)
    if len(names) > 1:
        raise FragmentError(f"expected one variable, found {sorted(names)}")
    return next(iter(names), default)


def _require_dhs(phi: Formula) -> None:
    if any(isinstance(n, (ChlTemp, Binder, Swap, Var)) for n in phi.subformulas()):
        raise FragmentError("expected an interval (HS/DHS) formula")


# -- D(ABBbar) to CHL1 -----------------------------------------------------------


def check_dab(phi: Formula) -> None:
    """Raise a FragmentError naming the first node outside D(A, B, Bbar)."""
    _require_dhs(phi)
    for node in phi.subformulas():
        if isinstance(node, HsMod):
            if node.rel not in ABB_RELATIONS:
                raise FragmentError(f"modality {node.rel} is outside D(A,B,Bbar): {to_text(node)}")
            if node.rel == "A" and node.constraint is not None:
                raise FragmentError(f"constrained <A> is outside DHS_simple: {to_text(node)}")


def dab_to_chl1(phi: Formula, var: str = "x") -> Formula:
    """A CHL1 sentence equivalent (at position 0) to a D(A,B,Bbar) formula at [0,0]."""
    check_dab(phi)
    x = Var(var)
    memo: dict = {}

    def f(psi: Formula) -> Formula:
        got = memo.get(psi)
        if got is not None:
            return got
        match psi:
            case Top():
                out = psi
            case Prop():
                # psi holds now and at every position from x up to now.
                out = And((psi, Not(ChlTemp("P", None, And((Not(psi), Or((x, ChlTemp("P", None, x)))))))))
            case Not(child):
                out = Not(f(child))
            case And(args):
                out = And(tuple(f(a) for a in args))
            case Or(args):
                out = Or(tuple(f(a) for a in args))
            case HsMod("A", False, None, child):
                body = f(child)
                out = Binder(var, Or((body, ChlTemp("F", None, body))))
            case HsMod("B", False, k, child):
                out = ChlTemp("P", _inv(k), And((f(child), Or((x, ChlTemp("P", None, x))))))
            case HsMod("Bbar", False, k, child):
                out = ChlTemp("F", k, f(child))
            case _:
                raise FragmentError(f"unexpected node {to_text(psi)}")
        memo[psi] = out
        return out

    return Binder(var, f(expand_boxes(phi)))


# -- unconstrained modalities in terms of B, E, Bbar, Ebar --------------------------


def _singleton_right(phi: Formula) -> Formula:
    """<A> phi: from the right endpoint, as a point or extended to the right."""
    at = And((Not(dia("E", TRUE)), Or((phi, dia("Bbar", phi)))))
    return Or((at, dia("E", at)))


def _singleton_left(phi: Formula) -> Formula:
    at = And((Not(dia("B", TRUE)), Or((phi, dia("Ebar", phi)))))
    return Or((at, dia("B", at)))


def rewrite_unconstrained_alo(phi: Formula) -> Formula:
    """Rewrite unconstrained A, L, O, D and their inverses over B, E, Bbar, Ebar.

    Boxes become negated diamonds first. Constrained modalities keep their shape
    (only their arguments are rewritten).
    """
    _require_dhs(phi)
    memo: dict = {}
    nonpoint = dia("B", TRUE)

    def go(psi: Formula) -> Formula:
        got = memo.get(psi)
        if got is not None:
            return got
        match psi:
            case Top() | Prop():
                out = psi
            case Not(child):
                out = Not(go(child))
            case And(args):
                out = And(tuple(go(a) for a in args))
            case Or(args):
                out = Or(tuple(go(a) for a in args))
            case HsMod(rel, False, None, child):
                c = go(child)
                match rel:
                    case "A":
                        out = _singleton_right(c)
                    case "Abar":
                        out = _singleton_left(c)
                    case "L":
                        out = _singleton_right(And((nonpoint, _singleton_right(c))))
                    case "Lbar":
                        out = _singleton_left(And((nonpoint, _singleton_left(c))))
                    case "O":
                        out = dia("E", And((nonpoint, dia("Bbar", c))))
                    case "Obar":
                        out = dia("B", And((nonpoint, dia("Ebar", c))))
                    case "D":
                        out = dia("B", dia("E", c))
                    case "Dbar":
                        out = dia("Bbar", dia("Ebar", c))
                    case _:
                        out = dia(rel, c)
            case HsMod(rel, False, k, child):
                out = HsMod(rel, False, k, go(child))
            case _:
                raise FragmentError(f"unexpected node {to_text(psi)}")
        memo[psi] = out
        return out

    return go(expand_boxes(phi))


# -- constrained D and Dbar ---------------------------------------------------------


def _split(n: int, lo: int) -> list[tuple[int, int]]:
    return [(n1, n - n1) for n1 in range(lo, n - lo + 1)]


def expand_constrained_d(node: Formula, inner: Optional[Formula] = None) -> Formula:
    """<D>{k} psi or <Dbar>{k} psi as a disjunction over B/E (resp. Bbar/Ebar) chains.

    The length difference splits as the sum of the two steps; for Dbar the
    chain is Bbar then Ebar and for D it is B then E. ``inner`` replaces the
    argument (used when the argument has been rewritten already).
    """
    match node:
        case HsMod(("D" | "Dbar") as rel, False, k, child):
            pass
        case _:
            raise FragmentError(f"expected an existential D or Dbar modality, got {to_text(node)}")
    psi = child if inner is None else inner
    first, second = ("B", "E") if rel == "D" else ("Bbar", "Ebar")
    if k is None:
        return dia(first, dia(second, psi))
    # Work with s = |Delta|, the total number of positions added or removed (s >= 2).
    op, c = k.op, k.c
    if op is Cmp.LT:
        op, c = Cmp.LE, c - 1
    elif op is Cmp.GT:
        op, c = Cmp.GE, c + 1
    if rel == "D":
        # Delta = -s: Delta <= c is s >= -c, Delta >= c is s <= -c.
        flip = {Cmp.LE: Cmp.GE, Cmp.GE: Cmp.LE, Cmp.EQ: Cmp.EQ}
        s_op, n = flip[op], -c
        sign = -1
    else:
        s_op, n = op, c
        sign = 1

    def step(m: int, o: Cmp) -> Constraint:
        # Per-step bound on the step's distance m, stated on Delta for that modality.
        if sign > 0:
            return Constraint(o, m)
        return Constraint({Cmp.GE: Cmp.LE, Cmp.LE: Cmp.GE, Cmp.EQ: Cmp.EQ}[o], -m)

    match s_op:
        case Cmp.GE:
            n = max(n, 0)
            parts = [dia(first, dia(second, psi, step(n2, Cmp.GE)), step(n1, Cmp.GE)) for n1, n2 in _split(n, 0)]
        case Cmp.LE:
            if n < 0:
                return FALSE
            parts = [dia(first, dia(second, psi, step(n2, Cmp.LE)), step(n1, Cmp.LE)) for n1, n2 in _split(n, 0)]
        case Cmp.EQ:
            parts = [dia(first, dia(second, psi, step(n2, Cmp.EQ)), step(n1, Cmp.EQ)) for n1, n2 in _split(n, 1)]
    return disj(*parts)


def to_core(phi: Formula) -> Formula:
    """D(B, E, Bbar, Ebar) form of a DHS_simple formula."""
    _require_dhs(phi)
    if not _simple(phi):
        raise FragmentError(f"constrained modality outside DHS_simple: {to_text(first_nonsimple(phi))}")
    memo: dict = {}

    def go(psi: Formula) -> Formula:
        got = memo.get(psi)
        if got is not None:
            return got
        match psi:
            case Top() | Prop():
                out = psi
            case Not(child):
                out = Not(go(child))
            case And(args):
                out = And(tuple(go(a) for a in args))
            case Or(args):
                out = Or(tuple(go(a) for a in args))
            case HsMod("D" | "Dbar", False, _, child):
                out = expand_constrained_d(psi, go(child))
            case HsMod(rel, False, k, child):
                out = HsMod(rel, False, k, go(child))
            case _:
                raise FragmentError(f"unexpected node {to_text(psi)}")
        memo[psi] = out
        return out

    return go(rewrite_unconstrained_alo(phi))


def first_nonsimple(phi: Formula) -> Optional[Formula]:
    from .formula import SIMPLE_RELATIONS

    for node in phi.subformulas():
        if isinstance(node, HsMod) and node.constraint is not None and node.rel not in SIMPLE_RELATIONS:
            return node
    return None


def _simple(phi: Formula) -> bool:
    return first_nonsimple(phi) is None


# -- DHS_simple to SCHL1 -------------------------------------------------------------

LT, GT, EQ = "x<cur", "x>cur", "x=cur"


def dhs_simple_to_schl1(phi: Formula, var: str = "x") -> Formula:
    """An SCHL1 sentence equivalent to a DHS_simple formula read at [0,0].

    Along the translation, ``x`` and the current position mark the two endpoints of
    the interval; the second argument of ``f`` says which one is on the left.
    """
    core = to_core(phi)
    x = Var(var)
    memo: dict = {}

    def f(psi: Formula, tau: str) -> Formula:
        key = (psi, tau)
        got = memo.get(key)
        if got is not None:
            return got
        match psi:
            case Top():
                out = psi
            case Prop():
                if tau == EQ:
                    out = psi
                else:
                    op = "P" if tau == LT else "F"
                    out = And((psi, Not(ChlTemp(op, None, And((Not(psi), Or((x, ChlTemp(op, None, x)))))))))
            case Not(child):
                out = Not(f(child, tau))
            case And(args):
                out = And(tuple(f(a, tau) for a in args))
            case Or(args):
                out = Or(tuple(f(a, tau) for a in args))
            case HsMod(rel, False, k, child):
                out = _modal(rel, k, child, tau)
            case _:
                raise FragmentError(f"unexpected node {to_text(psi)}")
        memo[key] = out
        return out

    def shrink_left(k, child):
        # B from an interval whose left end is x: move the right end back.
        return ChlTemp("P", _inv(k), Or((And((f(child, EQ), x)), And((f(child, LT), ChlTemp("P", None, x))))))

    def shrink_right(k, child):
        return ChlTemp("F", _inv(k), Or((And((f(child, EQ), x)), And((f(child, GT), ChlTemp("F", None, x))))))

    def _modal(rel: str, k, child, tau: str) -> Formula:
        match rel, tau:
            case ("B" | "E"), "x=cur":
                return FALSE
            case "B", "x<cur":
                return shrink_left(k, child)
            case "B", "x>cur":
                return Swap(var, shrink_left(k, child))
            case "Bbar", "x<cur" | "x=cur":
                return ChlTemp("F", k, f(child, LT))
            case "Bbar", "x>cur":
                return Swap(var, ChlTemp("F", k, f(child, LT)))
            case "E", "x<cur":
                return Swap(var, shrink_right(k, child))
            case "E", "x>cur":
                return shrink_right(k, child)
            case "Ebar", "x<cur":
                return Swap(var, ChlTemp("P", k, f(child, GT)))
            case "Ebar", "x>cur" | "x=cur":
                return ChlTemp("P", k, f(child, GT))
        raise FragmentError(f"modality {rel} survived the core rewrite")

    return Swap(var, f(core, EQ))


# -- SHL1 to HS ------------------------------------------------------------------------


def shl1_to_hs(phi: Formula) -> Formula:
    """An HS formula (read at [0,0]) equivalent to an unconstrained SCHL1 sentence."""
    _one_var(phi)
    one = len_k(1)
    memo: dict = {}

    def f(psi: Formula, tau: str) -> Formula:
        key = (psi, tau)
        got = memo.get(key)
        if got is not None:
            return got
        match psi:
            case Top():
                out = psi
            case Var():
                out = TRUE if tau == EQ else FALSE
            case Prop():
                match tau:
                    case "x=cur":
                        out = psi
                    case "x<cur":
                        out = dia("E", And((one, psi)))
                    case _:
                        out = dia("B", And((one, psi)))
            case Not(child):
                out = Not(f(child, tau))
            case And(args):
                out = And(tuple(f(a, tau) for a in args))
            case Or(args):
                out = Or(tuple(f(a, tau) for a in args))
            case Swap(_, child):
                out = f(child, {LT: GT, GT: LT, EQ: EQ}[tau])
            case ChlTemp("G" | "H" as op, None, child):
                out = Not(f(ChlTemp("F" if op == "G" else "P", None, Not(child)), tau))
            case ChlTemp("F", None, child):
                if tau == GT:
                    out = Or((
                        dia("E", And((Not(one), f(child, GT)))),
                        dia("E", And((one, f(child, EQ)))),
                        dia("A", And((Not(one), f(child, LT)))),
                    ))
                else:
                    out = dia("Bbar", f(child, LT))
            case ChlTemp("P", None, child):
                if tau == LT:
                    out = Or((
                        dia("B", And((Not(one), f(child, LT)))),
                        dia("B", And((one, f(child, EQ)))),
                        dia("Abar", And((Not(one), f(child, GT)))),
                    ))
                else:
                    out = dia("Ebar", f(child, GT))
            case ChlTemp():
                raise FragmentError(f"constrained operator outside SHL1: {to_text(psi)}")
            case Binder():
                raise FragmentError(f"binder outside SHL1 (use swap): {to_text(psi)}")
            case _:
                raise FragmentError(f"unexpected node {to_text(psi)}")
        memo[key] = out
        return out

    return f(phi, EQ)


# -- CHL1 to SCHL1 to CHL2 -------------------------------------------------------------


def chl1_to_schl1(phi: Formula) -> Formula:
    """Replace every binder by a swap that jumps back to the binding position."""
    var = _one_var(phi)
    x = Var(var)
    memo: dict = {}

    def f(psi: Formula) -> Formula:
        got = memo.get(psi)
        if got is not None:
            return got
        match psi:
            case Top() | Prop() | Var():
                out = psi
            case Not(child):
                out = Not(f(child))
            case And(args):
                out = And(tuple(f(a) for a in args))
            case Or(args):
                out = Or(tuple(f(a) for a in args))
            case ChlTemp(op, k, child):
                out = ChlTemp(op, k, f(child))
            case Binder(_, child):
                out = Swap(var, ChlTemp("F", None, ChlTemp("P", None, And((x, f(child))))))
            case Swap():
                raise FragmentError(f"swap is not CHL1: {to_text(psi)}")
            case _:
                raise FragmentError(f"unexpected node {to_text(psi)}")
        memo[psi] = out
        return out

    return f(phi)


def schl1_to_chl2(phi: Formula, names: Optional[tuple[str, str]] = None) -> Formula:
    """A two-variable CHL sentence equivalent to an SCHL1 sentence."""
    var = _one_var(phi)
    xs = names or (var + "1", var + "2")
    memo: dict = {}

    def F(psi: Formula, h: int) -> Formula:
        key = (psi, h)
        got = memo.get(key)
        if got is not None:
            return got
        match psi:
            case Top() | Prop():
                out = psi
            case Var():
                out = Var(xs[h])
            case Not(child):
                out = Not(F(child, h))
            case And(args):
                out = And(tuple(F(a, h) for a in args))
            case Or(args):
                out = Or(tuple(F(a, h) for a in args))
            case ChlTemp(op, k, child):
                out = ChlTemp(op, k, F(child, h))
            case Swap(_, child):
                body = And((Var(xs[h]), F(child, 1 - h)))
                out = Binder(xs[1 - h], ChlTemp("F", None, ChlTemp("P", None, body)))
            case Binder():
                raise FragmentError(f"binder is not SCHL1: {to_text(psi)}")
            case _:
                raise FragmentError(f"unexpected node {to_text(psi)}")
        memo[key] = out
        return out

    return Binder(xs[0], F(phi, 0))


TARGETS = ("chl1", "schl1", "chl2", "hs", "core")


def translate(phi: Formula, target: str) -> Formula:
    """Dispatch used by the command line."""
    match target:
        case "chl1":
            return dab_to_chl1(phi)
        case "schl1":
            return dhs_simple_to_schl1(phi) if is_dhs(phi) else chl1_to_schl1(phi)
        case "chl2":
            if is_dhs(phi):
                phi = dhs_simple_to_schl1(phi)
            elif not any(isinstance(n, Swap) for n in phi.subformulas()):
                phi = chl1_to_schl1(phi)
            return schl1_to_chl2(phi)
        case "hs":
            if any(isinstance(n, Binder) for n in phi.subformulas()):
                phi = chl1_to_schl1(phi)
            return shl1_to_hs(phi)
        case "core":
            return to_core(phi)
    raise ValueError(f"unknown target {target!r}; expected one of {', '.join(TARGETS)}")
