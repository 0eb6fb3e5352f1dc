"""Closure, obligations, atoms and the successor relation for MNF one-variable CHL.

An atom is stored as an ``int`` bitmask over a fixed ordering of ``cl(phi)`` followed
by ``obl(phi)``. :class:`Tableau` bundles a closure with the requirement clauses of the
successor relation and offers both the literal checks (``is_atom``, ``is_succ``) and a
constructive successor generator used by the automaton construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Optional

from .formula import (
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
    variables_of,
)
from .mnf import dual, is_mnf
from .traces import LassoTrace


def _le1() -> Constraint:
    return Constraint(Cmp.LE, 1)


def first_level(phi: Formula) -> Iterator[Formula]:
    """Subformula occurrences not in the scope of a binder (the binder nodes themselves included)."""
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        if not isinstance(node, Binder):
            stack.extend(reversed(node.children()))


def _bound(node: Formula) -> int:
    """The constant c of ``O{<=c}``, or 0 for unconstrained and non-temporal nodes."""
    if isinstance(node, ChlTemp) and node.constraint is not None:
        return node.constraint.c
    return 0


def _height(phi: Formula) -> int:
    match phi:
        case And(args) | Or(args):
            return 1 + max(_height(a) for a in args)
        case ChlTemp(_, _, child):
            return 1 + _height(child)
    return 0


def sentence_variable(phi: Formula) -> str:
    names = variables_of(phi)
    if len(names) > 1:
        raise FragmentError(f"one-variable logic expected, found variables {sorted(names)}")
    return next(iter(names), "x")


@dataclass(frozen=True)
class Obligation:
    carrier: ChlTemp
    d: int

    def __str__(self) -> str:
        return f"({self.carrier}, {self.d})"


@dataclass
class Closure:
    """``cl`` together with ``obl``; ``items`` fixes the bit order used for atoms."""

    members: tuple[Formula, ...]
    obligations: tuple[Obligation, ...]
    var: str
    props: frozenset
    index: dict = field(repr=False)
    dual_index: tuple[int, ...] = field(repr=False)

    @property
    def items(self) -> tuple:
        return self.members + self.obligations

    def __len__(self) -> int:
        return len(self.members)

    def bit(self, item) -> int:
        return self.index[item]

    def decode(self, mask: int) -> list:
        return [it for i, it in enumerate(self.items) if mask >> i & 1]

    def encode(self, items: Iterable) -> int:
        mask = 0
        for it in items:
            mask |= 1 << self.index[it]
        return mask


def _check_input(phi: Formula) -> None:
    for node in phi.subformulas():
        if isinstance(node, (HsMod, Swap)):
            raise FragmentError(f"tableau expects one-variable CHL, found {node}")
    if not is_mnf(phi):
        raise FragmentError("tableau expects a formula in monotonic normal form")


def closure(phi: Formula | Iterable[Formula], lean: bool = False, var: Optional[str] = None) -> Closure:
    """The closure of ``phi`` (or of several roots at once) and its obligations.

    With ``lean=True`` the wrappers ``F{<=1}psi`` / ``P{<=1}psi`` are only added where a
    successor requirement reads them, namely for bodies of ``G{<=c}`` / ``H{<=c}`` with
    ``c > 1``. The smaller closure describes the same sequences projected on the rest.
    """
    roots = [phi] if isinstance(phi, Formula) else list(phi)
    for r in roots:
        _check_input(r)
    if var is None:
        names = set()
        for r in roots:
            names |= variables_of(r)
        if len(names) > 1:
            raise FragmentError(f"one-variable logic expected, found variables {sorted(names)}")
        var = next(iter(names), "x")
    props = frozenset(n.name for r in roots for n in r.subformulas() if isinstance(n, Prop))

    order: list[Formula] = []
    seen: set = set()

    def add(f: Formula) -> None:
        for g in (f, dual(f)):
            if g not in seen:
                seen.add(g)
                order.append(g)

    base = [Var(var), TRUE] + [Prop(p) for p in sorted(props)] + [ChlTemp("P", _le1(), TRUE)]
    for f in base:
        add(f)
    for r in roots:
        for node in first_level(r):
            add(node)
            if not lean:
                add(ChlTemp("F", _le1(), node))
                add(ChlTemp("P", _le1(), node))
    # The G{<=c}/H{<=c} requirements read F{<=1}psi / P{<=1}psi, also when the
    # bounded universal only entered the closure as the dual of F{<=c}/P{<=c}.
    for g in list(order):
        if isinstance(g, ChlTemp) and _bound(g) > 1 and g.op in ("G", "H"):
            add(ChlTemp("F" if g.op == "G" else "P", _le1(), g.child))
    # Children before parents, pairs kept adjacent.
    members = sorted(order, key=_height)
    members = _pair_order(members)
    obligations = tuple(
        Obligation(f, d) for f in members if isinstance(f, ChlTemp) and _bound(f) > 1 for d in range(1, _bound(f))
    )
    items = tuple(members) + obligations
    index = {it: i for i, it in enumerate(items)}
    dual_index = tuple(index[dual(f)] for f in members)
    return Closure(tuple(members), obligations, var, props, index, dual_index)


def _pair_order(members: list[Formula]) -> list[Formula]:
    out, placed = [], set()
    for f in members:
        if f in placed:
            continue
        g = dual(f)
        out.append(f)
        placed.add(f)
        if g not in placed:
            out.append(g)
            placed.add(g)
    return out


# -- requirement clauses -------------------------------------------------------


@dataclass(frozen=True)
class Clause:
    """A successor requirement ``test(A, A')``; ``needs`` are the bits of A' it reads."""

    name: str
    needs: tuple[int, ...]
    test: Callable[[int, int], bool] = field(compare=False)


def _b(mask: int, i: int) -> bool:
    return bool(mask >> i & 1)


def _clauses(cl: Closure) -> list[Clause]:
    idx = cl.index
    out: list[Clause] = []
    for f in cl.members:
        if not isinstance(f, ChlTemp):
            continue
        fi, pi = idx[f], idx[f.child]
        c = _bound(f)
        if c == 0:
            match f.op:
                case "F":
                    out.append(Clause(f"F:{f}", (fi, pi), lambda a, b, fi=fi, pi=pi: _b(a, fi) == (_b(b, fi) or _b(b, pi))))
                case "P":
                    out.append(Clause(f"P:{f}", (fi,), lambda a, b, fi=fi, pi=pi: _b(b, fi) == (_b(a, fi) or _b(a, pi))))
                case "G":
                    out.append(Clause(f"G:{f}", (fi, pi), lambda a, b, fi=fi, pi=pi: _b(a, fi) == (_b(b, fi) and _b(b, pi))))
                case "H":
                    out.append(Clause(f"H:{f}", (fi,), lambda a, b, fi=fi, pi=pi: _b(b, fi) == (_b(a, fi) and _b(a, pi))))
            continue
        ob = {d: idx[Obligation(f, d)] for d in range(1, c)}
        obs = tuple(ob.values())
        match f.op:
            case "F":
                out.append(Clause(
                    f"F<=:{f}", (pi,) + obs,
                    lambda a, b, fi=fi, pi=pi, obs=obs: _b(a, fi) == (_b(b, pi) or any(_b(b, o) for o in obs)),
                ))
                for d in range(1, c):
                    prev = ob.get(d - 1, -1)
                    out.append(Clause(
                        f"F<=:{f}:{d}", (pi,) + ((prev,) if d > 1 else ()),
                        lambda a, b, o=ob[d], d=d, pi=pi, prev=prev: _b(a, o)
                        == ((d == 1 and _b(b, pi)) or (d > 1 and not _b(b, pi) and _b(b, prev))),
                    ))
            case "P":
                out.append(Clause(
                    f"P<=:{f}", (fi,),
                    lambda a, b, fi=fi, pi=pi, obs=obs: _b(b, fi) == (_b(a, pi) or any(_b(a, o) for o in obs)),
                ))
                for d in range(1, c):
                    prev = ob.get(d - 1, -1)
                    out.append(Clause(
                        f"P<=:{f}:{d}", (ob[d],),
                        lambda a, b, o=ob[d], d=d, pi=pi, prev=prev: _b(b, o)
                        == ((d == 1 and _b(a, pi)) or (d > 1 and not _b(a, pi) and _b(a, prev))),
                    ))
            case "G" if c == 1:
                out.append(Clause(f"G<=:{f}", (pi,), lambda a, b, fi=fi, pi=pi: _b(a, fi) == _b(b, pi)))
            case "H" if c == 1:
                out.append(Clause(f"H<=:{f}", (fi,), lambda a, b, fi=fi, pi=pi: _b(b, fi) == _b(a, pi)))
            case "G":
                wi = idx[ChlTemp("F", _le1(), f.child)]
                last = ob[c - 1]
                out.append(Clause(
                    f"G<=:{f}", (pi, fi, last),
                    lambda a, b, fi=fi, pi=pi, last=last: _b(a, fi) == (_b(b, pi) and (_b(b, fi) or _b(b, last))),
                ))
                for d in range(1, c):
                    prev = ob.get(d - 1, -1)
                    out.append(Clause(
                        f"G<=:{f}:{d}", (pi, wi) + ((prev,) if d > 1 else ()),
                        lambda a, b, o=ob[d], d=d, pi=pi, wi=wi, prev=prev: _b(a, o)
                        == ((d == 1 and _b(b, pi) and not _b(b, wi)) or (d > 1 and _b(b, pi) and _b(b, prev))),
                    ))
            case "H":
                wi = idx[ChlTemp("P", _le1(), f.child)]
                last = ob[c - 1]
                out.append(Clause(
                    f"H<=:{f}", (fi,),
                    lambda a, b, fi=fi, pi=pi, last=last: _b(b, fi) == (_b(a, pi) and (_b(a, fi) or _b(a, last))),
                ))
                for d in range(1, c):
                    prev = ob.get(d - 1, -1)
                    out.append(Clause(
                        f"H<=:{f}:{d}", (ob[d],),
                        lambda a, b, o=ob[d], d=d, pi=pi, wi=wi, prev=prev: _b(b, o)
                        == ((d == 1 and _b(a, pi) and not _b(a, wi)) or (d > 1 and _b(a, pi) and _b(a, prev))),
                    ))
    return out


# -- the tableau ------------------------------------------------------------------


class Tableau:
    """Atoms and successor relation of one closure."""

    def __init__(self, phi: Formula | Iterable[Formula], lean: bool = False, var: Optional[str] = None):
        self.cl = closure(phi, lean=lean, var=var)
        cl = self.cl
        self.n = len(cl.members)
        self.clauses = _clauses(cl)
        self._succ_cache: dict = {}
        self._init_cache: dict = {}

        # Bits that forbid an atom from being initial.
        pm = 0
        for f in cl.members:
            if isinstance(f, ChlTemp) and f.op == "P":
                pm |= 1 << cl.index[f]
        for ob in cl.obligations:
            if ob.carrier.op in ("P", "H"):
                pm |= 1 << cl.index[ob]
        self.past_mask = pm

        # Assignment units: one per dual pair (representative first), then one per carrier.
        self.pairs: list[tuple[int, int]] = []
        for i, f in enumerate(cl.members):
            j = cl.dual_index[i]
            if i < j:
                self.pairs.append((i, j))
            elif i == j:
                raise AssertionError(f"self-dual closure member {f}")
        self.carriers: list[tuple[int, tuple[int, ...]]] = []
        for f in cl.members:
            c = _bound(f)
            if c > 1:
                self.carriers.append((cl.index[f], tuple(cl.index[Obligation(f, d)] for d in range(1, c))))

    # -- views -------------------------------------------------------------------

    @property
    def var(self) -> str:
        return self.cl.var

    def has(self, mask: int, item) -> bool:
        return _b(mask, self.cl.index[item])

    def decode(self, mask: int) -> list:
        return self.cl.decode(mask)

    def describe(self, mask: int) -> str:
        parts = [str(it) for it in self.decode(mask) if not (isinstance(it, Not) or _is_universal(it))]
        return "{" + ", ".join(parts) + "}"

    @cached_property
    def prop_bits(self) -> dict:
        return {p: self.cl.index[Prop(p)] for p in self.cl.props}

    @cached_property
    def x_bit(self) -> int:
        return self.cl.index[Var(self.cl.var)]

    @cached_property
    def binder_bits(self) -> dict:
        """Binder members mapped to their bit."""
        return {f: self.cl.index[f] for f in self.cl.members if isinstance(f, Binder)}

    def letter_of(self, mask: int) -> frozenset:
        return frozenset(p for p, i in self.prop_bits.items() if _b(mask, i))

    def is_initial(self, mask: int) -> bool:
        return not (mask & self.past_mask)

    @cached_property
    def fairness(self) -> list[tuple[int, int]]:
        """One Buchi component per ``F psi`` member: (bit of F psi, bit of psi)."""
        out = []
        for f in self.cl.members:
            if isinstance(f, ChlTemp) and f.op == "F" and f.constraint is None:
                out.append((self.cl.index[f], self.cl.index[f.child]))
        return out

    def fair(self, mask: int, k: int) -> bool:
        fi, pi = self.fairness[k]
        return _b(mask, pi) or not _b(mask, fi)

    # -- literal definitions -----------------------------------------------------

    def is_atom(self, mask: int) -> bool:
        cl = self.cl
        idx = cl.index
        if not _b(mask, idx[TRUE]):
            return False
        for i in range(self.n):
            if _b(mask, i) == _b(mask, cl.dual_index[i]):
                return False
        for i, f in enumerate(cl.members):
            match f:
                case And(args):
                    if _b(mask, i) != all(_b(mask, idx[a]) for a in args):
                        return False
                case Or(args):
                    if _b(mask, i) != any(_b(mask, idx[a]) for a in args):
                        return False
        for _, obs in self.carriers:
            if sum(_b(mask, o) for o in obs) > 1:
                return False
        return True

    def is_succ(self, a: int, b: int) -> bool:
        """``b`` in Succ(a): b is not initial and every requirement family holds."""
        if self.is_initial(b):
            return False
        return all(cl.test(a, b) for cl in self.clauses)

    def violated(self, a: int, b: int) -> list[str]:
        out = [c.name for c in self.clauses if not c.test(a, b)]
        if self.is_initial(b):
            out.append("successor is initial")
        return out

    def count_atoms(self) -> int:
        plan, _ = self._plan
        free = sum(1 for _, _, kind, _ in plan if kind not in ("const", "and", "or"))
        total = 1 << free
        for _, obs in self.carriers:
            total *= len(obs) + 1
        return total

    def atoms(self) -> Iterator[int]:
        """Stream every atom. Boolean members are computed from their children, so
        only the genuinely free choices are enumerated."""
        yield from self._search(None, None)

    # -- constructive search -----------------------------------------------------

    @cached_property
    def _plan(self):
        """Per pair: (rep bit, dual bit, kind, data) in height order, and clause schedule."""
        cl = self.cl
        idx = cl.index
        plan = []
        for i, j in self.pairs:
            f = cl.members[i]
            match f:
                case Top():
                    plan.append((i, j, "const", True))
                case Not(Top()):
                    plan.append((i, j, "const", False))
                case And(args):
                    plan.append((i, j, "and", tuple(idx[a] for a in args)))
                case Or(args):
                    plan.append((i, j, "or", tuple(idx[a] for a in args)))
                case Prop(name):
                    plan.append((i, j, "prop", name))
                case Not(Prop(name)):
                    plan.append((i, j, "nprop", name))
                case Var():
                    plan.append((i, j, "var", True))
                case Not(Var()):
                    plan.append((i, j, "var", False))
                case Binder():
                    plan.append((i, j, "binder", (f, cl.members[j])))
                case ChlTemp(op, k, _):
                    plan.append((i, j, "temp", op))
                case _:
                    raise AssertionError(f)
        # Schedule each clause after the last unit that sets a bit it reads.
        unit_of = {}
        for u, (i, j, _, _) in enumerate(plan):
            unit_of[i] = unit_of[j] = u
        base = len(plan)
        for c, (_, obs) in enumerate(self.carriers):
            for o in obs:
                unit_of[o] = base + c
        sched: dict[int, list[Clause]] = {}
        for clause in self.clauses:
            u = max((unit_of[b] for b in clause.needs), default=0)
            sched.setdefault(u, []).append(clause)
        return plan, sched

    def _search(self, prev: Optional[int], fix: Optional[Callable[[str, object], Optional[bool]]],
                initial: bool = False) -> Iterator[int]:
        """Enumerate atoms ``b`` (with ``Succ(prev, b)`` when ``prev`` is given).

        ``fix(kind, data)`` may pin the value of a prop/var/binder unit (None = free).
        ``initial`` pins past formulas false and past obligations off.
        """
        plan, sched = self._plan
        carriers = self.carriers
        nplan = len(plan)
        total = nplan + len(carriers)
        no_sched: list = []

        def ok(u: int, b: int) -> bool:
            if prev is None:
                return True
            return all(c.test(prev, b) for c in sched.get(u, no_sched))

        def go(u: int, b: int) -> Iterator[int]:
            if u == total:
                if prev is not None and self.is_initial(b):
                    return
                yield b
                return
            if u >= nplan:
                cidx, obs = carriers[u - nplan]
                carrier = self.cl.members[cidx]
                options = [0] + [1 << o for o in obs]
                if initial and carrier.op in ("P", "H"):
                    options = [0]
                for opt in options:
                    nb = b | opt
                    if ok(u, nb):
                        yield from go(u + 1, nb)
                return
            i, j, kind, data = plan[u]
            vals: tuple
            match kind:
                case "const":
                    vals = (data,)
                case "and":
                    vals = (all(b >> a & 1 for a in data),)
                case "or":
                    vals = (any(b >> a & 1 for a in data),)
                case "temp":
                    if initial and data == "P":
                        vals = (False,)
                    elif initial and data == "H":
                        vals = (True,)
                    else:
                        vals = (False, True)
                case _:
                    v = fix(kind, data) if fix is not None else None
                    vals = (False, True) if v is None else (v,)
            for v in vals:
                nb = b | (1 << (i if v else j))
                if ok(u, nb):
                    yield from go(u + 1, nb)

        yield from go(0, 0)

    def _fixer(self, letter: Optional[frozenset], xflag: Optional[bool], binders: Optional[dict]):
        def fix(kind: str, data) -> Optional[bool]:
            match kind:
                case "prop":
                    return None if letter is None else data in letter
                case "nprop":
                    return None if letter is None else data not in letter
                case "var":
                    return None if xflag is None else (xflag if data else not xflag)
                case "binder":
                    if binders is None:
                        return None
                    f, g = data
                    if f in binders:
                        return binders[f]
                    return None if g not in binders else not binders[g]
            return None

        return fix

    def successors(self, a: int, letter: Optional[frozenset] = None, xflag: Optional[bool] = None,
                   binders: Optional[dict] = None) -> list[int]:
        """Atoms in Succ(a) matching the letter (restricted to this closure's props),
        the membership of x, and the truth values of binder members."""
        if letter is not None:
            letter = letter & self.cl.props
        key = (a, letter, xflag, self._binder_key(binders))
        got = self._succ_cache.get(key)
        if got is None:
            got = list(self._search(a, self._fixer(letter, xflag, binders)))
            self._succ_cache[key] = got
        return got

    def initial_atoms(self, letter: Optional[frozenset] = None, xflag: Optional[bool] = None,
                      binders: Optional[dict] = None) -> list[int]:
        if letter is not None:
            letter = letter & self.cl.props
        key = (letter, xflag, self._binder_key(binders))
        got = self._init_cache.get(key)
        if got is None:
            got = list(self._search(None, self._fixer(letter, xflag, binders), initial=True))
            self._init_cache[key] = got
        return got

    def matching_atoms(self, letter: Optional[frozenset] = None, xflag: Optional[bool] = None,
                       binders: Optional[dict] = None) -> list[int]:
        """All atoms (initial or not) agreeing with the given letter, x and binder values."""
        if letter is not None:
            letter = letter & self.cl.props
        key = ("any", letter, xflag, self._binder_key(binders))
        got = self._init_cache.get(key)
        if got is None:
            got = list(self._search(None, self._fixer(letter, xflag, binders)))
            self._init_cache[key] = got
        return got

    def _binder_key(self, binders: Optional[dict]):
        if binders is None:
            return None
        return tuple(binders.get(f) for f in self.binder_bits)


def _is_universal(it) -> bool:
    return isinstance(it, ChlTemp) and it.op in ("G", "H")


# -- atom objects and prefix checking ----------------------------------------------


@dataclass(frozen=True)
class Atom:
    mask: int
    initial: bool
    tableau: Tableau = field(compare=False, hash=False, repr=False)

    def __contains__(self, item) -> bool:
        return self.tableau.has(self.mask, item)

    @property
    def members(self) -> list:
        return self.tableau.decode(self.mask)


def enumerate_atoms(t: Tableau) -> Iterator[Atom]:
    for m in t.atoms():
        yield Atom(m, t.is_initial(m), t)


def brute_force_atoms(t: Tableau) -> set[int]:
    """Filter every subset of cl u obl through the atom axioms (for tiny closures)."""
    width = len(t.cl.items)
    if width > 22:
        raise ValueError(f"{width} items is too many for subset enumeration")
    return {m for m in range(1 << width) if t.is_atom(m)}


@dataclass(frozen=True)
class Violation:
    index: int
    kind: str
    detail: str = ""

    def __str__(self) -> str:
        return f"[{self.index}] {self.kind}" + (f": {self.detail}" if self.detail else "")


def check_sequence_prefix(t: Tableau, rho: list[int], w: LassoTrace, ell: int) -> list[Violation]:
    """Finitely checkable conditions of a sequence prefix over the pointed trace (w, ell).

    Fairness and fulfilment concern the infinite suffix and are not part of the verdict.
    """
    out: list[Violation] = []
    if not rho:
        return out
    if not t.is_initial(rho[0]):
        out.append(Violation(0, "not-initial", "the first atom contains a past formula or obligation"))
    xs = [i for i, a in enumerate(rho) if _b(a, t.x_bit)]
    if ell < len(rho) and ell not in xs:
        out.append(Violation(ell, "x-missing", f"x must hold at position {ell}"))
    stray = [i for i in xs if i != ell]
    if stray:
        out.append(Violation(stray[0], "x-misplaced", "x holds at positions " + ", ".join(map(str, xs))))
    for i, a in enumerate(rho):
        if not t.is_atom(a):
            out.append(Violation(i, "not-an-atom"))
        want = w.letter(i) & t.cl.props
        if t.letter_of(a) != want:
            out.append(Violation(i, "letter", f"atom has {sorted(t.letter_of(a))}, trace has {sorted(want)}"))
    for i in range(len(rho) - 1):
        bad = t.violated(rho[i], rho[i + 1])
        if bad:
            out.append(Violation(i + 1, "succ", "; ".join(bad)))
    return out
