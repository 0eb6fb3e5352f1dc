"""Minsky machines, well-formed flat sequences, their trace encodings and the
formulas that characterise recurrent computations in DHS_L, DHS_A and DHS_O.

The generated formulas live in undecidable fragments. They are produced here and
checked against concrete encodings with the oracle, never decided.

Propositions: transition ``i`` is ``d<i>``; the unit mark and counter markers are
``one`` and ``two``; the code separator is ``hash`` and the configuration separator
of the A/O encoding is ``dollar``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .formula import (
    TRUE,
    And,
    Cmp,
    Constraint,
    Formula,
    Not,
    Prop,
    box,
    conj,
    dia,
    disj,
    implies,
    len_k,
)
from .traces import LassoTrace

OPS = ("inc", "dec", "if_zero")
ONE, TWO, HASH, DOLLAR = Prop("one"), Prop("two"), Prop("hash"), Prop("dollar")
VARIANTS = ("L", "A", "O")


class MachineError(ValueError):
    """Malformed machine description or encoding request."""


class ComputationError(ValueError):
    """Replaying a flat sequence left the machine's semantics."""


@dataclass(frozen=True)
class Transition:
    src: str
    op: str
    counter: int
    dst: str

    def __post_init__(self):
        if self.op not in OPS:
            raise MachineError(f"unknown instruction {self.op!r}")
        if self.counter not in (1, 2):
            raise MachineError(f"counters are named 1 and 2, not {self.counter}")

    def __str__(self) -> str:
        return f"({self.src}, {self.op} {self.counter}, {self.dst})"


@dataclass(frozen=True)
class MinskyMachine:
    locations: tuple[str, ...]
    transitions: tuple[Transition, ...]
    init: int
    rec: int

    def __post_init__(self):
        for t in self.transitions:
            for q in (t.src, t.dst):
                if q not in self.locations:
                    raise MachineError(f"transition {t} uses undeclared location {q}")
        for name, i in (("init", self.init), ("rec", self.rec)):
            if not 0 <= i < len(self.transitions):
                raise MachineError(f"{name} index {i} is not a transition")

    def having(self, op: str, c: int) -> tuple[int, ...]:
        """Indices of the transitions with instruction (op, c): Inc(c), Dec(c) or Zero(c)."""
        return tuple(i for i, t in enumerate(self.transitions) if t.op == op and t.counter == c)

    def on_counter(self, c: int) -> tuple[int, ...]:
        return tuple(i for i, t in enumerate(self.transitions) if t.counter == c)

    def successors(self, i: int) -> tuple[int, ...]:
        q = self.transitions[i].dst
        return tuple(j for j, t in enumerate(self.transitions) if t.src == q)


def transition_prop(i: int) -> Prop:
    return Prop(f"d{i}")


def parse_minsky(text: str) -> MinskyMachine:
    """Read ``loc``, ``trans``, ``init`` and ``rec`` lines; ``#`` starts a comment."""
    locs: list[str] = []
    trans: list[Transition] = []
    init = rec = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        words = raw.split("#", 1)[0].split()
        if not words:
            continue
        try:
            match words:
                case ["loc", *names] if names:
                    locs.extend(names)
                case ["trans", src, op, c, dst]:
                    trans.append(Transition(src, op, int(c), dst))
                case ["init", i]:
                    init = int(i)
                case ["rec", i]:
                    rec = int(i)
                case _:
                    raise MachineError(f"cannot read {raw.strip()!r}")
        except (MachineError, ValueError) as e:
            raise MachineError(f"line {lineno}: {e}") from None
    if init is None or rec is None:
        raise MachineError("both init and rec must be given")
    return MinskyMachine(tuple(locs), tuple(trans), init, rec)


def to_minsky_text(m: MinskyMachine) -> str:
    lines = ["loc " + " ".join(m.locations)]
    lines += [f"trans {t.src} {t.op} {t.counter} {t.dst}" for t in m.transitions]
    lines += [f"init {m.init}", f"rec {m.rec}"]
    return "\n".join(lines) + "\n"


EXAMPLE_MACHINE = parse_minsky(
    """\
loc q0 q1
trans q0 inc 1 q1
trans q1 dec 1 q0
trans q0 if_zero 1 q0
init 0
rec 2
"""
)


# -- flat configurations and well-formedness --------------------------------------------


@dataclass(frozen=True)
class FlatConfiguration:
    """A transition index paired with a positive value (1 for zero tests)."""

    delta: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise MachineError(f"flat values are positive, got {self.n}")


@dataclass(frozen=True)
class Violation:
    rule: str
    index: int
    detail: str

    def __str__(self) -> str:
        return f"{self.rule} at {self.index}: {self.detail}"


@dataclass(frozen=True)
class PrefixReport:
    """Violations found on a finite prefix; the recurrence condition cannot be checked there."""

    violations: tuple[Violation, ...]
    unchecked: tuple[str, ...] = ("recurrence",)

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> frozenset[str]:
        return frozenset(v.rule for v in self.violations)

    def __iter__(self):
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)


def check_well_formed_prefix(seq: Sequence[FlatConfiguration], m: MinskyMachine) -> PrefixReport:
    out: list[Violation] = []
    ts = m.transitions
    for i, f in enumerate(seq):
        if not 0 <= f.delta < len(ts):
            raise MachineError(f"index {f.delta} at {i} is not a transition")
    if seq and seq[0].delta != m.init:
        out.append(Violation("consecution", 0, f"starts with d{seq[0].delta}, not d{m.init}"))
    for i in range(1, len(seq)):
        a, b = ts[seq[i - 1].delta], ts[seq[i].delta]
        if a.dst != b.src:
            out.append(Violation("consecution", i, f"{a} is not followed by {b}"))
    for i, f in enumerate(seq):
        if ts[f.delta].op == "if_zero" and f.n != 1:
            out.append(Violation("flat", i, f"zero test carries value {f.n}"))
    for c in (1, 2):
        for op, rule in (("inc", "increment-progression"), ("dec", "decrement-progression")):
            expect = 1
            for i, f in enumerate(seq):
                t = ts[f.delta]
                if t.op == op and t.counter == c:
                    if f.n != expect:
                        out.append(Violation(rule, i, f"counter {c}: value {f.n}, expected {expect}"))
                    expect = f.n + 1
        best = 0
        last = None  # index of the latest c-increment or c-decrement seen so far
        for i, f in enumerate(seq):
            t = ts[f.delta]
            if t.counter != c:
                continue
            match t.op:
                case "inc":
                    best = max(best, f.n)
                    last = i
                case "dec":
                    if f.n > best:
                        out.append(Violation("increment-domination", i, f"counter {c}: no earlier increment reaches {f.n}"))
                    last = i
                case "if_zero":
                    if last is None:
                        continue
                    if ts[seq[last].delta].op != "dec":
                        out.append(Violation("zero-test", i, f"counter {c}: last operation at {last} is an increment"))
                    elif any(
                        ts[seq[h].delta].op == "inc" and ts[seq[h].delta].counter == c and seq[h].n > seq[last].n
                        for h in range(last)
                    ):
                        out.append(Violation("zero-test", i, f"counter {c}: increments exceed the decrement at {last}"))
    out.sort(key=lambda v: (v.index, v.rule))
    return PrefixReport(tuple(out))


@dataclass(frozen=True)
class Configuration:
    """An M-configuration: the transition about to fire and the counter values before it."""

    delta: int
    nu: tuple[int, int]


def flat_to_computation(seq: Sequence[FlatConfiguration], m: MinskyMachine) -> list[Configuration]:
    """Replay the transitions from zero counters; the flat values are not consulted."""
    nu = [0, 0]
    out = []
    ts = m.transitions
    for i, f in enumerate(seq):
        t = ts[f.delta]
        if i == 0 and f.delta != m.init:
            raise ComputationError(f"computation starts with d{f.delta}, not d{m.init}")
        if i > 0 and ts[seq[i - 1].delta].dst != t.src:
            raise ComputationError(f"step {i}: {t} cannot follow {ts[seq[i - 1].delta]}")
        out.append(Configuration(f.delta, (nu[0], nu[1])))
        k = t.counter - 1
        match t.op:
            case "inc":
                nu[k] += 1
            case "dec":
                nu[k] -= 1
                if nu[k] < 0:
                    raise ComputationError(f"step {i}: counter {t.counter} goes negative")
            case "if_zero":
                if nu[k] != 0:
                    raise ComputationError(f"step {i}: zero test on counter {t.counter} = {nu[k]}")
    return out


def flat_sequence(deltas: Iterable[int], m: MinskyMachine) -> list[FlatConfiguration]:
    """The unique flat sequence over these transitions that meets both progressions."""
    count: dict = {}
    out = []
    for d in deltas:
        t = m.transitions[d]
        if t.op == "if_zero":
            out.append(FlatConfiguration(d, 1))
            continue
        key = (t.op, t.counter)
        count[key] = count.get(key, 0) + 1
        out.append(FlatConfiguration(d, count[key]))
    return out


# -- trace encodings --------------------------------------------------------------------


def _letter(*props: Prop) -> frozenset:
    return frozenset(p.name for p in props)


def encode_flat_sequence(seq: Sequence[FlatConfiguration]) -> tuple[frozenset, ...]:
    """Concatenate {d}{one}^n{hash} over the sequence."""
    if not seq:
        raise MachineError("cannot encode an empty flat sequence")
    out: list[frozenset] = []
    for f in seq:
        out.append(_letter(transition_prop(f.delta)))
        out.extend([_letter(ONE)] * f.n)
        out.append(_letter(HASH))
    return tuple(out)


def flat_lasso(prefix: Sequence[FlatConfiguration], loop: Sequence[FlatConfiguration]) -> LassoTrace:
    return LassoTrace(encode_flat_sequence(prefix) if prefix else (), encode_flat_sequence(loop))


def encode_configuration_ao(delta: int, nu: tuple[int, int]) -> tuple[frozenset, ...]:
    """{two} 0^(nu2+1) {one} 0^(nu1+1) {d, hash} followed by the mirror of the left part."""
    n1, n2 = nu
    if n1 < 0 or n2 < 0:
        raise MachineError(f"counter values are natural numbers, got {nu}")
    blank = frozenset()
    left = (_letter(TWO),) + (blank,) * (n2 + 1) + (_letter(ONE),) + (blank,) * (n1 + 1)
    return left + (_letter(transition_prop(delta), HASH),) + left[::-1]


def encode_computation_ao(configs: Sequence[Configuration]) -> tuple[frozenset, ...]:
    """{dollar} w_1 {dollar} w_2 {dollar} ... for the given configurations."""
    out: list[frozenset] = [_letter(DOLLAR)]
    for cfg in configs:
        out.extend(encode_configuration_ao(cfg.delta, cfg.nu))
        out.append(_letter(DOLLAR))
    return tuple(out)


def ao_lasso(prefix: Sequence[Configuration], loop: Sequence[Configuration]) -> LassoTrace:
    """The encoding of ``prefix . loop^omega``; the leading {dollar} opens the prefix."""
    if not loop:
        raise MachineError("the loop of a lasso must hold a configuration")
    head = encode_computation_ao(prefix)
    body = encode_computation_ao(loop)[1:]
    return LassoTrace(head, body)


# -- helper formulas --------------------------------------------------------------------


def _pt(psi: Formula) -> Formula:
    return And((len_k(1), psi))


def left(psi: Formula) -> Formula:
    """psi at the singleton of the left endpoint."""
    return disj(_pt(psi), dia("B", _pt(psi)))


def right(psi: Formula) -> Formula:
    """psi at the singleton of the right endpoint."""
    return dia("A", _pt(psi))


def right_next(psi: Formula) -> Formula:
    return dia("A", And((len_k(2), dia("A", _pt(psi)))))


def left_next(psi: Formula) -> Formula:
    return left(right_next(psi))


def interior(psi: Formula) -> Formula:
    """psi at some singleton strictly inside the current interval (Int in the displays)."""
    return dia("B", And((Not(len_k(1)), right(psi))))


def ahead(psi: Formula, d: int) -> Formula:
    """psi at the singleton d positions after the right endpoint."""
    match d:
        case 0:
            return right(psi)
        case 1:
            return right_next(psi)
    return dia("A", And((len_k(d + 1), right(psi))))


def everywhere(psi: Formula) -> Formula:
    """[A][A] psi: psi on every interval of the trace."""
    return box("A", box("A", psi))


def _props(m: MinskyMachine, idx: Iterable[int]) -> Formula:
    return disj(*(transition_prop(i) for i in idx))


def _exactly_one(options: Sequence[Formula]) -> Formula:
    at_most = [Not(And((a, b))) for a, b in itertools.combinations(options, 2)]
    return conj(disj(*options), *at_most)


def _at_most_one(options: Sequence[Formula]) -> Formula:
    return conj(*(Not(And((a, b))) for a, b in itertools.combinations(options, 2)))


_Z = 0
EQ0 = Constraint(Cmp.EQ, _Z)
LT0 = Constraint(Cmp.LT, _Z)
LE0 = Constraint(Cmp.LE, _Z)
GT0 = Constraint(Cmp.GT, _Z)
GE0 = Constraint(Cmp.GE, _Z)


def _first_from_start(s: Formula) -> Formula:
    """On [0, k]: k is the first position satisfying s."""
    return conj(right(s), Not(interior(s)), disj(len_k(1), Not(left(s))))


# -- the DHS_L formula ------------------------------------------------------------------


def _code(s: Formula) -> Formula:
    """The interval is one code {d} {one}^n {hash} whose transition satisfies s."""
    return conj(left(s), right(HASH), Not(interior(HASH)))


def _con_l(m: MinskyMachine) -> Formula:
    n = len(m.transitions)
    ds = [transition_prop(i) for i in range(n)]
    any_d = disj(*ds)
    parts = [
        transition_prop(m.init),
        everywhere(implies(len_k(1), _exactly_one(ds + [ONE, HASH]))),
        everywhere(implies(_pt(any_d), right_next(ONE))),
        everywhere(implies(_pt(ONE), right_next(disj(ONE, HASH)))),
    ]
    for i in range(n):
        parts.append(everywhere(implies(_code(ds[i]), right_next(_props(m, m.successors(i))))))
    for i in m.having("if_zero", 1) + m.having("if_zero", 2):
        parts.append(everywhere(implies(_pt(ds[i]), ahead(HASH, 2))))
    parts.append(box("A", dia("A", right(ds[m.rec]))))
    return conj(*parts)


def _progression_l(m: MinskyMachine, op: str) -> Formula:
    parts = []
    for c in (1, 2):
        idx = m.having(op, c)
        if not idx:
            continue
        s = _props(m, idx)
        parts.append(box("A", implies(_first_from_start(s), conj(right_next(ONE), ahead(HASH, 2)))))
        later = disj(*(dia("L", conj(left(transition_prop(j)), right(HASH)), LE0) for j in idx))
        any_later = disj(*(dia("A", right(transition_prop(j))) for j in idx))
        successor = disj(
            *(
                dia("L", conj(left(transition_prop(j)), Not(interior(HASH)), right_next(HASH)), EQ0)
                for j in idx
            )
        )
        for i in idx:
            parts.append(
                everywhere(
                    implies(
                        _code(transition_prop(i)),
                        conj(Not(later), implies(any_later, successor)),
                    )
                )
            )
    return conj(*parts)


def _zero_l(m: MinskyMachine) -> Formula:
    parts = []
    gadgets = []
    for c in (1, 2):
        ops_c = m.on_counter(c)
        inc, dec, zero = m.having("inc", c), m.having("dec", c), m.having("if_zero", c)
        if inc and zero:
            parts.append(
                everywhere(
                    Not(conj(left(_props(m, inc)), right(_props(m, zero)), Not(interior(_props(m, ops_c)))))
                )
            )
        for di, dd, d0 in itertools.product(inc, dec, zero):
            quiet = conj(*(Not(interior(transition_prop(j))) for j in ops_c))
            gadgets.append(
                dia(
                    "A",
                    dia(
                        "A",
                        conj(
                            _code(transition_prop(di)),
                            dia(
                                "L",
                                conj(
                                    left(transition_prop(dd)),
                                    right(HASH),
                                    dia("A", conj(right(transition_prop(d0)), quiet)),
                                ),
                                LT0,
                            ),
                        ),
                    ),
                )
            )
    if gadgets:
        parts.append(Not(disj(*gadgets)))
    return conj(*parts)


def _dom_l(m: MinskyMachine) -> Formula:
    parts = []
    for c in (1, 2):
        inc, dec = m.having("inc", c), m.having("dec", c)
        if not dec:
            continue
        s_inc, s_dec = _props(m, inc), _props(m, dec)
        # a decrement needs an earlier increment
        parts.append(
            box("A", Not(conj(right(s_dec), Not(interior(s_inc)), disj(len_k(1), Not(left(s_inc))))))
        )
        if not inc:
            continue
        # increments after a decrement carry larger values
        parts.append(
            everywhere(implies(_code(s_dec), Not(dia("L", conj(left(s_inc), right(HASH)), LE0))))
        )
        no_more = box("A", conj(*(Not(right(transition_prop(j))) for j in inc)))
        bigger_dec = dia("L", disj(*(_code(transition_prop(j)) for j in dec)), GT0)
        for i in inc:
            parts.append(everywhere(implies(conj(_code(transition_prop(i)), no_more), Not(bigger_dec))))
    return conj(*parts)


def conjuncts_l(m: MinskyMachine) -> dict[str, Formula]:
    return {
        "con": _con_l(m),
        "inc": _progression_l(m, "inc"),
        "dec": _progression_l(m, "dec"),
        "if_zero": _zero_l(m),
        "dom": _dom_l(m),
    }


# -- the DHS_A and DHS_O formulas -------------------------------------------------------

_MARKERS = (DOLLAR, TWO, ONE, HASH)
_MARK = disj(*_MARKERS)

# consecutive marker pairs and the marker that must come next
_NEXT = {
    ("dollar", "two"): ("one", False),
    ("two", "one"): ("hash", False),
    ("one", "hash"): ("one", False),
    ("hash", "one"): ("two", False),
    ("one", "two"): ("dollar", True),
    ("two", "dollar"): ("two", True),
}


def _seg(a: Formula, b: Formula) -> Formula:
    """From a marker a to the next marker b."""
    return conj(left(a), right(b), Not(interior(_MARK)), Not(len_k(1)))


def _con_ao(m: MinskyMachine) -> Formula:
    n = len(m.transitions)
    ds = [transition_prop(i) for i in range(n)]
    blank = Not(disj(*_MARKERS, *ds))
    start = [DOLLAR, TWO, blank, ONE, blank, conj(ds[m.init], HASH)]
    parts: list[Formula] = [start[0]] + [ahead(p, d) for d, p in enumerate(start) if d]
    parts.append(
        everywhere(
            implies(
                len_k(1),
                conj(
                    _at_most_one(list(_MARKERS)),
                    _at_most_one(ds),
                    implies(HASH, disj(*ds)),
                    implies(disj(*ds), HASH),
                ),
            )
        )
    )
    for (a, b), (c, adjacent) in _NEXT.items():
        pa, pb, pc = Prop(a), Prop(b), Prop(c)
        shape = len_k(2) if adjacent else Not(len_k(2))
        parts.append(everywhere(implies(_seg(pa, pb), dia("A", conj(_seg(pb, pc), shape)))))
    for c in (1, 2):
        for op, zero in (("dec", False), ("if_zero", True)):
            idx = m.having(op, c)
            if not idx:
                continue
            s = _props(m, idx)
            value = len_k(3) if zero else Not(len_k(3))
            if c == 1:
                parts.append(everywhere(implies(conj(_seg(ONE, HASH), right(s)), value)))
                parts.append(everywhere(implies(conj(_seg(HASH, ONE), left(s)), value)))
            else:
                parts.append(
                    everywhere(implies(conj(_seg(TWO, ONE), dia("A", conj(_seg(ONE, HASH), right(s)))), value))
                )
                parts.append(everywhere(implies(conj(_seg(HASH, ONE), left(s)), dia("A", conj(_seg(ONE, TWO), value)))))
    for i in range(n):
        nxt = conj(left(ds[i]), right(HASH), Not(len_k(1)), Not(interior(HASH)))
        parts.append(everywhere(implies(nxt, right(_props(m, m.successors(i))))))
    parts.append(box("A", dia("A", right(ds[m.rec]))))
    return conj(*parts)


def _reach(a: Formula, t: int) -> Formula:
    """The first a after the left endpoint lies at most t positions past the right endpoint."""
    return disj(interior(a), right(a), *(ahead(a, d) for d in range(1, t + 1)))


def _same_length(rel: str, guard: Formula, a: Formula, t: int, nonstrict: bool) -> Formula:
    """<rel>_{=0}(guard & a t positions ahead & no a inside), or its >=0 rendering."""
    target = conj(*([] if guard is TRUE else [guard]), ahead(a, t), Not(interior(a)))
    if not nonstrict:
        return dia(rel, target, EQ0)
    closure = _reach(a, t) if guard is TRUE else implies(guard, _reach(a, t))
    return And((dia(rel, target, GE0), box(rel, closure, GE0)))


def _lr(variant: str, nonstrict: bool) -> Formula:
    parts = []
    for a in (TWO, ONE):
        # The extra ~Int(a) keeps the interval inside one configuration code.
        head = conj(left(a), right(HASH), Not(interior(HASH)), Not(interior(a)))
        if variant == "A":
            body = _same_length("A", TRUE, a, 0, nonstrict)
        else:
            body = _same_length("O", left_next(HASH), a, 1, nonstrict)
        parts.append(everywhere(implies(head, body)))
    return conj(*parts)


def _shifts(t: Transition) -> tuple[int, int]:
    """How far the same-length interval stops short of the next hash, and of the next one.

    A decrement shrinks the next code by one position, which the plain same-length
    interval absorbs (offset 0); a zero test and an increment stop one and two
    positions earlier. The A rendering starts one position before the O rendering.
    """
    d = {"inc": 1, "dec": -1, "if_zero": 0}[t.op]
    return d + 1, (d if t.counter == 2 else 0) + 1


def _delta(m: MinskyMachine, i: int, variant: str, nonstrict: bool) -> Formula:
    s, s2 = _shifts(m.transitions[i])
    di = transition_prop(i)
    if variant == "A":
        head = conj(left(di), right(TWO), Not(interior(TWO)))
        psi = dia(
            "A",
            conj(left(ONE), right(TWO), Not(interior(TWO)), _same_length("A", TRUE, ONE, s2 + 1, nonstrict)),
        )
        total = _same_length("A", TRUE, HASH, s + 1, nonstrict)
    else:
        head = conj(left(di), right(DOLLAR), Not(interior(DOLLAR)))
        psi = dia(
            "A",
            conj(
                left(ONE),
                right(DOLLAR),
                Not(interior(DOLLAR)),
                _same_length("O", left_next(DOLLAR), ONE, s2, nonstrict),
            ),
        )
        total = _same_length("O", left_next(DOLLAR), HASH, s, nonstrict)
    return everywhere(implies(head, conj(interior(psi), total)))


def conjuncts_ao(m: MinskyMachine, variant: str, nonstrict: bool = False) -> dict[str, Formula]:
    out = {"con": _con_ao(m), "lr": _lr(variant, nonstrict)}
    for i in range(len(m.transitions)):
        out[f"d{i}"] = _delta(m, i, variant, nonstrict)
    return out


def conjuncts(m: MinskyMachine, variant: str, nonstrict: bool = False) -> dict[str, Formula]:
    """Named conjuncts of the formula for the variant, in order."""
    match variant:
        case "L":
            if nonstrict:
                raise MachineError("the non-strict rendering exists for variants A and O only")
            return conjuncts_l(m)
        case "A" | "O":
            return conjuncts_ao(m, variant, nonstrict)
    raise MachineError(f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")


def gen_phi(m: MinskyMachine, variant: str, nonstrict: bool = False) -> Formula:
    """Satisfiable iff m has a recurrent computation."""
    return conj(*conjuncts(m, variant, nonstrict).values())


__all__ = [
    "ComputationError",
    "Configuration",
    "EXAMPLE_MACHINE",
    "FlatConfiguration",
    "MachineError",
    "MinskyMachine",
    "PrefixReport",
    "Transition",
    "Violation",
    "ahead",
    "ao_lasso",
    "check_well_formed_prefix",
    "conjuncts",
    "encode_computation_ao",
    "encode_configuration_ao",
    "encode_flat_sequence",
    "everywhere",
    "flat_lasso",
    "flat_sequence",
    "flat_to_computation",
    "gen_phi",
    "interior",
    "left",
    "left_next",
    "parse_minsky",
    "right",
    "right_next",
    "to_minsky_text",
    "transition_prop",
]
