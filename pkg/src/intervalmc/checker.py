"""Satisfiability and model checking for monotonic CHL1 and monotonic D(A, B, Bbar).

Interval formulas are first translated into one-variable hybrid sentences. Sentences
go through the normal form, the two-way automaton and its nondeterministic Buchi
automaton. Every witness and counterexample is re-checked by the oracle before
it is returned.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

from .automata import DEFAULT_STATE_CAP, BuchiNWA, Nonempty, build_2awa, awa_to_nbw, degeneralize, is_empty
from .formula import (
    Cmp,
    Formula,
    FragmentError,
    HsMod,
    ChlTemp,
    Swap,
    in_simple,
    is_dhs,
    is_sentence,
    variables_of,
)
from .mnf import dual, to_mnf
from .oracle import check_trace_satisfies
from .syntax import to_text
from .traces import KripkeStructure, LassoTrace
from .translate import ABB_RELATIONS, dab_to_chl1, first_nonsimple

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class SoundnessError(AssertionError):
    """The oracle rejected a witness produced by the automata pipeline."""


@dataclass(frozen=True)
class Sat:
    witness: LassoTrace
    stats: dict = field(default_factory=dict, compare=False)
    verdict = "SAT"
    exit_code = EXIT_OK


@dataclass(frozen=True)
class Unsat:
    stats: dict = field(default_factory=dict, compare=False)
    verdict = "UNSAT"
    exit_code = EXIT_NEGATIVE


@dataclass(frozen=True)
class Holds:
    stats: dict = field(default_factory=dict, compare=False)
    verdict = "HOLDS"
    exit_code = EXIT_OK


@dataclass(frozen=True)
class Cex:
    prefix: tuple[str, ...]
    loop: tuple[str, ...]
    trace: LassoTrace
    stats: dict = field(default_factory=dict, compare=False)
    verdict = "CEX"
    exit_code = EXIT_NEGATIVE


# -- fragment checks ------------------------------------------------------------------


def _equality_node(phi: Formula) -> Optional[Formula]:
    for node in phi.subformulas():
        if isinstance(node, (HsMod, ChlTemp)) and node.constraint is not None and node.constraint.op is Cmp.EQ:
            return node
    return None


def to_decidable(phi: Formula) -> Formula:
    """The MNF one-variable sentence decided for phi, or a FragmentError naming the culprit."""
    bad = _equality_node(phi)
    if bad is not None:
        raise FragmentError(f"equality constraint is not monotonic: {to_text(bad)}")
    if is_dhs(phi):
        if not in_simple(phi):
            node = first_nonsimple(phi)
            raise FragmentError(f"constrained {node.rel} lies in an undecidable fragment: {to_text(node)}")
        for node in phi.subformulas():
            if isinstance(node, HsMod) and node.rel not in ABB_RELATIONS:
                raise FragmentError(
                    f"modality {node.rel} is outside D(A,B,Bbar): {to_text(node)}; full DHS_simple "
                    "is only translated (translate --to schl1 or chl2), since its decision route "
                    "through two-variable CHL is non-elementary"
                )
        return to_mnf(dab_to_chl1(phi))
    for node in phi.subformulas():
        if isinstance(node, Swap):
            raise FragmentError(f"swap is outside CHL1: {to_text(node)}")
    names = variables_of(phi)
    if len(names) > 1:
        raise FragmentError(f"one variable expected, found {sorted(names)}")
    if not is_sentence(phi):
        raise FragmentError(f"free variable in {to_text(phi)}; bind it with down")
    return to_mnf(phi)


def negate_for_mc(phi: Formula) -> Formula:
    """MNF sentence equivalent to the negation of phi."""
    return dual(to_decidable(phi))


# -- automata ---------------------------------------------------------------------------


def _automaton(sentence: Formula, cap: int, stats: dict) -> BuchiNWA:
    t0 = time.perf_counter()
    awa = build_2awa(sentence)
    stats["closure"] = len(awa.main.cl.items)
    stats["binders"] = len(awa.pairs)
    a = awa_to_nbw(awa, cap)
    stats["nbw_states"] = a.size
    stats["nbw_transitions"] = a.transitions
    stats["time_build"] = time.perf_counter() - t0
    return a


def sat(phi: Formula, cap: int = DEFAULT_STATE_CAP) -> Union[Sat, Unsat]:
    """Decide satisfiability; a witness lasso comes back re-verified on the original formula."""
    stats: dict = {}
    sentence = to_decidable(phi)
    a = _automaton(sentence, cap, stats)
    t0 = time.perf_counter()
    res = is_empty(a)
    stats["time_emptiness"] = time.perf_counter() - t0
    if not isinstance(res, Nonempty):
        return Unsat(stats)
    w = res.witness
    if not check_trace_satisfies(w, phi):
        raise SoundnessError(f"witness {w} does not satisfy {to_text(phi)}")
    return Sat(w, stats)


def product(k: KripkeStructure, a: BuchiNWA) -> BuchiNWA:
    """Synchronous product; a state (s, q) reads Lab(s) and moves along an edge of K.

    The automaton is degeneralised first so the product carries one Buchi set.
    """
    b = degeneralize(a)
    acc = b.acceptance[0]
    ids: dict = {}
    labels: list = []
    edges: list = []
    queue: deque = deque()

    def get(s, q):
        key = (s, q)
        if key not in ids:
            ids[key] = len(labels)
            labels.append((s, b.labels[q]))
            edges.append([])
            queue.append(key)
        return ids[key]

    init = [get(k.init, q) for q in sorted(b.initial)]
    accepting = set()
    while queue:
        s, q = queue.popleft()
        src = ids[(s, q)]
        if q in acc:
            accepting.add(src)
        letter = k.labels[s]
        seen = letter & b.props
        out = []
        for a_letter, q2 in b.edges[q]:
            if a_letter != seen:
                continue
            for s2 in k.successors(s):
                out.append((letter, get(s2, q2)))
        edges[src] = out
    return BuchiNWA(b.props | k.props, labels, init, edges, (frozenset(accepting),))


def mc(k: KripkeStructure, phi: Formula, cap: int = DEFAULT_STATE_CAP) -> Union[Holds, Cex]:
    """Check that every trace of K satisfies phi; a counterexample is a lasso path of K."""
    stats: dict = {}
    neg = negate_for_mc(phi)
    a = _automaton(neg, cap, stats)
    t0 = time.perf_counter()
    p = product(k, a)
    stats["product_states"] = p.size
    res = is_empty(p)
    stats["time_emptiness"] = time.perf_counter() - t0
    if not isinstance(res, Nonempty):
        return Holds(stats)
    path = LassoTrace(tuple(s for s, _ in res.prefix_states), tuple(s for s, _ in res.loop_states)).canonical()
    prefix, loop = path.prefix, path.loop
    if not k.is_lasso_path(list(prefix), list(loop)):
        raise SoundnessError(f"counterexample {prefix} {loop} is not a path of the structure")
    trace = k.path_trace(prefix, loop)
    if check_trace_satisfies(trace, phi):
        raise SoundnessError(f"counterexample trace {trace} satisfies {to_text(phi)}")
    return Cex(prefix, loop, trace, stats)


def report(result, phi: Formula) -> dict:
    """JSON-ready summary of a verdict."""
    out: dict = {"verdict": result.verdict, "formula": to_text(phi)}
    match result:
        case Sat(witness=w):
            out["witness"] = str(w.canonical())
        case Cex(prefix=u, loop=v, trace=w):
            out["path"] = {"prefix": list(u), "loop": list(v)}
            out["trace"] = str(w.canonical())
    stats = dict(result.stats)
    out["sizes"] = {k: v for k, v in stats.items() if not k.startswith("time_")}
    out["timings"] = {k[5:]: round(v, 6) for k, v in stats.items() if k.startswith("time_")}
    return out


__all__ = [
    "Cex",
    "Holds",
    "Sat",
    "SoundnessError",
    "Unsat",
    "mc",
    "negate_for_mc",
    "product",
    "report",
    "sat",
    "to_decidable",
]
