"""The scheduler example: N processes sharing a resource, and the request-duration property."""

from __future__ import annotations

import itertools

from .formula import TRUE, Binder, Formula, Not, Prop, Var, box, conj, dia, disj, implies, le, temp
from .traces import KripkeStructure

_PROCESS_EDGES = {"v0": ("v0", "v1"), "v1": ("v0", "v1", "v2"), "v2": ("v0", "v2")}
_PROCESS_PROPS = {"v0": "pI", "v1": "pR", "v2": "pU"}


def _scheduler_edges(n: int) -> dict[str, tuple[str, ...]]:
    out = {"w0": ("w0",) + tuple(f"w{i}" for i in range(1, n + 1))}
    for i in range(1, n + 1):
        out[f"w{i}"] = ("w0", f"w{i}")
    return out


def k_sched(n: int = 2) -> KripkeStructure:
    """Product of n process structures and the scheduler, keeping the states where the
    scheduler sits in w_i exactly when process i is in v2."""
    sched = _scheduler_edges(n)

    def valid(procs: tuple[str, ...], w: str) -> bool:
        return all((w == f"w{i + 1}") == (p == "v2") for i, p in enumerate(procs))

    def name(procs, w) -> str:
        return "".join(procs) + w

    states = []
    labels = {}
    for procs in itertools.product(("v0", "v1", "v2"), repeat=n):
        for w in sched:
            if valid(procs, w):
                s = name(procs, w)
                states.append(s)
                props = {f"{_PROCESS_PROPS[p]}{i + 1}" for i, p in enumerate(procs)}
                props.add("qI" if w == "w0" else f"qU{w[1:]}")
                labels[s] = frozenset(props)
    edges = set()
    for s in states:
        procs = tuple(s[2 * i : 2 * i + 2] for i in range(n))
        w = s[2 * n :]
        for nxt in itertools.product(*(_PROCESS_EDGES[p] for p in procs)):
            for w2 in sched[w]:
                if valid(nxt, w2):
                    edges.add((s, name(nxt, w2)))
    return KripkeStructure(tuple(states), frozenset(edges), labels, name(("v0",) * n, "w0"))


def maximal(p: Formula) -> Formula:
    """Max_p: p holds homogeneously and the interval extends in neither direction."""
    return conj(p, Not(dia("Bbar", p)), Not(dia("Ebar", p)))


def _length_between(lo: int, hi: int) -> Formula:
    return conj(dia("B", TRUE, le(-lo + 1)), Not(dia("B", TRUE, le(-hi))))


def request_duration(i: int, lo: int, hi: int) -> Formula:
    """Every unanswered request of process i (a maximal run of requests followed by
    idling) lasts between lo and hi time units."""
    p_r, p_i = Prop(f"pR{i}"), Prop(f"pI{i}")
    trigger = conj(maximal(p_r), dia("Bbar", dia("E", p_i), le(1)))
    return box("A", box("A", implies(trigger, _length_between(lo, hi))))


def request_duration_chl(i: int, lo: int, hi: int) -> Formula:
    """A one-variable hybrid sentence equivalent to :func:`request_duration`.

    A run starts at a request whose predecessor (if any) is not a request. Binding x
    there, the run ends badly at the first later non-request if that position idles
    and lies too close to x or too far from it. A singleton has no proper prefix, so
    the interval formula never accepts a run of length 1 and the lower bound is at
    least 2.
    """
    p_r, p_i = Prop(f"pR{i}"), Prop(f"pI{i}")
    start = conj(p_r, disj(Not(temp("P", TRUE)), temp("P", Not(p_r), le(1))))
    x = Var("x")
    run = temp("H", implies(temp("P", x), p_r))
    short = temp("P", x, le(max(lo, 2) - 1))
    long_ = temp("H", Not(x), le(hi))
    bad = conj(start, Binder("x", temp("F", conj(p_i, Not(p_r), run, disj(short, long_)))))
    return conj(Not(bad), Not(temp("F", bad)))


__all__ = ["k_sched", "maximal", "request_duration", "request_duration_chl"]
