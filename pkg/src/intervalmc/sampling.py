"""Random formulas and traces for sweeps and property tests."""

from __future__ import annotations

import random
from typing import Optional, Sequence

from .formula import (
    TRUE,
    And,
    Binder,
    ChlTemp,
    Cmp,
    Constraint,
    Formula,
    HsMod,
    Not,
    Or,
    Prop,
    Swap,
    Var,
)
from .traces import LassoTrace

MONOTONE_OPS = (Cmp.LT, Cmp.LE, Cmp.GT, Cmp.GE)


def random_constraint(rng: random.Random, cmax: int, ops: Sequence[Cmp] = MONOTONE_OPS, lo: Optional[int] = None) -> Constraint:
    lo = -cmax if lo is None else lo
    return Constraint(rng.choice(tuple(ops)), rng.randint(lo, cmax))


def random_chl(
    rng: random.Random,
    props: Sequence[str] = ("p", "q"),
    temporal: int = 4,
    cmax: int = 3,
    depth: int = 4,
    var: str = "x",
    binders: bool = True,
    swap: bool = False,
    constrained: bool = True,
    ops: Sequence[Cmp] = MONOTONE_OPS,
) -> Formula:
    """A random one-variable CHL (or SCHL with ``swap``) sentence.

    At most ``temporal`` F/P/G/H nodes are used; constants lie in [-cmax, cmax].
    """
    budget = [temporal]

    def leaf(bound: bool) -> Formula:
        choices: list[Formula] = [Prop(p) for p in props] + [TRUE]
        if bound:
            choices += [Var(var)] * 2
        return rng.choice(choices)

    def go(d: int, bound: bool) -> Formula:
        if d == 0:
            return leaf(bound)
        r = rng.random()
        if r < 0.2:
            return leaf(bound)
        if r < 0.3:
            return Not(go(d - 1, bound))
        if r < 0.5:
            cls = And if rng.random() < 0.5 else Or
            return cls((go(d - 1, bound), go(d - 1, bound)))
        if r < 0.85 and budget[0] > 0:
            budget[0] -= 1
            op = rng.choice("FPGH")
            k = random_constraint(rng, cmax, ops) if constrained and rng.random() < 0.5 else None
            return ChlTemp(op, k, go(d - 1, bound))
        if binders:
            node = Swap if swap else Binder
            return node(var, go(d - 1, True))
        return leaf(bound)

    phi = go(depth, False)
    if binders and rng.random() < 0.5:
        phi = (Swap if swap else Binder)(var, phi)
    return phi


def random_dhs(
    rng: random.Random,
    props: Sequence[str] = ("p", "q"),
    relations: Sequence[str] = ("A", "B", "Bbar"),
    constrained: Sequence[str] = ("B", "Bbar"),
    modal: int = 4,
    cmax: int = 3,
    depth: int = 4,
    ops: Sequence[Cmp] = MONOTONE_OPS,
) -> Formula:
    """A random interval formula over the given relations (constraints only on ``constrained``)."""
    budget = [modal]

    def go(d: int) -> Formula:
        if d == 0:
            return rng.choice([Prop(p) for p in props] + [TRUE])
        r = rng.random()
        if r < 0.2:
            return rng.choice([Prop(p) for p in props] + [TRUE])
        if r < 0.3:
            return Not(go(d - 1))
        if r < 0.5:
            cls = And if rng.random() < 0.5 else Or
            return cls((go(d - 1), go(d - 1)))
        if budget[0] > 0:
            budget[0] -= 1
            rel = rng.choice(tuple(relations))
            k = None
            if rel in constrained and rng.random() < 0.5:
                k = random_constraint(rng, cmax, ops)
            return HsMod(rel, rng.random() < 0.3, k, go(d - 1))
        return rng.choice([Prop(p) for p in props])

    return go(depth)


def random_lasso(
    rng: random.Random,
    props: Sequence[str] = ("p", "q"),
    max_prefix: int = 4,
    max_loop: int = 4,
    exact: bool = False,
) -> LassoTrace:
    """A random lasso; with ``exact`` the bounds are the exact prefix and loop lengths."""

    def letter():
        return frozenset(p for p in props if rng.random() < 0.5)

    nu = max_prefix if exact else rng.randint(0, max_prefix)
    nv = max_loop if exact else rng.randint(1, max_loop)
    u = tuple(letter() for _ in range(nu))
    v = tuple(letter() for _ in range(nv))
    return LassoTrace(u, v)


def random_lasso_sample(
    rng: random.Random,
    props: Sequence[str] = ("p", "q"),
    max_prefix: int = 4,
    max_loop: int = 4,
    shapes: int = 5,
    per_shape: int = 40,
) -> list[LassoTrace]:
    """Random lassos drawn from a few random (|u|, |v|) shapes.

    The oracle's cost grows with the number of distinct shapes rather than with the
    number of lassos, so sweeps draw many lassos per shape.
    """
    out = []
    for _ in range(shapes):
        nu, nv = rng.randint(0, max_prefix), rng.randint(1, max_loop)
        for _ in range(per_shape):
            out.append(random_lasso(rng, props, nu, nv, exact=True))
    return out
