import random

import pytest
from hypothesis import given, strategies as st

from intervalmc import checker
from intervalmc.formula import TRUE, Binder, ChlTemp, FragmentError, Not, Prop, Var, le, size, temp
from intervalmc.mnf import dual, to_mnf
from intervalmc.sampling import random_chl
from intervalmc.syntax import parse
from intervalmc.tableau import Obligation, Tableau, brute_force_atoms, check_sequence_prefix, closure, enumerate_atoms

p, x = Prop("p"), Var("x")


def _small_tableau(seed, limit=16):
    rng = random.Random(seed)
    for _ in range(50):
        phi = to_mnf(random_chl(rng, props=("p",), temporal=2, cmax=3, binders=False, depth=3))
        t = Tableau(phi)
        if len(t.cl.items) <= limit:
            return t
    return Tableau(p)


def test_closure_of_a_proposition():
    cl = closure(p)
    want = {x, TRUE, p, temp("P", TRUE, le(1)), temp("F", p, le(1)), temp("P", p, le(1))}
    assert want <= set(cl.members)
    assert all(dual(f) in cl.members for f in cl.members)


def test_closure_always_has_the_variable():
    assert Var("x") in closure(parse("G p")).members
    assert Var("y") in closure(parse("down y . F @y")).members


def test_obligations_only_for_bounds_above_one():
    cl = closure(parse("F{<=3} p & G{<=1} p"))
    carriers = {o.carrier for o in cl.obligations}
    assert carriers == {parse("F{<=3} p"), parse("G{<=3} ~p")}
    assert sorted(o.d for o in cl.obligations if o.carrier == parse("F{<=3} p")) == [1, 2]


def test_binder_bodies_are_not_first_level():
    cl = closure(parse("down x . F (p & @x)"))
    assert parse("F (p & @x)") not in cl.members


def test_tableau_rejects_non_mnf():
    with pytest.raises(FragmentError):
        Tableau(parse("~F p"))


def test_atoms_choose_one_of_each_pair():
    t = Tableau(p)
    for a in enumerate_atoms(t):
        assert (p in a) != (Not(p) in a)
        assert TRUE in a


def test_at_most_one_obligation_per_carrier():
    t = Tableau(parse("F{<=3} p"))
    o1, o2 = Obligation(parse("F{<=3} p"), 1), Obligation(parse("F{<=3} p"), 2)
    for a in enumerate_atoms(t):
        assert not (o1 in a and o2 in a)


def test_initial_atoms_have_no_past():
    t = Tableau(parse("P p | H{<=2} p"))
    for a in enumerate_atoms(t):
        has_past = any(
            (isinstance(f, ChlTemp) and f.op == "P") or (isinstance(f, Obligation) and f.carrier.op in "PH")
            for f in a.members
        )
        assert a.initial == (not has_past)


def test_succ_f_requirement():
    t = Tableau(parse("F p"))
    f = parse("F p")
    for a in t.atoms():
        if not t.has(a, f):
            continue
        for b in t.atoms():
            if not t.is_initial(b) and not t.has(b, f) and not t.has(b, p):
                assert not t.is_succ(a, b)


def test_succ_obligation_d1_requires_body():
    t = Tableau(parse("F{<=2} p"))
    ob = Obligation(parse("F{<=2} p"), 1)
    for a in t.atoms():
        if t.has(a, ob):
            for b in t.atoms():
                if t.is_succ(a, b):
                    assert t.has(b, p)


def test_succ_rejects_initial_successor():
    t = Tableau(parse("F{<=2} p"))
    for a in t.atoms():
        for b in t.atoms():
            if t.is_initial(b):
                assert not t.is_succ(a, b)


def test_closure_is_linear_in_size(rng):
    ratios = []
    for _ in range(200):
        phi = to_mnf(random_chl(rng))
        ratios.append(len(closure(phi).members) / size(phi))
    assert max(ratios) <= 20


@given(st.integers(0, 2**32))
def test_enumerate_equals_brute_force(seed):
    t = _small_tableau(seed)
    assert {a.mask for a in enumerate_atoms(t)} == brute_force_atoms(t)


@given(st.integers(0, 2**32))
def test_successor_search_matches_literal_relation(seed):
    t = _small_tableau(seed, limit=14)
    atoms = list(t.atoms())
    for a in atoms[:6]:
        assert set(t.successors(a)) == {b for b in atoms if t.is_succ(a, b)}


# -- prefix checking -----------------------------------------------------------


def _run(t, phi, w, length):
    """A sequence prefix along w with x at 0 and phi in the first atom, by depth-first search."""
    bit = t.cl.index[phi]

    def go(seq):
        if len(seq) == length:
            return seq
        for b in t.successors(seq[-1], letter=w.letter(len(seq)), xflag=False):
            got = go(seq + [b])
            if got:
                return got
        return None

    for a in t.initial_atoms(letter=w.letter(0), xflag=True):
        if a >> bit & 1:
            got = go([a])
            if got:
                return got
    return None


def test_valid_prefix_has_no_violations():
    phi = to_mnf(parse("F{<=2} p & G (p -> F ~p)"))
    w = checker.sat(phi).witness
    t = Tableau(phi)
    rho = _run(t, phi, w, 6)
    assert rho is not None
    assert check_sequence_prefix(t, rho, w, 0) == []


def test_prefix_violations_are_located():
    phi = to_mnf(parse("P p | F p"))
    t = Tableau(phi)
    w = checker.sat(phi).witness
    rho = _run(t, phi, w, 4)
    non_initial = next(a for a in t.atoms() if not t.is_initial(a))
    kinds = {(v.index, v.kind) for v in check_sequence_prefix(t, [non_initial] + rho[1:], w, 0)}
    assert (0, "not-initial") in kinds
    with_x = [a | (1 << t.x_bit) for a in rho]
    bad = [v for v in check_sequence_prefix(t, with_x, w, 0) if v.kind == "x-misplaced"]
    assert bad and "0, 1" in bad[0].detail
