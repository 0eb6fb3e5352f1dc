import random

import pytest
from hypothesis import given, strategies as st

from intervalmc.automata import (
    EXIT,
    BuchiNWA,
    Empty,
    LassoMembership,
    Nonempty,
    PAnd,
    PFalse,
    PLeaf,
    POr,
    PTrue,
    ResourceLimit,
    build_2awa,
    degeneralize,
    is_empty,
    leaves,
    nbw_accepts_lasso,
    nbw_of,
    to_dot,
    to_hoa,
)
from intervalmc.formula import FragmentError
from intervalmc.mnf import to_mnf
from intervalmc.oracle import check_trace_satisfies, satisfies_batch
from intervalmc.sampling import random_chl, random_lasso_sample
from intervalmc.syntax import parse
from intervalmc.traces import all_lassos, parse_lasso

P = frozenset({"p"})
E0 = frozenset()


def _two_letter_automaton(acceptance):
    # states 0, 1; reading {p} goes to 1, reading {} goes to 0
    edges = [[(P, 1), (E0, 0)], [(P, 1), (E0, 0)]]
    return BuchiNWA(frozenset({"p"}), [0, 1], [0], edges, acceptance)


ACCEPT_ALL = _two_letter_automaton(())
ACCEPT_NONE = BuchiNWA(frozenset({"p"}), [0], [0], [[]], (frozenset({0}),))
SMALL = all_lassos(["p"], 2, 2)


def test_accept_all_and_nothing():
    assert all(nbw_accepts_lasso(ACCEPT_ALL, w) for w in SMALL)
    assert not any(nbw_accepts_lasso(ACCEPT_NONE, w) for w in SMALL)
    assert isinstance(is_empty(ACCEPT_NONE), Empty)
    assert isinstance(is_empty(ACCEPT_ALL), Nonempty)


def test_degeneralize_single_set_is_identity():
    a = _two_letter_automaton((frozenset({1}),))
    assert degeneralize(a) is a


def test_degeneralize_two_sets():
    # infinitely many p and infinitely many non-p
    a = _two_letter_automaton((frozenset({1}), frozenset({0})))
    b = degeneralize(a)
    assert len(b.acceptance) == 1 and b.size <= 2 * a.size
    for w in all_lassos(["p"], 2, 3):
        loop = set(w.loop)
        assert nbw_accepts_lasso(b, w) == (P in loop and E0 in loop)


def test_empty_family_accepts_everything():
    assert len(degeneralize(ACCEPT_ALL).acceptance) == 1
    assert all(nbw_accepts_lasso(degeneralize(ACCEPT_ALL), w) for w in SMALL)


@pytest.mark.parametrize(
    "src, pred",
    [
        ("down x . p", lambda w: "p" in w.letter(0)),
        # G is the strict future, so position 0 is unconstrained
        ("down x . G p", lambda w: all("p" in w.letter(i) for i in range(1, len(w.prefix) + len(w.loop) + 1))),
        ("down x . p & G p", lambda w: all("p" in w.letter(i) for i in range(len(w.prefix) + len(w.loop)))),
        ("down x . p & ~p", lambda w: False),
    ],
)
def test_nbw_language(src, pred):
    phi = parse(src)
    a = nbw_of(to_mnf(phi))
    for w in SMALL:
        assert nbw_accepts_lasso(a, w) == pred(w) == check_trace_satisfies(w, phi)


def test_membership_engines_agree(rng):
    ws = random_lasso_sample(rng, shapes=4, per_shape=10)
    for _ in range(10):
        a = nbw_of(to_mnf(random_chl(rng)))
        assert list(LassoMembership(a).accepts_many(ws)) == [nbw_accepts_lasso(a, w) for w in ws]


def test_witness_is_accepted_and_satisfies():
    phi = to_mnf(parse("F{<=3} (p & G{<=2} ~q) & G F q"))
    res = is_empty(nbw_of(phi))
    assert isinstance(res, Nonempty)
    assert nbw_accepts_lasso(nbw_of(phi), res.witness)
    assert check_trace_satisfies(res.witness, phi)


def test_state_cap():
    with pytest.raises(ResourceLimit) as e:
        nbw_of(to_mnf(parse("G{<=3} F{<=3} (p | F{<=3} q)")), cap=5)
    assert e.value.cap == 5


def test_non_sentence_rejected():
    with pytest.raises(FragmentError):
        build_2awa(parse("F @x"))


# -- the two-way automaton ------------------------------------------------------


def test_transitions_false_on_wrong_letter():
    awa = build_2awa(to_mnf(parse("down x . G (p -> F q)")))
    for q in awa.initial:
        atom_letter = awa.main.letter_of(q[1])
        for letter in (frozenset(), frozenset("p"), frozenset("q"), frozenset("pq")):
            if letter != atom_letter:
                assert isinstance(awa.delta(q, letter), PFalse)


def test_initial_atom_moves_up_to_exit():
    awa = build_2awa(to_mnf(parse("F p")))
    t = awa.main
    init = next(a for a in t.atoms() if t.is_initial(a))
    f = awa.delta(("main", init, "up"), t.letter_of(init))
    assert {(leaf.direction, leaf.state) for leaf in leaves(f)} == {("up", EXIT)}
    assert awa.is_backward_accepting(EXIT)


def test_no_binder_means_no_fulfilment_obligations():
    awa = build_2awa(to_mnf(parse("G F p")))
    assert awa.pairs == []
    t = awa.main
    a = next(iter(t.atoms()))
    assert isinstance(awa._ful(t, a, t.letter_of(a)), PTrue)


def _random_posbool(rng, depth=3):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice([PTrue(), PFalse(), PLeaf("down", rng.randint(0, 3)), PLeaf("up", rng.randint(0, 3))])
    cls = PAnd if rng.random() < 0.5 else POr
    return cls(tuple(_random_posbool(rng, depth - 1) for _ in range(2)))


@given(st.integers(0, 2**32))
def test_posbool_monotone(seed):
    rng = random.Random(seed)
    f = _random_posbool(rng)
    universe = [(d, s) for d in ("down", "up") for s in range(4)]
    small = {m for m in universe if rng.random() < 0.4}
    big = small | {m for m in universe if rng.random() < 0.5}
    if f.satisfied_by(small):
        assert f.satisfied_by(big)


@given(st.integers(0, 2**32))
def test_nbw_agrees_with_oracle(seed):
    rng = random.Random(seed)
    phi = random_chl(rng, temporal=3)
    a = nbw_of(to_mnf(phi))
    ws = random_lasso_sample(rng, max_prefix=3, max_loop=3, shapes=3, per_shape=15)
    assert list(LassoMembership(a).accepts_many(ws)) == list(satisfies_batch(ws, phi))


@given(st.integers(0, 2**32))
def test_empty_iff_no_corpus_lasso(seed):
    rng = random.Random(seed)
    a = nbw_of(to_mnf(random_chl(rng, temporal=3)))
    accepted = LassoMembership(a).accepts_many(all_lassos(["p", "q"], 1, 2))
    if isinstance(is_empty(a), Empty):
        assert not any(accepted)


# -- dumps -----------------------------------------------------------------------


def test_hoa_and_dot_dumps():
    a = nbw_of(to_mnf(parse("G F p")))
    hoa = to_hoa(a)
    assert hoa.startswith("HOA: v1") and f"States: {a.size}" in hoa and hoa.rstrip().endswith("--END--")
    dot = to_dot(a)
    assert dot.startswith("digraph") and dot.count("->") >= a.transitions


def test_2awa_dump():
    text = build_2awa(to_mnf(parse("down x . F (p & P @x)"))).dump()
    lines = text.splitlines()
    assert lines[0] == "2awa props p"
    assert lines[1].startswith("initial ")
    assert any("->" in line and "(down," in line for line in lines)
