import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from intervalmc.formula import TRUE, And, ChlTemp, HsMod, Not, Or, Prop, Top, dia, ge, le, len_k
from intervalmc.oracle import (
    HorizonInstability,
    Interval,
    check_trace_satisfies,
    eval_chl,
    eval_dhs,
    find_violation,
    kripke_lassos,
    satisfies_batch,
)
from intervalmc.sampling import random_chl, random_dhs, random_lasso
from intervalmc.scheduler import k_sched
from intervalmc.syntax import parse
from intervalmc.traces import KripkeStructure, LassoTrace, parse_kripke, parse_lasso

p, q = Prop("p"), Prop("q")
PQ = parse_lasso("u: ; v: {p} {q}")
P_ONLY = parse_lasso("u: ; v: {p}")


def test_lasso_text_roundtrip():
    w = parse_lasso("u: {p,q} {} ; v: {q}")
    assert w.prefix == (frozenset("pq"), frozenset())
    assert parse_lasso(str(w)) == w
    assert w.letter(7) == frozenset("q")


def test_empty_loop_rejected():
    with pytest.raises(ValueError):
        LassoTrace((), ())


def test_canonical_form():
    w = parse_lasso("u: {p} {q} ; v: {p} {q}")
    assert w.canonical() == parse_lasso("u: ; v: {p} {q}")


def test_homogeneity_example():
    assert eval_dhs(PQ, Interval(0, 1), p) is False
    assert eval_dhs(PQ, Interval(0, 0), p) is True


def test_len_examples(rng):
    w = random_lasso(rng)
    assert eval_dhs(w, Interval(2, 3), len_k(2))
    assert not eval_dhs(w, Interval(2, 4), len_k(2))


def test_prefix_with_shorter_length(rng):
    w = random_lasso(rng)
    phi = dia("B", TRUE, le(-2))
    assert eval_dhs(w, Interval(0, 2), phi)
    assert not eval_dhs(w, Interval(0, 1), phi)


def test_singleton_has_no_prefix():
    assert not eval_dhs(P_ONLY, Interval(0, 0), dia("B", TRUE))


def test_interval_invariant():
    with pytest.raises(ValueError):
        Interval(3, 2)
    assert len(Interval(2, 4)) == 3


def test_chl_examples():
    assert eval_chl(P_ONLY, 5, None, parse("down x . @x"))
    assert eval_chl(PQ, 0, None, parse("F{<=1} q"))
    assert not eval_chl(PQ, 0, None, parse("F{<=1} p"))
    assert not eval_chl(PQ, 0, None, parse("P T"))
    assert not eval_chl(P_ONLY, 3, {"x": 1}, parse("swap x . @x"))
    assert eval_chl(P_ONLY, 3, {"x": 1}, parse("swap x . F{<=2} @x"))
    assert not eval_chl(P_ONLY, 3, {"x": 1}, parse("swap x . F{<=1} @x"))


def test_default_valuation_is_zero():
    assert eval_chl(P_ONLY, 0, None, parse("@x"))
    assert not eval_chl(P_ONLY, 2, None, parse("@x"))


def test_check_trace_satisfies_both_families():
    assert check_trace_satisfies(P_ONLY, parse("<Bbar> T"))
    assert check_trace_satisfies(PQ, parse("F q"))


def test_kripke_format_and_left_totality():
    k = parse_kripke("state s0 {p}\nstate s1 {}\ninit s0\nedge s0 s1\nedge s1 s0\n")
    assert k.successors("s0") == ["s1"]
    with pytest.raises(ValueError):
        parse_kripke("state s0 {p}\nstate s1\ninit s0\nedge s0 s1\n")


def test_kripke_lassos_self_loop():
    k = parse_kripke("state s {p}\ninit s\nedge s s\n")
    assert [w.canonical() for w in kripke_lassos(k, 3, 3)] == [P_ONLY]


def test_kripke_lassos_branching():
    k = parse_kripke("state s {}\nstate a {p}\nstate b {q}\ninit s\nedge s a\nedge s b\nedge a a\nedge b b\n")
    got = {str(w.canonical()) for w in kripke_lassos(k, 2, 2)}
    assert len(got) >= 2


def test_kripke_lassos_scheduler_idle_loop():
    k = k_sched(2)
    idle = k.path_trace((), ("v0v0w0",))
    assert any(w.canonical() == idle.canonical() for w in kripke_lassos(k, 1, 1))


def test_find_violation_stops_early():
    k = parse_kripke("state s {}\nstate a {p}\ninit s\nedge s a\nedge a s\nedge s s\n")
    w, seen = find_violation(k, parse("G ~p"), 3, 3, chunk=1)
    assert w is not None and not check_trace_satisfies(w, parse("G ~p"))
    assert find_violation(k, parse("G (p -> F ~p)"), 3, 3)[0] is None


# -- sampled properties ---------------------------------------------------------


def _point(seed):
    rng = random.Random(seed)
    w = random_lasso(rng)
    lo = rng.randint(0, 6)
    return rng, w, Interval(lo, lo + rng.randint(0, 5))


@given(st.integers(0, 2**32))
def test_homogeneity(seed):
    _, w, iv = _point(seed)
    for name in "pq":
        want = all(name in w.letter(h) for h in range(iv.lo, iv.hi + 1))
        assert eval_dhs(w, iv, Prop(name)) == want


@given(st.integers(0, 2**32), st.integers(2, 6))
def test_length_at_least(seed, n):
    _, w, iv = _point(seed)
    assert eval_dhs(w, iv, dia("B", TRUE, le(-n + 1))) == (len(iv) >= n)


@given(st.integers(0, 2**32))
def test_length_formula_at_one(seed):
    # For n = 1 the formula still asks for a proper prefix, so it means |I| >= 2.
    _, w, iv = _point(seed)
    assert eval_dhs(w, iv, dia("B", TRUE, le(0))) == (len(iv) >= 2)


@given(st.integers(0, 2**32))
def test_d_is_b_of_e(seed):
    rng, w, iv = _point(seed)
    psi = random_dhs(rng, modal=2, depth=2)
    assert eval_dhs(w, iv, dia("D", psi)) == eval_dhs(w, iv, dia("B", dia("E", psi)))


@given(st.integers(0, 2**32))
def test_deterministic_and_stable_under_longer_horizon(seed):
    rng, w, iv = _point(seed)
    phi = random_dhs(rng, relations=("A", "B", "E", "Bbar", "Ebar", "L"), constrained=("B", "Bbar", "E"))
    a = eval_dhs(w, iv, phi)
    assert eval_dhs(w, iv, phi) == a
    assert eval_dhs(w, iv, phi, horizon=len(w.prefix) + 40 * len(w.loop)) == a


# -- an independent naive evaluator for the inward-looking modalities ----------------


def _naive_dhs(w, lo, hi, phi):
    match phi:
        case Top():
            return True
        case Prop(name):
            return all(name in w.letter(h) for h in range(lo, hi + 1))
        case Not(c):
            return not _naive_dhs(w, lo, hi, c)
        case And(args):
            return all(_naive_dhs(w, lo, hi, a) for a in args)
        case Or(args):
            return any(_naive_dhs(w, lo, hi, a) for a in args)
        case HsMod(rel, univ, k, c):
            if rel == "B":
                js = [(lo, h) for h in range(lo, hi)]
            elif rel == "E":
                js = [(l, hi) for l in range(lo + 1, hi + 1)]
            else:
                js = [(l, h) for l in range(lo + 1, hi + 1) for h in range(l, hi)]
            js = [j for j in js if k is None or k.holds((j[1] - j[0]) - (hi - lo))]
            vals = [_naive_dhs(w, a, b, c) for a, b in js]
            return all(vals) if univ else any(vals)
    raise TypeError(phi)


def _naive_chl_past(w, i, phi):
    match phi:
        case Top():
            return True
        case Prop(name):
            return name in w.letter(i)
        case Not(c):
            return not _naive_chl_past(w, i, c)
        case And(args):
            return all(_naive_chl_past(w, i, a) for a in args)
        case Or(args):
            return any(_naive_chl_past(w, i, a) for a in args)
        case ChlTemp(op, k, c):
            js = [j for j in range(i) if k is None or k.holds(i - j)]
            vals = [_naive_chl_past(w, j, c) for j in js]
            return any(vals) if op == "P" else all(vals)
    raise TypeError(phi)


@given(st.integers(0, 2**32))
def test_inward_modalities_match_naive(seed):
    rng, w, iv = _point(seed)
    phi = random_dhs(rng, relations=("B", "E", "D"), constrained=("B", "E", "D"))
    assert eval_dhs(w, iv, phi) == _naive_dhs(w, iv.lo, iv.hi, phi)


@given(st.integers(0, 2**32))
def test_past_operators_match_naive(seed):
    rng = random.Random(seed)
    w = random_lasso(rng)
    phi = random_chl(rng, binders=False)
    phi = _past_only(phi)
    for i in range(8):
        assert eval_chl(w, i, None, phi) == _naive_chl_past(w, i, phi)


def _past_only(phi):
    match phi:
        case ChlTemp(op, k, c):
            return ChlTemp({"F": "P", "G": "H"}.get(op, op), k, _past_only(c))
        case Not(c):
            return Not(_past_only(c))
        case And(args):
            return And(tuple(_past_only(a) for a in args))
        case Or(args):
            return Or(tuple(_past_only(a) for a in args))
    return phi


def test_batch_matches_single(rng):
    ws = [random_lasso(rng) for _ in range(30)]
    for _ in range(10):
        phi = random_chl(rng)
        got = satisfies_batch(ws, phi)
        assert list(got) == [eval_chl(w, 0, None, phi) for w in ws]
