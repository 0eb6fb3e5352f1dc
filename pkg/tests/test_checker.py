import itertools
import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from intervalmc.checker import EXIT_NEGATIVE, EXIT_OK, Cex, Holds, Sat, Unsat, mc, negate_for_mc, product, report, sat, to_decidable
from intervalmc.automata import BuchiNWA, LassoMembership, nbw_accepts_lasso, nbw_of
from intervalmc.formula import FragmentError, Not
from intervalmc.oracle import check_trace_satisfies, find_violation, satisfies_batch
from intervalmc.sampling import random_chl, random_dhs, random_lasso_sample
from intervalmc.syntax import parse
from intervalmc.traces import KripkeStructure, kripke_lassos, parse_kripke

CORPUS = Path(__file__).parent / "corpus"
SELF_LOOP = parse_kripke((CORPUS / "selfloop.k").read_text())


def _kripke(name):
    return parse_kripke((CORPUS / name).read_text())


def test_contradiction_unsat():
    res = sat(parse("F p & G ~p"))
    assert isinstance(res, Unsat) and res.exit_code == EXIT_NEGATIVE


def test_singleton_prefix_unsat():
    assert isinstance(sat(parse("<B{<=-1}> T")), Unsat)


def test_extension_of_length_three_sat():
    phi = parse("<Bbar> (<B> <B> T & [B] [B] [B] ~T)")
    res = sat(phi)
    assert isinstance(res, Sat) and res.exit_code == EXIT_OK
    assert check_trace_satisfies(res.witness, phi)


def test_mc_self_loop():
    assert isinstance(mc(SELF_LOOP, parse("down x . p & ~F ~p")), Holds)
    res = mc(SELF_LOOP, parse("F ~p"))
    assert isinstance(res, Cex)
    assert res.loop == ("s",) and res.prefix == ()


def test_witnesses_are_canonical():
    w = sat(parse("F{<=2} p & G ~q")).witness
    assert w == w.canonical()


@pytest.mark.parametrize(
    "src, match",
    [
        ("F{=2} p", "equality"),
        ("<A{>=1}> p", "undecidable"),
        ("<E> p", "outside D\\(A,B,Bbar\\)"),
        ("F @x", "free variable"),
        ("swap x . F @x", "swap"),
        ("down x . down y . F (@x & @y)", "one variable"),
    ],
)
def test_fragment_errors_name_the_culprit(src, match):
    with pytest.raises(FragmentError, match=match):
        to_decidable(parse(src))


def test_negation_for_mc(rng):
    ws = random_lasso_sample(rng)
    for _ in range(20):
        phi = random_chl(rng)
        assert list(satisfies_batch(ws, negate_for_mc(phi))) == list(~satisfies_batch(ws, phi))


def test_product_with_accept_all_is_the_structure():
    k = _kripke("toggle.k")
    everything = BuchiNWA(frozenset(), ["q"], [0], [[(frozenset(), 0)]], ())
    prod = product(k, everything)
    assert prod.size == len(k.states)
    for w in kripke_lassos(k, 2, 2):
        assert nbw_accepts_lasso(prod, w)


def test_product_with_accept_nothing_is_empty():
    k = _kripke("toggle.k")
    nothing = BuchiNWA(frozenset(), ["q"], [0], [[]], (frozenset({0}),))
    assert not any(nbw_accepts_lasso(product(k, nothing), w) for w in kripke_lassos(k, 2, 2))


def test_product_membership_matches_intersection(rng):
    k = _kripke("request.k")
    ws = list(kripke_lassos(k, 3, 3))
    for _ in range(10):
        phi = random_chl(rng, temporal=3)
        a = nbw_of(to_decidable(phi))
        prod = product(k, a)
        assert list(LassoMembership(prod).accepts_many(ws)) == list(satisfies_batch(ws, phi))


def test_report_fields():
    phi = parse("F p")
    out = report(sat(phi), phi)
    assert out["verdict"] == "SAT" and out["witness"] == "u: {} ; v: {p}"
    assert set(out["timings"]) == {"build", "emptiness"}
    res = mc(SELF_LOOP, parse("F ~p"))
    out = report(res, parse("F ~p"))
    assert out["path"] == {"prefix": [], "loop": ["s"]}


# -- cross-method agreement on the corpus --------------------------------------


DECIDABLE = ["always_p", "bounded_past", "bounded_response", "contradiction", "dab_mixed",
             "eventually_not_p", "len3_extension", "response", "singleton_prefix"]
STRUCTURES = ["selfloop.k", "toggle.k", "request.k"]


@pytest.mark.parametrize("name", DECIDABLE)
@pytest.mark.parametrize("kname", STRUCTURES)
def test_mc_matches_bounded_enumeration(name, kname):
    phi = parse((CORPUS / f"{name}.f").read_text())
    k = _kripke(kname)
    res = mc(k, phi)
    violator, _ = find_violation(k, phi, 4, 4)
    assert isinstance(res, Cex) == (violator is not None)
    if isinstance(res, Cex):
        assert k.is_lasso_path(list(res.prefix), list(res.loop))
        assert not check_trace_satisfies(res.trace, phi)


@pytest.mark.parametrize("name", DECIDABLE)
def test_unsat_means_negation_holds(name):
    phi = parse((CORPUS / f"{name}.f").read_text())
    if isinstance(sat(phi), Unsat):
        for kname in STRUCTURES:
            assert isinstance(mc(_kripke(kname), Not(phi)), Holds)


@settings(max_examples=30)
@given(st.integers(0, 2**32))
def test_random_sat_witness_verified(seed):
    rng = random.Random(seed)
    phi = random_chl(rng, temporal=3) if rng.random() < 0.6 else random_dhs(rng, modal=3)
    res = sat(phi)
    if isinstance(res, Sat):
        assert check_trace_satisfies(res.witness, phi)
    else:
        ws = random_lasso_sample(rng, shapes=3, per_shape=10)
        assert not satisfies_batch(ws, phi).any()
