import random

import pytest
from hypothesis import given, strategies as st

from intervalmc.formula import TRUE, Cmp, HsMod, Not, Prop, conj, constraints_of, dia, disj, implies, len_k
from intervalmc.oracle import Interval, eval_dhs
from intervalmc.reductions import (
    EXAMPLE_MACHINE,
    ComputationError,
    Configuration,
    FlatConfiguration,
    MachineError,
    ao_lasso,
    check_well_formed_prefix,
    conjuncts,
    encode_configuration_ao,
    encode_flat_sequence,
    everywhere,
    flat_lasso,
    flat_sequence,
    flat_to_computation,
    gen_phi,
    interior,
    left,
    left_next,
    parse_minsky,
    right,
    right_next,
    to_minsky_text,
    transition_prop,
)
from intervalmc.reductions import EQ0, GE0, LE0, LT0, HASH, ONE, TWO, DOLLAR, _same_length
from intervalmc.traces import LassoTrace

M = EXAMPLE_MACHINE
TWO_COUNTERS = parse_minsky(
    """\
loc a b
trans a inc 1 b
trans b inc 2 a
trans a dec 2 b
trans b dec 1 a
trans a if_zero 1 a
trans a if_zero 2 a
init 0
rec 4
"""
)
GOOD = flat_sequence([0, 1, 2, 0, 1, 2, 0, 1, 2, 2], M)
TAIL = [FlatConfiguration(2, 1)]


def _holds(w, phi):
    return eval_dhs(w, Interval(0, 0), phi, horizon=len(w.prefix) + 12)


# -- machines ----------------------------------------------------------------------


def test_machine_text_roundtrip():
    assert parse_minsky(to_minsky_text(TWO_COUNTERS)) == TWO_COUNTERS


@pytest.mark.parametrize(
    "text",
    [
        "loc q\ntrans q inc 3 q\ninit 0\nrec 0\n",
        "loc q\ntrans q jump 1 q\ninit 0\nrec 0\n",
        "loc q\ntrans q inc 1 r\ninit 0\nrec 0\n",
        "loc q\ntrans q inc 1 q\ninit 1\nrec 0\n",
        "loc q\ntrans q inc 1 q\n",
    ],
)
def test_bad_machines(text):
    with pytest.raises(MachineError):
        parse_minsky(text)


def test_flat_value_positive():
    with pytest.raises(MachineError):
        FlatConfiguration(0, 0)


# -- encodings -------------------------------------------------------------------


def test_encode_flat():
    d0 = frozenset({"d0"})
    assert encode_flat_sequence([FlatConfiguration(0, 1)]) == (d0, frozenset({"one"}), frozenset({"hash"}))
    assert encode_flat_sequence([FlatConfiguration(0, 3)]) == (d0,) + (frozenset({"one"}),) * 3 + (frozenset({"hash"}),)
    with pytest.raises(MachineError):
        encode_flat_sequence([])


def test_encode_configuration_zero():
    e = frozenset()
    want = (frozenset({"two"}), e, frozenset({"one"}), e, frozenset({"d0", "hash"}), e, frozenset({"one"}), e, frozenset({"two"}))
    assert encode_configuration_ao(0, (0, 0)) == want


def test_encode_configuration_is_a_palindrome():
    for nu in [(0, 0), (1, 0), (2, 3)]:
        code = encode_configuration_ao(1, nu)
        mid = len(code) // 2
        assert code[mid] == frozenset({"d1", "hash"})
        assert code[:mid] == code[mid + 1 :][::-1]
    assert len(encode_configuration_ao(1, (1, 0))) == len(encode_configuration_ao(1, (0, 0))) + 2


def test_negative_counter_rejected():
    with pytest.raises(MachineError):
        encode_configuration_ao(0, (-1, 0))


# -- well-formedness ---------------------------------------------------------------


def test_good_prefix():
    rep = check_well_formed_prefix(GOOD, M)
    assert rep.ok and rep.unchecked == ("recurrence",)
    assert flat_to_computation(GOOD, M)[-1].nu == (0, 0)


def test_wrong_start():
    rep = check_well_formed_prefix([FlatConfiguration(2, 1)], M)
    assert ("consecution", 0) in {(v.rule, v.index) for v in rep}


def test_first_increment_must_be_one():
    rep = check_well_formed_prefix([FlatConfiguration(0, 2)], M)
    assert "increment-progression" in rep.rules()


def test_decrement_beyond_increments():
    seq = [FlatConfiguration(0, 1), FlatConfiguration(1, 1), FlatConfiguration(2, 1), FlatConfiguration(0, 2),
           FlatConfiguration(1, 3)]
    assert "increment-domination" in check_well_formed_prefix(seq, M).rules()


def test_replay():
    cfgs = flat_to_computation(flat_sequence([0, 1], M), M)
    assert [c.nu for c in cfgs] == [(0, 0), (1, 0)]
    assert flat_to_computation(flat_sequence([0, 1, 2], M), M)[-1].nu == (0, 0)
    with pytest.raises(ComputationError):
        flat_to_computation(flat_sequence([0, 2], M), M)  # q1 cannot run a q0 zero test
    dec_first = parse_minsky("loc q\ntrans q dec 1 q\ninit 0\nrec 0\n")
    assert "increment-domination" in check_well_formed_prefix(flat_sequence([0], dec_first), dec_first).rules()
    with pytest.raises(ComputationError):
        flat_to_computation(flat_sequence([0], dec_first), dec_first)


def _walk(rng, m, steps):
    out = [m.init]
    for _ in range(steps - 1):
        nxt = m.successors(out[-1])
        if not nxt:
            break
        out.append(rng.choice(nxt))
    return out


def _replays(seq, m):
    try:
        flat_to_computation(seq, m)
        return True
    except ComputationError:
        return False


@given(st.integers(0, 2**32))
def test_checker_accepts_iff_replay_succeeds(seed):
    rng = random.Random(seed)
    m = rng.choice([M, TWO_COUNTERS])
    seq = flat_sequence(_walk(rng, m, rng.randint(1, 14)), m)
    assert check_well_formed_prefix(seq, m).ok == _replays(seq, m)


@given(st.integers(0, 2**32))
def test_accepted_prefixes_replay(seed):
    # Values are random here, so many sequences are rejected; accepted ones must replay.
    rng = random.Random(seed)
    m = rng.choice([M, TWO_COUNTERS])
    seq = [FlatConfiguration(d, rng.randint(1, 3)) for d in _walk(rng, m, rng.randint(1, 10))]
    if check_well_formed_prefix(seq, m).ok:
        assert _replays(seq, m)


# -- generated formulas: structure ---------------------------------------------------


def _constrained(phi):
    return [n for n in phi.subformulas() if isinstance(n, HsMod) and n.constraint is not None]


def test_variant_l_uses_only_zero():
    phi = gen_phi(TWO_COUNTERS, "L")
    assert {k.c for k in constraints_of(phi)} == {0}
    assert {n.rel for n in _constrained(phi)} == {"L"}


@pytest.mark.parametrize("variant", ["A", "O"])
def test_nonstrict_uses_only_ge_zero(variant):
    phi = gen_phi(TWO_COUNTERS, variant, nonstrict=True)
    assert set(constraints_of(phi)) == {GE0}
    assert {n.rel for n in _constrained(phi)} == {variant}
    strict = gen_phi(TWO_COUNTERS, variant)
    assert set(constraints_of(strict)) == {EQ0}


def test_unconstrained_helpers_only():
    for variant in "LAO":
        rels = {n.rel for n in gen_phi(TWO_COUNTERS, variant).subformulas()
                if isinstance(n, HsMod) and n.constraint is None}
        assert rels <= {"A", "B"}


def test_nonstrict_l_rejected():
    with pytest.raises(MachineError):
        conjuncts(M, "L", nonstrict=True)


def test_helper_shapes():
    p = Prop("p")
    pt = conj(len_k(1), p)
    assert left(p) == disj(pt, dia("B", pt))
    assert right(p) == dia("A", pt)
    assert right_next(p) == dia("A", conj(len_k(2), dia("A", pt)))
    assert left_next(p) == left(right_next(p))


def test_increment_progression_display():
    d0 = transition_prop(0)
    head = conj(left(d0), right(HASH), Not(interior(HASH)))
    body = conj(
        Not(dia("L", conj(left(d0), right(HASH)), LE0)),
        implies(dia("A", right(d0)), dia("L", conj(left(d0), Not(interior(HASH)), right_next(HASH)), EQ0)),
    )
    assert everywhere(implies(head, body)) in conjuncts(M, "L")["inc"].args


def test_zero_test_display():
    d_i, d_d, d_0 = (transition_prop(i) for i in range(3))
    quiet = conj(*(Not(interior(d)) for d in (d_i, d_d, d_0)))
    gadget = dia("A", dia("A", conj(
        conj(left(d_i), right(HASH), Not(interior(HASH))),
        dia("L", conj(left(d_d), right(HASH), dia("A", conj(right(d_0), quiet))), LT0),
    )))
    assert Not(gadget) in conjuncts(M, "L")["if_zero"].args


DEC2 = parse_minsky("loc q\ntrans q inc 2 q\ntrans q dec 2 q\ninit 0\nrec 1\n")


def test_decrement_display_variant_a():
    d = transition_prop(1)
    psi = dia("A", conj(left(ONE), right(TWO), Not(interior(TWO)),
                        dia("A", conj(right_next(ONE), Not(interior(ONE))), EQ0)))
    want = everywhere(implies(conj(left(d), right(TWO), Not(interior(TWO))),
                              conj(interior(psi), dia("A", conj(right_next(HASH), Not(interior(HASH))), EQ0))))
    assert conjuncts(DEC2, "A")["d1"] == want


def test_decrement_display_variant_o():
    d = transition_prop(1)
    psi = dia("A", conj(left(ONE), right(DOLLAR), Not(interior(DOLLAR)),
                        dia("O", conj(left_next(DOLLAR), right(ONE), Not(interior(ONE))), EQ0)))
    want = everywhere(implies(conj(left(d), right(DOLLAR), Not(interior(DOLLAR))),
                              conj(interior(psi), dia("O", conj(left_next(DOLLAR), right(HASH), Not(interior(HASH))), EQ0))))
    assert conjuncts(DEC2, "O")["d1"] == want


# -- generated formulas against encodings -------------------------------------------


def test_l_conjuncts_hold_on_good_prefix():
    w = flat_lasso(GOOD, TAIL)
    for name, phi in conjuncts(M, "L").items():
        assert _holds(w, phi), name


@pytest.mark.parametrize("mutation", ["value", "delta"])
@pytest.mark.parametrize("i", [0, 4, 9])
def test_l_mutation_rejected(mutation, i):
    f = GOOD[i]
    changed = FlatConfiguration(f.delta, f.n + 1) if mutation == "value" else FlatConfiguration((f.delta + 1) % 3, f.n)
    seq = GOOD[:i] + [changed] + GOOD[i + 1 :]
    assert not check_well_formed_prefix(seq + TAIL * 3, M).ok
    w = flat_lasso(seq, TAIL)
    assert not all(_holds(w, phi) for phi in conjuncts(M, "L").values())


CFGS = flat_to_computation(flat_sequence([0, 1, 2], M), M)


@pytest.mark.parametrize("variant", ["A", "O"])
@pytest.mark.parametrize("nonstrict", [False, True])
def test_ao_conjuncts_hold_on_computation(variant, nonstrict):
    w = ao_lasso([], CFGS)
    for name, phi in conjuncts(M, variant, nonstrict).items():
        assert eval_dhs(w, Interval(0, 0), phi), name


@pytest.mark.parametrize(
    "loop",
    [
        [CFGS[0], Configuration(1, (2, 0)), CFGS[2]],
        [CFGS[0], Configuration(1, (1, 1)), CFGS[2]],
        [CFGS[0], CFGS[1], Configuration(2, (1, 0))],
    ],
)
def test_ao_mutation_rejected(loop):
    w = ao_lasso([], loop)
    assert not all(eval_dhs(w, Interval(0, 0), phi) for phi in conjuncts(M, "A").values())


def test_lr_rejects_lopsided_code():
    code = encode_configuration_ao(0, (1, 0))
    mid = len(code) // 2
    lopsided = code[: mid + 1] + encode_configuration_ao(0, (0, 1))[mid + 1 :]
    w = LassoTrace((frozenset({"dollar"}),) + lopsided, (frozenset({"dollar"}),) + encode_configuration_ao(2, (0, 0)))
    for variant in "AO":
        assert not eval_dhs(w, Interval(0, 0), conjuncts(M, variant)["lr"])


def test_literal_lr_antecedent_rejects_genuine_encodings():
    # Without ~Int(a) the antecedent also matches intervals that start at the previous
    # code's right-hand marker, and a same-length interval cannot exist there.
    w = ao_lasso([], CFGS)
    literal = everywhere(implies(conj(left(TWO), right(HASH), Not(interior(HASH))),
                                 _same_length("A", TRUE, TWO, 0, False)))
    assert not eval_dhs(w, Interval(0, 0), literal)
    assert eval_dhs(w, Interval(0, 0), conjuncts(M, "A")["lr"])
