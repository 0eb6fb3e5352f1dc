import pytest

from intervalmc.checker import Cex, Holds, mc
from intervalmc.oracle import check_trace_satisfies, find_violation, satisfies_batch
from intervalmc.scheduler import k_sched, request_duration, request_duration_chl
from intervalmc.syntax import parse
from intervalmc.traces import all_lassos, parse_lasso

K = k_sched(2)


def test_structure_shape():
    assert len(K.states) == 8
    assert len(K.edges) == 40
    assert K.init == "v0v0w0"
    assert all(K.successors(s) for s in K.states)
    for s in K.states:
        lab = K.labels[s]
        assert not {"pU1", "pU2"} <= lab
        assert ("qI" in lab) == (not {"pU1", "pU2"} & lab)


def test_chl_rewrite_agrees_with_interval_formula():
    lassos = all_lassos(["pR1", "pI1"], 2, 3)
    for lo, hi in [(2, 3), (2, 4), (3, 4)]:
        a = satisfies_batch(lassos, request_duration(1, lo, hi))
        b = satisfies_batch(lassos, request_duration_chl(1, lo, hi))
        assert list(a) == list(b), (lo, hi)


def test_singleton_request_violates():
    w = parse_lasso("u: {pI1} ; v: {pR1} {pI1}")
    assert not check_trace_satisfies(w, request_duration(1, 2, 4))
    w = parse_lasso("u: {pI1} ; v: {pR1} {pR1} {pI1}")
    assert check_trace_satisfies(w, request_duration(1, 2, 4))


def test_request_duration_counterexample():
    res = mc(K, request_duration_chl(1, 2, 4))
    assert isinstance(res, Cex)
    assert K.is_lasso_path(list(res.prefix), list(res.loop))
    assert not check_trace_satisfies(res.trace, request_duration(1, 2, 4))
    violator, _ = find_violation(K, request_duration(1, 2, 4), 3, 3)
    assert violator is not None


@pytest.mark.parametrize(
    "text",
    ["~(pU1 & pU2) & G ~(pU1 & pU2)", "G (pU1 -> qU1) & (pU1 -> qU1)"],
)
def test_safety_holds(text):
    phi = parse(text)
    assert isinstance(mc(K, phi), Holds)
    assert find_violation(K, phi, 4, 4)[0] is None
