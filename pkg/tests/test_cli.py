"""Command-line tests. Golden reports live in tests/golden; regenerate them with
``python tests/test_cli.py`` after an intended output change."""

import io
import json
import pathlib
import subprocess
import sys

import pytest

from intervalmc.cli import run

HERE = pathlib.Path(__file__).parent
GOLDEN = HERE / "golden"

# name -> argv, run from the tests directory. These are the commands shown in the README.
COMMANDS = {
    "sat_contradiction": ["sat", "corpus/contradiction.f"],
    "sat_response": ["sat", "corpus/response.f"],
    "sat_dab_mixed": ["sat", "corpus/dab_mixed.f"],
    "eval_bbar": ["eval", "--trace", "u: ; v: {p}", "--formula", "<Bbar> T", "--interval", "0,0"],
    "eval_chl": ["eval", "--trace", "u: {} ; v: {p}", "--formula", "F p", "--pos", "0"],
    "translate_later": ["translate", "--to", "chl1", "corpus/later_constrained.f"],
    "translate_dab": ["translate", "--to", "chl1", "corpus/dab_mixed.f"],
    "translate_hs": ["translate", "--to", "hs", "corpus/swap_response.f"],
    "translate_hs_constrained": ["translate", "--to", "hs", "corpus/bounded_past.f"],
    "mc_toggle_response": ["mc", "--kripke", "corpus/toggle.k", "--formula", "corpus/response.f"],
    "mc_request_response": ["mc", "--kripke", "corpus/request.k", "--formula", "corpus/response.f"],
    "mc_selfloop_always": ["mc", "--kripke", "corpus/selfloop.k", "--formula", "G p"],
    "mc_equality": ["mc", "--kripke", "corpus/selfloop.k", "--formula", "corpus/equality.f"],
    "tableau_bounded": ["tableau", "--stats", "corpus/bounded_past.f"],
    "automaton_hoa": ["automaton", "--dump", "hoa", "corpus/always_p.f"],
    "gen_minsky_l": ["gen", "minsky", "--variant", "L"],
    "gen_minsky_a": ["gen", "minsky", "--variant", "A", "--nonstrict"],
}


def _run(argv, cwd=HERE):
    out, err = io.StringIO(), io.StringIO()
    import os

    old = os.getcwd()
    os.chdir(cwd)
    try:
        code = run(argv, out, err)
    finally:
        os.chdir(old)
    return code, out.getvalue(), err.getvalue()


def _normalized(text: str) -> dict:
    report = json.loads(text)
    if "timings" in report:
        report["timings"] = sorted(report["timings"])  # keep the keys, drop the values
    return report


def _record(name, argv):
    code, out, _ = _run(["--json", *argv])
    return {"argv": argv, "exit": code, "report": _normalized(out)}


@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_golden(name):
    want = json.loads((GOLDEN / f"{name}.json").read_text())
    assert _record(name, COMMANDS[name]) == want


def test_documented_examples():
    code, out, _ = _run(["sat", "corpus/contradiction.f"])
    assert (code, out) == (1, "UNSAT\n")
    code, out, _ = _run(COMMANDS["eval_bbar"])
    assert (code, out) == (0, "true\n")
    code, out, err = _run(COMMANDS["translate_later"])
    assert code == 2 and out == "" and err.startswith("error (fragment):")


def test_text_output_is_deterministic():
    for argv in (COMMANDS["sat_response"], COMMANDS["mc_toggle_response"]):
        assert _run(argv) == _run(argv)


def test_counterexample_text():
    code, out, _ = _run(COMMANDS["mc_request_response"])
    assert out == "CEX\npath: u: s0 ; v: s1\ntrace: u: {} ; v: {p}\n"
    lines = out.splitlines()
    assert code == 1 and lines[0] == "CEX"
    assert lines[1].startswith("path: u:") and lines[2].startswith("trace: u:")


@pytest.mark.parametrize(
    "argv,kind",
    [
        (["sat", "corpus/equality.f"], "fragment"),
        (["sat", "corpus/missing.f"], "io"),
        (["eval", "--trace", "u: ; v: {p}", "--formula", "F p", "--interval", "0,0"], "usage"),
        (["eval", "--trace", "u: ; v: {p}", "--formula", "<A> p", "--pos", "1"], "usage"),
        (["eval", "--trace", "u: ; v: {p}", "--formula", "<A> p", "--interval", "2,1"], "usage"),
        (["eval", "--trace", "u: ; v:", "--formula", "p"], "input"),
        (["mc", "--kripke", "corpus/toggle.k", "--formula", "p &"], "parse"),
        (["sat", "--state-cap", "1", "corpus/response.f"], "resource"),
    ],
)
def test_errors(argv, kind):
    code, out, err = _run(["--json", *argv])
    assert code == 2 and json.loads(out)["error"] == kind
    code, out, err = _run(argv)
    assert code == 2 and out == "" and err.startswith(f"error ({kind}):")


def test_json_flag_position_and_jobs():
    a = _run(["--json", "--jobs", "3", *COMMANDS["sat_contradiction"]])
    b = _run([*COMMANDS["sat_contradiction"], "--json", "--jobs", "1"])
    assert a[0] == b[0] == 1
    assert _normalized(a[1]) == _normalized(b[1])
    with pytest.raises(SystemExit):
        _run(["--jobs", "0", *COMMANDS["sat_contradiction"]])


def test_usage_error_exits_two():
    proc = subprocess.run([sys.executable, "-m", "intervalmc.cli", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "intervalmc.cli", "sat", "corpus/contradiction.f"], cwd=HERE, capture_output=True, text=True
    )
    assert (proc.returncode, proc.stdout) == (1, "UNSAT\n")


if __name__ == "__main__":
    GOLDEN.mkdir(exist_ok=True)
    for name, argv in sorted(COMMANDS.items()):
        (GOLDEN / f"{name}.json").write_text(json.dumps(_record(name, argv), indent=2, sort_keys=True) + "\n")
        print("wrote", name)
