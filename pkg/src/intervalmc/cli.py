"""Command-line front end.

Exit codes: 0 for SAT, HOLDS and a true evaluation; 1 for UNSAT, CEX and a false
evaluation; 2 for parse, fragment and resource errors. Text output never contains
timings. ``--json`` reports carry them under a ``timings`` key.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import checker
from .automata import DEFAULT_STATE_CAP, ResourceLimit, build_2awa, nbw_of, to_dot, to_hoa
from .checker import EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK, Cex, Sat, SoundnessError
from .formula import FragmentError, is_dhs, size
from .oracle import HorizonInstability, Interval, eval_chl, eval_dhs
from .reductions import EXAMPLE_MACHINE, VARIANTS, MachineError, conjuncts, parse_minsky
from .syntax import ParseError, parse, to_text
from .traces import parse_kripke, parse_lasso
from .translate import TARGETS, translate


class UsageError(ValueError):
    """Arguments that parse but do not make sense together."""


def _read(arg: str) -> str:
    """A path to read, ``-`` for stdin, or (for inline-friendly options) the text itself."""
    if arg == "-":
        return sys.stdin.read()
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def _read_file(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _pair(text: str) -> tuple[int, int]:
    try:
        i, j = (int(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected i,j, got {text!r}") from None
    return i, j


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    # Global flags may come before or after the subcommand. Subparsers suppress their
    # defaults so they do not overwrite a value given at the top level.
    def flags(default_json, default_jobs):
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--json", action="store_true", default=default_json, help="emit a machine-readable report")
        g.add_argument("--jobs", type=_positive, default=default_jobs, metavar="N",
                       help="worker count (queries run serially)")
        return g

    common = flags(argparse.SUPPRESS, argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="intervalmc", description=__doc__.splitlines()[0], parents=[flags(False, 1)])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sat", parents=[common], help="decide satisfiability of a formula file")
    s.add_argument("file")
    s.add_argument("--state-cap", type=_positive, default=DEFAULT_STATE_CAP)

    s = sub.add_parser("mc", parents=[common], help="check a Kripke structure against a formula")
    s.add_argument("--kripke", required=True, metavar="K")
    s.add_argument("--formula", required=True, metavar="F", help="formula text or a file holding it")
    s.add_argument("--state-cap", type=_positive, default=DEFAULT_STATE_CAP)

    s = sub.add_parser("translate", parents=[common], help="translate a formula file")
    s.add_argument("--to", required=True, choices=TARGETS)
    s.add_argument("file")

    s = sub.add_parser("eval", parents=[common], help="evaluate a formula on a lasso with the oracle")
    s.add_argument("--trace", required=True, metavar="T", help="lasso text or a file holding it")
    s.add_argument("--formula", required=True, metavar="F", help="formula text or a file holding it")
    where = s.add_mutually_exclusive_group()
    where.add_argument("--interval", type=_pair, metavar="i,j")
    where.add_argument("--pos", type=int, metavar="i")

    s = sub.add_parser("tableau", parents=[common], help="closure and atom statistics")
    s.add_argument("--stats", action="store_true", required=True)
    s.add_argument("file")

    s = sub.add_parser("automaton", parents=[common], help="dump the automata for a formula")
    s.add_argument("--dump", required=True, choices=("dot", "hoa", "2awa"))
    s.add_argument("file")
    s.add_argument("--state-cap", type=_positive, default=DEFAULT_STATE_CAP)

    s = sub.add_parser("gen", parents=[common], help="generate reduction formulas")
    s.add_argument("what", choices=("minsky",))
    s.add_argument("machine", nargs="?", help="machine file (default: a built-in three-transition machine)")
    s.add_argument("--variant", required=True, choices=VARIANTS)
    s.add_argument("--nonstrict", action="store_true", help="use only >= 0 constraints (variants A and O)")
    return p


# -- subcommands: each returns (exit code, report dict, text) ---------------------------


def _verdict_text(result) -> str:
    lines = [result.verdict]
    match result:
        case Sat(witness=w):
            lines.append(f"witness: {w.canonical()}")
        case Cex(prefix=u, loop=v, trace=w):
            lines.append(f"path: u: {' '.join(u)} ; v: {' '.join(v)}".replace(":  ;", ": ;"))
            lines.append(f"trace: {w.canonical()}")
    return "\n".join(lines)


def cmd_sat(args):
    phi = parse(_read_file(args.file))
    result = checker.sat(phi, args.state_cap)
    return result.exit_code, checker.report(result, phi), _verdict_text(result)


def cmd_mc(args):
    k = parse_kripke(_read_file(args.kripke))
    phi = parse(_read(args.formula))
    result = checker.mc(k, phi, args.state_cap)
    return result.exit_code, checker.report(result, phi), _verdict_text(result)


def cmd_translate(args):
    phi = parse(_read_file(args.file))
    out = translate(phi, args.to)
    text = to_text(out)
    return EXIT_OK, {"target": args.to, "formula": text, "size": size(out)}, text


def cmd_eval(args):
    w = parse_lasso(_read(args.trace))
    phi = parse(_read(args.formula))
    report = {"trace": str(w), "formula": to_text(phi)}
    if is_dhs(phi):
        if args.pos is not None:
            raise UsageError("--pos applies to hybrid formulas; use --interval for interval formulas")
        i, j = args.interval or (0, 0)
        try:
            interval = Interval(i, j)
        except ValueError as e:
            raise UsageError(str(e)) from None
        value = eval_dhs(w, interval, phi)
        report["interval"] = [i, j]
    else:
        if args.interval is not None:
            raise UsageError("--interval applies to interval formulas; use --pos for hybrid formulas")
        pos = args.pos or 0
        if pos < 0:
            raise UsageError("positions start at 0")
        value = eval_chl(w, pos, None, phi)
        report["pos"] = pos
    report["value"] = value
    return (EXIT_OK if value else EXIT_NEGATIVE), report, "true" if value else "false"


def _closure_stats(t, atom_cap: int = 1 << 16) -> dict:
    count = 0
    for _ in t.atoms():
        count += 1
        if count > atom_cap:
            break
    return {
        "members": len(t.cl.members),
        "obligations": len(t.cl.obligations),
        "items": len(t.cl.items),
        "fairness": len(t.fairness),
        "atoms": count if count <= atom_cap else None,
        "atom_bound": t.count_atoms(),
    }


def cmd_tableau(args):
    phi = parse(_read_file(args.file))
    sentence = checker.to_decidable(phi)
    awa = build_2awa(sentence)
    report = {"formula": to_text(phi), "sentence": to_text(sentence), "main": _closure_stats(awa.main)}
    report["binders"] = [
        {"binder": to_text(p.rep), **_closure_stats(p.tableau)} for p in awa.pairs
    ]
    lines = [f"sentence: {report['sentence']}"]
    for name, st in [("main", report["main"])] + [(f"binder {i}", b) for i, b in enumerate(report["binders"])]:
        atoms = st["atoms"] if st["atoms"] is not None else f"> {1 << 16}"
        lines.append(
            f"{name}: members {st['members']}, obligations {st['obligations']}, "
            f"atoms {atoms} (bound {st['atom_bound']}), fairness {st['fairness']}"
        )
    return EXIT_OK, report, "\n".join(lines)


def cmd_automaton(args):
    phi = parse(_read_file(args.file))
    sentence = checker.to_decidable(phi)
    if args.dump == "2awa":
        text = build_2awa(sentence).dump()
    else:
        a = nbw_of(sentence, args.state_cap)
        text = to_dot(a) if args.dump == "dot" else to_hoa(a)
    text = text.rstrip("\n")
    return EXIT_OK, {"format": args.dump, "sentence": to_text(sentence), "text": text}, text


def cmd_gen(args):
    m = parse_minsky(_read_file(args.machine)) if args.machine else EXAMPLE_MACHINE
    parts = conjuncts(m, args.variant, args.nonstrict)
    from .formula import conj

    phi = conj(*parts.values())
    text = to_text(phi)
    report = {
        "variant": args.variant,
        "nonstrict": args.nonstrict,
        "formula": text,
        "conjuncts": {k: to_text(v) for k, v in parts.items()},
        "size": size(phi),
    }
    return EXIT_OK, report, text


COMMANDS = {
    "sat": cmd_sat,
    "mc": cmd_mc,
    "translate": cmd_translate,
    "eval": cmd_eval,
    "tableau": cmd_tableau,
    "automaton": cmd_automaton,
    "gen": cmd_gen,
}

_ERRORS = (
    (ParseError, "parse"),
    (FragmentError, "fragment"),
    (MachineError, "machine"),
    (ResourceLimit, "resource"),
    (HorizonInstability, "resource"),
    (MemoryError, "resource"),
    (UsageError, "usage"),
    (OSError, "io"),
    (ValueError, "input"),
)


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        code, report, text = COMMANDS[args.command](args)
    except SoundnessError:
        raise
    except Exception as e:
        for cls, kind in _ERRORS:
            if isinstance(e, cls):
                break
        else:
            raise
        msg = str(e) or type(e).__name__
        if args.json:
            print(json.dumps({"error": kind, "message": msg}, indent=2, sort_keys=True), file=out)
        else:
            print(f"error ({kind}): {msg}", file=err)
        return EXIT_ERROR
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True), file=out)
    else:
        print(text, file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
