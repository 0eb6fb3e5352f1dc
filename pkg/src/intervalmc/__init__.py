"""Decision procedures for hybrid and interval temporal logics over lasso traces."""

from .checker import Cex, Holds, Sat, SoundnessError, Unsat, mc, sat
from .formula import FragmentError
from .oracle import Interval, eval_chl, eval_dhs
from .syntax import ParseError, parse, to_text
from .traces import KripkeStructure, LassoTrace, parse_kripke, parse_lasso
from .translate import translate

__all__ = [
    "Cex",
    "FragmentError",
    "Holds",
    "Interval",
    "KripkeStructure",
    "LassoTrace",
    "ParseError",
    "Sat",
    "SoundnessError",
    "Unsat",
    "eval_chl",
    "eval_dhs",
    "mc",
    "parse",
    "parse_kripke",
    "parse_lasso",
    "sat",
    "to_text",
    "translate",
]
