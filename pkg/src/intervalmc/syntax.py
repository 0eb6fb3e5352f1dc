"""Text syntax: a small hand-written lexer and precedence-climbing parser, plus a printer.

Grammar (whitespace-insensitive)::

    expr    := or ( "->" expr )?            right associative
    or      := and ( "|" and )*
    and     := unary ( "&" unary )*
    unary   := "~" unary | "<X{op c}>" unary | "[X{op c}]" unary
             | ("F"|"P"|"G"|"H") ["{op c}"] unary
             | ("down"|"swap") id "." expr   body extends as far right as possible
             | atom
    atom    := "T" | id | "@" id | "(" expr ")"

``a -> b`` is sugar for ``~a | b``. Chains such as ``a & b & c`` become one n-ary
node; explicit parentheses keep nesting, so printing and re-parsing is the identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    RELATIONS,
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
    Top,
    Var,
)

KEYWORDS = {"T", "F", "P", "G", "H", "down", "swap"}

_K = r"(?:\{\s*(<=|>=|<|>|=)\s*(-?\d+)\s*\})?"
_LEXICON = [
    ("ws", re.compile(r"\s+")),
    ("->", re.compile(r"->")),
    ("dia", re.compile(rf"<\s*([A-Za-z]+)\s*{_K}\s*>")),
    ("box", re.compile(rf"\[\s*([A-Za-z]+)\s*{_K}\s*\]")),
    ("ctemp", re.compile(r"([FPGH])\s*\{\s*(<=|>=|<|>|=)\s*(-?\d+)\s*\}")),
    ("var", re.compile(r"@([A-Za-z_][A-Za-z0-9_]*)")),
    ("ident", re.compile(r"[A-Za-z_][A-Za-z0-9_]*")),
    ("punct", re.compile(r"[&|~().]")),
]


class ParseError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line, self.column = line, col


@dataclass
class _Tok:
    kind: str
    value: object
    pos: int


def _constraint(op: str | None, c: str | None) -> Constraint | None:
    if op is None:
        return None
    return Constraint(Cmp(op), int(c))


def tokenize(text: str) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        for kind, rx in _LEXICON:
            m = rx.match(text, pos)
            if m is not None:
                break
        else:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        match kind:
            case "ws":
                pass
            case "dia" | "box":
                rel = m.group(1)
                if rel not in RELATIONS:
                    raise ParseError(f"unknown modality {rel!r}", text, pos)
                out.append(_Tok("mod", (rel, kind == "box", _constraint(m.group(2), m.group(3))), pos))
            case "ctemp":
                out.append(_Tok("temp", (m.group(1), _constraint(m.group(2), m.group(3))), pos))
            case "var":
                out.append(_Tok("var", m.group(1), pos))
            case "ident":
                word = m.group(0)
                if word in ("F", "P", "G", "H"):
                    out.append(_Tok("temp", (word, None), pos))
                elif word in KEYWORDS:
                    out.append(_Tok(word, word, pos))
                else:
                    out.append(_Tok("ident", word, pos))
            case _:
                out.append(_Tok(m.group(0), m.group(0), pos))
        pos = m.end()
    out.append(_Tok("eof", None, len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind: str | None = None) -> _Tok:
        tok = self.toks[self.i]
        if kind is not None and tok.kind != kind:
            got = "end of input" if tok.kind == "eof" else repr(tok.value)
            raise ParseError(f"expected {kind!r}, found {got}", self.text, tok.pos)
        self.i += 1
        return tok

    def expr(self) -> Formula:
        left = self.disj()
        if self.peek().kind == "->":
            self.take()
            return Or((Not(left), self.expr()))
        return left

    def disj(self) -> Formula:
        args = [self.conj()]
        while self.peek().kind == "|":
            self.take()
            args.append(self.conj())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conj(self) -> Formula:
        args = [self.unary()]
        while self.peek().kind == "&":
            self.take()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self) -> Formula:
        tok = self.peek()
        match tok.kind:
            case "~":
                self.take()
                return Not(self.unary())
            case "mod":
                self.take()
                rel, universal, k = tok.value
                return HsMod(rel, universal, k, self.unary())
            case "temp":
                self.take()
                op, k = tok.value
                return ChlTemp(op, k, self.unary())
            case "down" | "swap":
                self.take()
                name = self.take("ident").value
                self.take(".")
                body = self.expr()
                return Binder(name, body) if tok.kind == "down" else Swap(name, body)
        return self.atom()

    def atom(self) -> Formula:
        tok = self.take()
        match tok.kind:
            case "T":
                return Top()
            case "ident":
                return Prop(tok.value)
            case "var":
                return Var(tok.value)
            case "(":
                inner = self.expr()
                self.take(")")
                return inner
        got = "end of input" if tok.kind == "eof" else repr(tok.value)
        raise ParseError(f"unexpected {got}", self.text, tok.pos)


def parse(text: str) -> Formula:
    p = _Parser(text)
    phi = p.expr()
    if p.peek().kind != "eof":
        tok = p.peek()
        raise ParseError(f"trailing input {tok.value!r}", text, tok.pos)
    return phi


# -- printing -------------------------------------------------------------------

_PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3


def _k(k: Constraint | None) -> str:
    return "" if k is None else str(k)


def _prec(phi: Formula) -> int:
    match phi:
        case Or():
            return _PREC_OR
        case And():
            return _PREC_AND
        case Binder() | Swap():
            return 0
    return 4


def _wrap(phi: Formula, need: int) -> str:
    s = to_text(phi)
    return f"({s})" if _prec(phi) <= need else s


def to_text(phi: Formula) -> str:
    match phi:
        case Top():
            return "T"
        case Prop(name):
            return name
        case Var(name):
            return "@" + name
        case Not(child):
            return "~" + _wrap(child, _PREC_UNARY - 1)
        case And(args):
            return " & ".join(_wrap(a, _PREC_AND) for a in args)
        case Or(args):
            return " | ".join(_wrap(a, _PREC_OR) for a in args)
        case HsMod(rel, universal, k, child):
            head = f"[{rel}{_k(k)}]" if universal else f"<{rel}{_k(k)}>"
            return f"{head} {_wrap(child, _PREC_UNARY - 1)}"
        case ChlTemp(op, k, child):
            return f"{op}{_k(k)} {_wrap(child, _PREC_UNARY - 1)}"
        case Binder(v, child):
            return f"down {v} . {to_text(child)}"
        case Swap(v, child):
            return f"swap {v} . {to_text(child)}"
    raise TypeError(f"not a formula: {phi!r}")
