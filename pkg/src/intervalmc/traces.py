"""Lasso traces, Kripke structures and their text formats."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

Letter = frozenset


@dataclass(frozen=True)
class LassoTrace:
    """The ultimately periodic word ``prefix . loop^omega`` over sets of propositions."""

    prefix: tuple[frozenset, ...]
    loop: tuple[frozenset, ...]

    def __post_init__(self):
        if not self.loop:
            raise ValueError("the loop of a lasso must be nonempty")

    def letter(self, i: int) -> frozenset:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.loop[(i - len(self.prefix)) % len(self.loop)]

    @property
    def props(self) -> frozenset:
        out = set()
        for a in self.prefix + self.loop:
            out |= a
        return frozenset(out)

    def canonical(self) -> "LassoTrace":
        """Shortest prefix, then shortest (primitive) loop, describing the same word."""
        loop = list(self.loop)
        n = len(loop)
        for d in range(1, n + 1):
            if n % d == 0 and loop == loop[:d] * (n // d):
                loop = loop[:d]
                break
        prefix = list(self.prefix)
        while prefix and prefix[-1] == loop[-1]:
            prefix.pop()
            loop = [loop[-1]] + loop[:-1]
        return LassoTrace(tuple(prefix), tuple(loop))

    def unrolled(self, prefix_len: int, loop_len: int) -> "LassoTrace":
        """The same word with a longer prefix and a loop length that is a multiple of the current one."""
        if prefix_len < len(self.prefix) or loop_len % len(self.loop):
            raise ValueError("can only lengthen the prefix and multiply the loop")
        return LassoTrace(
            tuple(self.letter(i) for i in range(prefix_len)),
            tuple(self.letter(i) for i in range(prefix_len, prefix_len + loop_len)),
        )

    def __str__(self) -> str:
        return to_lasso_text(self)


def _letter_text(a: frozenset) -> str:
    return "{" + ",".join(sorted(a)) + "}"


def to_lasso_text(w: LassoTrace) -> str:
    u = " ".join(_letter_text(a) for a in w.prefix)
    v = " ".join(_letter_text(a) for a in w.loop)
    return f"u: {u} ; v: {v}".replace("u:  ;", "u: ;")


_LETTER = re.compile(r"\{([^{}]*)\}")


def _letters(text: str) -> tuple[frozenset, ...]:
    out = []
    rest = _LETTER.sub("", text).strip()
    if rest:
        raise ValueError(f"unexpected text in lasso: {rest!r}")
    for m in _LETTER.finditer(text):
        names = [s.strip() for s in m.group(1).split(",") if s.strip()]
        for n in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", n):
                raise ValueError(f"bad proposition name {n!r}")
        out.append(frozenset(names))
    return tuple(out)


def parse_lasso(text: str) -> LassoTrace:
    """Read ``u: {p,q} {} ; v: {q}``."""
    m = re.fullmatch(r"\s*u\s*:(.*);\s*v\s*:(.*)", text, re.S)
    if m is None:
        raise ValueError("lasso text must look like 'u: {..} ... ; v: {..} ...'")
    return LassoTrace(_letters(m.group(1)), _letters(m.group(2)))


def all_lassos(props: Iterable[str], max_prefix: int, max_loop: int) -> list[LassoTrace]:
    """Every lasso with |u| <= max_prefix and 1 <= |v| <= max_loop over the given propositions."""
    props = sorted(props)
    letters = [frozenset(p for j, p in enumerate(props) if mask >> j & 1) for mask in range(1 << len(props))]

    def words(n: int) -> Iterator[tuple]:
        if n == 0:
            yield ()
            return
        for w in words(n - 1):
            for a in letters:
                yield w + (a,)

    out = []
    for nu in range(max_prefix + 1):
        for u in words(nu):
            for nv in range(1, max_loop + 1):
                for v in words(nv):
                    out.append(LassoTrace(u, v))
    return out


# -- Kripke structures ------------------------------------------------------------


@dataclass(frozen=True)
class KripkeStructure:
    states: tuple[str, ...]
    edges: frozenset  # of (s, t)
    labels: dict  # state -> frozenset of propositions; not hashed
    init: str

    def __post_init__(self):
        if self.init not in self.states:
            raise ValueError(f"initial state {self.init!r} is not declared")
        known = set(self.states)
        for s, t in self.edges:
            if s not in known or t not in known:
                raise ValueError(f"edge {s}->{t} mentions an undeclared state")
        sources = {s for s, _ in self.edges}
        missing = [s for s in self.states if s not in sources]
        if missing:
            raise ValueError(f"edge relation is not left-total: no successor for {', '.join(missing)}")

    def __hash__(self):
        return hash((self.states, self.edges, self.init))

    def successors(self, s: str) -> list[str]:
        return sorted(t for (a, t) in self.edges if a == s)

    @property
    def props(self) -> frozenset:
        out = set()
        for a in self.labels.values():
            out |= a
        return frozenset(out)

    def path_trace(self, prefix: Iterable[str], loop: Iterable[str]) -> LassoTrace:
        return LassoTrace(tuple(self.labels[s] for s in prefix), tuple(self.labels[s] for s in loop))

    def is_lasso_path(self, prefix: list[str], loop: list[str]) -> bool:
        path = list(prefix) + list(loop)
        if not loop or path[0] != self.init:
            return False
        steps = list(zip(path, path[1:])) + [(path[-1], loop[0])]
        return all(e in self.edges for e in steps)


def parse_kripke(text: str) -> KripkeStructure:
    states, labels, edges, init = [], {}, set(), None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"state\s+(\w+)\s*(\{[^{}]*\})?", line)
        if m:
            if m.group(1) in labels:
                raise ValueError(f"line {lineno}: state {m.group(1)} declared twice")
            states.append(m.group(1))
            labels[m.group(1)] = _letters(m.group(2))[0] if m.group(2) else frozenset()
            continue
        m = re.fullmatch(r"init\s+(\w+)", line)
        if m:
            init = m.group(1)
            continue
        m = re.fullmatch(r"edge\s+(\w+)\s+(\w+)", line)
        if m:
            edges.add((m.group(1), m.group(2)))
            continue
        raise ValueError(f"line {lineno}: cannot read {raw!r}")
    if init is None:
        raise ValueError("missing 'init' line")
    return KripkeStructure(tuple(states), frozenset(edges), labels, init)


def to_kripke_text(k: KripkeStructure) -> str:
    lines = [f"state {s} {_letter_text(k.labels[s])}" for s in k.states]
    lines.append(f"init {k.init}")
    lines += [f"edge {s} {t}" for s, t in sorted(k.edges)]
    return "\n".join(lines) + "\n"


def kripke_lasso_paths(k: KripkeStructure, max_prefix: int, max_loop: int) -> Iterator[tuple[tuple, tuple]]:
    """Lasso-shaped paths ``s0 .. s_{n-1}`` (prefix) then a loop closing back into the path."""
    succ = {s: k.successors(s) for s in k.states}
    limit = max_prefix + max_loop

    def extend(path: list[str]):
        n = len(path)
        last = path[-1]
        for t in succ[last]:
            # close a loop at every earlier index j with s_j = t
            for j in range(n):
                if path[j] == t and j <= max_prefix and n - j <= max_loop:
                    yield tuple(path[:j]), tuple(path[j:])
        if n < limit:
            for t in succ[last]:
                path.append(t)
                yield from extend(path)
                path.pop()

    yield from extend([k.init])


def kripke_lassos(k: KripkeStructure, max_prefix: int, max_loop: int) -> Iterator[LassoTrace]:
    """Traces of lasso paths within the bounds, each distinct omega-word reported once."""
    seen = set()
    for u, v in kripke_lasso_paths(k, max_prefix, max_loop):
        w = k.path_trace(u, v)
        key = w.canonical()
        if key not in seen:
            seen.add(key)
            yield w
