"""Two-way alternating automata for MNF one-variable CHL, and Buchi automata.

``build_2awa`` follows the atom-based construction: states are (closure, atom, direction)
triples, forward moves follow the successor relation of the tableau, backward moves
follow it in reverse until an initial atom steps off the word at position -1.

``awa_to_nbw`` removes alternation and two-wayness in one go. It relies on one property
of the automaton built here: every binder subformula ``down x . theta`` is closed, so its
truth at a position does not depend on where ``x`` was bound. The nondeterministic
automaton therefore guesses that truth value at each position, keeps for every binder
the (deterministic) set of atoms reachable on some x-free tableau path from position 0,
and spawns a forward thread whenever a binder has to be witnessed. Threads are tracked
as a set with a Miyano-Hayashi breakpoint to enforce their Buchi condition.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .formula import Binder, ChlTemp, Formula, FragmentError, is_monotonic, is_sentence
from .mnf import dual, is_mnf, to_mnf
from .tableau import Tableau, sentence_variable
from .traces import LassoTrace

DEFAULT_STATE_CAP = 1 << 20


class ResourceLimit(RuntimeError):
    """Raised when an automaton construction exceeds its state cap."""

    def __init__(self, what: str, reached: int, cap: int):
        super().__init__(f"{what}: state cap {cap} exceeded after {reached} states")
        self.reached, self.cap = reached, cap


# -- positive Boolean formulas -------------------------------------------------------


class PosBool:
    __slots__ = ()

    def satisfied_by(self, moves: set) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class PTrue(PosBool):
    def satisfied_by(self, moves):
        return True

    def __str__(self):
        return "true"


@dataclass(frozen=True)
class PFalse(PosBool):
    def satisfied_by(self, moves):
        return False

    def __str__(self):
        return "false"


@dataclass(frozen=True)
class PLeaf(PosBool):
    direction: str  # "down" (next position) or "up" (previous position)
    state: object

    def satisfied_by(self, moves):
        return (self.direction, self.state) in moves

    def __str__(self):
        return f"({self.direction},{_state_text(self.state)})"


@dataclass(frozen=True)
class PAnd(PosBool):
    args: tuple

    def satisfied_by(self, moves):
        return all(a.satisfied_by(moves) for a in self.args)

    def __str__(self):
        return "(" + " & ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class POr(PosBool):
    args: tuple

    def satisfied_by(self, moves):
        return any(a.satisfied_by(moves) for a in self.args)

    def __str__(self):
        return "(" + " | ".join(map(str, self.args)) + ")"


def pand(args: Iterable[PosBool]) -> PosBool:
    parts = []
    for a in args:
        if isinstance(a, PFalse):
            return PFalse()
        if not isinstance(a, PTrue):
            parts.append(a)
    if not parts:
        return PTrue()
    return parts[0] if len(parts) == 1 else PAnd(tuple(parts))


def por(args: Iterable[PosBool]) -> PosBool:
    parts = []
    for a in args:
        if isinstance(a, PTrue):
            return PTrue()
        if not isinstance(a, PFalse):
            parts.append(a)
    if not parts:
        return PFalse()
    return parts[0] if len(parts) == 1 else POr(tuple(parts))


def leaves(f: PosBool) -> Iterator[PLeaf]:
    match f:
        case PLeaf():
            yield f
        case PAnd(args) | POr(args):
            for a in args:
                yield from leaves(a)


# -- the two-way alternating automaton ----------------------------------------------

EXIT = "exit"


def _state_text(q) -> str:
    if q == EXIT:
        return EXIT
    cid, atom, d = q
    return f"{cid}:{atom:x}:{'v' if d == 'down' else '^'}"


def _letters(props: frozenset) -> list[frozenset]:
    ps = sorted(props)
    return [frozenset(p for j, p in enumerate(ps) if m >> j & 1) for m in range(1 << len(ps))]


@dataclass(frozen=True)
class BinderPair:
    """A binder ``down x . theta`` and its dual, sharing one tableau."""

    rep: Binder
    tableau: Tableau = field(compare=False, hash=False, repr=False)

    @property
    def theta(self) -> Formula:
        return self.rep.child

    @property
    def other(self) -> Binder:
        return dual(self.rep)


class TwoWayAWA:
    """Generalized Buchi 2AWA over 2^AP with states (closure id, atom, direction) plus ``exit``.

    Closure id ``main`` is the tableau of the sentence, ids ``0, 1, ...`` the binder
    pairs. The transition function is computed on demand and memoised.
    """

    def __init__(self, phi: Formula, main: Tableau, pairs: list[BinderPair]):
        self.phi = phi
        self.main = main
        self.pairs = pairs
        self.props = frozenset(main.cl.props).union(*(p.tableau.cl.props for p in pairs))
        self._delta: dict = {}
        self._preds: dict = {}
        self._binder_owner = {}
        for j, p in enumerate(pairs):
            self._binder_owner[p.rep] = (j, p.theta)
            self._binder_owner[p.other] = (j, dual(p.theta))

    def tableau(self, cid) -> Tableau:
        return self.main if cid == "main" else self.pairs[cid].tableau

    @property
    def closure_ids(self) -> list:
        return ["main"] + list(range(len(self.pairs)))

    @cached_property
    def initial(self) -> list:
        t = self.main
        phi_bit = t.cl.index[self.phi]
        return [("main", a, "down") for a in t.initial_atoms(xflag=True) if a >> phi_bit & 1]

    def states(self) -> Iterator:
        for cid in self.closure_ids:
            for a in self.tableau(cid).atoms():
                yield (cid, a, "down")
                yield (cid, a, "up")
        yield EXIT

    def is_backward_accepting(self, q) -> bool:
        return q == EXIT

    def buchi(self) -> list[tuple[object, int]]:
        """Components as (closure id, fairness index) pairs; see ``in_component``."""
        return [(cid, k) for cid in self.closure_ids for k in range(len(self.tableau(cid).fairness))]

    def in_component(self, q, comp) -> bool:
        cid, k = comp
        if q == EXIT or q[2] != "down" or q[0] != cid:
            return q != EXIT and q[0] != cid
        return self.tableau(cid).fair(q[1], k)

    # -- transitions ---------------------------------------------------------------

    def delta(self, q, letter: frozenset) -> PosBool:
        letter = frozenset(letter) & self.props
        key = (q, letter)
        got = self._delta.get(key)
        if got is None:
            got = self._compute_delta(q, letter)
            self._delta[key] = got
        return got

    def _compute_delta(self, q, letter) -> PosBool:
        if q == EXIT:
            return PFalse()
        cid, a, d = q
        t = self.tableau(cid)
        if t.letter_of(a) != letter & t.cl.props:
            return PFalse()
        return pand([self._xi(cid, a, d), self._ful(t, a, letter)])

    def _xi(self, cid, a: int, d: str) -> PosBool:
        t = self.tableau(cid)
        if d == "down":
            return por(PLeaf("down", (cid, b, "down")) for b in t.successors(a, xflag=False))
        if t.is_initial(a):
            return PLeaf("up", EXIT)
        return por(PLeaf("up", (cid, b, "up")) for b in self._predecessors(cid, a))

    def _predecessors(self, cid, a: int) -> list[int]:
        table = self._preds.get(cid)
        if table is None:
            t = self.tableau(cid)
            table = {}
            for b in t.atoms():
                if b >> t.x_bit & 1:
                    continue
                for s in t.successors(b):
                    table.setdefault(s, []).append(b)
            self._preds[cid] = table
        return table.get(a, [])

    def _ful(self, t: Tableau, a: int, letter: frozenset) -> PosBool:
        parts = []
        for f, bit in t.binder_bits.items():
            if not a >> bit & 1:
                continue
            j, body = self._binder_owner[f]
            tb = self.pairs[j].tableau
            body_bit = tb.cl.index[body]
            options = []
            for b in tb.matching_atoms(letter=letter, xflag=True):
                if b >> body_bit & 1:
                    options.append(pand([self._xi(j, b, "down"), self._xi(j, b, "up"), self._ful(tb, b, letter)]))
            parts.append(por(options))
        return pand(parts)

    # -- dump ----------------------------------------------------------------------

    def dump(self, limit: int = 4096) -> str:
        """Bespoke text form: one line per reachable state and letter with a non-false move."""
        lines = [f"2awa props {' '.join(sorted(self.props))}", "initial " + " ".join(_state_text(q) for q in self.initial),
                 "backward-accepting exit"]
        for comp in self.buchi():
            lines.append(f"buchi {comp[0]}:{comp[1]}")
        seen, queue = set(self.initial), deque(self.initial)
        while queue:
            if len(seen) > limit:
                lines.append(f"... truncated after {limit} states")
                break
            q = queue.popleft()
            for letter in _letters(self.props):
                f = self.delta(q, letter)
                if isinstance(f, PFalse):
                    continue
                lines.append(f"{_state_text(q)} {{{','.join(sorted(letter))}}} -> {f}")
                for leaf in leaves(f):
                    if leaf.state not in seen:
                        seen.add(leaf.state)
                        queue.append(leaf.state)
        return "\n".join(lines) + "\n"


def _prepare(phi: Formula) -> Formula:
    if not is_sentence(phi):
        raise FragmentError("the automaton construction needs a sentence (no free variables)")
    if not is_monotonic(phi):
        raise FragmentError("equality constraints are outside the monotonic fragment")
    return phi if is_mnf(phi) else to_mnf(phi)


def binder_pairs(phi: Formula, var: str) -> list[BinderPair]:
    reps: list[Binder] = []
    known: set = set()
    for node in phi.subformulas():
        if isinstance(node, Binder) and node not in known:
            reps.append(node)
            known.add(node)
            known.add(dual(node))
    return [BinderPair(b, Tableau([b.child, dual(b.child)], lean=True, var=var)) for b in reps]


def build_2awa(phi: Formula) -> TwoWayAWA:
    phi = _prepare(phi)
    var = sentence_variable(phi)
    main = Tableau(phi, lean=True, var=var)
    return TwoWayAWA(phi, main, binder_pairs(phi, var))


# -- nondeterministic Buchi automata ---------------------------------------------


@dataclass
class BuchiNWA:
    """Explicit (generalized) Buchi automaton; states are ints, ``labels`` keep their origin.

    An empty ``acceptance`` family accepts every infinite run.
    """

    props: frozenset
    labels: list
    initial: list[int]
    edges: list[list[tuple[frozenset, int]]]
    acceptance: tuple[frozenset, ...] = ()

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def transitions(self) -> int:
        return sum(len(e) for e in self.edges)

    @cached_property
    def by_letter(self) -> dict:
        """letter -> (sources, targets) arrays."""
        out: dict = {}
        for s, es in enumerate(self.edges):
            for a, t in es:
                out.setdefault(a, ([], []))
                out[a][0].append(s)
                out[a][1].append(t)
        return {a: (np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64)) for a, (src, dst) in out.items()}

    def accepting_sets(self) -> tuple[frozenset, ...]:
        return self.acceptance if self.acceptance else (frozenset(range(self.size)),)


def awa_to_nbw(awa: TwoWayAWA, cap: int = DEFAULT_STATE_CAP) -> BuchiNWA:
    return _ThreadConstruction(awa, cap).run()


class _ThreadConstruction:
    START = "start"

    def __init__(self, awa: TwoWayAWA, cap: int):
        self.awa = awa
        self.cap = cap
        self.tabs = [awa.main] + [p.tableau for p in awa.pairs]
        self.reps = [p.rep for p in awa.pairs]
        self.pos_bits = [p.tableau.cl.index[p.theta] for p in awa.pairs]
        self.neg_bits = [p.tableau.cl.index[dual(p.theta)] for p in awa.pairs]
        self.phi_bit = awa.main.cl.index[awa.phi]
        self.m = [len(t.fairness) for t in self.tabs]
        self.demand0, self.demand = self._demands()

    def _demands(self) -> tuple[frozenset, frozenset]:
        """Binder pairs whose truth value matters at position 0 and at later positions.

        A binder read below a temporal operator matters everywhere. One read only through
        Boolean connectives matters where its enclosing root is demanded: position 0 for
        the sentence, and the claim position for a binder body.
        """
        owner = {}
        for j, p in enumerate(self.awa.pairs):
            owner[p.rep] = owner[p.other] = j

        def scan(f: Formula, under: bool, root: set, temporal: set) -> None:
            match f:
                case Binder():
                    (temporal if under else root).add(owner[f])
                case ChlTemp(_, _, child):
                    scan(child, True, root, temporal)
                case _:
                    for ch in f.children():
                        scan(ch, under, root, temporal)

        rooted, always = [], set()
        for p in self.awa.pairs:
            root: set = set()
            scan(p.theta, False, root, always)
            rooted.append(root)
        main_root: set = set()
        scan(self.awa.phi, False, main_root, always)

        def close(s: set) -> frozenset:
            todo, out = list(s), set(s)
            while todo:
                for k in rooted[todo.pop()]:
                    if k not in out:
                        out.add(k)
                        todo.append(k)
            return frozenset(out)

        return close(always | main_root), close(always)

    def accepting(self, th) -> bool:
        ti, a, ctr = th
        return self.m[ti] == 0 or (ctr == 0 and self.tabs[ti].fair(a, 0))

    def advance(self, th, b: int):
        ti, a, ctr = th
        m = self.m[ti]
        if m and self.tabs[ti].fair(a, ctr):
            ctr = (ctr + 1) % m
        return (ti, b, ctr)

    def run(self) -> BuchiNWA:
        letters = _letters(self.awa.props)
        ids = {self.START: 0}
        labels = [self.START]
        edges: list[list] = [[]]
        queue = deque([self.START])
        while queue:
            q = queue.popleft()
            src = ids[q]
            out = []
            for letter in letters:
                targets = set()
                for bits in self._bit_choices(q == self.START):
                    targets.update(self.step(q, letter, bits))
                for t in sorted(targets, key=_state_sort_key):
                    tid = ids.get(t)
                    if tid is None:
                        tid = len(labels)
                        if tid >= self.cap:
                            raise ResourceLimit("awa_to_nbw", tid, self.cap)
                        ids[t] = tid
                        labels.append(t)
                        edges.append([])
                        queue.append(t)
                    out.append((letter, tid))
            edges[src] = out
        accepting = frozenset(i for i, q in enumerate(labels) if q != self.START and not q[2])
        return BuchiNWA(self.awa.props, labels, [0], edges, (accepting,))

    def _bit_choices(self, first: bool) -> list[tuple]:
        """Binder truth values to guess; pairs that do not matter are pinned to False."""
        live = self.demand0 if first else self.demand
        free = [j for j in range(len(self.reps)) if j in live]
        out = []
        for vals in itertools.product((False, True), repeat=len(free)):
            bits = [False] * len(self.reps)
            for j, v in zip(free, vals):
                bits[j] = v
            out.append(tuple(bits))
        return out

    def step(self, q, letter: frozenset, bits: tuple) -> Iterator:
        """Successor states on ``letter`` when the binder truth values at this position are ``bits``."""
        binders = dict(zip(self.reps, bits))
        pairs = self.tabs[1:]
        later = self.demand
        if q == self.START:
            threads, owing = [], frozenset()
            heads = [self._main_start(letter, binders)]
            pend = [frozenset(t.initial_atoms(letter, False, binders)) if j in later else frozenset({-1})
                    for j, t in enumerate(pairs)]
            claims = [self._pick(t.initial_atoms(letter, True, binders), j, bits[j]) if j in self.demand0 else None
                      for j, t in enumerate(pairs)]
        else:
            pending, T, owing = q
            pend, claims = [], []
            for j, t in enumerate(pairs):
                if j not in later:
                    pend.append(pending[j])
                    claims.append(None)
                    continue
                nxt, fresh = set(), set()
                for a in pending[j]:
                    nxt.update(t.successors(a, letter, False, binders))
                    fresh.update(t.successors(a, letter, True, binders))
                pend.append(frozenset(nxt))
                claims.append(self._pick(sorted(fresh), j, bits[j]))
            threads = sorted(T, key=_thread_key)
            heads = [self._follow(th, letter, binders) for th in threads]
        # An empty pending set means no later position can witness that binder.
        if any(not p for p in pend):
            return
        options = heads + [self._spawn(j + 1, c) for j, c in enumerate(claims) if c is not None]
        if any(not o for o in options):
            return
        pend_t = tuple(pend)
        reset = q == self.START or not owing
        for choice in itertools.product(*options):
            if reset:
                new_O = frozenset(t for t in choice if not self.accepting(t))
            else:
                new_O = frozenset(
                    choice[i] for i, th in enumerate(threads) if th in owing and not self.accepting(choice[i])
                )
            yield (pend_t, frozenset(choice), new_O)

    def _spawn(self, ti: int, atoms: list[int]) -> list:
        """Threads for the given starting atoms.

        A closure without eventualities only asks for some infinite path, so its thread
        is kept as the set of atoms it may be in (a subset construction, exact here by
        Koenig's lemma). Other threads pick one atom at a time.
        """
        if not atoms:
            return []
        if self.m[ti] == 0:
            return [(ti, frozenset(atoms), 0)]
        return [(ti, a, 0) for a in atoms]

    def _follow(self, th, letter, binders) -> list:
        ti, a, _ = th
        t = self.tabs[ti]
        if self.m[ti] == 0:
            nxt = set()
            for b in a:
                nxt.update(t.successors(b, letter, False, binders))
            return [(ti, frozenset(nxt), 0)] if nxt else []
        return [self.advance(th, b) for b in t.successors(a, letter, False, binders)]

    def _main_start(self, letter, binders) -> list:
        t = self.tabs[0]
        return self._spawn(0, [a for a in t.initial_atoms(letter, True, binders) if a >> self.phi_bit & 1])

    def _pick(self, atoms: Iterable[int], j: int, sign: bool) -> list[int]:
        bit = self.pos_bits[j] if sign else self.neg_bits[j]
        return [b for b in atoms if b >> bit & 1]


def _thread_key(th):
    ti, a, ctr = th
    return (ti, tuple(sorted(a)) if isinstance(a, frozenset) else (a,), ctr)


def _state_sort_key(q):
    pend, T, O = q
    return (
        tuple(tuple(sorted(p)) for p in pend),
        tuple(sorted(map(_thread_key, T))),
        tuple(sorted(map(_thread_key, O))),
    )


def nbw_of(phi: Formula, cap: int = DEFAULT_STATE_CAP) -> BuchiNWA:
    return awa_to_nbw(build_2awa(phi), cap)


# -- generic automata operations --------------------------------------------------


def degeneralize(a: BuchiNWA) -> BuchiNWA:
    """Counter construction; k = 1 is returned unchanged, k = 0 becomes all-accepting."""
    k = len(a.acceptance)
    if k == 0:
        return BuchiNWA(a.props, a.labels, a.initial, a.edges, (frozenset(range(a.size)),))
    if k == 1:
        return a
    ids: dict = {}
    labels, edges = [], []
    queue: deque = deque()

    def get(q, i):
        key = (q, i)
        if key not in ids:
            ids[key] = len(labels)
            labels.append((a.labels[q], i))
            edges.append([])
            queue.append(key)
        return ids[key]

    init = [get(q, 0) for q in a.initial]
    while queue:
        q, i = queue.popleft()
        src = ids[(q, i)]
        j = (i + 1) % k if q in a.acceptance[i] else i
        edges[src] = [(letter, get(t, j)) for letter, t in a.edges[q]]
    acc = frozenset(ids[(q, 0)] for (q, i) in ids if i == 0 and q in a.acceptance[0])
    return BuchiNWA(a.props, labels, init, edges, (acc,))


def _graph(n: int, edges: list[list[tuple]]) -> csr_matrix:
    src = [s for s, es in enumerate(edges) for _ in es]
    dst = [t for es in edges for _, t in es]
    data = np.ones(len(src), dtype=np.int8)
    return csr_matrix((data, (src, dst)), shape=(n, n))


def _reachable(n: int, edges: list[list[tuple]], init: list[int]) -> set[int]:
    seen = set(init)
    stack = list(init)
    while stack:
        s = stack.pop()
        for _, t in edges[s]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def _good_sccs(n: int, edges: list[list[tuple]], acc_sets: tuple[frozenset, ...], alive: set[int]):
    """SCC labels and the set of SCC ids that are nontrivial and meet every acceptance set."""
    g = _graph(n, edges)
    _, comp = connected_components(g, directed=True, connection="strong")
    size = np.bincount(comp, minlength=comp.max() + 1 if n else 0)
    loops = {s for s, es in enumerate(edges) for _, t in es if t == s}
    nontrivial = {c for c in range(len(size)) if size[c] > 1} | {comp[s] for s in loops}
    good = set()
    for c in nontrivial:
        members = [s for s in alive if comp[s] == c]
        if members and all(any(s in F for s in members) for F in acc_sets):
            good.add(c)
    return comp, good


@dataclass(frozen=True)
class Empty:
    def __bool__(self):
        return False

    def __str__(self):
        return "EMPTY"


@dataclass(frozen=True)
class Nonempty:
    witness: LassoTrace
    prefix_states: tuple
    loop_states: tuple

    def __str__(self):
        return f"NONEMPTY {self.witness}"


def _bfs_paths(edges, sources: list[int]):
    """Deterministic BFS; returns parent map state -> (prev, letter)."""
    parent = {s: None for s in sources}
    queue = deque(sources)
    while queue:
        s = queue.popleft()
        for letter, t in edges[s]:
            if t not in parent:
                parent[t] = (s, letter)
                queue.append(t)
    return parent


def _path_to(parent, t) -> tuple[list[int], list[frozenset]]:
    states, letters = [t], []
    while parent[t] is not None:
        s, a = parent[t]
        states.append(s)
        letters.append(a)
        t = s
    return states[::-1], letters[::-1]


def _shortest_cycle(edges, s: int, allowed) -> Optional[tuple[list[int], list[frozenset]]]:
    parent = {}
    queue = deque()
    for letter, t in edges[s]:
        if t == s:
            return [s], [letter]
        if t in allowed and t not in parent:
            parent[t] = (s, letter)
            queue.append(t)
    while queue:
        u = queue.popleft()
        for letter, t in edges[u]:
            if t == s:
                states, letters = [u], [letter]
                while u != s:
                    p, a = parent[u]
                    states.append(p)
                    letters.append(a)
                    u = p
                return states[::-1], letters[::-1]
            if t in allowed and t not in parent:
                parent[t] = (u, letter)
                queue.append(t)
    return None


def _witness_key(w: LassoTrace):
    c = w.canonical()
    return (len(c.prefix), len(c.loop), str(c))


def is_empty(a: BuchiNWA, candidates: int = 64) -> Union[Empty, Nonempty]:
    """Emptiness via SCCs; a nonempty answer carries a short accepted lasso.

    Among the accepting states closest to the initial states, the lasso with the
    shortest canonical form (then lexicographically smallest) is reported.
    """
    b = degeneralize(a) if len(a.acceptance) != 1 else a
    acc = b.acceptance[0]
    alive = _reachable(b.size, b.edges, b.initial)
    if not alive:
        return Empty()
    comp, good = _good_sccs(b.size, b.edges, (acc,), alive)
    targets = [s for s in alive if comp[s] in good and s in acc]
    if not targets:
        return Empty()
    parent = _bfs_paths(b.edges, sorted(b.initial))
    dist = {}
    for s in targets:
        dist[s] = len(_path_to(parent, s)[1])
    best = None
    for s in sorted(targets, key=lambda s: (dist[s], s))[:candidates]:
        members = {t for t in alive if comp[t] == comp[s]}
        cyc = _shortest_cycle(b.edges, s, members)
        if cyc is None:
            continue
        pstates, pletters = _path_to(parent, s)
        cstates, cletters = cyc
        w = LassoTrace(tuple(pletters), tuple(cletters))
        key = _witness_key(w)
        if best is None or key < best[0]:
            best = (key, w, tuple(pstates[:-1]), tuple(cstates))
    if best is None:
        return Empty()
    _, w, ps, cs = best
    return Nonempty(w.canonical(), tuple(b.labels[s] for s in ps), tuple(b.labels[s] for s in cs))


def nbw_accepts_lasso(a: BuchiNWA, w: LassoTrace) -> bool:
    """Product of the automaton with the lasso's position graph, then an accepting-SCC search."""
    n_u, n_v = len(w.prefix), len(w.loop)
    letters = [frozenset(w.letter(i)) & a.props for i in range(n_u + n_v)]

    def nxt(p):
        return p + 1 if p + 1 < n_u + n_v else n_u

    index: dict = {}
    edges: list = []
    stack = []
    for q in a.initial:
        key = (q, 0)
        if key not in index:
            index[key] = len(edges)
            edges.append([])
            stack.append(key)
    while stack:
        q, p = stack.pop()
        src = index[(q, p)]
        out = []
        for letter, t in a.edges[q]:
            if letter == letters[p]:
                key = (t, nxt(p))
                if key not in index:
                    index[key] = len(edges)
                    edges.append([])
                    stack.append(key)
                out.append((letter, index[key]))
        edges[src] = out
    if not edges:
        return False
    acc_sets = tuple(frozenset(i for (q, p), i in index.items() if q in F) for F in a.accepting_sets())
    _, good = _good_sccs(len(edges), edges, acc_sets, set(range(len(edges))))
    return bool(good)


class LassoMembership:
    """Fast membership for many lassos against one automaton.

    For each loop word v the set of states from which v^omega is accepted is computed
    once; a prefix u is then accepted iff the states reachable by u meet that set.
    """

    def __init__(self, a: BuchiNWA):
        self.a = degeneralize(a) if len(a.acceptance) != 1 else a
        self.n = self.a.size
        self._good: dict = {}
        self._reach: dict = {(): self._initial_vec()}
        self._mats = {}
        for letter, (src, dst) in self.a.by_letter.items():
            self._mats[letter] = csr_matrix(
                (np.ones(len(src), dtype=np.int8), (src, dst)), shape=(self.n, self.n)
            )
        self._acc = np.zeros(self.n, dtype=bool)
        self._acc[list(self.a.acceptance[0])] = True

    def _initial_vec(self) -> np.ndarray:
        v = np.zeros(self.a.size, dtype=bool)
        v[self.a.initial] = True
        return v

    def _image(self, vec: np.ndarray, letter: frozenset) -> np.ndarray:
        m = self._mats.get(letter)
        if m is None:
            return np.zeros(self.n, dtype=bool)
        return (m.T @ vec.astype(np.int8)) > 0

    def reach(self, prefix: tuple) -> np.ndarray:
        got = self._reach.get(prefix)
        if got is None:
            got = self._image(self.reach(prefix[:-1]), prefix[-1])
            self._reach[prefix] = got
        return got

    def good(self, loop: tuple) -> np.ndarray:
        got = self._good.get(loop)
        if got is not None:
            return got
        n, k = self.n, len(loop)
        src_all, dst_all = [], []
        for p, letter in enumerate(loop):
            pair = self.a.by_letter.get(letter)
            if pair is None:
                continue
            src, dst = pair
            src_all.append(src * k + p)
            dst_all.append(dst * k + (p + 1) % k)
        N = n * k
        if src_all:
            src = np.concatenate(src_all)
            dst = np.concatenate(dst_all)
        else:
            src = dst = np.zeros(0, dtype=np.int64)
        g = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(N, N))
        _, comp = connected_components(g, directed=True, connection="strong")
        ncomp = comp.max() + 1 if N else 0
        size = np.bincount(comp, minlength=ncomp)
        selfloop = src[src == dst]
        nontrivial = size[comp] > 1
        nontrivial[selfloop] = True
        acc = np.repeat(self._acc, k)
        hit = np.zeros(ncomp, dtype=bool)
        hit[comp[nontrivial & acc]] = True
        seeds = hit[comp] & nontrivial
        # backward reachability to the good SCC members
        good = seeds.copy()
        if seeds.any():
            gt = csr_matrix((np.ones(len(src), dtype=np.int8), (dst, src)), shape=(N, N))
            frontier = seeds
            while True:
                nxt = ((gt.T @ frontier.astype(np.int8)) > 0) & ~good
                if not nxt.any():
                    break
                good |= nxt
                frontier = nxt
        out = good.reshape(n, k)[:, 0]
        self._good[loop] = out
        return out

    def accepts_many(self, words: Sequence[LassoTrace]) -> np.ndarray:
        """Membership of every lasso in ``words`` (bool array), sharing prefix and loop work."""
        prefixes, loops, pid, lid = _index_words(tuple(words), self.a.props)
        if self.n == 0:
            return np.zeros(len(words), dtype=bool)
        R = np.stack([self.reach(u) for u in prefixes]).astype(np.float32)
        G = np.stack([self.good(v) for v in loops]).astype(np.float32)
        M = (R @ G.T) > 0
        return M[pid, lid]

    def accepts(self, w: LassoTrace) -> bool:
        props = self.a.props
        u = tuple(frozenset(x) & props for x in w.prefix)
        v = tuple(frozenset(x) & props for x in w.loop)
        return bool((self.reach(u) & self.good(v)).any())


@lru_cache(maxsize=32)
def _index_words(words: tuple, props: frozenset):
    prefixes: dict = {}
    loops: dict = {}
    pid, lid = [], []
    for w in words:
        u = tuple(frozenset(x) & props for x in w.prefix)
        v = tuple(frozenset(x) & props for x in w.loop)
        pid.append(prefixes.setdefault(u, len(prefixes)))
        lid.append(loops.setdefault(v, len(loops)))
    return list(prefixes), list(loops), np.array(pid, dtype=np.int64), np.array(lid, dtype=np.int64)


# -- dumps ----------------------------------------------------------------------------


def _letter_text(a: frozenset) -> str:
    return "{" + ",".join(sorted(a)) + "}"


def to_dot(a: BuchiNWA) -> str:
    acc = set().union(*a.acceptance) if a.acceptance else set(range(a.size))
    lines = ["digraph nbw {", "  rankdir=LR;", '  init [shape=point];']
    for s in range(a.size):
        shape = "doublecircle" if s in acc else "circle"
        lines.append(f'  s{s} [shape={shape}, label="{s}"];')
    for s in a.initial:
        lines.append(f"  init -> s{s};")
    for s, es in enumerate(a.edges):
        grouped: dict = {}
        for letter, t in es:
            grouped.setdefault(t, []).append(_letter_text(letter))
        for t, ls in grouped.items():
            lines.append(f'  s{s} -> s{t} [label="{" ".join(ls)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _hoa_label(letter: frozenset, props: list[str]) -> str:
    if not props:
        return "t"
    return "&".join(str(i) if p in letter else f"!{i}" for i, p in enumerate(props))


def to_hoa(a: BuchiNWA, name: str = "nbw") -> str:
    props = sorted(a.props)
    k = len(a.acceptance)
    if k == 0:
        acc_line, acc_name = "Acceptance: 0 t", "all"
    elif k == 1:
        acc_line, acc_name = "Acceptance: 1 Inf(0)", "Buchi"
    else:
        acc_line = f"Acceptance: {k} " + "&".join(f"Inf({i})" for i in range(k))
        acc_name = f"generalized-Buchi {k}"
    lines = [
        "HOA: v1",
        f'name: "{name}"',
        f"States: {a.size}",
    ]
    lines += [f"Start: {s}" for s in a.initial]
    lines.append(f"AP: {len(props)}" + "".join(f' "{p}"' for p in props))
    lines += [f"acc-name: {acc_name}", acc_line, "properties: explicit-labels state-acc", "--BODY--"]
    for s, es in enumerate(a.edges):
        marks = [str(i) for i, F in enumerate(a.acceptance) if s in F]
        lines.append(f"State: {s}" + (" {" + " ".join(marks) + "}" if marks else ""))
        for letter, t in es:
            lines.append(f"  [{_hoa_label(letter, props)}] {t}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"
