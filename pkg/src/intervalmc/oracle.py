"""Brute-force ground truth for DHS over intervals and CHL/SCHL at positions.

The evaluator works on lassos ``u . v^omega``. Truth of a formula at a tuple of
positions (the current position plus variable values, or the two endpoints of an
interval) is eventually invariant under two moves: shifting every coordinate back
by a multiple of |v| once all are deep inside the loop, and pulling a coordinate
that sits more than a fixed gap above the others back by |v|. Folding tuples with
these two moves leaves finitely many canonical tuples, and every operator becomes
a map or a reachability step between them. Each subformula gets one table over
these tuples, filled bottom-up.

The gap plays the role of the evaluation horizon. Every verdict is recomputed with
the gap doubled, and a disagreement raises :class:`HorizonInstability`.

Tables are bit-packed over a batch of lassos that share prefix length and loop
length, so a single pass evaluates a formula on thousands of traces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .formula import (
    And,
    Binder,
    ChlTemp,
    Constraint,
    Formula,
    FragmentError,
    HsMod,
    Not,
    Or,
    Prop,
    Swap,
    Top,
    Var,
    max_constant,
    variables_of,
)
from .traces import KripkeStructure, LassoTrace, kripke_lassos  # noqa: F401  (re-exported)

WORD = 64


class HorizonInstability(RuntimeError):
    """The verdict changed when the horizon was doubled; a larger one is needed."""


@dataclass(frozen=True)
class Interval:
    lo: int
    hi: int

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi:
            raise ValueError(f"bad interval [{self.lo},{self.hi}]")

    def __len__(self) -> int:
        return self.hi - self.lo + 1


def _temporal_count(phi: Formula) -> int:
    """Distinct temporal/modal subformulas (shared subtrees count once)."""
    return max(1, len({n for n in phi.subformulas() if isinstance(n, (HsMod, ChlTemp))}))


def default_gap(phi: Formula, loop_len: int) -> int:
    """Gap (in positions, a multiple of |v|) used as the evaluation horizon."""
    t = _temporal_count(phi)
    raw = t * (max_constant(phi) + 1) + 2
    p = loop_len
    return -(-raw // p) * p + p


def default_horizon(phi: Formula, w: LassoTrace) -> int:
    """|u| + (T (c_max + 1) + 2) |v|, the horizon in positions."""
    t = _temporal_count(phi)
    return len(w.prefix) + (t * (max_constant(phi) + 1) + 2) * len(w.loop)


# -- canonical coordinate grids -------------------------------------------------


class Grid:
    """Canonical tuples of ``arity`` positions for prefix length U, period P and a gap."""

    def __init__(self, arity: int, U: int, P: int, gap: int, ordered: bool = False):
        if gap % P:
            raise ValueError("gap must be a multiple of the period")
        self.arity, self.U, self.P, self.gap = arity, U, P, gap
        self.base = U + gap
        self.ordered = ordered
        sorted_rows = self._sorted_values(arity)
        if ordered or arity == 1:
            rows = sorted_rows
        else:
            perms = np.array(list(itertools.permutations(range(arity))), dtype=np.int64)
            allp = sorted_rows[:, perms].reshape(-1, arity)
            radix = int(allp.max()) + 1
            key = np.zeros(len(allp), dtype=np.int64)
            for j in range(arity):
                key = key * radix + allp[:, j]
            key = np.unique(key)
            rows = np.empty((len(key), arity), dtype=np.int64)
            for j in range(arity - 1, -1, -1):
                rows[:, j] = key % radix
                key //= radix
        self.coords = np.ascontiguousarray(rows, dtype=np.int64).reshape(-1, arity)
        self.n = len(self.coords)
        self._maps: dict = {}
        self._reach: dict = {}

    @property
    def cells(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.coords]

    def _sorted_values(self, k: int) -> np.ndarray:
        """Nondecreasing tuples whose consecutive gaps stay within the folding bound."""
        cols = np.arange(self.base + self.P, dtype=np.int64)[:, None]
        for _ in range(k - 1):
            last = cols[:, -1]
            hi = np.maximum(last, self.U) + self.gap + self.P
            counts = hi - last
            rep = np.repeat(np.arange(len(cols)), counts)
            start = np.repeat(np.cumsum(counts) - counts, counts)
            offs = np.arange(len(rep)) - start
            cols = np.concatenate([cols[rep], (last[rep] + offs)[:, None]], axis=1)
        return cols

    def canon(self, t: Sequence[int]) -> tuple[int, ...]:
        vals = sorted(set(t))
        new = {}
        shift = 0
        m = vals[0]
        if m >= self.base + self.P:
            shift = (m - self.base) // self.P * self.P
        prev = None
        for v in vals:
            v2 = v - shift
            if prev is not None:
                low = max(prev, self.U) + self.gap
                if v2 >= low + self.P:
                    extra = (v2 - low) // self.P * self.P
                    shift += extra
                    v2 -= extra
            new[v] = v2
            prev = v2
        return tuple(new[v] for v in t)

    def cell(self, t: Sequence[int]) -> int:
        return int(self.cells_of(np.array([list(t)], dtype=np.int64))[0])

    def canon_many(self, T: np.ndarray) -> np.ndarray:
        """Row-wise :meth:`canon` for an (n, arity) array."""
        order = np.argsort(T, axis=1, kind="stable")
        S = np.take_along_axis(T, order, 1)
        out = np.empty_like(S)
        m = S[:, 0]
        shift = np.where(m >= self.base + self.P, (m - self.base) // self.P * self.P, 0)
        out[:, 0] = m - shift
        for j in range(1, S.shape[1]):
            v2 = S[:, j] - shift
            low = np.maximum(out[:, j - 1], self.U) + self.gap
            extra = np.where(v2 >= low + self.P, (v2 - low) // self.P * self.P, 0)
            shift = shift + extra
            out[:, j] = v2 - extra
        res = np.empty_like(out)
        np.put_along_axis(res, order, out, 1)
        return res

    def _keys(self, T: np.ndarray) -> np.ndarray:
        key = np.zeros(len(T), dtype=np.int64)
        for j in range(T.shape[1]):
            key = key * self._radix + T[:, j]
        return key

    def cells_of(self, T: np.ndarray) -> np.ndarray:
        """Cell indices of the canonical forms of the rows of T."""
        if not hasattr(self, "_sorted_keys"):
            self._radix = int(self.coords.max()) + 1 if self.n else 1
            keys = self._keys(self.coords)
            self._key_order = np.argsort(keys)
            self._sorted_keys = keys[self._key_order]
        keys = self._keys(self.canon_many(T))
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, len(self._sorted_keys) - 1)
        if not np.array_equal(self._sorted_keys[pos], keys):
            raise AssertionError("canonical tuple outside the grid")
        return self._key_order[pos]

    def letter_index(self, pos: np.ndarray) -> np.ndarray:
        """Index into the unrolled U+P letters for each position."""
        pos = np.asarray(pos)
        return np.where(pos < self.U, pos, self.U + (pos - self.U) % self.P)

    def map(self, name, fn) -> np.ndarray:
        """Cached successor map over all cells.

        ``fn`` takes the (n, arity) coordinate array and returns the moved coordinates
        together with a mask of rows where the move is defined.
        """
        got = self._maps.get(name)
        if got is None:
            moved, ok = fn(self.coords)
            got = np.full(self.n, -1, dtype=np.int64)
            if ok.any():
                got[ok] = self.cells_of(moved[ok])
            self._maps[name] = got
        return got

    def power(self, name: str, fn, d: int) -> np.ndarray:
        """``d``-fold iterate of a map (- 1 where undefined), d >= 0."""
        key = (name, d)
        got = self._maps.get(key)
        if got is None:
            if d == 0:
                got = np.arange(self.n, dtype=np.int64)
            else:
                prev = self.power(name, fn, d - 1)
                one = self.map(name, fn)
                got = np.where(prev >= 0, one[np.maximum(prev, 0)], -1)
            self._maps[key] = got
        return got

    def reach(self, name: str, fn) -> "ReachOr":
        got = self._reach.get(name)
        if got is None:
            got = ReachOr(self.map(name, fn))
            self._reach[name] = got
        return got


class ReachOr:
    """For a partial function f on cells: Y(c) = OR over k >= 1 of psi(f^k(c))."""

    def __init__(self, f: np.ndarray):
        n = len(f)
        self.f = f
        # Cells on a cycle are exactly the images of the n-fold iterate; partial steps
        # fall off to -1 and stay there.
        it = np.where(f >= 0, f, n)
        ext = np.append(it, n)
        steps = 1
        cur = ext.copy()
        while steps < n:
            cur = cur[cur]
            steps *= 2
        on_cycle = np.zeros(n + 1, dtype=bool)
        on_cycle[cur[:n]] = True
        on_cycle = on_cycle[:n]
        cyc = np.nonzero(on_cycle)[0]
        # Name each cycle by its least member: iterate min over f with doubling.
        jump = ext.copy()
        lo = np.where(on_cycle, np.arange(n), n)
        lo = np.append(lo, n)
        span = 1
        while span < n:
            lo = np.minimum(lo, lo[jump])
            jump = jump[jump]
            span *= 2
        ids = lo[cyc]
        order = np.argsort(ids, kind="stable")
        self.cycle_cells = cyc[order]
        sorted_ids = ids[order]
        first = np.ones(len(sorted_ids), dtype=bool)
        first[1:] = sorted_ids[1:] != sorted_ids[:-1]
        self.cycle_starts = np.nonzero(first)[0].astype(np.int64)
        self.cycle_member = (np.cumsum(first) - 1).astype(np.int64)
        # Heights: distance to a cycle or to a cell where f is undefined, by binary
        # lifting (leaving the base set is impossible once inside it).
        base = np.append(on_cycle | (f < 0), True)
        jumps = [ext]
        while (1 << len(jumps)) < n:
            jumps.append(jumps[-1][jumps[-1]])
        pos = np.arange(n + 1)
        height = np.zeros(n + 1, dtype=np.int64)
        for k in range(len(jumps) - 1, -1, -1):
            cand = jumps[k][pos]
            move = ~base[cand]
            pos = np.where(move, cand, pos)
            height += np.where(move, 1 << k, 0)
        height = np.where(base, 0, height + 1)[:n]
        self.levels = []
        if n and height.max() > 0:
            order = np.argsort(height, kind="stable")
            hs = height[order]
            bounds = np.searchsorted(hs, np.arange(1, hs[-1] + 2))
            for h in range(1, hs[-1] + 1):
                idx = order[bounds[h - 1]:bounds[h]]
                self.levels.append((idx, f[idx]))

    def __call__(self, psi: np.ndarray) -> np.ndarray:
        y = np.zeros_like(psi)
        if len(self.cycle_cells):
            vals = np.bitwise_or.reduceat(psi[self.cycle_cells], self.cycle_starts, axis=0)
            y[self.cycle_cells] = vals[self.cycle_member]
        for idx, nxt in self.levels:
            y[idx] = psi[nxt] | y[nxt]
        return y


@lru_cache(maxsize=64)
def grid(arity: int, U: int, P: int, gap: int, ordered: bool = False) -> Grid:
    return Grid(arity, U, P, gap, ordered)


# -- lasso batches ------------------------------------------------------------------


class Batch:
    """Lassos sharing prefix length U and period P, packed into 64-bit words."""

    def __init__(self, lassos: Sequence[LassoTrace], U: int, P: int):
        self.lassos = [w.canonical().unrolled(U, P) for w in lassos]
        self.U, self.P = U, P
        self.n = len(lassos)
        self.nw = max(1, -(-self.n // WORD))
        self._props: dict = {}

    def prop_rows(self, p: str) -> np.ndarray:
        """Array (U+P, words): bit j of row i says whether p is in letter i of lasso j."""
        got = self._props.get(p)
        if got is None:
            m = np.zeros((self.U + self.P, self.nw * WORD), dtype=bool)
            for j, w in enumerate(self.lassos):
                for i, a in enumerate(w.prefix + w.loop):
                    if p in a:
                        m[i, j] = True
            got = pack(m)
            self._props[p] = got
        return got

    def ones(self, n: int) -> np.ndarray:
        return np.full((n, self.nw), np.uint64(0xFFFFFFFFFFFFFFFF), dtype=np.uint64)

    def zeros(self, n: int) -> np.ndarray:
        return np.zeros((n, self.nw), dtype=np.uint64)


def pack(m: np.ndarray) -> np.ndarray:
    """Pack a bool matrix (rows, lassos) along the lasso axis into uint64 words."""
    rows, cols = m.shape
    width = -(-cols // WORD) * WORD
    if width != cols:
        m = np.concatenate([m, np.zeros((rows, width - cols), dtype=bool)], axis=1)
    b = np.packbits(m, axis=1, bitorder="little")
    return b.view(np.uint64).reshape(rows, width // WORD).copy()


def unpack(row: np.ndarray, n: int) -> np.ndarray:
    b = np.ascontiguousarray(row).view(np.uint8)
    return np.unpackbits(b, bitorder="little")[:n].astype(bool)


def group_lassos(lassos: Iterable[LassoTrace]) -> dict[tuple[int, int], list[int]]:
    """Group indices of lassos by loop length of the canonical form; U is the largest prefix."""
    by_p: dict[int, list[int]] = {}
    canon = []
    for j, w in enumerate(lassos):
        c = w.canonical()
        canon.append(c)
        by_p.setdefault(len(c.loop), []).append(j)
    out = {}
    for p, idx in by_p.items():
        u = max(len(canon[j].prefix) for j in idx)
        out[(u, p)] = idx
    return out


@lru_cache(maxsize=16)
def _batches(lassos: tuple) -> list[tuple[list[int], Batch]]:
    """Grouping and packing of a lasso corpus, shared by every formula evaluated on it."""
    return [(idx, Batch([lassos[j] for j in idx], U, P)) for (U, P), idx in group_lassos(lassos).items()]


# -- CHL / SCHL evaluation ---------------------------------------------------------


def _all(C: np.ndarray) -> np.ndarray:
    return np.ones(len(C), dtype=bool)


def _set_col(C: np.ndarray, j: int, col: np.ndarray) -> np.ndarray:
    D = C.copy()
    D[:, j] = col
    return D


def _swap_cols(C: np.ndarray, a: int, b: int) -> np.ndarray:
    D = C.copy()
    D[:, [a, b]] = C[:, [b, a]]
    return D


_INTERVAL_MOVES = ("B", "E", "Bbar", "Ebar", "right", "left", "up", "down")


def _interval_move(name: str):
    """Named moves on intervals (lo, hi), vectorised over rows."""

    def fn(C: np.ndarray):
        lo, hi = C[:, 0], C[:, 1]
        match name:
            case "B":
                return np.stack([lo, hi - 1], 1), hi > lo
            case "E":
                return np.stack([lo + 1, hi], 1), hi > lo
            case "Bbar":
                return np.stack([lo, hi + 1], 1), _all(C)
            case "Ebar":
                return np.stack([lo - 1, hi], 1), lo > 0
            case "right":
                return np.stack([hi, hi], 1), _all(C)
            case "left":
                return np.stack([lo, lo], 1), _all(C)
            case "up":
                return np.stack([lo + 1, lo + 1], 1), lo == hi
            case "down":
                return np.stack([lo - 1, lo - 1], 1), (lo == hi) & (lo > 0)
        raise AssertionError(name)

    return fn


class _ChlEval:
    def __init__(self, g: Grid, batch: Batch, var_slots: dict[str, int]):
        self.g, self.b, self.slots = g, batch, var_slots
        self.memo: dict = {}
        self.false_row = batch.zeros(1)

    def gather(self, table: np.ndarray, idx: np.ndarray) -> np.ndarray:
        """Rows at idx, with -1 meaning the all-false row."""
        ext = np.concatenate([table, self.false_row])
        return ext[np.where(idx >= 0, idx, len(table))]

    def steps(self, direction: int, psi: np.ndarray, k: Optional[Constraint]) -> np.ndarray:
        g = self.g
        name = "next" if direction > 0 else "prev"

        def fn(C, s=direction):
            D = C.copy()
            D[:, 0] += s
            return D, D[:, 0] >= 0

        if k is None:
            return g.reach(name, fn)(psi)
        a, b = k.interval(1)
        if b is not None and a > b:
            return self.b.zeros(g.n)
        if b is None:
            inner = psi | g.reach(name, fn)(psi)
            return self.gather(inner, g.power(name, fn, a))
        out = self.b.zeros(g.n)
        for d in range(a, b + 1):
            out |= self.gather(psi, g.power(name, fn, d))
        return out

    def ev(self, phi: Formula) -> np.ndarray:
        got = self.memo.get(phi)
        if got is not None:
            return got
        g, b = self.g, self.b
        match phi:
            case Top():
                out = b.ones(g.n)
            case Prop(p):
                out = b.prop_rows(p)[g.letter_index(g.coords[:, 0])]
            case Var(x):
                mask = g.coords[:, 0] == g.coords[:, self.slots[x]]
                out = np.where(mask[:, None], b.ones(g.n), b.zeros(g.n))
            case Not(child):
                out = ~self.ev(child)
            case And(args):
                out = self.ev(args[0]).copy()
                for a in args[1:]:
                    out &= self.ev(a)
            case Or(args):
                out = self.ev(args[0]).copy()
                for a in args[1:]:
                    out |= self.ev(a)
            case ChlTemp(op, k, child):
                psi = self.ev(child)
                direction = 1 if op in ("F", "G") else -1
                if op in ("F", "P"):
                    out = self.steps(direction, psi, k)
                else:
                    out = ~self.steps(direction, ~psi, k)
            case Binder(x, child):
                s = self.slots[x]
                f = g.map(("bind", s), lambda C, s=s: (_set_col(C, s, C[:, 0]), _all(C)))
                out = self.ev(child)[f]
            case Swap(x, child):
                s = self.slots[x]
                f = g.map(("swap", s), lambda C, s=s: (_swap_cols(C, 0, s), _all(C)))
                out = self.ev(child)[f]
            case HsMod():
                raise FragmentError("interval modality inside a hybrid formula")
            case _:
                raise TypeError(phi)
        self.memo[phi] = out
        return out


def _slots(phi: Formula, extra: Iterable[str] = ()) -> dict[str, int]:
    names = sorted(set(variables_of(phi)) | set(extra))
    if len(names) > 2:
        raise FragmentError("the evaluator supports at most two variables")
    return {x: i + 1 for i, x in enumerate(names)}


def _chl_table(phi: Formula, batch: Batch, gap: int, slots: dict[str, int]) -> tuple[Grid, np.ndarray]:
    g = grid(1 + len(slots), batch.U, batch.P, gap)
    return g, _ChlEval(g, batch, slots).ev(phi)


def eval_chl_batch(
    lassos: Sequence[LassoTrace],
    phi: Formula,
    i: int = 0,
    valuation: Optional[dict[str, int]] = None,
    gap: Optional[int] = None,
    check: bool = True,
) -> np.ndarray:
    """Truth of phi at position i under the valuation, for every lasso (bool array)."""
    valuation = dict(valuation or {})
    slots = _slots(phi, valuation)
    coords_of = lambda: (i,) + tuple(valuation.get(x, 0) for x in sorted(slots, key=slots.get))  # noqa: E731
    out = np.zeros(len(lassos), dtype=bool)
    for idx, batch in _batches(tuple(lassos)):
        P = batch.P
        gp = gap if gap is not None else default_gap(phi, P)
        gp = -(-gp // P) * P
        g, tab = _chl_table(phi, batch, gp, slots)
        res = unpack(tab[g.cell(coords_of())], batch.n)
        if check:
            g2, tab2 = _chl_table(phi, batch, 2 * gp, slots)
            res2 = unpack(tab2[g2.cell(coords_of())], batch.n)
            if not np.array_equal(res, res2):
                bad = [str(batch.lassos[j]) for j in np.nonzero(res != res2)[0][:3]]
                raise HorizonInstability(f"verdict changed when doubling the horizon on {bad}")
        out[idx] = res
    return out


def eval_chl(
    w: LassoTrace,
    i: int,
    g: Optional[dict[str, int]],
    phi: Formula,
    horizon: Optional[int] = None,
) -> bool:
    """(w, i, g) |= phi, where variables missing from g default to position 0."""
    gap = None
    if horizon is not None:
        gap = max(len(w.loop), horizon - len(w.prefix))
    return bool(eval_chl_batch([w], phi, i, g, gap=gap)[0])


def check_trace_satisfies_chl(w: LassoTrace, phi: Formula) -> bool:
    return eval_chl(w, 0, None, phi)


# -- DHS evaluation ------------------------------------------------------------------


class _DhsEval:
    """Interval semantics over canonical pairs lo <= hi."""

    def __init__(self, g: Grid, batch: Batch):
        self.g, self.b = g, batch
        self.memo: dict = {}
        c = g.coords
        self.lo, self.hi = c[:, 0], c[:, 1]
        self.length = self.hi - self.lo + 1
        self.is_point = self.lo == self.hi
        self.false_row = batch.zeros(1)
        self.lmax = int(self.length.max())
        # Named moves on intervals.
        self.moves = {name: _interval_move(name) for name in _INTERVAL_MOVES}

    def m(self, name: str) -> np.ndarray:
        return self.g.map(name, self.moves[name])

    def pw(self, name: str, d: int) -> np.ndarray:
        return self.g.power(name, self.moves[name], d)

    def r(self, name: str, psi: np.ndarray) -> np.ndarray:
        return self.g.reach(name, self.moves[name])(psi)

    def gather(self, table: np.ndarray, idx: np.ndarray) -> np.ndarray:
        ext = np.concatenate([table, self.false_row])
        return ext[np.where(idx >= 0, idx, len(table))]

    def mask(self, table: np.ndarray, cond: np.ndarray) -> np.ndarray:
        return np.where(cond[:, None], table, np.uint64(0))

    def within(self, name: str, psi: np.ndarray, a: int, b: Optional[int]) -> np.ndarray:
        """exists d in [a, b] (b None: unbounded) with psi at move^d."""
        if b is not None and a > b:
            return self.b.zeros(self.g.n)
        if b is None:
            return self.gather(psi | self.r(name, psi), self.pw(name, a))
        out = self.b.zeros(self.g.n)
        for d in range(a, b + 1):
            out |= self.gather(psi, self.pw(name, d))
        return out

    def two_moves(self, first: str, second: str, psi, k: Optional[Constraint], sign1: int, sign2: int, need_nonpoint=False):
        """exists d1, d2 >= 1: psi after d1 ``first`` moves then d2 ``second`` moves, with
        sign1*d1 + sign2*d2 satisfying k (the length difference)."""
        g = self.g
        if k is None:
            inner = self.r(second, psi)
            if need_nonpoint:
                inner = self.mask(inner, ~self.is_point)
            return self.r(first, inner)
        out = self.b.zeros(g.n)
        reach2 = psi | self.r(second, psi)
        span = self.lmax + abs(k.c) + g.P + 2
        for d1 in range(1, span + 1):
            at = self.pw(first, d1)
            if not (at >= 0).any():
                break
            # constraint on d2: sign2*d2 ~ c - sign1*d1
            shifted = Constraint(k.op, k.c - sign1 * d1)
            if sign2 < 0:
                shifted = shifted.invert()
            a, b = shifted.interval(1)
            if b is not None and a > b:
                continue
            if b is None:
                inner = self.gather(reach2, self.pw(second, a))
            else:
                inner = self.b.zeros(g.n)
                for d2 in range(a, b + 1):
                    inner |= self.gather(psi, self.pw(second, d2))
            if need_nonpoint:
                inner = self.mask(inner, ~self.is_point)
            out |= self.gather(inner, at)
        return out

    def from_point(self, anchor: str, grow: str, psi, k: Optional[Constraint]):
        """J obtained from a point (the right or left endpoint) by d >= 0 ``grow`` moves;
        |J| - |I| = d + 1 - |I|."""
        g = self.g
        if k is None:
            return self.gather(psi | self.r(grow, psi), self.m(anchor))
        grown = self._grown(grow, psi, k)
        return self.gather_per_length(grown, self.m(anchor))

    def _grown(self, grow: str, psi, k: Constraint):
        """For each interval length L of the *source*, the table 'exists d >= 0 with
        d + 1 - L ~ c and psi after d moves' evaluated on points. Returned as a dict."""
        g = self.g
        out = {}
        rp = psi | self.r(grow, psi)
        for L in range(1, self.lmax + 1):
            a, b = Constraint(k.op, k.c + L - 1).interval(0)
            if b is not None and a > b:
                out[L] = self.b.zeros(g.n)
            elif b is None:
                out[L] = self.gather(rp, self.pw(grow, a))
            else:
                t = self.b.zeros(g.n)
                for d in range(a, b + 1):
                    t |= self.gather(psi, self.pw(grow, d))
                out[L] = t
        return out

    def gather_per_length(self, tables: dict, where: np.ndarray) -> np.ndarray:
        out = self.b.zeros(self.g.n)
        for L, t in tables.items():
            sel = self.length == L
            if sel.any():
                out[sel] = self.gather(t, where[sel])
        return out

    def hs(self, rel: str, psi: np.ndarray, k: Optional[Constraint]) -> np.ndarray:
        g = self.g
        match rel:
            case "B" | "E":
                # |J| - |I| = -d
                if k is None:
                    return self.r(rel, psi)
                a, b = k.invert().interval(1)
                return self.within(rel, psi, a, b)
            case "Bbar" | "Ebar":
                if k is None:
                    return self.r(rel, psi)
                a, b = k.interval(1)
                return self.within(rel, psi, a, b)
            case "D":
                return self.two_moves("E", "B", psi, k, -1, -1)
            case "Dbar":
                return self.two_moves("Ebar", "Bbar", psi, k, +1, +1)
            case "O":
                # lo < lo' < hi < hi': shrink from the left keeping length >= 2, then extend right.
                return self._overlap("E", "Bbar", psi, k)
            case "Obar":
                # lo' < lo < hi' < hi: shrink from the right keeping length >= 2, then extend left.
                return self._overlap("B", "Ebar", psi, k)
            case "A":
                return self.from_point("right", "Bbar", psi, k)
            case "Abar":
                return self.from_point("left", "Ebar", psi, k)
            case "L" | "Lbar":
                grow, step, anchor = ("Bbar", "up", "right") if rel == "L" else ("Ebar", "down", "left")
                if k is None:
                    s = psi | self.r(grow, psi)
                    return self.gather(self.r(step, s), self.m(anchor))
                grown = self._grown(grow, psi, k)
                tables = {L: self.r(step, t) for L, t in grown.items()}
                return self.gather_per_length(tables, self.m(anchor))
        raise AssertionError(rel)

    def _overlap(self, shrink: str, grow: str, psi, k):
        """Shrink d1 >= 1 steps keeping a non-point, then grow d2 >= 1; |J| - |I| = d2 - d1."""
        if k is None:
            inner = self.mask(self.r(grow, psi), ~self.is_point)
            return self.r(shrink, inner)
        return self._overlap_k(shrink, grow, psi, k)

    def _overlap_k(self, shrink, grow, psi, k):
        g = self.g
        out = self.b.zeros(g.n)
        reach2 = psi | self.r(grow, psi)
        for d1 in range(1, self.lmax + 1):
            at = self.pw(shrink, d1)
            if not (at >= 0).any():
                break
            a, b = Constraint(k.op, k.c + d1).interval(1)
            if b is not None and a > b:
                continue
            if b is None:
                inner = self.gather(reach2, self.pw(grow, a))
            else:
                inner = self.b.zeros(g.n)
                for d2 in range(a, b + 1):
                    inner |= self.gather(psi, self.pw(grow, d2))
            inner = self.mask(inner, ~self.is_point)
            out |= self.gather(inner, at)
        return out

    def ev(self, phi: Formula) -> np.ndarray:
        got = self.memo.get(phi)
        if got is not None:
            return got
        g, b = self.g, self.b
        match phi:
            case Top():
                out = b.ones(g.n)
            case Prop(p):
                # homogeneity: p on every point of the interval
                rows = b.prop_rows(p)
                at_hi = rows[g.letter_index(self.hi)]
                out = b.zeros(g.n)
                order = np.argsort(self.length, kind="stable")
                shorter = self.m("B")
                lens = self.length[order]
                for L in range(1, self.lmax + 1):
                    sel = order[lens == L]
                    if L == 1:
                        out[sel] = at_hi[sel]
                    else:
                        out[sel] = at_hi[sel] & out[shorter[sel]]
            case Not(child):
                out = ~self.ev(child)
            case And(args):
                out = self.ev(args[0]).copy()
                for a in args[1:]:
                    out &= self.ev(a)
            case Or(args):
                out = self.ev(args[0]).copy()
                for a in args[1:]:
                    out |= self.ev(a)
            case HsMod(rel, universal, k, child):
                psi = self.ev(child)
                out = ~self.hs(rel, ~psi, k) if universal else self.hs(rel, psi, k)
            case _:
                raise FragmentError(f"not an interval formula node: {type(phi).__name__}")
        self.memo[phi] = out
        return out


def _dhs_table(phi: Formula, batch: Batch, gap: int) -> tuple[Grid, np.ndarray]:
    g = grid(2, batch.U, batch.P, gap, True)
    return g, _DhsEval(g, batch).ev(phi)


def eval_dhs_batch(
    lassos: Sequence[LassoTrace],
    phi: Formula,
    interval: Interval = Interval(0, 0),
    gap: Optional[int] = None,
    check: bool = True,
) -> np.ndarray:
    """Truth of phi at the interval, for every lasso (bool array)."""
    out = np.zeros(len(lassos), dtype=bool)
    key = (interval.lo, interval.hi)
    for idx, batch in _batches(tuple(lassos)):
        P = batch.P
        gp = gap if gap is not None else default_gap(phi, P)
        gp = -(-gp // P) * P
        g, tab = _dhs_table(phi, batch, gp)
        res = unpack(tab[g.cell(key)], batch.n)
        if check:
            g2, tab2 = _dhs_table(phi, batch, 2 * gp)
            res2 = unpack(tab2[g2.cell(key)], batch.n)
            if not np.array_equal(res, res2):
                bad = [str(batch.lassos[j]) for j in np.nonzero(res != res2)[0][:3]]
                raise HorizonInstability(f"verdict changed when doubling the horizon on {bad}")
        out[idx] = res
    return out


def eval_dhs(w: LassoTrace, I: Interval, phi: Formula, horizon: Optional[int] = None) -> bool:
    """I |=_w phi under the homogeneous interval semantics."""
    gap = None
    if horizon is not None:
        gap = max(len(w.loop), horizon - len(w.prefix))
    return bool(eval_dhs_batch([w], phi, I, gap=gap)[0])


def check_trace_satisfies(w: LassoTrace, phi: Formula) -> bool:
    """w |= phi, read at [0,0] for interval formulas and at position 0 for hybrid ones."""
    from .formula import is_dhs

    if is_dhs(phi):
        return eval_dhs(w, Interval(0, 0), phi)
    return eval_chl(w, 0, None, phi)


def satisfies_batch(lassos: Sequence[LassoTrace], phi: Formula, check: bool = True) -> np.ndarray:
    from .formula import is_dhs

    if is_dhs(phi):
        return eval_dhs_batch(lassos, phi, check=check)
    return eval_chl_batch(lassos, phi, check=check)


def find_violation(
    k: KripkeStructure, phi: Formula, max_prefix: int, max_loop: int, chunk: int = 4096
) -> tuple[Optional[LassoTrace], int]:
    """Search the bounded lasso traces of K for one that falsifies phi.

    Traces are checked in chunks and the search stops at the first chunk holding a
    violation, so a falsified property costs only a prefix of the stream. Returns the
    first violating trace (or None) and the number of traces examined.
    """
    seen = 0
    stream = kripke_lassos(k, max_prefix, max_loop)
    while True:
        block = list(itertools.islice(stream, chunk))
        if not block:
            return None, seen
        ok = satisfies_batch(block, phi)
        bad = np.nonzero(~ok)[0]
        if len(bad):
            return block[int(bad[0])], seen + int(bad[0]) + 1
        seen += len(block)
