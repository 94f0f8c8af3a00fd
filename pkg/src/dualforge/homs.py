"""Homomorphism search.

The domain is compiled once into a placement order made of *segments*: one
free choice followed by every element whose image is then forced by an
operation table.  A search node tries all values of the choice at once,
derives the forced images for every candidate in a single numpy pass, and
checks every constraint whose participants are now all placed.  Constants
form a choice-free root segment.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import LIMITS
from .errors import BudgetExceeded, SignatureMismatch, SizeCapExceeded
from .structure import as_rows, INT, Hom, Structure

MAX_INSTANCES = 4_000_000


@dataclass(frozen=True)
class HomSearchConfig:
    var_order: str = "degree"    # or "index"
    budget: int = field(default_factory=lambda: LIMITS.budget)
    parallel: bool = False
    workers: int = 4

    def __post_init__(self):
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.var_order not in ("degree", "index"):
            raise ValueError(f"unknown variable order {self.var_order!r}")


class HomSet:
    """All homomorphisms ``dom -> cod`` as rows of ``maps``, lexicographically sorted."""

    def __init__(self, dom: Structure, cod: Structure, maps: np.ndarray):
        self.dom = dom
        self.cod = cod
        maps = as_rows(maps, dom.size)
        if len(maps) > 1 and dom.size:
            maps = maps[np.lexsort(maps.T[::-1])]
        maps.flags.writeable = False
        self.maps = maps

    def __len__(self):
        return len(self.maps)

    @property
    def count(self):
        return len(self.maps)

    @property
    def homs(self):
        return [Hom(self.dom, self.cod, tuple(int(v) for v in row)) for row in self.maps]

    def __iter__(self):
        return iter(self.homs)

    def as_lists(self):
        return self.maps.tolist()


def _check_sig(a, b):
    if a.sig != b.sig:
        raise SignatureMismatch(f"signatures differ: {a.sig} vs {b.sig}")


@dataclass(frozen=True)
class Violation:
    kind: str           # "op" or "rel"
    symbol: str
    args: tuple
    detail: str

    def __str__(self):
        return f"{self.kind} {self.symbol} at {self.args}: {self.detail}"


def is_homomorphism(mapping, a: Structure, b: Structure):
    """Return ``(ok, first_violation)``; violations are ordered by signature
    position, then lexicographically by argument tuple."""
    _check_sig(a, b)
    h = np.asarray(mapping, dtype=INT)
    if h.shape != (a.size,):
        raise ValueError(f"map must have length {a.size}")
    if a.size and (h.min() < 0 or h.max() >= b.size):
        return False, Violation("map", "", (), "value outside codomain")
    for sym, k in a.sig.ops:
        ta, tb = a.ops[sym], b.ops[sym]
        if k == 0:
            if a.size and h[int(ta)] != int(tb):
                return False, Violation("op", sym, (), f"h({int(ta)})={h[int(ta)]} but constant is {int(tb)}")
            continue
        if a.size == 0:
            continue
        lhs = h[ta]                              # h(g(x))
        rhs = tb[np.ix_(*([h] * k))]             # g(h(x))
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            args = tuple(int(v) for v in bad[0])
            return False, Violation("op", sym, args,
                                    f"h(g{args})={int(lhs[args])} but g(h{args})={int(rhs[args])}")
    for sym, k in a.sig.rels:
        rb = b.rel_tables[sym]
        for tup in sorted(a.rels[sym]):
            img = tuple(int(h[x]) for x in tup)
            if not rb[img]:
                return False, Violation("rel", sym, tup, f"image {img} not in {sym}")
    return True, None


def brute_force_homs(a: Structure, b: Structure, injective=False, chunk=50_000):
    """Oracle: test every one of the ``|B|^|A|`` maps, a block at a time.

    Shares nothing with the search engine beyond the structure tables.
    """
    _check_sig(a, b)
    n, m = a.size, b.size
    if n == 0:
        return HomSet(a, b, np.zeros((1, 0), dtype=INT))
    total = m ** n
    weights = m ** np.arange(n - 1, -1, -1, dtype=INT)
    found = []
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=INT)
        H = (codes[:, None] // weights[None, :]) % m          # lexicographic maps
        ok = np.ones(len(H), dtype=bool)
        for sym, k in a.sig.ops:
            ta, tb = a.ops[sym], b.ops[sym]
            if k == 0:
                ok &= H[:, int(ta)] == int(tb)
                continue
            for args in itertools.product(range(n), repeat=k):
                ok &= H[:, int(ta[args])] == tb[tuple(H[:, x] for x in args)]
        for sym, k in a.sig.rels:
            rb = b.rel_tables[sym]
            for tup in a.rels[sym]:
                ok &= rb[tuple(H[:, x] for x in tup)]
        if injective:
            S = np.sort(H, axis=1)
            ok &= ~(np.diff(S, axis=1) == 0).any(axis=1)
        found.append(H[ok])
    return HomSet(a, b, np.vstack(found))


# -- compilation ----------------------------------------------------------------

@dataclass
class _Segment:
    choice: int | None
    derived: list            # [(elem, sym, args_tuple)]; args empty for constants
    checks: list             # [(kind, sym, arity, args_matrix, res_vector_or_None)]
    end: int                 # number of placed elements after this segment


class _Plan:
    def __init__(self, a: Structure, b: Structure, var_order: str):
        n = a.size
        self.n = n
        instances = []       # (sym, k, args (C,k), res (C,))
        for sym, k in a.sig.ops:
            if k == 0:
                instances.append((sym, 0, np.zeros((1, 0), dtype=INT),
                                  np.array([int(a.ops[sym])], dtype=INT)))
                continue
            if n ** k > MAX_INSTANCES:
                raise SizeCapExceeded(n ** k, MAX_INSTANCES, f"instances of {sym}")
            args = np.indices((n,) * k).reshape(k, -1).T.astype(INT)
            instances.append((sym, k, args, a.ops[sym].ravel().astype(INT)))
        rel_inst = []
        for sym, k in a.sig.rels:
            tups = as_rows(sorted(a.rels[sym]), k)
            rel_inst.append((sym, k, tups))

        degree = np.zeros(n, dtype=INT)
        for _, k, args, res in instances:
            if n:
                np.add.at(degree, args.ravel(), 1)
                np.add.at(degree, res, 1)
        for _, _, tups in rel_inst:
            np.add.at(degree, tups.ravel(), 1)
        if var_order == "degree":
            pref = sorted(range(n), key=lambda e: (-int(degree[e]), e))
        else:
            pref = list(range(n))

        placed = np.zeros(n, dtype=bool)
        pos = np.full(n, -1, dtype=INT)
        order = []

        def place(e):
            placed[e] = True
            pos[e] = len(order)
            order.append(e)

        def close(derived):
            while True:
                progress = False
                for sym, k, args, res in instances:
                    if k == 0:
                        continue
                    mask = placed[args].all(axis=1) & ~placed[res]
                    if not mask.any():
                        continue
                    idx = np.flatnonzero(mask)
                    uniq, first = np.unique(res[idx], return_index=True)
                    for u, f in zip(uniq.tolist(), first.tolist()):
                        if not placed[u]:
                            place(u)
                            derived.append((u, sym, tuple(int(x) for x in args[idx[f]])))
                            progress = True
                if not progress:
                    return

        segments = []
        root = []
        for sym, k, args, res in instances:
            if k == 0 and n and not placed[res[0]]:
                place(int(res[0]))
                root.append((int(res[0]), sym, ()))
        close(root)
        segments.append(_Segment(None, root, [], len(order)))
        p = 0
        while len(order) < n:
            while placed[pref[p]]:
                p += 1
            e = pref[p]
            place(e)
            derived = []
            close(derived)
            segments.append(_Segment(e, derived, [], len(order)))
        self.order = order
        self.segments = segments

        seg_of_pos = np.zeros(max(n, 1), dtype=INT)
        start = 0
        for i, s in enumerate(segments):
            seg_of_pos[start:s.end] = i
            start = s.end

        def distribute(kind, sym, k, args, res):
            if n == 0 or len(args) == 0:
                return
            cols = [args] if res is None else [args, res[:, None]]
            cpos = np.concatenate(cols, axis=1)
            cpos = pos[cpos].max(axis=1) if cpos.shape[1] else np.zeros(len(args), dtype=INT)
            sid = seg_of_pos[cpos]
            srt = np.argsort(sid, kind="stable")
            sid_sorted = sid[srt]
            bounds = np.flatnonzero(np.diff(sid_sorted)) + 1
            for chunk in np.split(srt, bounds):
                if len(chunk) == 0:
                    continue
                seg = segments[int(sid[chunk[0]])]
                seg.checks.append((kind, sym, k, args[chunk],
                                   None if res is None else res[chunk]))

        for sym, k, args, res in instances:
            if k == 0:
                if n:
                    segments[int(seg_of_pos[pos[res[0]]])].checks.append(
                        ("op", sym, 0, args, res))
            else:
                distribute("op", sym, k, args, res)
        for sym, k, tups in rel_inst:
            distribute("rel", sym, k, tups, None)


def _expand(seg: _Segment, row: np.ndarray, cand: np.ndarray, b: Structure,
            order_prefix: np.ndarray, injective: bool):
    """Rows (one per surviving candidate value) after placing ``seg``."""
    V = np.repeat(row[None, :], len(cand), axis=0)
    if seg.choice is not None:
        V[:, seg.choice] = cand
    for e, sym, args in seg.derived:
        t = b.ops[sym]
        if not args:
            V[:, e] = int(t)
        else:
            V[:, e] = t[tuple(V[:, x] for x in args)]
    ok = np.ones(len(V), dtype=bool)
    for kind, sym, k, args, res in seg.checks:
        if kind == "op":
            t = b.ops[sym]
            if k == 0:
                ok &= V[:, res[0]] == int(t)
            else:
                got = t[tuple(V[:, args[:, j]] for j in range(k))]
                ok &= (got == V[:, res]).all(axis=1)
        else:
            r = b.rel_tables[sym]
            ok &= r[tuple(V[:, args[:, j]] for j in range(k))].all(axis=1)
        if not ok.any():
            return V[:0]
    V = V[ok]
    if injective and len(V):
        P = np.sort(V[:, order_prefix], axis=1)
        V = V[~(np.diff(P, axis=1) == 0).any(axis=1)]
    return V


class _Search:
    def __init__(self, plan, b, injective, budget, limit):
        self.plan = plan
        self.b = b
        self.injective = injective
        self.budget = budget
        self.limit = limit
        self.nodes = 0
        self.found = []
        self.prefixes = [np.array(plan.order[:s.end], dtype=INT) for s in plan.segments]
        self.all_values = np.arange(b.size, dtype=INT)

    def expand(self, si, row):
        seg = self.plan.segments[si]
        cand = self.all_values if seg.choice is not None else np.zeros(1, dtype=INT)
        self.nodes += len(cand)
        if self.nodes > self.budget:
            raise BudgetExceeded(self.budget, len(self.found))
        return _expand(seg, row, cand, self.b, self.prefixes[si], self.injective)

    def run(self, si, row):
        nseg = len(self.plan.segments)
        stack = [(si, row)]
        while stack:
            si, row = stack.pop()
            if si == nseg:
                self.found.append(row)
                if self.limit is not None and len(self.found) >= self.limit:
                    return
                continue
            rows = self.expand(si, row)
            for r in rows[::-1]:
                stack.append((si + 1, r))


def _search(a, b, cfg, injective=False, limit=None):
    _check_sig(a, b)
    n = a.size
    if n == 0:
        return np.zeros((1, 0), dtype=INT)
    if b.size == 0 or (injective and n > b.size):
        return np.zeros((0, n), dtype=INT)
    plan = _Plan(a, b, cfg.var_order)
    root = np.zeros(n, dtype=INT)
    s = _Search(plan, b, injective, cfg.budget, limit)
    if not cfg.parallel or limit is not None or len(plan.segments) < 3:
        s.run(0, root)
        found = s.found
    else:
        # Split below the first free choice; each worker owns a disjoint
        # set of subtrees and the results are merged by the final sort.
        level1 = s.expand(0, root)
        frontier = []
        for r in level1:
            frontier.extend((2, x) for x in s.expand(1, r))
        chunks = [frontier[i::cfg.workers] for i in range(cfg.workers)]
        spent = s.nodes

        def work(chunk):
            w = _Search(plan, b, injective, cfg.budget - spent, None)
            for si, row in chunk:
                w.run(si, row)
            return w

        with ThreadPoolExecutor(max_workers=cfg.workers) as ex:
            workers = list(ex.map(work, chunks))
        total = spent + sum(w.nodes for w in workers)
        found = [r for w in workers for r in w.found]
        if total > cfg.budget:
            raise BudgetExceeded(cfg.budget, len(found))
    if not found:
        return np.zeros((0, n), dtype=INT)
    return np.array(found, dtype=INT)


def enumerate_homs(a: Structure, b: Structure, cfg: HomSearchConfig | None = None,
                   injective=False, limit=None) -> HomSet:
    cfg = cfg or HomSearchConfig()
    return HomSet(a, b, _search(a, b, cfg, injective, limit))


def count_homs(a, b, cfg=None) -> int:
    return len(enumerate_homs(a, b, cfg))


def enumerate_embeddings(a, b, cfg=None) -> HomSet:
    """Injective homomorphisms ``a -> b``."""
    return enumerate_homs(a, b, cfg, injective=True)


def enumerate_automorphisms(a, cfg=None) -> HomSet:
    """Bijective self-homomorphisms whose inverse is also a homomorphism."""
    inj = enumerate_homs(a, a, cfg, injective=True)
    keep = []
    for row in inj.maps:
        inv = np.empty_like(row)
        inv[row] = np.arange(a.size)
        if is_homomorphism(inv, a, a)[0]:
            keep.append(row)
    return HomSet(a, a, as_rows(keep, a.size))


def reflects_relations(h, a: Structure, b: Structure) -> bool:
    """True if every relation tuple of ``b`` inside the image pulls back to ``a``."""
    h = np.asarray(h)
    inv = {int(v): i for i, v in enumerate(h)}
    for sym, k in a.sig.rels:
        for tup in b.rels[sym]:
            if all(x in inv for x in tup) and tuple(inv[x] for x in tup) not in a.rels[sym]:
                return False
    return True
