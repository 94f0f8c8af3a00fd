"""Ockham spaces D_m, their algebras S_m, and a search for alter egos (u, order)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .compactify import require_poset, upsets
from .config import LIMITS
from .duality import AlterEgoPair, check_compatible, finite_level_scan
from .errors import GNotOrderReversing, InternalInvariantViolation, NotOdd
from .homs import enumerate_homs
from .structure import INT, Structure, close_rows, isomorphic, structure_from_rows


@dataclass(frozen=True)
class OckhamSpace:
    poset: Structure
    g: tuple

    def as_structure(self, name=""):
        return Structure.build(self.poset.size, {"g": list(self.g)},
                               rels={"le": (2, self.poset.rels["le"])}, name=name)


def build_Dm(m: int) -> OckhamSpace:
    """Points ``0 < 1`` plus ``2..m``; g sends 0, 1 to 2 and walks 2 -> 3 -> ... -> m -> 1."""
    if m < 1 or m % 2 == 0:
        raise NotOdd(f"m must be a positive odd integer, got {m}")
    le = [(i, i) for i in range(m + 1)] + [(0, 1)]
    if m == 1:
        g = (1, 1)
    else:
        g = [2, 2] + [k + 1 for k in range(2, m)] + [1]
        g = tuple(g)
    poset = Structure.build(m + 1, rels={"le": (2, sorted(le))}, name=f"D{m}")
    return OckhamSpace(poset, g)


def ockham_algebra_of(x: OckhamSpace, name="") -> Structure:
    """Up-sets under union/intersection with negation ``U -> X minus g^-1(U)``."""
    require_poset(x.poset)
    le = x.poset.rels["le"]
    for a, b in sorted(le):
        if (x.g[b], x.g[a]) not in le:
            raise GNotOrderReversing(f"{a} <= {b} but g({b}) <= g({a}) fails")
    rows = upsets(x.poset)
    n = len(rows)
    index = {tuple(r): i for i, r in enumerate(rows.tolist())}
    g = np.asarray(x.g)
    join = [[index[tuple(np.maximum(a, b))] for b in rows] for a in rows]
    meet = [[index[tuple(np.minimum(a, b))] for b in rows] for a in rows]
    neg = [index[tuple(1 - r[g])] for r in rows]
    alg = Structure.build(n, {"join": join, "meet": meet, "bot": index[(0,) * len(g)],
                              "top": index[(1,) * len(g)], "neg": neg}, name=name)
    problem = de_morgan_violation(alg)
    if problem:
        raise InternalInvariantViolation(problem)
    return alg


def de_morgan_violation(alg: Structure):
    j, m, neg = alg.ops["join"], alg.ops["meet"], alg.ops["neg"]
    bot, top = int(alg.ops["bot"]), int(alg.ops["top"])
    r = np.arange(alg.size)
    if (neg[j] != m[np.ix_(neg, neg)]).any():
        return "neg(a v b) != neg a ^ neg b"
    if (neg[m] != j[np.ix_(neg, neg)]).any():
        return "neg(a ^ b) != neg a v neg b"
    if neg[bot] != top or neg[top] != bot:
        return "neg does not swap the bounds"
    return None


def stone_algebra_3() -> Structure:
    """Chain 0 < a < 1 with neg a = 0, neg 0 = 1, neg 1 = 0."""
    r = range(3)
    return Structure.build(3, {"join": [[max(i, k) for k in r] for i in r],
                               "meet": [[min(i, k) for k in r] for i in r],
                               "bot": 0, "top": 2, "neg": [2, 0, 0]}, name="stone3")


def stone_check() -> bool:
    return isomorphic(stone_algebra_3(), ockham_algebra_of(build_Dm(1))) is not None


# -- axioms ----------------------------------------------------------------------------

@dataclass
class AxiomReport:
    failures: dict = field(default_factory=lambda: {"i": [], "ii": [], "iii": []})
    mode: str = "partial"

    @property
    def ok(self):
        return not any(self.failures.values())

    def holds(self, axiom):
        return not self.failures[axiom]


def check_dual_axioms(x: Structure, m: int, mode="partial") -> AxiomReport:
    """(i) the relation is an order, (ii) comparable points share u-values,
    (iii) every x lies below u^m(x).  ``mode="quasi"`` drops antisymmetry."""
    (rel, _), = x.sig.rels
    (op, _), = x.sig.ops
    le = x.rels[rel]
    u = x.ops[op]
    rep = AxiomReport(mode=mode)
    for p in range(x.size):
        if (p, p) not in le:
            rep.failures["i"].append(f"not reflexive at {p}")
    for a, b in sorted(le):
        if mode == "partial" and a != b and (b, a) in le:
            rep.failures["i"].append(f"not antisymmetric at ({a}, {b})")
        for c in range(x.size):
            if (b, c) in le and (a, c) not in le:
                rep.failures["i"].append(f"not transitive at ({a}, {b}, {c})")
        if u[a] != u[b]:
            rep.failures["ii"].append(f"({a}, {b}) related but u gives {int(u[a])}, {int(u[b])}")
    for p in range(x.size):
        q = p
        for _ in range(m):
            q = int(u[q])
        if (p, q) not in le:
            rep.failures["iii"].append(f"{p} not below u^{m}({p}) = {q}")
    return rep


# -- alter ego search --------------------------------------------------------------------

@dataclass
class SearchResult:
    u: tuple
    order: tuple
    mode: str
    pair: AlterEgoPair
    scan_holds: bool

    def to_dict(self):
        return {"u": list(self.u), "order": [list(p) for p in self.order],
                "mode": self.mode, "scan_bound": 1, "scan_holds": self.scan_holds}


def _reflexive_subuniverses(m1: Structure, u, mode):
    """Compatible reflexive binary relations on which u is constant on related pairs."""
    n = m1.size
    diag = np.array([(i, i) for i in range(n)], dtype=INT)
    allowed = [(a, b) for a in range(n) for b in range(n) if a != b and u[a] == u[b]]

    def admissible(rows):
        s = {tuple(r) for r in rows.tolist()}
        if any(u[a] != u[b] for a, b in s):
            return None
        if mode == "partial" and any(a != b and (b, a) in s for a, b in s):
            return None
        return frozenset(s)

    start = admissible(close_rows(m1, diag, 2))
    if start is None:
        return []
    seen = {start}
    queue = [start]
    i = 0
    while i < len(queue):
        cur = queue[i]
        i += 1
        if len(seen) > LIMITS.budget:
            raise InternalInvariantViolation("relation search exceeded budget")
        for pr in allowed:
            if pr in cur:
                continue
            nxt = admissible(close_rows(m1, np.array(sorted(cur | {pr}), dtype=INT), 2))
            if nxt is not None and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def alter_ego_search(m1: Structure, m: int, mode="partial", scan=True):
    """Candidates ``(u, order)`` passing compatibility, the axioms and a bound-1 scan.

    ``mode`` is ``"partial"``, ``"quasi"`` or ``"both"``; results carry their mode.
    """
    modes = ["partial", "quasi"] if mode == "both" else [mode]
    results = []
    ends = enumerate_homs(m1, m1).maps
    for md in modes:
        for u in ends.tolist():
            for rel in _reflexive_subuniverses(m1, u, md):
                cand = Structure.build(m1.size, {"u": u}, rels={"le": (2, sorted(rel))},
                                       name="alter-ego")
                if not check_compatible(m1, cand).ok:
                    continue
                if not check_dual_axioms(cand, m, md).ok:
                    continue
                pair = AlterEgoPair.certify(m1, cand, name=f"ockham-{md}")
                holds = finite_level_scan(pair, 1).holds if scan else True
                if holds:
                    results.append(SearchResult(tuple(u), tuple(sorted(rel)), md, pair, holds))
    results.sort(key=lambda r: (r.mode != "partial", r.u, r.order))
    return results
