"""Built-in structures, certified pairs, and small exhaustive corpora."""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import StructureError
from .structure import Structure, power

# -- small algebras -------------------------------------------------------------

JOIN2 = [[0, 1], [1, 1]]
MEET2 = [[0, 0], [0, 1]]
LE2 = [(0, 0), (0, 1), (1, 1)]


def two_ba():
    return Structure.build(2, {"join": JOIN2, "meet": MEET2, "neg": [1, 0], "bot": 0, "top": 1},
                           name="2ba")


def two_dl():
    return Structure.build(2, {"join": JOIN2, "meet": MEET2, "bot": 0, "top": 1}, name="2dl")


def two_set():
    return Structure.build(2, name="2set")


def two_slat():
    """The 2-element meet-semilattice with top."""
    return Structure.build(2, {"meet": MEET2, "top": 1}, name="2slat")


def chain_poset(n, name=None):
    le = [(i, j) for i in range(n) for j in range(n) if i <= j]
    return Structure.build(n, rels={"le": (2, le)}, name=name or f"{n}chain")


def antichain_poset(n, name=None):
    return Structure.build(n, rels={"le": (2, [(i, i) for i in range(n)])},
                           name=name or f"{n}antichain")


def poset_from_pairs(n, strict_pairs, name=""):
    """Poset on ``n`` points from strict covering/comparability pairs (closed here)."""
    le = {(i, i) for i in range(n)} | set(strict_pairs)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(le), repeat=2):
            if b == c and (a, d) not in le:
                le.add((a, d))
                changed = True
    return Structure.build(n, rels={"le": (2, sorted(le))}, name=name)


def chain_dl(n):
    """Bounded n-element chain lattice."""
    r = range(n)
    return Structure.build(n, {"join": [[max(i, j) for j in r] for i in r],
                               "meet": [[min(i, j) for j in r] for i in r],
                               "bot": 0, "top": n - 1}, name=f"{n}dl")


def chain_slat(n):
    r = range(n)
    return Structure.build(n, {"meet": [[min(i, j) for j in r] for i in r], "top": n - 1},
                           name=f"{n}slat")


def diamond_dl():
    """0 < a, b < 1 with a = 1, b = 2, top = 3."""
    return power(two_dl(), 2).renamed("diamond")


def diamond_slat():
    return power(two_slat(), 2).renamed("diamond-slat")


def zn(n):
    r = range(n)
    return Structure.build(n, {"add": [[(i + j) % n for j in r] for i in r],
                               "neg": [(-i) % n for i in r], "zero": 0}, name=f"z{n}")


def implication():
    """({0,1}; ->) with x -> y = (not x) or y."""
    return Structure.build(2, {"imp": [[1, 1], [0, 1]]}, name="implication")


def implication_binary_alter_ego():
    """The implication algebra with every compatible nonempty binary relation.

    This pair is not registered: it dualises at power bound 2 but a 7-element
    subalgebra of M^3 already has a ghost.
    """
    from .duality import AlterEgoPair
    from .structure import power, power_rows, subuniverses
    m = implication()
    rows = power_rows(2, 2)
    rels = {}
    for i, u in enumerate(s for s in subuniverses(power(m, 2)) if len(s)):
        rels[f"r{i}"] = (2, [tuple(int(v) for v in rows[j]) for j in u])
    return AlterEgoPair.certify(m, Structure.build(2, rels=rels, name="implication~"),
                                name="implication-binary")


UNARY3_ORDERS = {
    "usual": [(0, 1), (1, 2)],
    "kleene": [(0, 1), (2, 1)],
    "stone": [(1, 2)],
}


def unary3(order="usual"):
    """3-element unary algebra (u, d) enriched with one of three orders."""
    if order not in UNARY3_ORDERS:
        raise StructureError(f"unknown order {order!r}")
    le = poset_from_pairs(3, UNARY3_ORDERS[order]).rels["le"]
    return Structure.build(3, {"u": [1, 2, 2], "d": [0, 0, 1]}, rels={"le": (2, le)},
                           name=f"unary3-{order}")


def chain3_lattice_ops():
    r = range(3)
    return ([[max(i, j) for j in r] for i in r], [[min(i, j) for j in r] for i in r])


# -- registries -------------------------------------------------------------------

def _ockham(m, algebra):
    from .ockham import build_Dm, ockham_algebra_of
    sp = build_Dm(m)
    return ockham_algebra_of(sp).renamed(f"S{m}") if algebra else sp.as_structure(f"D{m}")


_STRUCTURES = {
    "2ba": two_ba,
    "2dl": two_dl,
    "2poset": lambda: chain_poset(2, "2poset"),
    "2chain": lambda: chain_poset(2),
    "3chain": lambda: chain_poset(3),
    "2antichain": lambda: antichain_poset(2),
    "2set": two_set,
    "2slat": two_slat,
    "3dl": lambda: chain_dl(3),
    "3slat": lambda: chain_slat(3),
    "diamond": diamond_dl,
    "diamond-slat": diamond_slat,
    "z2": lambda: zn(2), "z3": lambda: zn(3), "z4": lambda: zn(4),
    "z5": lambda: zn(5), "z6": lambda: zn(6),
    "implication": implication,
    "unary3-usual": lambda: unary3("usual"),
    "unary3-kleene": lambda: unary3("kleene"),
    "unary3-stone": lambda: unary3("stone"),
    "S1": lambda: _ockham(1, True), "S3": lambda: _ockham(3, True),
    "S5": lambda: _ockham(5, True),
    "D1": lambda: _ockham(1, False), "D3": lambda: _ockham(3, False),
    "D5": lambda: _ockham(5, False),
}


def structure_names():
    return list(_STRUCTURES)


@lru_cache(maxsize=None)
def builtin(name: str) -> Structure:
    try:
        return _STRUCTURES[name]()
    except KeyError:
        raise StructureError(f"unknown builtin structure {name!r}") from None


# Documented finite-level scan bound for each builtin pair.
PAIR_BOUNDS = {
    "stone": 3, "priestley": 3, "banaschewski": 3, "hms": 3,
    "z2": 3, "z3": 3, "z4": 3, "z5": 3, "z6": 3,
    "unary3-usual": 1, "unary3-kleene": 1, "unary3-stone": 1,
}


def _pair(name):
    from .duality import AlterEgoPair, lattice_based_alter_ego
    if name == "stone":
        return AlterEgoPair.certify(builtin("2ba"), builtin("2set"), name="stone")
    if name == "priestley":
        return AlterEgoPair.certify(builtin("2dl"), builtin("2poset"), name="priestley")
    if name == "banaschewski":
        return AlterEgoPair.certify(builtin("2poset"), builtin("2dl"), name="banaschewski")
    if name == "hms":
        return AlterEgoPair.certify(builtin("2slat"), builtin("2slat"), name="hms")
    if name in ("z2", "z3", "z4", "z5", "z6"):
        return AlterEgoPair.certify(builtin(name), builtin(name), name=name)
    if name.startswith("unary3-"):
        join, meet = chain3_lattice_ops()
        return lattice_based_alter_ego(builtin(name), join, meet, name=name)
    raise StructureError(f"unknown builtin pair {name!r}")


def pair_names():
    return list(PAIR_BOUNDS)


@lru_cache(maxsize=None)
def builtin_pair(name: str):
    return _pair(name)


# -- exhaustive corpora -------------------------------------------------------------

def _canonical_poset(n, le):
    best = None
    for perm in itertools.permutations(range(n)):
        key = tuple(sorted((perm[a], perm[b]) for a, b in le))
        if best is None or key < best:
            best = key
    return best


@lru_cache(maxsize=None)
def posets_up_to_iso(n: int):
    """One representative per isomorphism class of ``n``-element posets.

    Every finite poset has a linear extension, so it suffices to scan
    transitive subsets of ``{(i, j): i < j}``.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen = {}
    for bits in range(1 << len(pairs)):
        strict = {pairs[t] for t in range(len(pairs)) if bits >> t & 1}
        if any((a, d) not in strict for (a, b) in strict for (c, d) in strict if b == c):
            continue
        le = strict | {(i, i) for i in range(n)}
        key = _canonical_poset(n, le)
        if key not in seen:
            seen[key] = Structure.build(n, rels={"le": (2, sorted(key))},
                                        name=f"poset{n}-{len(seen)}")
    return list(seen.values())


def _meet_table(n, le):
    leq = np.zeros((n, n), dtype=bool)
    for a, b in le:
        leq[a, b] = True
    table = np.zeros((n, n), dtype=int)
    for a in range(n):
        for b in range(n):
            lower = [c for c in range(n) if leq[c, a] and leq[c, b]]
            top = [c for c in lower if all(leq[d, c] for d in lower)]
            if len(top) != 1:
                return None
            table[a, b] = top[0]
    return table


@lru_cache(maxsize=None)
def semilattices_up_to_iso(n: int):
    """Meet-semilattices with top of size ``n`` (finite ones are lattices)."""
    out = []
    for p in posets_up_to_iso(n):
        le = p.rels["le"]
        tops = [t for t in range(n) if all((x, t) in le for x in range(n))]
        if not tops:
            continue
        table = _meet_table(n, le)
        if table is None:
            continue
        out.append(Structure.build(n, {"meet": table, "top": tops[0]},
                                   name=f"slat{n}-{len(out)}"))
    return out
