"""Alter egos, the hom-functors D and E, evaluation maps and duality checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .config import LIMITS, Limits
from .errors import (CarrierMismatch, DualforgeError, InternalInvariantViolation, NotALattice,
                     NotCompatible, NotInPrevariety, SignatureMismatch, SizeCapExceeded)
from .homs import HomSearchConfig, HomSet, enumerate_homs, is_homomorphism
from .structure import (as_rows, INT, Hom, RowIndex, Structure, isomorphic, iso_invariant, power,
                        structure_from_rows, subuniverses, induced, closure)

COMPAT_CAP = 5_000_000


# -- compatibility -------------------------------------------------------------------

@dataclass
class CompatReport:
    failures: list = field(default_factory=list)
    checks: int = 0

    @property
    def ok(self):
        return not self.failures

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {"ok": self.ok, "checks": self.checks, "failures": list(self.failures)}


def _grid(n, shape):
    size = n ** int(np.prod(shape)) if shape else 1
    if size > COMPAT_CAP:
        raise SizeCapExceeded(size, COMPAT_CAP, "compatibility check")
    total = int(np.prod(shape))
    return np.indices((n,) * total).reshape((total, -1)).reshape(tuple(shape) + (-1,))


def _commute(g, kg, f, kf, n):
    """First ``X`` (kg x kf matrix) with ``g(f(rows)) != f(g(cols))``, or None."""
    if kg == 0 and kf == 0:
        return None if int(g) == int(f) else ()
    if kg == 0:
        c = int(g)
        return None if int(f[(c,) * kf]) == c else ((c,) * kf,)
    if kf == 0:
        e = int(f)
        return None if int(g[(e,) * kg]) == e else ((e,) * kg,)
    X = _grid(n, (kg, kf))
    lhs = g[tuple(f[tuple(X[i, j] for j in range(kf))] for i in range(kg))]
    rhs = f[tuple(g[tuple(X[i, j] for i in range(kg))] for j in range(kf))]
    bad = np.flatnonzero(lhs != rhs)
    if len(bad):
        return tuple(tuple(int(X[i, j, bad[0]]) for j in range(kf)) for i in range(kg))
    return None


def _closed_under(rel: frozenset, arity, f, kf, n):
    """First violation of ``rel`` being closed under ``f`` coordinatewise."""
    if kf == 0:
        t = (int(f),) * arity
        return None if t in rel else ((), t)
    rows = as_rows(sorted(rel), arity)
    if len(rows) ** kf > COMPAT_CAP:
        raise SizeCapExceeded(len(rows) ** kf, COMPAT_CAP, "relation closure check")
    if len(rows) == 0:
        return None
    idx = np.indices((len(rows),) * kf).reshape(kf, -1)
    res = f[tuple(rows[idx[j]] for j in range(kf))]
    table = np.zeros((n,) * arity, dtype=bool)
    table[tuple(rows.T)] = True
    ok = table[tuple(res.T)]
    bad = np.flatnonzero(~ok)
    if len(bad):
        b = bad[0]
        return (tuple(tuple(int(v) for v in rows[idx[j, b]]) for j in range(kf)),
                tuple(int(v) for v in res[b]))
    return None


def _one_way(m1: Structure, m2: Structure, rep: CompatReport):
    n = m1.size
    for g, kg in m2.sig.ops:
        for f, kf in m1.sig.ops:
            rep.checks += 1
            w = _commute(m2.ops[g], kg, m1.ops[f], kf, n)
            if w is not None:
                rep.failures.append(f"operation {g} does not commute with {f} at {w}")
        for r, kr in m1.sig.rels:
            rep.checks += 1
            w = _closed_under(m1.rels[r], kr, m2.ops[g], kg, n)
            if w is not None:
                rep.failures.append(
                    f"relation {r} not closed under {g}: {w[0]} -> tuple {w[1]} missing")


def check_compatible(m1: Structure, m2: Structure) -> CompatReport:
    """Every operation of each structure is a homomorphism for the other, and
    every relation of each is closed under the other's operations."""
    if m1.size != m2.size:
        raise CarrierMismatch(f"carrier sizes {m1.size} and {m2.size}")
    rep = CompatReport()
    _one_way(m1, m2, rep)
    # relations of m2 closed under ops of m1 (commutation already covered)
    for r, kr in m2.sig.rels:
        for f, kf in m1.sig.ops:
            rep.checks += 1
            w = _closed_under(m2.rels[r], kr, m1.ops[f], kf, m1.size)
            if w is not None:
                rep.failures.append(
                    f"relation {r} not closed under {f}: {w[0]} -> tuple {w[1]} missing")
    return rep


def compatibility_symmetric(m1, m2) -> bool:
    return check_compatible(m1, m2).ok == check_compatible(m2, m1).ok


# -- pairs -------------------------------------------------------------------------

@dataclass(frozen=True)
class AlterEgoPair:
    m1: Structure
    m2: Structure
    certificate: CompatReport = field(compare=False, hash=False)
    name: str = ""
    # When set, m2 additionally carries every compatible relation of this
    # arity; those are never materialized (see ``disagreement_cover``).
    lazy_arity: int | None = None

    @classmethod
    def certify(cls, m1, m2, name="", lazy_arity=None):
        rep = check_compatible(m1, m2)
        if not rep.ok:
            raise NotCompatible("; ".join(rep.failures[:5]))
        return cls(m1, m2, rep, name, lazy_arity)

    def swapped(self):
        if self.lazy_arity is not None:
            raise DualforgeError("cannot swap a pair with lazily represented relations")
        return AlterEgoPair.certify(self.m2, self.m1, name=f"{self.name}~")

    @classmethod
    def from_dict(cls, d, name=""):
        return cls.certify(Structure.from_dict(d["m1"]), Structure.from_dict(d["m2"]),
                           name=d.get("name", name))

    def to_dict(self):
        return {"name": self.name, "m1": self.m1.to_dict(), "m2": self.m2.to_dict()}


def _is_lattice(join, meet, n):
    j = np.asarray(join)
    m = np.asarray(meet)
    if j.shape != (n, n) or m.shape != (n, n):
        return "tables must be binary"
    r = np.arange(n)
    for name, t in (("join", j), ("meet", m)):
        if (t[r, r] != r).any():
            return f"{name} not idempotent"
        if (t != t.T).any():
            return f"{name} not commutative"
        if not (t[t[:, :, None], r[None, None, :]] == t[r[:, None, None], t[None, :, :]]).all():
            return f"{name} not associative"
    if (j[r[:, None], m] != r[:, None]).any() or (m[r[:, None], j] != r[:, None]).any():
        return "absorption fails"
    return None


def lattice_based_alter_ego(m1: Structure, join, meet, name="") -> AlterEgoPair:
    """Alter ego ``(M; join, meet, all compatible relations of arity 2|M|)``."""
    n = m1.size
    problem = _is_lattice(join, meet, n)
    if problem:
        raise NotALattice(problem)
    m2 = Structure.build(n, {"join": join, "meet": meet}, name=f"{m1.name}-lattice")
    rep = check_compatible(m1, m2)
    if not rep.ok:
        raise NotCompatible("; ".join(rep.failures[:5]))
    return AlterEgoPair(m1, m2, rep, name or f"{m1.name}-lattice-based", 2 * n)


# -- duals -----------------------------------------------------------------------------

def _as_structure(a):
    return a.materialize() if hasattr(a, "materialize") else a


@dataclass
class DualObject:
    base: Structure
    homs: HomSet
    structure: Structure

    @property
    def maps(self):
        return self.homs.maps


def separates_and_reflects(a: Structure, maps: np.ndarray, m: Structure):
    """Whether the homs in ``maps`` jointly embed ``a`` into a power of ``m``.

    Returns ``(ok, reason)``.
    """
    cols = maps.T                         # one row per element of a
    if len(maps) == 0:
        if a.size > 1:
            return False, "no homomorphisms to separate points"
    elif a.size and len(np.unique(cols, axis=0)) != a.size:
        return False, "homomorphisms into the generator do not separate points"
    for sym, k in a.sig.rels:
        if a.size ** k > COMPAT_CAP:
            raise SizeCapExceeded(a.size ** k, COMPAT_CAP, "reflection check")
        R = m.rel_tables[sym]
        idx = np.indices((a.size,) * k).reshape(k, -1)
        held = R[tuple(maps[:, idx[j]] for j in range(k))].all(axis=0) if len(maps) \
            else np.ones(idx.shape[1], dtype=bool)
        actual = np.zeros(idx.shape[1], dtype=bool)
        for t in a.rels[sym]:
            actual[np.ravel_multi_index(t, (a.size,) * k)] = True
        if (held & ~actual).any():
            t = tuple(int(v) for v in idx[:, np.argmax(held & ~actual)])
            return False, f"relation {sym} not reflected at {t}"
    return True, ""


def dualize(a, pair: AlterEgoPair, cfg: HomSearchConfig | None = None,
            check_membership=True) -> DualObject:
    """D(A): hom(A, M1) with the M2 structure applied pointwise."""
    A = _as_structure(a)
    if A.sig != pair.m1.sig:
        raise SignatureMismatch("structure is not in the signature of the pair's first member")
    homs = enumerate_homs(A, pair.m1, cfg)
    if check_membership and not hasattr(a, "materialize"):
        ok, why = separates_and_reflects(A, homs.maps, pair.m1)
        if not ok:
            raise NotInPrevariety(why)
    if len(homs.maps) > LIMITS.size_cap:
        raise SizeCapExceeded(len(homs.maps), LIMITS.size_cap, "dual")
    try:
        st = structure_from_rows(pair.m2, homs.maps, name=f"D({A.name})")
    except InternalInvariantViolation as exc:
        raise InternalInvariantViolation(f"pointwise operations left the hom-set: {exc}") from None
    return DualObject(A, homs, st)


def _cover_within(masks, universe, depth):
    """Is there a choice of at most ``depth`` masks whose union is ``universe``?"""
    if universe == 0:
        return True
    if depth == 0:
        return False
    # branch on the uncovered point with the fewest options
    best = None
    for bit in _bits(universe):
        opts = [m for m in masks if m >> bit & 1]
        if best is None or len(opts) < len(best):
            best = opts
            if len(opts) <= 1:
                break
    for m in best:
        if _cover_within(masks, universe & ~m, depth - 1):
            return True
    return False


def _bits(x):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def disagreement_cover(b, hom_maps: np.ndarray, arity: int) -> bool:
    """True if some ``F`` with ``|F| <= arity`` admits no element agreeing with ``b`` on ``F``.

    ``b`` preserves every compatible relation of that arity exactly when no
    such ``F`` exists.
    """
    n = hom_maps.shape[1]
    universe = (1 << n) - 1
    masks = []
    for x, row in enumerate(hom_maps):
        diff = np.flatnonzero(row != b[x])
        masks.append(sum(1 << int(i) for i in diff))
    return _cover_within(sorted(set(masks), key=lambda m: -bin(m).count("1")), universe, arity)


def second_dual_rows(dual: DualObject, pair: AlterEgoPair, cfg=None) -> np.ndarray:
    """Rows of E(D(A)): maps hom(A, M1) -> M preserving the M2 structure."""
    rows = enumerate_homs(dual.structure, pair.m2, cfg).maps
    if pair.lazy_arity is not None:
        keep = [i for i, b in enumerate(rows)
                if not disagreement_cover(b, dual.maps, pair.lazy_arity)]
        rows = rows[keep]
    return rows


def second_dual(a, pair, cfg=None) -> Structure:
    d = dualize(a, pair, cfg)
    return structure_from_rows(pair.m1, second_dual_rows(d, pair, cfg),
                               name=f"ED({d.base.name})")


def _evaluation_rows(dual: DualObject):
    return dual.maps.T.copy()            # e_A(a) = column a of the hom matrix


def evaluation(a, pair, cfg=None) -> Hom:
    d = dualize(a, pair, cfg)
    rows = second_dual_rows(d, pair, cfg)
    ed = structure_from_rows(pair.m1, rows, name=f"ED({d.base.name})")
    return _evaluation_hom(d, rows, ed, pair.m1.size)


def _evaluation_hom(d, rows, ed, base):
    idx = RowIndex(rows, max(base, 2)).find(_evaluation_rows(d))
    if (idx < 0).any():
        raise InternalInvariantViolation("an evaluation map does not preserve the alter ego")
    if len(set(idx.tolist())) != len(idx):
        raise InternalInvariantViolation("evaluation map is not injective")
    h = Hom(d.base, ed, tuple(int(i) for i in idx))
    ok, why = is_homomorphism(h.map, d.base, ed)
    if not ok:
        raise InternalInvariantViolation(f"evaluation map is not a homomorphism: {why}")
    return h


@dataclass
class DualityVerdict:
    holds: bool
    iso: Hom | None = None
    ghost: tuple | None = None
    detail: str = ""

    def to_dict(self):
        out = {"holds": self.holds}
        if self.iso is not None:
            out["iso"] = list(self.iso.map)
        if self.ghost is not None:
            out["ghost"] = list(self.ghost)
        if self.detail:
            out["detail"] = self.detail
        return out


def _verdict(h: Hom, rows) -> DualityVerdict:
    image = set(h.map)
    if len(image) < h.cod.size:
        first = min(i for i in range(h.cod.size) if i not in image)
        return DualityVerdict(False, ghost=tuple(int(v) for v in rows[first]),
                              detail="evaluation map is not surjective")
    inv = np.empty(h.cod.size, dtype=INT)
    inv[list(h.map)] = np.arange(h.dom.size)
    ok, why = is_homomorphism(inv, h.cod, h.dom)
    if not ok:
        return DualityVerdict(False, detail=f"evaluation map does not reflect structure: {why}")
    return DualityVerdict(True, iso=h)


def check_duality_at(a, pair: AlterEgoPair, cfg=None) -> DualityVerdict:
    d = dualize(a, pair, cfg)
    rows = second_dual_rows(d, pair, cfg)
    if len(rows) != d.base.size:
        # too many (or too few) structure-preserving maps: report without
        # building the second dual, which may be large
        idx = RowIndex(rows, max(pair.m1.size, 2)).find(_evaluation_rows(d))
        if (idx < 0).any():
            raise InternalInvariantViolation("an evaluation map does not preserve the alter ego")
        missing = np.setdiff1d(np.arange(len(rows)), idx)
        return DualityVerdict(False, ghost=tuple(int(v) for v in rows[missing[0]]),
                              detail=f"second dual has {len(rows)} elements, "
                                     f"structure has {d.base.size}")
    ed = structure_from_rows(pair.m1, rows, name=f"ED({d.base.name})")
    return _verdict(_evaluation_hom(d, rows, ed, pair.m1.size), rows)


def full_duality_check_at(x: Structure, pair: AlterEgoPair, cfg=None) -> DualityVerdict:
    """Verdict on ``X -> D(E(X))`` for ``X`` in ISP(M2)."""
    if pair.lazy_arity is not None:
        raise DualforgeError("full duality checks need a materialized alter ego")
    if x.sig != pair.m2.sig:
        raise SignatureMismatch("structure is not in the signature of the alter ego")
    flipped = AlterEgoPair(pair.m2, pair.m1, pair.certificate, pair.name)
    return check_duality_at(x, flipped, cfg)


# -- finite-level scans ------------------------------------------------------------------

def strong_invariant(s: Structure):
    sizes = sorted(int(closure(s, [x]).sum()) for x in range(s.size))
    return iso_invariant(s), tuple(sizes)


def iso_classes(structures, cfg=None):
    """Deduplicate up to isomorphism; keeps the first representative of each class."""
    buckets = {}
    reps = []
    for s in structures:
        key = strong_invariant(s)
        bucket = buckets.setdefault(key, [])
        if any(isomorphic(s, t, cfg) is not None for t in bucket):
            continue
        bucket.append(s)
        reps.append(s)
    return reps


def substructures_of_power(m: Structure, k: int, limits: Limits | None = None):
    """Nonempty substructures of ``m**k``, as ``(carrier, structure)`` pairs."""
    limits = limits or LIMITS
    P = power(m, k, limits)
    out = []
    for u in subuniverses(P, limits):
        out.append((u, induced(P, u, name=f"{m.name}^{k}[{len(out)}]")))
    return out


@dataclass
class ScanReport:
    pair: str
    bound: int
    classes: list
    holds: bool
    note: str = "finite-level scan over substructures of M1^k up to isomorphism"

    def to_dict(self):
        return {"pair": self.pair, "bound": self.bound, "holds": self.holds,
                "classes_checked": len(self.classes), "note": self.note,
                "classes": self.classes}


def finite_level_scan(pair: AlterEgoPair, bound: int, limits: Limits | None = None,
                      cfg=None) -> ScanReport:
    limits = limits or LIMITS
    if pair.m1.size ** bound > limits.size_cap:
        raise SizeCapExceeded(pair.m1.size ** bound, limits.size_cap, "scan power")
    candidates = []
    for k in range(1, bound + 1):
        candidates.extend(s for _, s in substructures_of_power(pair.m1, k, limits))
    classes = []
    for rep in iso_classes(candidates, cfg):
        v = check_duality_at(rep, pair, cfg)
        classes.append({"structure": rep.name, "size": rep.size, **v.to_dict()})
    classes.sort(key=lambda c: (c["size"], c["structure"]))
    holds = all(c["holds"] for c in classes)
    rep = ScanReport(pair.name, bound, classes, holds)
    if not holds:
        rep.note += "; a ghost refutes duality for this alter ego only, not for every alter ego"
    return rep
