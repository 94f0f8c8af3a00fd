"""Finite shadows of the classical compactifications.

Nachbin: the dual of the up-set lattice of a finite poset.  Stone-Cech: the
dual of a finite powerset algebra.  Filters: the semilattice self-duality.
:func:`b0_report` turns a standardness catalogue into cited claims.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .duality import check_duality_at, dualize
from .errors import NotAPoset, NotASemilattice, UnknownClassTag
from .homs import is_homomorphism
from .library import builtin, builtin_pair, two_ba
from .natext import Presentation, natural_extension_definitional
from .structure import as_rows, INT, Hom, Structure, isomorphic, power_rows, structure_from_rows


# -- posets ---------------------------------------------------------------------------

def poset_violation(p: Structure):
    """First failed poset axiom as a string, or None."""
    if [s for s, _ in p.sig.rels] != ["le"] or p.sig.ops:
        return "expected a single binary relation 'le' and no operations"
    le = p.rels["le"]
    for x in range(p.size):
        if (x, x) not in le:
            return f"reflexivity fails at {x}"
    for a, b in sorted(le):
        if a != b and (b, a) in le:
            return f"antisymmetry fails at ({a}, {b})"
    for (a, b), (c, d) in itertools.product(sorted(le), repeat=2):
        if b == c and (a, d) not in le:
            return f"transitivity fails at ({a}, {b}), ({b}, {d})"
    return None


def require_poset(p):
    why = poset_violation(p)
    if why:
        raise NotAPoset(why)


def order_dual(p: Structure) -> Structure:
    return Structure(p.sig, p.size, {}, {"le": [(b, a) for a, b in p.rels["le"]]},
                     f"{p.name}^d")


def upsets(p: Structure) -> np.ndarray:
    """Characteristic vectors of all up-sets, in lexicographic order."""
    require_poset(p)
    out = []
    for chi in itertools.product((0, 1), repeat=p.size):
        if all(chi[b] for a, b in p.rels["le"] if chi[a]):
            out.append(chi)
    return as_rows(out, p.size)


def upset_lattice(p: Structure) -> Structure:
    """Up-sets under union and intersection, with the empty set and ``P``."""
    rows = upsets(p)
    index = {tuple(r): i for i, r in enumerate(rows.tolist())}
    n = len(rows)
    join = [[index[tuple(x | y for x, y in zip(a, b))] for b in rows.tolist()] for a in rows.tolist()]
    meet = [[index[tuple(x & y for x, y in zip(a, b))] for b in rows.tolist()] for a in rows.tolist()]
    return Structure.build(n, {"join": join, "meet": meet,
                               "bot": index[(0,) * p.size], "top": index[(1,) * p.size]},
                           name=f"U({p.name})")


@dataclass
class NachbinResult:
    poset: Structure
    dual: Structure
    witness: Hom | None

    @property
    def ok(self):
        return self.witness is not None


def nachbin_finite(p: Structure) -> NachbinResult:
    """Priestley dual of the up-set lattice, with the iso ``x -> (U -> [x in U])``."""
    require_poset(p)
    L = upset_lattice(p)
    d = dualize(L, builtin_pair("priestley"))
    rows = upsets(p)                                # same order as L's carrier
    point_maps = rows.T                              # x_p(U) = [p in U]
    where = {tuple(r): i for i, r in enumerate(d.maps.tolist())}
    idx = [where.get(tuple(r)) for r in point_maps.tolist()]
    if None in idx or len(set(idx)) != d.structure.size or len(idx) != d.structure.size:
        return NachbinResult(p, d.structure, None)
    h = Hom(p, d.structure, tuple(idx))
    inv = np.empty(len(idx), dtype=INT)
    inv[idx] = np.arange(len(idx))
    if not (is_homomorphism(h.map, p, d.structure)[0]
            and is_homomorphism(inv, d.structure, p)[0]):
        return NachbinResult(p, d.structure, None)
    return NachbinResult(p, d.structure, h)


def nachbin_order_dual_check(p: Structure) -> bool:
    """The compactification of the order dual is the dual of the compactification."""
    left = nachbin_finite(order_dual(p)).dual
    right = order_dual(nachbin_finite(p).dual)
    return isomorphic(left.renamed(""), right.renamed("")) is not None


# -- Stone-Cech ---------------------------------------------------------------------------

@dataclass
class StoneCechReport:
    n: int
    algebra_size: int
    dual_size: int
    point_to_ultrafilter: list
    ok: bool

    def to_dict(self):
        return {"n": self.n, "algebra_size": self.algebra_size, "dual_size": self.dual_size,
                "point_to_ultrafilter": self.point_to_ultrafilter, "ok": self.ok}


def powerset_algebra(n: int) -> Structure:
    return structure_from_rows(two_ba(), power_rows(2, n), name=f"P({n})")


def stone_cech_finite(n: int) -> StoneCechReport:
    """Dual of the powerset algebra of an ``n``-set, certified against the atoms."""
    B = powerset_algebra(n)
    d = dualize(B, builtin_pair("stone"))
    subsets = power_rows(2, n)
    rows = [tuple(r) for r in subsets.tolist()]
    atoms = [i for i, r in enumerate(rows) if sum(r) == 1]
    mapping = []
    ok = d.structure.size == n == len(atoms)
    for point in range(n):
        # the principal ultrafilter at ``point`` is membership of ``point``
        target = tuple(int(v) for v in subsets[:, point])
        hit = [i for i, r in enumerate(d.maps.tolist()) if tuple(r) == target]
        mapping.append(hit[0] if hit else None)
        atom = rows.index(tuple(int(i == point) for i in range(n)))
        # it contains exactly one atom, the singleton of ``point``
        ok = ok and bool(hit) and [a for a in atoms if d.maps[hit[0], a]] == [atom]
    ok = ok and len(set(mapping)) == n
    return StoneCechReport(n, B.size, d.structure.size, mapping, ok)


# -- semilattice filters ---------------------------------------------------------------------

def semilattice_violation(s: Structure):
    if s.sig.op_arity != {"meet": 2, "top": 0} or s.sig.rels:
        return "expected operations meet (binary) and top (nullary)"
    m = s.ops["meet"]
    r = np.arange(s.size)
    if (m[r, r] != r).any():
        return "meet is not idempotent"
    if (m != m.T).any():
        return "meet is not commutative"
    if not (m[m[:, :, None], r[None, None, :]] == m[r[:, None, None], m[None, :, :]]).all():
        return "meet is not associative"
    if (m[r, int(s.ops["top"])] != r).any():
        return "top is not an identity for meet"
    return None


def filt(s: Structure) -> Structure:
    """Filters of ``s`` as homomorphisms into the 2-element semilattice."""
    why = semilattice_violation(s)
    if why:
        raise NotASemilattice(why)
    return dualize(s, builtin_pair("hms")).structure.renamed(f"Filt({s.name})")


def double_filt_check(s: Structure):
    """Return ``(holds, iso)`` for ``Filt(Filt(s)) ~= s``."""
    ff = filt(filt(s))
    iso = isomorphic(s, ff.renamed(s.name))
    v = check_duality_at(s, builtin_pair("hms"))
    return (iso is not None and v.holds), (v.iso if v.holds else iso)


# -- standardness catalogue and reports ---------------------------------------------------------

FDSC = "FDSC-HSP theorem: standard when HSP(M) has finitely determined syntactic congruences"


@dataclass(frozen=True)
class CatalogEntry:
    tag: str
    cls: str
    generator: str
    standard: str          # "yes", "no", "unknown"
    cite: str
    weak_cite: str = ""    # theorem giving weak coincidence despite non-standardness


CATALOG = (
    CatalogEntry("boolean", "Boolean algebras", "2-element Boolean algebra", "yes",
                 FDSC + " (finite Boolean algebra)"),
    CatalogEntry("distributive-lattice", "bounded distributive lattices",
                 "2-element bounded lattice", "yes", FDSC + " (finite distributive lattice)"),
    CatalogEntry("implication", "implication algebras", "2-element implication algebra", "yes",
                 FDSC + " (finite implication algebra)"),
    CatalogEntry("group", "groups", "finite group", "yes", FDSC + " (finite group)"),
    CatalogEntry("semigroup", "semigroups", "finite semigroup", "yes",
                 FDSC + " (finite semigroup)"),
    CatalogEntry("ring", "rings", "finite ring", "yes", FDSC + " (finite ring)"),
    CatalogEntry("lattice", "lattices", "finite lattice", "yes", FDSC + " (finite lattice)"),
    CatalogEntry("ockham", "Ockham algebras", "finite Ockham algebra S_m", "yes",
                 FDSC + " (finite Ockham algebra)"),
    CatalogEntry("unary", "unary algebras", "finite unary algebra", "yes",
                 FDSC + " (finite unary algebra)"),
    CatalogEntry("semilattice", "unital meet semilattices", "2-element semilattice", "yes",
                 "unital meet semilattices form a standard prevariety"),
    CatalogEntry("ordered-sets", "ordered sets", "2-element chain", "no",
                 "Stralka: Boolean ordered spaces that are not Priestley spaces",
                 "Nachbin order-compactification coincides with the natural extension"),
    CatalogEntry("ockham-spaces", "Ockham-space duals (u, order)", "alter ego of S_m", "no",
                 "ordered unary structures of this shape are non-standard",
                 "Ockham-space theorem: axioms x<=y => u(x)=u(y) and x <= u^m(x) lift to "
                 "compactifications"),
    CatalogEntry("unary3-ordered", "3-element ordered unary algebras", "unary3-*", "unknown",
                 "open: realisation of b0 by the natural extension not investigated"),
)

REFUSALS = {
    "semilattice-b-vs-b0": "Hart-Kunen/Lawson theorem: some unital meet semilattice A has "
                           "b(A) != b0(A)",
}

OUT_OF_SCOPE = [
    "compact-standardness for the circle group (infinite generator)",
    "infinite semilattice witness for b != b0",
    "Stralka's non-Priestley Boolean ordered spaces",
    "Boolean-standardness of the semilattice-with-automorphism example on 2^Z",
]


def catalog_entry(tag):
    for e in CATALOG:
        if e.tag == tag:
            return e
    raise UnknownClassTag(tag)


def catalog_as_dicts():
    return [{"tag": e.tag, "class": e.cls, "generator": e.generator,
             "standard": e.standard, "cite": e.cite} for e in CATALOG]


@dataclass
class CompactificationReport:
    input: str
    class_tag: str
    natext_size: int
    claims: list = field(default_factory=list)
    refused: bool = False
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"input": self.input, "class": self.class_tag,
                "natural_extension_size": self.natext_size, "claims": self.claims,
                "refused": self.refused, "notes": self.notes}


def b0_report(p: Presentation, class_tag: str) -> CompactificationReport:
    if class_tag in REFUSALS:
        n = natural_extension_definitional(p)
        rep = CompactificationReport(p.name or p.m1.name, class_tag, n.size, refused=True)
        sem = catalog_entry("semilattice")
        rep.claims.append({"functor": "b0", "relation": "=", "cite": sem.cite})
        rep.claims.append({"functor": "b", "relation": "unknown", "cite": REFUSALS[class_tag]})
        rep.notes.append("refusing to claim b = b0: the counterexample is infinite")
        return rep
    entry = catalog_entry(class_tag)
    n = natural_extension_definitional(p)
    rep = CompactificationReport(p.name or p.m1.name, class_tag, n.size)
    if entry.standard == "yes":
        rep.claims.append({"functor": "b0", "relation": "=", "cite": entry.cite})
    elif entry.standard == "no" and entry.weak_cite:
        rep.claims.append({"functor": "b", "relation": "=", "cite": entry.weak_cite})
        rep.claims.append({"functor": "b0", "relation": "=", "cite": entry.weak_cite})
        rep.notes.append(f"non-standard ({entry.cite}); coincidence holds in the weak sense")
    else:
        rep.claims.append({"functor": "b0", "relation": "unknown", "cite": entry.cite})
    rep.notes.append("finite instance: every functor value is computed as n(A)")
    return rep
