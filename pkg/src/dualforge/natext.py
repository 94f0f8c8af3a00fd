"""Natural extensions of finitely generated structures.

A :class:`Presentation` names ``A`` as the substructure of ``M^k`` generated by
a list of tuples.  The natural extension lives in ``M^X`` where ``X`` is the
set of homomorphisms ``A -> M`` in lexicographic order; candidate maps
``b: X -> M`` are rows of length ``|X|``.  Four independent descriptions of
the same set are provided and cross-checked.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .config import LIMITS
from .errors import (BudgetExceeded, EmptyGeneration, InternalInvariantViolation,
                     SizeCapExceeded, StructureError)
from .homs import HomSet, is_homomorphism
from .structure import (as_rows, INT, Hom, RowIndex, Structure, close_rows, power_rows,
                        structure_from_rows)

SUBSET_CAP = 16      # largest |X| for which every subset of X is visited


@dataclass(frozen=True)
class Presentation:
    m1: Structure
    k: int
    gens: tuple
    name: str = ""

    def __post_init__(self):
        gens = tuple(tuple(int(v) for v in g) for g in self.gens)
        for g in gens:
            if len(g) != self.k or any(v < 0 or v >= self.m1.size for v in g):
                raise StructureError(f"generator {g} is not a tuple in M^{self.k}")
        object.__setattr__(self, "gens", gens)

    @cached_property
    def rows(self) -> np.ndarray:
        rows = close_rows(self.m1, as_rows(self.gens, self.k), self.k)
        if len(rows) == 0 and not LIMITS.allow_empty:
            raise EmptyGeneration("presentation generates the empty structure")
        return rows

    def materialize(self) -> Structure:
        return self._structure

    @cached_property
    def _structure(self):
        return structure_from_rows(self.m1, self.rows, name=self.name or "A")

    @cached_property
    def gen_index(self) -> np.ndarray:
        return RowIndex(self.rows, max(self.m1.size, 2)).find(
            as_rows(self.gens, self.k))

    def to_dict(self, ambient=None):
        return {"ambient": ambient or self.m1.to_dict(), "exponent": self.k,
                "generators": [list(g) for g in self.gens]}

    @classmethod
    def from_dict(cls, d, resolve=None):
        amb = d["ambient"]
        if isinstance(amb, str):
            if resolve is None:
                from .library import builtin as resolve
            m1 = resolve(amb.removeprefix("builtin:"))
        else:
            m1 = Structure.from_dict(amb)
        return cls(m1, int(d["exponent"]), tuple(tuple(g) for g in d["generators"]),
                   d.get("name", ""))


# -- X_A from generator images ---------------------------------------------------------

def _extension_graph(p: Presentation, images):
    """Closure of ``{(g, images[g])}`` in ``M^(k+1)``; functional iff the
    partial assignment extends to a homomorphism on the generated part."""
    seeds = [tuple(g) + (v,) for g, v in zip(p.gens, images)]
    return close_rows(p.m1, as_rows(seeds, p.k + 1), p.k + 1)


def _functional(graph, k):
    dom = graph[:, :k]
    return len(np.unique(dom, axis=0)) == len(dom) if len(dom) else True


def hom_set_of(p: Presentation, budget=None) -> HomSet:
    """All homomorphisms ``A -> M``, by backtracking over generator images.

    Each partial assignment is closed inside ``M^(k+1)``; it survives only
    while that closure is the graph of a function.  Relations are checked
    on complete assignments.
    """
    budget = budget or LIMITS.budget
    A = p.materialize()
    m = p.m1.size
    ngen = len(p.gens)
    found = []
    nodes = 0
    index = RowIndex(p.rows, max(m, 2))

    def leaf(images):
        graph = _extension_graph(p, images)
        h = np.full(len(p.rows), -1, dtype=INT)
        pos = index.find(graph[:, :p.k])
        h[pos] = graph[:, p.k]
        if (h < 0).any():
            raise InternalInvariantViolation("extension graph does not cover the structure")
        for sym, ar in p.m1.sig.rels:
            R = p.m1.rel_tables[sym]
            for t in A.rels[sym]:
                if not R[tuple(h[list(t)])]:
                    return None
        return h

    def rec(images):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(budget, len(found))
        if images and not _functional(_extension_graph(p, images), p.k):
            return
        if len(images) == ngen:
            h = leaf(images)
            if h is not None:
                found.append(h)
            return
        # repeated generators are forced
        i = len(images)
        if p.gens[i] in p.gens[:i]:
            rec(images + [images[p.gens.index(p.gens[i])]])
            return
        for v in range(m):
            rec(images + [v])

    if ngen == 0:
        if A.size == 0:
            return HomSet(A, p.m1, np.zeros((1, 0), dtype=INT))
        # constants only: at most one map
        graph = close_rows(p.m1, np.zeros((0, p.k + 1), dtype=INT), p.k + 1)
        if _functional(graph, p.k):
            h = leaf([])
            if h is not None:
                found.append(h)
    else:
        rec([])
    return HomSet(A, p.m1, as_rows(found, A.size))


# -- natural extensions ----------------------------------------------------------------

@dataclass
class NaturalExtension:
    presentation: Presentation
    homs: np.ndarray            # X_A as rows over A's carrier
    rows: np.ndarray            # carrier: sorted rows of length |X_A|
    method: str = ""

    @cached_property
    def structure(self) -> Structure:
        return structure_from_rows(self.presentation.m1, self.rows, name=f"n({self.method})")

    @property
    def size(self):
        return len(self.rows)

    def row_set(self):
        return {tuple(int(v) for v in r) for r in self.rows}

    @cached_property
    def embedding(self) -> Hom:
        """e_A into the carrier; raises if some evaluation is missing."""
        A = self.presentation.materialize()
        idx = RowIndex(self.rows, max(self.presentation.m1.size, 2)).find(self.homs.T)
        if (idx < 0).any():
            raise InternalInvariantViolation("an evaluation lies outside the natural extension")
        return Hom(A, self.structure, tuple(int(i) for i in idx))

    def is_iso_via_evaluation(self):
        e = self.embedding
        if len(set(e.map)) != self.size or len(e.map) != self.size:
            return False
        inv = np.empty(self.size, dtype=INT)
        inv[list(e.map)] = np.arange(self.size)
        return (is_homomorphism(e.map, e.dom, e.cod)[0]
                and is_homomorphism(inv, e.cod, e.dom)[0])


def evaluation_rows(homs: np.ndarray) -> np.ndarray:
    """Row ``a`` is ``e_A(a)``: the values ``x(a)`` for ``x`` in X_A."""
    return np.ascontiguousarray(np.asarray(homs, dtype=INT).T)


def natural_extension_definitional(p: Presentation, homs: HomSet | None = None,
                                   cap=None) -> NaturalExtension:
    """Substructure of ``M^X`` generated by the evaluations at the generators."""
    X = (homs or hom_set_of(p)).maps
    seeds = X[:, p.gen_index].T if len(p.gens) else np.zeros((0, len(X)), dtype=INT)
    rows = close_rows(p.m1, seeds, len(X), cap)
    return NaturalExtension(p, X, rows, "definitional")


def is_locally_evaluation(b, p: Presentation, mode="full", homs=None) -> bool:
    """Does ``b`` agree with some evaluation on every subset ``Y`` of X_A?

    ``mode="full"`` checks ``Y = X_A`` only (enough since X_A is finite);
    ``mode="all"`` visits every subset.
    """
    X = (homs.maps if homs is not None else hom_set_of(p).maps)
    b = np.asarray(b, dtype=INT)
    E = evaluation_rows(X)                       # |A| x |X|
    agree = E == b[None, :]
    if mode == "full":
        return bool(agree.all(axis=1).any())
    if mode != "all":
        raise ValueError(f"unknown mode {mode!r}")
    n = len(b)
    if n > SUBSET_CAP:
        raise SizeCapExceeded(2 ** n, 2 ** SUBSET_CAP, "subsets of the hom-set")
    weights = (1 << np.arange(n, dtype=np.int64))
    S = (agree.astype(np.int64) * weights).sum(axis=1)     # agreement set of each a
    Y = np.arange(1, 1 << n, dtype=np.int64)
    covered = ((Y[:, None] & ~S[None, :]) == 0).any(axis=1)
    return bool(covered.all())


def r_F(p: Presentation, F, homs=None) -> np.ndarray:
    """Sorted rows of ``{(x_1(a), ..., x_n(a)) : a in A}``, generated from the generators."""
    X = homs.maps if homs is not None else hom_set_of(p).maps
    F = list(F)
    seeds = X[F][:, p.gen_index].T if len(p.gens) else np.zeros((0, len(F)), dtype=INT)
    return close_rows(p.m1, as_rows(seeds, len(F)), len(F))


def preserves_r_F(b, p: Presentation, F, homs=None) -> bool:
    rel = r_F(p, F, homs)
    target = np.asarray(b, dtype=INT)[list(F)]
    if len(rel) == 0:
        return False
    return bool((rel == target[None, :]).all(axis=1).any())


def _codes(rows, base):
    w = rows.shape[1]
    weights = base ** np.arange(w - 1, -1, -1, dtype=np.int64)
    return rows.astype(np.int64) @ weights if w else np.zeros(len(rows), dtype=np.int64)


def rF_preserving_rows(p: Presentation, candidates: np.ndarray, homs=None,
                       subsets=None) -> np.ndarray:
    """Candidates preserving ``r_F`` for every nonempty ``F`` (largest ``F`` first)."""
    X = homs.maps if homs is not None else hom_set_of(p).maps
    n = len(X)
    if subsets is None:
        if n > SUBSET_CAP:
            raise SizeCapExceeded(2 ** n, 2 ** SUBSET_CAP, "subsets of the hom-set")
        subsets = [F for size in range(n, 0, -1) for F in itertools.combinations(range(n), size)]
    base = p.m1.size
    keep = candidates
    for F in subsets:
        if len(keep) == 0:
            break
        rel = r_F(p, F, homs)
        ok = np.isin(_codes(keep[:, list(F)], base), _codes(rel, base))
        keep = keep[ok]
    return keep


def natural_extension_via_alter_ego(p: Presentation, pair, cfg=None) -> NaturalExtension:
    """All maps ``X_A -> M`` preserving the alter ego's structure on the dual."""
    from .duality import dualize, second_dual_rows
    d = dualize(p, pair, cfg)
    rows = second_dual_rows(d, pair, cfg)
    return NaturalExtension(p, d.maps, rows, "alter-ego")


# -- cross-checks ---------------------------------------------------------------------------

@dataclass
class EquivalenceReport:
    sizes: dict
    agree: bool
    discrepancies: list = field(default_factory=list)

    def to_dict(self):
        return {"agree": self.agree, "sizes": self.sizes,
                "discrepancies": self.discrepancies}


def all_candidates(m_size, n, budget=None):
    budget = budget or LIMITS.budget
    if m_size ** n > budget:
        raise BudgetExceeded(budget, 0)
    return power_rows(m_size, n)


def crosscheck_equivalence(p: Presentation, pair=None, local_mode="full",
                           budget=None) -> EquivalenceReport:
    homs = hom_set_of(p)
    X = homs.maps
    cands = all_candidates(p.m1.size, len(X), budget)
    base = max(p.m1.size, 2)

    definitional = natural_extension_definitional(p, homs).rows
    E = evaluation_rows(X)
    if local_mode == "full":
        local = cands[np.isin(_codes(cands, base), _codes(E, base))]
    else:
        local = as_rows([c for c in cands if is_locally_evaluation(c, p, local_mode, homs)],
                        len(X))
    preserving = rF_preserving_rows(p, cands, homs)
    sets = {"definitional": definitional, "locally-evaluation": local,
            "r_F-preserving": preserving}
    if pair is not None:
        sets["alter-ego"] = natural_extension_via_alter_ego(p, pair).rows
    as_sets = {k: {tuple(int(x) for x in r) for r in v} for k, v in sets.items()}
    ref = as_sets["definitional"]
    disc = []
    for name, s in as_sets.items():
        for extra in sorted(s - ref):
            disc.append({"method": name, "map": list(extra), "issue": "extra"})
        for miss in sorted(ref - s):
            disc.append({"method": name, "map": list(miss), "issue": "missing"})
    return EquivalenceReport({k: len(v) for k, v in as_sets.items()}, not disc, disc)


def induced_map(u: Hom, pa: Presentation, pb: Presentation, b_rows, homs_a=None,
                homs_b=None) -> np.ndarray:
    """Apply ``b -> b o (- o u)`` to rows over X_A, giving rows over X_B."""
    XA = homs_a.maps if homs_a is not None else hom_set_of(pa).maps
    XB = homs_b.maps if homs_b is not None else hom_set_of(pb).maps
    umap = np.asarray(u.map, dtype=INT)
    pulled = XB[:, umap]                 # y o u, as maps over A's carrier
    where = RowIndex(XA, max(pa.m1.size, 2)).find(pulled)
    if (where < 0).any():
        raise InternalInvariantViolation("composite with a homomorphism is not a homomorphism")
    return np.asarray(b_rows, dtype=INT)[:, where]


def functoriality_check(u: Hom, pa: Presentation, pb: Presentation) -> bool:
    """The induced map sends n(A) into n(B)."""
    ha, hb = hom_set_of(pa), hom_set_of(pb)
    na = natural_extension_definitional(pa, ha)
    nb = natural_extension_definitional(pb, hb)
    img = induced_map(u, pa, pb, na.rows, ha, hb)
    return {tuple(r) for r in img.tolist()} <= nb.row_set()


def generator_independence_check(p: Presentation, q: Presentation) -> bool:
    """Two presentations of the same subuniverse give the same carrier."""
    if p.m1 != q.m1 or p.k != q.k or not np.array_equal(p.rows, q.rows):
        raise StructureError("presentations do not generate the same substructure")
    return natural_extension_definitional(p).row_set() == \
        natural_extension_definitional(q).row_set()


def load_presentation(path):
    with open(path) as fh:
        return Presentation.from_dict(json.load(fh))
