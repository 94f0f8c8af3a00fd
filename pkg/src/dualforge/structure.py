"""Finite total structures on carriers ``{0, ..., n-1}``.

Operation tables are numpy arrays of shape ``(n,) * arity`` (0-d for
constants); relations are frozensets of int tuples.  Everything is immutable
after construction.  Elements of products are indexed lexicographically, so
the row order of :func:`power_rows` is also the carrier order of :func:`power`.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import LIMITS, Limits
from .errors import (EmptyGeneration, InternalInvariantViolation, SignatureMismatch,
                     SizeCapExceeded, StructureError)

INT = np.int64
TABLE_CAP = 4_000_000    # entries in one materialized table


@dataclass(frozen=True)
class Signature:
    ops: tuple = ()   # ((symbol, arity), ...)
    rels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple((str(s), int(k)) for s, k in self.ops))
        object.__setattr__(self, "rels", tuple((str(s), int(k)) for s, k in self.rels))

    @property
    def op_arity(self):
        return dict(self.ops)

    @property
    def rel_arity(self):
        return dict(self.rels)

    def symbols(self):
        return [s for s, _ in self.ops] + [s for s, _ in self.rels]

    def has_constants(self):
        return any(k == 0 for _, k in self.ops)

    def __eq__(self, other):
        if not isinstance(other, Signature):
            return NotImplemented
        return self.op_arity == other.op_arity and self.rel_arity == other.rel_arity

    def __hash__(self):
        return hash((frozenset(self.ops), frozenset(self.rels)))

    def to_dict(self):
        return {"ops": [list(p) for p in self.ops], "rels": [list(p) for p in self.rels]}


def as_rows(x, width: int) -> np.ndarray:
    """2-d int array of shape ``(count, width)``; safe for ``width == 0``."""
    a = np.asarray(x, dtype=INT)
    if a.ndim == 2 and a.shape[1] == width:
        return a
    if a.size == 0:
        return np.zeros((len(a) if width == 0 and a.ndim == 1 else 0, width), dtype=INT)
    return a.reshape(-1, width)


class Structure:
    """A finite total structure.

    Construct with :meth:`build` for convenience.  The constructor does not
    validate; call :func:`validate` on anything read from outside.
    """

    __slots__ = ("sig", "size", "ops", "rels", "name", "__dict__")

    def __init__(self, sig: Signature, size: int, ops: Mapping, rels: Mapping, name: str = ""):
        self.sig = sig
        self.size = int(size)
        self.name = name
        tables = {}
        for sym, k in sig.ops:
            if sym not in ops:
                raise StructureError(f"missing table for operation {sym!r}")
            try:
                t = np.array(ops[sym], dtype=INT)
            except (ValueError, TypeError) as exc:
                raise StructureError(f"malformed table for {sym!r}: {exc}") from None
            t.flags.writeable = False
            tables[sym] = t
        self.ops = tables
        relsets = {}
        for sym, k in sig.rels:
            relsets[sym] = frozenset(tuple(int(v) for v in t) for t in rels.get(sym, ()))
        self.rels = relsets

    @classmethod
    def build(cls, size, ops=None, rels=None, name=""):
        """``ops``: symbol -> table; ``rels``: symbol -> (arity, tuples)."""
        ops = dict(ops or {})
        rels = dict(rels or {})
        op_sig = tuple((s, np.ndim(t)) for s, t in ops.items())
        rel_sig = tuple((s, a) for s, (a, _) in rels.items())
        return cls(Signature(op_sig, rel_sig), size, ops,
                   {s: ts for s, (_, ts) in rels.items()}, name)

    # -- derived data ----------------------------------------------------

    @cached_property
    def rel_tables(self):
        """symbol -> boolean membership array of shape ``(n,) * arity``."""
        out = {}
        for sym, k in self.sig.rels:
            arr = np.zeros((self.size,) * k, dtype=bool)
            if self.rels[sym]:
                arr[tuple(np.array(sorted(self.rels[sym]), dtype=INT).T)] = True
            arr.flags.writeable = False
            out[sym] = arr
        return out

    @cached_property
    def _key(self):
        return (self.sig, self.size,
                tuple(self.ops[s].tobytes() for s, _ in self.sig.ops),
                tuple(tuple(sorted(self.rels[s])) for s, _ in self.sig.rels))

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return f"Structure({label}size={self.size}, ops={[s for s, _ in self.sig.ops]}, " \
               f"rels={[s for s, _ in self.sig.rels]})"

    def __len__(self):
        return self.size

    def renamed(self, name):
        return Structure(self.sig, self.size, self.ops, self.rels, name)

    def reduct(self, ops=(), rels=(), name=None):
        sig = Signature(tuple(p for p in self.sig.ops if p[0] in ops),
                        tuple(p for p in self.sig.rels if p[0] in rels))
        return Structure(sig, self.size, self.ops, self.rels,
                         self.name if name is None else name)

    # -- serialisation ---------------------------------------------------

    def to_dict(self):
        return {
            "name": self.name,
            "size": self.size,
            "ops": {s: {"arity": k, "table": self.ops[s].tolist()} for s, k in self.sig.ops},
            "rels": {s: {"arity": k, "tuples": [list(t) for t in sorted(self.rels[s])]}
                     for s, k in self.sig.rels},
        }

    @classmethod
    def from_dict(cls, d):
        try:
            ops = d.get("ops", {})
            rels = d.get("rels", {})
            sig = Signature(tuple((s, v["arity"]) for s, v in ops.items()),
                            tuple((s, v["arity"]) for s, v in rels.items()))
            return cls(sig, d["size"], {s: v["table"] for s, v in ops.items()},
                       {s: [tuple(t) for t in v["tuples"]] for s, v in rels.items()},
                       d.get("name", ""))
        except (KeyError, AttributeError, TypeError) as exc:
            raise StructureError(f"malformed structure document: {exc!r}") from None

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Hom:
    dom: Structure = field(repr=False)
    cod: Structure = field(repr=False)
    map: tuple

    def __call__(self, a):
        return self.map[a]

    def compose(self, other: "Hom") -> "Hom":
        """``self ∘ other``."""
        return Hom(other.dom, self.cod, tuple(self.map[v] for v in other.map))

    def is_injective(self):
        return len(set(self.map)) == len(self.map)


# -- validation -------------------------------------------------------------

@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok


def validate(s: Structure, allow_empty=True) -> ValidationReport:
    v = []
    syms = s.sig.symbols()
    if len(set(syms)) != len(syms):
        v.append("duplicate symbol in signature")
    n = s.size
    if n < 0:
        v.append("negative carrier size")
        return ValidationReport(v)
    if n == 0:
        if s.sig.has_constants():
            v.append("empty carrier with constant")
        if not allow_empty:
            v.append("empty carrier not allowed")
    for sym, k in s.sig.ops:
        t = s.ops[sym]
        if k < 0:
            v.append(f"operation {sym}: negative arity")
            continue
        if t.shape != (n,) * k and not (n == 0 and k == 0):
            v.append(f"operation {sym}: table shape {t.shape} does not match arity {k}"
                     f" on carrier of size {n}")
            continue
        if t.size and (t.min() < 0 or t.max() >= n):
            v.append(f"operation {sym}: table value out of range")
    for sym, k in s.sig.rels:
        if k < 1:
            v.append(f"relation {sym}: arity must be positive")
        for tup in sorted(s.rels[sym]):
            if len(tup) != k:
                v.append(f"relation {sym}: tuple {tup} has wrong length")
                break
            if any(x < 0 or x >= n for x in tup):
                v.append(f"relation {sym}: tuple component out of range in {tup}")
                break
    return ValidationReport(v)


# -- rows of powers -----------------------------------------------------------

def _unique_rows(rows, base=None):
    """Sorted distinct rows; ``base`` (a bound on entries) enables a fast path."""
    rows = np.asarray(rows, dtype=INT)
    if rows.ndim != 2:
        raise ValueError("rows must be 2-d")
    if rows.shape[0] == 0:
        return rows
    w = rows.shape[1]
    if w == 0:
        return rows[:1]
    if base is not None and base ** w < 2**62:
        codes = rows @ (base ** np.arange(w - 1, -1, -1, dtype=INT))
        _, first = np.unique(codes, return_index=True)
        return rows[first]
    return np.unique(rows, axis=0)


def _apply_op(table, arity, E):
    """All results of ``table`` applied coordinatewise to rows of ``E``."""
    s, w = E.shape
    if arity == 0:
        return np.full((1, w), int(table), dtype=INT)
    if s == 0:
        return np.empty((0, w), dtype=INT)
    idx = np.indices((s,) * arity).reshape(arity, -1)
    return table[tuple(E[idx[j]] for j in range(arity))]


def close_rows(m: Structure, seeds, width: int, cap: int | None = None) -> np.ndarray:
    """Subuniverse of ``m**width`` generated by ``seeds``, as sorted rows."""
    cap = LIMITS.size_cap if cap is None else cap
    base = max(m.size, 2)
    E = _unique_rows(as_rows(seeds, width), base)
    while True:
        parts = [E]
        for sym, k in m.sig.ops:
            parts.append(_apply_op(m.ops[sym], k, E))
        merged = _unique_rows(np.vstack(parts), base)
        if len(merged) > cap:
            raise SizeCapExceeded(len(merged), cap, "generated subuniverse")
        if len(merged) == len(E):
            return merged
        E = merged


class RowIndex:
    """Locate rows of a sorted row array; used to re-index pointwise results."""

    def __init__(self, rows, base):
        self.rows = rows
        self.base = base
        w = rows.shape[1]
        if base ** max(w, 1) < 2**62:
            self.weights = (base ** np.arange(w - 1, -1, -1, dtype=INT)).astype(INT)
            self.codes = rows @ self.weights if w else np.zeros(len(rows), dtype=INT)
            self.lookup = None
        else:
            self.weights = None
            self.lookup = {r.tobytes(): i for i, r in enumerate(rows)}

    def find(self, query):
        """Indices of ``query`` rows; -1 where absent."""
        query = np.asarray(query, dtype=INT)
        if len(self.rows) == 0:
            return np.full(len(query), -1, dtype=INT)
        if self.lookup is None:
            q = query @ self.weights if query.shape[1] else np.zeros(len(query), dtype=INT)
            pos = np.searchsorted(self.codes, q)
            pos = np.minimum(pos, len(self.codes) - 1)
            return np.where(self.codes[pos] == q, pos, -1)
        return np.array([self.lookup.get(r.tobytes(), -1) for r in query], dtype=INT)


def structure_from_rows(m: Structure, rows, name="", check_closed=True) -> Structure:
    """Substructure of ``m**w`` on the given rows (ops and relations coordinatewise)."""
    rows = _unique_rows(rows)
    s = len(rows)
    for sym, k in list(m.sig.ops) + list(m.sig.rels):
        if s ** k > TABLE_CAP:
            raise SizeCapExceeded(s ** k, TABLE_CAP, f"table for {sym}")
    index = RowIndex(rows, max(m.size, 2))
    tables = {}
    for sym, k in m.sig.ops:
        res = _apply_op(m.ops[sym], k, rows)
        pos = index.find(res)
        if check_closed and (pos < 0).any():
            raise InternalInvariantViolation(
                f"rows not closed under {sym!r}: result {res[np.argmax(pos < 0)].tolist()}")
        tables[sym] = pos.reshape((s,) * k) if k else int(pos[0])
    rels = {}
    for sym, k in m.sig.rels:
        if s == 0:
            rels[sym] = []
            continue
        R = m.rel_tables[sym]
        idx = np.indices((s,) * k).reshape(k, -1)
        hit = R[tuple(rows[idx[j]] for j in range(k))].all(axis=-1) if rows.shape[1] \
            else np.ones(idx.shape[1], dtype=bool)
        rels[sym] = [tuple(int(x) for x in col) for col in idx[:, hit].T]
    return Structure(m.sig, s, tables, rels, name)


def power_rows(n: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=INT)
    return np.indices((n,) * k).reshape(k, -1).T.astype(INT)


def power(m: Structure, k: int, limits: Limits | None = None) -> Structure:
    limits = limits or LIMITS
    if k < 1:
        raise ValueError("exponent must be >= 1")
    if m.size ** k > limits.size_cap:
        raise SizeCapExceeded(m.size ** k, limits.size_cap, f"power {m.name or 'M'}^{k}")
    return structure_from_rows(m, power_rows(m.size, k), name=f"{m.name}^{k}")


# -- substructures -------------------------------------------------------------

def closure(s: Structure, gens: Iterable[int]) -> np.ndarray:
    """Boolean mask of the subuniverse of ``s`` generated by ``gens``."""
    inside = np.zeros(s.size, dtype=bool)
    gens = list(gens)
    if gens:
        inside[gens] = True
    for sym, k in s.sig.ops:
        if k == 0:
            inside[int(s.ops[sym])] = True
    pos_ops = [(s.ops[sym], k) for sym, k in s.sig.ops if k > 0]
    frontier = inside.copy()
    while frontier.any():
        idx = np.flatnonzero(inside)
        new = np.zeros_like(inside)
        for t, k in pos_ops:
            # semi-naive: only argument tuples touching the frontier
            fidx = np.flatnonzero(frontier)
            for j in range(k):
                axes = [idx] * k
                axes[j] = fidx
                new[t[np.ix_(*axes)].ravel()] = True
        frontier = new & ~inside
        inside |= new
    return inside


def induced(s: Structure, carrier: Sequence[int], name="") -> Structure:
    """Induced substructure on a closed, sorted carrier."""
    carrier = np.asarray(sorted(carrier), dtype=INT)
    where = np.full(s.size, -1, dtype=INT)
    where[carrier] = np.arange(len(carrier))
    tables = {}
    for sym, k in s.sig.ops:
        t = s.ops[sym][np.ix_(*([carrier] * k))] if k else s.ops[sym]
        mapped = where[t]
        if (mapped < 0).any():
            raise StructureError(f"carrier not closed under {sym!r}")
        tables[sym] = mapped
    inside = set(carrier.tolist())
    rels = {sym: [tuple(int(where[x]) for x in tup) for tup in s.rels[sym]
                  if all(x in inside for x in tup)]
            for sym, _ in s.sig.rels}
    return Structure(s.sig, len(carrier), tables, rels, name)


def generated_substructure(s: Structure, gens: Iterable[int], allow_empty=None,
                           name=""):
    """Return ``(sub, inclusion)`` for the substructure generated by ``gens``."""
    allow_empty = LIMITS.allow_empty if allow_empty is None else allow_empty
    mask = closure(s, gens)
    carrier = np.flatnonzero(mask)
    if len(carrier) == 0 and not allow_empty:
        raise EmptyGeneration("generated substructure is empty")
    sub = induced(s, carrier, name=name)
    return sub, Hom(sub, s, tuple(int(c) for c in carrier))


def isomorphic(a: Structure, b: Structure, cfg=None) -> Hom | None:
    """First isomorphism ``a -> b`` in the engine's search order, or ``None``."""
    if a.sig != b.sig:
        raise SignatureMismatch(f"{a.sig} vs {b.sig}")
    if a.size != b.size:
        return None
    if any(len(a.rels[r]) != len(b.rels[r]) for r, _ in a.sig.rels):
        return None
    from .homs import HomSearchConfig, enumerate_homs
    cfg = cfg or HomSearchConfig(var_order="index")
    found = enumerate_homs(a, b, cfg, injective=True, limit=1)
    return found.homs[0] if len(found) else None


def iso_invariant(s: Structure):
    """Cheap isomorphism invariant used to bucket candidates before search."""
    parts = [s.size]
    for sym, k in s.sig.ops:
        t = s.ops[sym]
        if k == 0 or s.size == 0:
            parts.append(k)
        elif k == 1:
            fixed = int((t == np.arange(s.size)).sum())
            img = len(np.unique(t))
            parts.append((fixed, img))
        else:
            diag = t[tuple([np.arange(s.size)] * k)]
            idem = int((diag == np.arange(s.size)).sum())
            hist = tuple(sorted(np.bincount(t.ravel(), minlength=s.size).tolist()))
            parts.append((idem, hist))
    for sym, k in s.sig.rels:
        R = s.rels[sym]
        deg = [0] * s.size
        for tup in R:
            for x in tup:
                deg[x] += 1
        parts.append((len(R), tuple(sorted(deg))))
    return tuple(parts)


def subuniverses(s: Structure, limits: Limits | None = None):
    """All nonempty subuniverses of ``s`` as sorted tuples, in discovery order.

    Breadth-first: every subuniverse is reached from a smaller one by adding
    one element, so the search is complete.
    """
    limits = limits or LIMITS
    seen = set()
    start = []
    base = tuple(np.flatnonzero(closure(s, [])).tolist())
    if base:
        start.append(base)
    else:
        for x in range(s.size):
            start.append(tuple(np.flatnonzero(closure(s, [x])).tolist()))
    queue = []
    for u in start:
        if u not in seen:
            seen.add(u)
            queue.append(u)
    out = []
    i = 0
    while i < len(queue):
        u = queue[i]
        i += 1
        out.append(u)
        if len(seen) > limits.budget:
            raise SizeCapExceeded(len(seen), limits.budget, "subuniverse enumeration")
        members = set(u)
        for x in range(s.size):
            if x in members:
                continue
            v = tuple(np.flatnonzero(closure(s, list(u) + [x])).tolist())
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return out
