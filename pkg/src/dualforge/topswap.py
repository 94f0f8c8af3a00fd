"""Commuting squares for a compatible pair, checked on finite instances.

On finite structures the natural extension of ``A`` and the second dual
``G(D(A))`` both live in ``M^hom(A, M1)`` with the same indexing, so the
square is checked by comparing carriers as sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .duality import AlterEgoPair, check_duality_at, dualize, iso_classes, second_dual_rows, \
    substructures_of_power
from .errors import DualforgeError
from .natext import Presentation, natural_extension_definitional
from .structure import Hom, Structure, isomorphic, power_rows, structure_from_rows


@dataclass(frozen=True)
class PairedContext:
    pair: AlterEgoPair
    side: str = "m1"          # which member plays the algebra role

    def algebra(self):
        return self.pair.m1

    def alter_ego(self):
        return self.pair.m2


def swap(ctx: PairedContext) -> PairedContext:
    """Exchange roles; the compatibility certificate is recomputed."""
    p = ctx.pair
    name = p.name[:-1] if p.name.endswith("~") else p.name + "~"
    swapped = AlterEgoPair.certify(p.m2, p.m1, name=name)
    return PairedContext(swapped, "m2" if ctx.side == "m1" else "m1")


@dataclass
class SquareReport:
    holds: bool
    set_equal: bool
    natext_size: int
    second_dual_size: int
    duality_holds: bool
    iso: Hom | None = None
    detail: str = ""

    def to_dict(self):
        out = {"holds": self.holds, "set_equal": self.set_equal,
               "natural_extension_size": self.natext_size,
               "second_dual_size": self.second_dual_size, "duality_holds": self.duality_holds}
        if self.detail:
            out["detail"] = self.detail
        return out


def square_check_A(a: Presentation, ctx: PairedContext) -> SquareReport:
    """n(A) against G(D(A)) where G = hom(-, alter ego) with pointwise structure."""
    pair = ctx.pair
    if a.m1 != pair.m1:
        raise DualforgeError("presentation is not over the algebra side of the context")
    verdict = check_duality_at(a, pair)
    nat = natural_extension_definitional(a)
    d = dualize(a, pair)
    gd = second_dual_rows(d, pair)
    if not np.array_equal(nat.homs, d.maps):
        # hom-sets indexed differently: compare up to isomorphism only
        left = nat.structure
        right = structure_from_rows(pair.m1, gd)
        iso = isomorphic(left, right)
        return SquareReport(iso is not None and verdict.holds, False, nat.size, len(gd),
                            verdict.holds, iso, "compared up to isomorphism")
    same = nat.row_set() == {tuple(r) for r in gd.tolist()}
    iso = None
    if same:
        s = nat.structure
        iso = Hom(s, structure_from_rows(pair.m1, gd, name="G(D(A))"), tuple(range(s.size)))
    return SquareReport(same and verdict.holds, same, nat.size, len(gd), verdict.holds, iso)


def square_check_X(x: Presentation, ctx: PairedContext) -> SquareReport:
    """The mirror square: run :func:`square_check_A` after swapping roles."""
    return square_check_A(x, swap(ctx))


def poset_presentation(p: Structure) -> Presentation:
    """Present a poset inside ``2^|P|`` by the characteristic vectors of its down-sets."""
    from .library import builtin
    le = p.rels["le"]
    gens = [tuple(int((r, q) in le) for r in range(p.size)) for q in range(p.size)]
    return Presentation(builtin("2poset"), p.size, tuple(gens), name=p.name)


def presentations_in_power(m: Structure, k: int):
    """One presentation per isomorphism class of substructures of ``m^k``."""
    rows = power_rows(m.size, k)
    subs = substructures_of_power(m, k)
    reps = {id(s) for s in iso_classes([s for _, s in subs])}
    return [Presentation(m, k, tuple(map(tuple, rows[list(u)].tolist())), name=s.name)
            for u, s in subs if id(s) in reps]


def topswap_scan(ctx: PairedContext, bound: int, x_presentations=None):
    """Both squares on every class of substructures of the two powers up to ``bound``."""
    a_side = []
    for k in range(1, bound + 1):
        for p in presentations_in_power(ctx.pair.m1, k):
            a_side.append({"k": k, "structure": p.name, **square_check_A(p, ctx).to_dict()})
    other = swap(ctx)
    x_side = []
    if x_presentations is None:
        x_presentations = [p for k in range(1, bound + 1)
                           for p in presentations_in_power(other.pair.m1, k)]
    for p in x_presentations:
        x_side.append({"k": p.k, "structure": p.name, **square_check_X(p, ctx).to_dict()})
    holds = all(r["holds"] for r in a_side + x_side)
    return {"pair": ctx.pair.name, "bound": bound, "holds": holds,
            "note": "finite instances only", "square_A": a_side, "square_X": x_side}
