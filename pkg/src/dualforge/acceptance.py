"""The acceptance criteria as runnable checks, shared by the test-suite and the CLI."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .compactify import (b0_report, double_filt_check, nachbin_finite, nachbin_order_dual_check,
                         stone_cech_finite)
from .duality import finite_level_scan
from .homs import brute_force_homs, enumerate_homs
from .library import (builtin, builtin_pair, posets_up_to_iso, semilattices_up_to_iso,
                      structure_names)
from .natext import Presentation, crosscheck_equivalence, natural_extension_definitional
from .ockham import alter_ego_search, stone_check
from .structure import isomorphic, power_rows
from .topswap import PairedContext, poset_presentation, presentations_in_power, \
    square_check_A, square_check_X


@dataclass
class CriterionResult:
    number: int
    title: str
    ok: bool
    seconds: float
    limit: float
    detail: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.ok and self.seconds < self.limit

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] criterion {self.number}: {self.title} "
                f"({self.seconds:.2f}s, limit {self.limit:.0f}s)")

    def to_dict(self):
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "within_limit": self.seconds < self.limit, "limit_seconds": self.limit,
                "detail": self.detail}


def _timed(number, title, limit, fn, *args):
    t0 = time.perf_counter()
    ok, detail = fn(*args)
    return CriterionResult(number, title, bool(ok), time.perf_counter() - t0, limit, detail)


# -- criterion bodies -------------------------------------------------------------------

def hom_oracle(quick=False):
    pairs = bad = 0
    failures = []
    names = structure_names()
    for x, y in itertools.product(names, repeat=2):
        a, b = builtin(x), builtin(y)
        if a.sig != b.sig or b.size ** a.size > 10 ** 5:
            continue
        if quick and b.size ** a.size > 10 ** 3:
            continue
        pairs += 1
        e, o = enumerate_homs(a, b), brute_force_homs(a, b)
        if e.maps.shape != o.maps.shape or (e.maps != o.maps).any():
            bad += 1
            failures.append([x, y])
    return bad == 0 and pairs > 0, {"pairs": pairs, "mismatches": failures}


NATEXT_CORPUS = [("2dl", "priestley"), ("2poset", "banaschewski"), ("2slat", "hms"),
                 ("z2", "z2"), ("z3", "z3")]


def natext_corpus(quick=False):
    """Every nonempty generating set inside M^k, k <= 2."""
    for mname, pname in NATEXT_CORPUS:
        m = builtin(mname)
        for k in (1, 2):
            if quick and k == 2 and m.size > 2:
                continue
            elems = [tuple(r) for r in power_rows(m.size, k).tolist()]
            for r in range(1, len(elems) + 1):
                for gens in itertools.combinations(elems, r):
                    yield mname, pname, Presentation(m, k, gens)


def four_way(quick=False):
    checked = 0
    disc = []
    for mname, pname, p in natext_corpus(quick):
        rep = crosscheck_equivalence(p, builtin_pair(pname))
        checked += 1
        if not rep.agree:
            disc.append({"generator": mname, "gens": [list(g) for g in p.gens],
                         "discrepancies": rep.discrepancies[:3]})
    return not disc, {"presentations": checked, "discrepancies": disc}


SCAN_PAIRS = ["stone", "priestley", "hms", "z2", "z3", "z4", "z5", "z6"]


def scans(quick=False):
    bound = 2 if quick else 3
    out = {}
    for name in SCAN_PAIRS:
        rep = finite_level_scan(builtin_pair(name), bound)
        out[name] = {"holds": rep.holds, "classes": len(rep.classes), "bound": bound}
    return all(v["holds"] for v in out.values()), out


def reflection(quick=False):
    checked = 0
    bad = []
    for mname, _, p in natext_corpus(quick):
        checked += 1
        if not natural_extension_definitional(p).is_iso_via_evaluation():
            bad.append({"generator": mname, "gens": [list(g) for g in p.gens]})
    return not bad, {"presentations": checked, "failures": bad}


def nachbin_round_trip(quick=False):
    counts = {}
    bad = []
    top = 4 if quick else 5
    for n in range(0, top + 1):
        ps = posets_up_to_iso(n)
        counts[n] = len(ps)
        for p in ps:
            if not (nachbin_finite(p).ok and nachbin_order_dual_check(p)):
                bad.append(p.name)
    ok = not bad and (quick or counts[5] == 63)
    return ok, {"classes_by_size": counts, "failures": bad}


def stone_cech(quick=False):
    sizes = {n: stone_cech_finite(n) for n in (1, 2, 3, 4)}
    ok = all(r.ok and r.dual_size == n for n, r in sizes.items())
    return ok, {str(n): r.dual_size for n, r in sizes.items()}


def double_filter(quick=False):
    counts = {}
    bad = []
    for n in range(1, 6):
        ss = semilattices_up_to_iso(n)
        counts[n] = len(ss)
        for s in ss:
            if not double_filt_check(s)[0]:
                bad.append(s.name)
    return not bad, {"classes_by_size": counts, "failures": bad}


def ockham_gallery(quick=False):
    detail = {"stone_check": stone_check()}
    algs = {m: builtin(f"S{m}") for m in (1, 3, 5)}
    detail["sizes"] = {m: a.size for m, a in algs.items()}
    sizes_ok = all(a.size == 3 * 2 ** (m - 1) for m, a in algs.items())
    distinct = all(isomorphic(algs[x], algs[y]) is None
                   for x, y in itertools.combinations(algs, 2))
    detail["pairwise_non_isomorphic"] = distinct
    found = alter_ego_search(algs[1], 1, "partial")
    detail["alter_egos_m1"] = [r.to_dict() for r in found]
    ok = detail["stone_check"] and sizes_ok and distinct and len(found) > 0
    return ok, detail


def topswap_squares(quick=False):
    ctx = PairedContext(builtin_pair("priestley"))
    a_side = [square_check_A(p, ctx) for p in presentations_in_power(builtin("2dl"), 3)]
    x_side = [square_check_X(poset_presentation(p), ctx)
              for n in range(1, 5) for p in posets_up_to_iso(n)]
    ok = all(r.holds and r.set_equal for r in a_side + x_side)
    return ok, {"lattice_classes": len(a_side), "posets": len(x_side),
                "failures": [i for i, r in enumerate(a_side + x_side) if not r.holds]}


def report_integrity(quick=False):
    ba = Presentation(builtin("2ba"), 2, ((0, 1),), name="4-element Boolean algebra")
    pos = Presentation(builtin("2poset"), 2, ((0, 1), (1, 0)), name="2-antichain")
    slat = Presentation(builtin("2slat"), 2, ((0, 1), (1, 0)), name="diamond semilattice")
    reports = {"boolean": b0_report(ba, "boolean"),
               "ordered-sets": b0_report(pos, "ordered-sets"),
               "semilattice-b-vs-b0": b0_report(slat, "semilattice-b-vs-b0")}
    cited = all(c["cite"] for r in reports.values() for c in r.claims if c["relation"] == "=")
    refused = reports["semilattice-b-vs-b0"].refused and any(
        c["functor"] == "b" and c["relation"] == "unknown" and c["cite"]
        for c in reports["semilattice-b-vs-b0"].claims)
    weak = {c["functor"] for c in reports["ordered-sets"].claims if c["relation"] == "="}
    ok = cited and refused and weak == {"b", "b0"} and reports["boolean"].claims[0]["relation"] == "="
    return ok, {k: v.to_dict() for k, v in reports.items()}


CRITERIA = [
    (1, "hom engine equals brute force on builtin pairs", 10, hom_oracle),
    (2, "four-way natural extension equivalence", 60, four_way),
    (3, "finite-level duality scans at power bound 3", 120, scans),
    (4, "natural extension isomorphic to A via evaluation", 30, reflection),
    (5, "Nachbin round trip and order duals, posets up to 5", 60, nachbin_round_trip),
    (6, "Stone-Cech dual sizes for n <= 4", 5, stone_cech),
    (7, "double filter lattice for semilattices up to 5", 30, double_filter),
    (8, "Ockham gallery", 120, ockham_gallery),
    (9, "commuting squares, Priestley/Banaschewski", 60, topswap_squares),
    (10, "report integrity of b0 claims", 1, report_integrity),
]


def run_criterion(number, quick=False) -> CriterionResult:
    for n, title, limit, fn in CRITERIA:
        if n == number:
            return _timed(n, title, limit, fn, quick)
    raise KeyError(number)


def run_all(quick=False):
    return [run_criterion(n, quick) for n, *_ in CRITERIA]
