"""Command-line front door.

Every subcommand prints one JSON report on stdout (or writes it with ``--out``).
Exit codes: 0 all checks passed, 1 a mathematical check failed, 2 usage or
resource error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .config import LIMITS
from .errors import DualforgeError
from .library import builtin, builtin_pair, pair_names, structure_names
from .structure import Structure

DETERMINISM = "no randomness; output depends only on inputs and config"


class UsageError(Exception):
    pass


# -- inputs -----------------------------------------------------------------------------

def _read_json(ref):
    try:
        with open(ref) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {ref}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{ref} is not valid JSON: {exc}") from None


def load_structure(ref: str) -> Structure:
    if ref.startswith("builtin:"):
        return builtin(ref[len("builtin:"):])
    return Structure.from_dict(_read_json(ref))


def load_pair(ref: str):
    from .duality import AlterEgoPair
    if ref.startswith("builtin:"):
        return builtin_pair(ref[len("builtin:"):])
    d = _read_json(ref)
    return AlterEgoPair.from_dict(d, name=d.get("name", ref))


def load_presentation(ref: str):
    from .natext import Presentation
    return Presentation.from_dict(_read_json(ref))


def manifest(args, inputs):
    config = {"budget": getattr(args, "budget", None) or LIMITS.budget,
              "size_cap": LIMITS.size_cap}
    return {"command": args.cmd, "inputs": inputs, "config": config,
            "determinism": DETERMINISM, "version": __version__}


def emit(args, report, inputs, ok=True, with_manifest=True):
    if with_manifest:
        report = {**report, "manifest": manifest(args, inputs)}
    compact = args.cmd == "hom"
    text = json.dumps(report, separators=(",", ":")) if compact else json.dumps(report, indent=2)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if ok else 1


# -- subcommands ------------------------------------------------------------------------

def cmd_hom(args):
    from .homs import HomSearchConfig, enumerate_homs
    a, b = load_structure(args.dom), load_structure(args.cod)
    cfg = HomSearchConfig(budget=args.budget or LIMITS.budget,
                          parallel=args.workers > 1, workers=max(args.workers, 1))
    hs = enumerate_homs(a, b, cfg)
    report = {"count": hs.count}
    if args.list:
        report["homs"] = hs.as_lists()
    return emit(args, report, [args.dom, args.cod], with_manifest=args.manifest)


def cmd_dualize(args):
    from .duality import dualize
    a, pair = load_structure(args.alg), load_pair(args.pair)
    d = dualize(a, pair)
    report = {"pair": pair.name, "hom_count": d.homs.count, "homs": d.homs.as_lists(),
              "dual": d.structure.to_dict()}
    return emit(args, report, [args.alg, args.pair])


def cmd_check_duality(args):
    from .duality import check_duality_at, finite_level_scan
    pair = load_pair(args.pair)
    if args.alg:
        v = check_duality_at(load_structure(args.alg), pair)
        return emit(args, {"pair": pair.name, **v.to_dict()}, [args.alg, args.pair], v.holds)
    rep = finite_level_scan(pair, args.power_bound)
    return emit(args, rep.to_dict(), [args.pair], rep.holds)


def cmd_natext(args):
    from .natext import crosscheck_equivalence, natural_extension_definitional
    p = load_presentation(args.pres)
    n = natural_extension_definitional(p)
    report = {"size": n.size, "generated_size": len(p.rows), "hom_count": len(n.homs),
              "homs": n.homs.tolist(), "rows": n.rows.tolist(),
              "iso_via_evaluation": n.is_iso_via_evaluation()}
    ok = report["iso_via_evaluation"]
    inputs = [args.pres]
    if args.crosscheck:
        pair = None
        if args.pair:
            pair = load_pair(args.pair)
            inputs.append(args.pair)
        rep = crosscheck_equivalence(p, pair)
        report["crosscheck"] = rep.to_dict()
        ok = ok and rep.agree
    return emit(args, report, inputs, ok)


def cmd_nachbin(args):
    from .compactify import nachbin_finite, nachbin_order_dual_check
    p = load_structure(args.poset)
    r = nachbin_finite(p)
    od = nachbin_order_dual_check(p)
    report = {"poset_size": p.size, "dual_size": r.dual.size, "round_trip": r.ok,
              "witness": list(r.witness.map) if r.ok else None, "order_dual_check": od}
    return emit(args, report, [args.poset], r.ok and od)


def cmd_stonecech(args):
    from .compactify import stone_cech_finite
    if args.n < 0:
        raise UsageError("--n must be non-negative")
    r = stone_cech_finite(args.n)
    return emit(args, r.to_dict(), [f"n={args.n}"], r.ok)


def cmd_filt(args):
    from .compactify import double_filt_check, filt
    s = load_structure(args.slat)
    f = filt(s)
    report = {"size": s.size, "filters": f.size, "filt": f.to_dict()}
    ok = True
    if args.double_check:
        ok, iso = double_filt_check(s)
        report["double_check"] = {"holds": ok, "iso": list(iso.map) if iso else None}
    return emit(args, report, [args.slat], ok)


def cmd_b0(args):
    from .compactify import OUT_OF_SCOPE, b0_report
    p = load_presentation(args.pres)
    rep = b0_report(p, args.cls).to_dict()
    rep["out_of_scope"] = OUT_OF_SCOPE
    return emit(args, rep, [args.pres, f"class={args.cls}"])


def cmd_ockham(args):
    from .ockham import build_Dm, ockham_algebra_of, stone_check
    x = build_Dm(args.m)
    alg = ockham_algebra_of(x, name=f"S{args.m}")
    report = {"m": args.m, "space": x.as_structure(f"D{args.m}").to_dict(),
              "algebra_size": alg.size, "expected_size": 3 * 2 ** (args.m - 1)}
    ok = alg.size == report["expected_size"]
    if args.m == 1:
        report["stone_check"] = stone_check()
        ok = ok and report["stone_check"]
    if args.emit_algebra:
        with open(args.emit_algebra, "w") as fh:
            fh.write(alg.to_json() + "\n")
        report["algebra_file"] = args.emit_algebra
    return emit(args, report, [f"m={args.m}"], ok)


def cmd_ockham_search(args):
    from .ockham import alter_ego_search, build_Dm, ockham_algebra_of
    m1 = ockham_algebra_of(build_Dm(args.m), name=f"S{args.m}")
    found = alter_ego_search(m1, args.m, args.mode)
    report = {"m": args.m, "mode": args.mode, "found": len(found),
              "alter_egos": [r.to_dict() for r in found]}
    return emit(args, report, [f"m={args.m}"], bool(found))


def cmd_topswap(args):
    from .topswap import PairedContext, topswap_scan
    pair = load_pair(args.pair)
    rep = topswap_scan(PairedContext(pair), args.scan_bound)
    return emit(args, rep, [args.pair], rep["holds"])


def cmd_suite(args):
    from .acceptance import run_all
    results = run_all(quick=args.quick)
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    report = {"quick": args.quick, "passed": ok,
              "criteria": [{k: v for k, v in r.to_dict().items() if k != "detail"}
                           for r in results]}
    return emit(args, report, [], ok)


def cmd_list(args):
    return emit(args, {"structures": structure_names(), "pairs": pair_names()}, [])


# -- parser -----------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="dualforge", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.set_defaults(fn=fn)
        return p

    p = add("hom", cmd_hom, "count or list homomorphisms")
    p.add_argument("--dom", required=True)
    p.add_argument("--cod", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--count", action="store_true", help="print only the count (default)")
    g.add_argument("--list", action="store_true", help="also list the homomorphisms")
    p.add_argument("--budget", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--manifest", action="store_true", help="embed the run manifest")

    p = add("dualize", cmd_dualize, "compute D(A)")
    p.add_argument("--alg", required=True)
    p.add_argument("--pair", required=True)

    p = add("check-duality", cmd_check_duality, "finite-level duality scan")
    p.add_argument("--pair", required=True)
    p.add_argument("--power-bound", type=int, default=2)
    p.add_argument("--alg", help="check a single structure instead of scanning")

    p = add("natext", cmd_natext, "natural extension of a presentation")
    p.add_argument("--pres", required=True)
    p.add_argument("--pair")
    p.add_argument("--crosscheck", action="store_true")

    p = add("nachbin", cmd_nachbin, "order-compactification of a finite poset")
    p.add_argument("--poset", required=True)

    p = add("stonecech", cmd_stonecech, "dual of the powerset algebra of an n-set")
    p.add_argument("--n", type=int, required=True)

    p = add("filt", cmd_filt, "filter semilattice")
    p.add_argument("--slat", required=True)
    p.add_argument("--double-check", action="store_true")

    p = add("b0", cmd_b0, "Bohr compactification claims for a presentation")
    p.add_argument("--pres", required=True)
    p.add_argument("--class", dest="cls", required=True)

    p = add("ockham", cmd_ockham, "build D_m and S_m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--emit-algebra")

    p = add("ockham-search", cmd_ockham_search, "search alter egos of S_m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--mode", choices=["partial", "quasi", "both"], default="partial")

    p = add("topswap", cmd_topswap, "commuting-square scan")
    p.add_argument("--pair", required=True)
    p.add_argument("--scan-bound", type=int, default=2)

    p = add("suite", cmd_suite, "run the acceptance suite")
    p.add_argument("--quick", action="store_true")

    add("list-builtins", cmd_list, "list builtin structures and pairs")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.fn(args)
    except (UsageError, DualforgeError, KeyError, ValueError) as exc:
        print(f"dualforge {args.cmd}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except MemoryError:
        print(f"dualforge {args.cmd}: out of memory", file=sys.stderr)
        return 2


run = main

if __name__ == "__main__":
    sys.exit(main())
