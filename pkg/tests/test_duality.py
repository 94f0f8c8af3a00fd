import numpy as np
import pytest

from dualforge.duality import (AlterEgoPair, check_compatible, check_duality_at,
                               compatibility_symmetric, dualize, evaluation, finite_level_scan,
                               full_duality_check_at, lattice_based_alter_ego, second_dual,
                               second_dual_rows)
from dualforge.errors import (CarrierMismatch, NotALattice, NotCompatible, NotInPrevariety,
                              SignatureMismatch)
from dualforge.homs import brute_force_homs
from dualforge.library import (PAIR_BOUNDS, builtin, builtin_pair, chain_dl, chain3_lattice_ops,
                               implication_binary_alter_ego, pair_names, posets_up_to_iso,
                               semilattices_up_to_iso, two_dl)
from dualforge.natext import Presentation
from dualforge.structure import Structure, isomorphic, power, structure_from_rows


def test_priestley_compatibility_both_ways():
    assert check_compatible(builtin("2dl"), builtin("2poset")).ok
    assert check_compatible(builtin("2poset"), builtin("2dl")).ok
    assert compatibility_symmetric(builtin("2dl"), builtin("2poset"))


def test_semilattice_with_bad_relation():
    rep = check_compatible(builtin("2slat"), Structure.build(2, rels={"r": (2, [(0, 1)])}))
    assert not rep.ok
    assert any("(1, 1) missing" in f for f in rep.failures)


def test_semilattice_self_compatible():
    s = builtin("2slat")
    assert check_compatible(s, s).ok and compatibility_symmetric(s, s)


def test_incompatible_both_ways():
    # the constant 1 is not fixed by negation, so neither side respects the other
    a = Structure.build(3, {"c": 1})
    b = builtin("z3")
    assert not check_compatible(a, b).ok and not check_compatible(b, a).ok


def test_carrier_mismatch():
    with pytest.raises(CarrierMismatch):
        check_compatible(builtin("2dl"), builtin("3chain"))


def test_certify_rejects():
    with pytest.raises(NotCompatible):
        AlterEgoPair.certify(builtin("implication"),
                             Structure.build(2, rels={"le": (2, [(0, 0), (0, 1), (1, 1)])}))


@pytest.mark.parametrize("name", pair_names())
def test_builtin_pairs_certified(name):
    assert builtin_pair(name).certificate.ok


def test_dualize_three_chain():
    d = dualize(chain_dl(3), builtin_pair("priestley"))
    assert d.structure.size == 2
    assert isomorphic(d.structure.renamed(""), builtin("2chain").renamed("")) is not None


def test_dualize_diamond_is_antichain():
    d = dualize(power(two_dl(), 2), builtin_pair("priestley"))
    assert d.maps.tolist() == [[0, 0, 1, 1], [0, 1, 0, 1]]
    assert d.structure.rels["le"] == {(0, 0), (1, 1)}


def test_dualize_four_element_ba():
    d = dualize(power(builtin("2ba"), 2), builtin_pair("stone"))
    assert d.structure.size == 2
    # oracle: brute force over the 16 maps
    assert len(brute_force_homs(power(builtin("2ba"), 2), builtin("2ba"))) == 2


def _m3():
    # 0 < a, b, c < 1 with a, b, c pairwise incomparable
    n = 5
    leq = lambda x, y: x == y or x == 0 or y == 4
    join = [[y if leq(x, y) else x if leq(y, x) else 4 for y in range(n)] for x in range(n)]
    meet = [[x if leq(x, y) else y if leq(y, x) else 0 for y in range(n)] for x in range(n)]
    return Structure.build(n, {"join": join, "meet": meet, "bot": 0, "top": 4}, name="M3")


def test_dualize_rejects_non_member():
    # the non-distributive M3 has only the two trivial homs into 2
    with pytest.raises(NotInPrevariety):
        dualize(_m3(), builtin_pair("priestley"))
    # while an antichain is a subposet of a power of the 2-chain
    assert dualize(builtin("2antichain"), builtin_pair("banaschewski")).homs.count == 4


def test_dualize_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        dualize(builtin("2poset"), builtin_pair("priestley"))


@pytest.mark.parametrize("alg, pair, size", [(chain_dl(3), "priestley", 3),
                                              (builtin("2ba"), "stone", 2),
                                              (power(two_dl(), 2), "priestley", 4)])
def test_second_dual_sizes(alg, pair, size):
    assert second_dual(alg, builtin_pair(pair)).size == size


def test_second_dual_rows_match_oracle():
    # E(D(A)) computed by the engine and by brute force on the dual
    pair = builtin_pair("priestley")
    for a in [chain_dl(3), power(two_dl(), 2), builtin("diamond")]:
        d = dualize(a, pair)
        assert np.array_equal(second_dual_rows(d, pair),
                              brute_force_homs(d.structure, pair.m2).maps)


def test_evaluation_is_iso_on_antichain():
    v = check_duality_at(builtin("2antichain"), builtin_pair("banaschewski"))
    assert v.holds and v.iso.is_injective()
    e = evaluation(builtin("2antichain"), builtin_pair("banaschewski"))
    assert e.map == v.iso.map


def test_singleton_holds():
    one = structure_from_rows(two_dl(), [[0], [1]]).renamed("2")
    assert check_duality_at(one, builtin_pair("priestley")).holds
    single = Structure.build(1, {"meet": [[0]], "top": 0})
    assert check_duality_at(single, builtin_pair("hms")).holds


def test_implication_ghost():
    # the binary compatible relations dualise up to M^2 but not M^3
    pair = implication_binary_alter_ego()
    assert finite_level_scan(pair, 2).holds
    rep = finite_level_scan(pair, 3)
    assert not rep.holds
    bad = [c for c in rep.classes if not c["holds"]]
    assert bad[0]["size"] == 7 and bad[0]["ghost"] == [0, 0, 0, 1]


def test_implication_ghost_is_real():
    pair = implication_binary_alter_ego()
    m = pair.m1
    rows = [r for r in np.indices((2, 2, 2)).reshape(3, -1).T.tolist() if r != [0, 0, 0]]
    a = Presentation(m, 3, tuple(map(tuple, rows))).materialize()
    assert a.size == 7
    v = check_duality_at(a, pair)
    assert not v.holds
    # oracle: the ghost is a hom D(A) -> M2 that is not an evaluation
    d = dualize(a, pair)
    ed = brute_force_homs(d.structure, pair.m2).maps.tolist()
    evals = d.maps.T.tolist()
    assert list(v.ghost) in ed and list(v.ghost) not in evals


def test_every_dl_in_cube_dualises():
    rep = finite_level_scan(builtin_pair("priestley"), 3)
    assert rep.holds


@pytest.mark.parametrize("p", [p for n in range(1, 5) for p in posets_up_to_iso(n)],
                         ids=lambda p: p.name)
def test_full_duality_on_posets(p):
    assert full_duality_check_at(p, builtin_pair("priestley")).holds
    assert check_duality_at(p, builtin_pair("banaschewski")).holds


def test_full_duality_semilattice():
    assert full_duality_check_at(builtin("2slat"), builtin_pair("hms")).holds


@pytest.mark.parametrize("name, bound", [("priestley", 2), ("stone", 3), ("hms", 2)])
def test_scan_examples(name, bound):
    rep = finite_level_scan(builtin_pair(name), bound)
    assert rep.holds and len(rep.classes) > 0


@pytest.mark.parametrize("name", ["unary3-usual", "unary3-kleene", "unary3-stone"])
def test_lattice_based_pairs_scan(name):
    assert finite_level_scan(builtin_pair(name), PAIR_BOUNDS[name]).holds


def test_lattice_ops_of_two_dl_are_not_self_homs():
    # join(meet(0,1), meet(1,0)) = 0 but meet(join(0,1), join(1,0)) = 1
    join, meet = two_dl().ops["join"], two_dl().ops["meet"]
    with pytest.raises(NotCompatible):
        lattice_based_alter_ego(two_dl(), join, meet)


def test_lattice_based_on_semilattice_reduct():
    # both lattice operations are monotone, so they are homs of the 2-element poset
    join, meet = two_dl().ops["join"], two_dl().ops["meet"]
    pair = lattice_based_alter_ego(builtin("2poset"), join, meet)
    assert pair.lazy_arity == 4
    assert finite_level_scan(pair, 2).holds


def test_not_a_lattice():
    join, meet = chain3_lattice_ops()
    with pytest.raises(NotALattice):
        lattice_based_alter_ego(builtin("unary3-usual"), join, join)


@pytest.mark.parametrize("s", [s for n in range(1, 6) for s in semilattices_up_to_iso(n)],
                         ids=lambda s: s.name)
def test_semilattice_second_dual(s):
    assert isomorphic(s.renamed(""), second_dual(s, builtin_pair("hms")).renamed("")) is not None
