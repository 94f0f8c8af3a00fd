import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualforge.errors import EmptyGeneration, StructureError
from dualforge.homs import brute_force_homs, enumerate_homs
from dualforge.library import builtin, builtin_pair, zn
from dualforge.natext import (Presentation, crosscheck_equivalence, functoriality_check,
                              generator_independence_check, hom_set_of, is_locally_evaluation,
                              natural_extension_definitional, natural_extension_via_alter_ego,
                              preserves_r_F, r_F, rF_preserving_rows)
from dualforge.structure import Hom, power_rows

CHAIN3 = Presentation(builtin("2dl"), 2, ((0, 1),), name="3-chain")
DIAMOND_SLAT = Presentation(builtin("2slat"), 2, ((0, 1), (1, 0)), name="diamond")


def test_hom_set_of_three_chain():
    X = hom_set_of(CHAIN3)
    # the two coordinate projections, restricted to {(0,0), (0,1), (1,1)}
    assert X.as_lists() == [[0, 0, 1], [0, 1, 1]]
    assert np.array_equal(X.maps, brute_force_homs(CHAIN3.materialize(), builtin("2dl")).maps)


def test_hom_set_of_full_power_contains_projections():
    m = builtin("z3")
    p = Presentation(m, 2, tuple(map(tuple, power_rows(3, 2).tolist())))
    X = {tuple(r) for r in hom_set_of(p).as_lists()}
    rows = p.rows
    for j in range(2):
        assert tuple(rows[:, j].tolist()) in X


def test_hom_set_of_diamond_semilattice():
    assert DIAMOND_SLAT.materialize().size == 4
    assert hom_set_of(DIAMOND_SLAT).count == 4


@pytest.mark.parametrize("p", [CHAIN3, DIAMOND_SLAT,
                               Presentation(builtin("z3"), 1, ((0,), (1,), (2,)))])
def test_definitional_iso_via_evaluation(p):
    n = natural_extension_definitional(p)
    assert n.size == p.materialize().size
    assert n.is_iso_via_evaluation()


def test_locally_evaluation_examples():
    X = hom_set_of(CHAIN3)
    for a in range(3):
        assert is_locally_evaluation(X.maps[:, a], CHAIN3, homs=X)
    # (1, 0): first hom gives 1 while the second gives 0, which no element does
    assert not is_locally_evaluation([1, 0], CHAIN3, homs=X)
    assert not is_locally_evaluation([1, 0], CHAIN3, mode="all", homs=X)
    # the constant 1 is the evaluation at the top
    assert is_locally_evaluation([1, 1], CHAIN3, mode="all", homs=X)


def test_full_and_all_modes_agree():
    for p in [CHAIN3, DIAMOND_SLAT, Presentation(builtin("2poset"), 2, ((0, 1), (1, 0)))]:
        X = hom_set_of(p)
        for b in power_rows(p.m1.size, X.count):
            assert is_locally_evaluation(b, p, "full", X) == is_locally_evaluation(b, p, "all", X)


def test_r_F_is_generated_relation():
    X = hom_set_of(CHAIN3)
    assert r_F(CHAIN3, [0, 1], X).tolist() == [[0, 0], [0, 1], [1, 1]]
    assert preserves_r_F([0, 1], CHAIN3, [0, 1], X)
    assert not preserves_r_F([1, 0], CHAIN3, [0, 1], X)


@pytest.mark.parametrize("p, pair, size", [(CHAIN3, "priestley", 3),
                                            (Presentation(builtin("2dl"), 2, ((0, 1), (1, 0))),
                                             "priestley", 4),
                                            (DIAMOND_SLAT, "hms", 4)])
def test_alter_ego_route(p, pair, size):
    n = natural_extension_via_alter_ego(p, builtin_pair(pair))
    assert n.size == size
    assert n.row_set() == natural_extension_definitional(p).row_set()


@pytest.mark.parametrize("k", [1, 2, 3])
def test_boolean_natural_extension_size(k):
    # a finite Boolean algebra with a atoms has 2^a elements in its extension
    gens = tuple(tuple(int(i == j) for i in range(k)) for j in range(k))
    p = Presentation(builtin("2ba"), k, gens)
    n = natural_extension_via_alter_ego(p, builtin_pair("stone"))
    assert n.size == 2 ** k


@pytest.mark.parametrize("p, pair", [(CHAIN3, "priestley"), (DIAMOND_SLAT, "hms"),
                                     (Presentation(builtin("2slat"), 1, ((0,), (1,))), "hms")])
def test_four_routes_agree(p, pair):
    rep = crosscheck_equivalence(p, builtin_pair(pair))
    assert rep.agree
    assert len(set(rep.sizes.values())) == 1


def test_all_mode_crosscheck():
    rep = crosscheck_equivalence(DIAMOND_SLAT, builtin_pair("hms"), local_mode="all")
    assert rep.agree and rep.sizes["locally-evaluation"] == 4


def test_rF_route_excludes_non_evaluations():
    X = hom_set_of(CHAIN3)
    keep = rF_preserving_rows(CHAIN3, power_rows(2, 2), X)
    assert keep.tolist() == [[0, 0], [0, 1], [1, 1]]


def test_generator_independence():
    q = Presentation(builtin("2dl"), 2, ((0, 1), (1, 1), (0, 0)))
    assert generator_independence_check(CHAIN3, q)
    with pytest.raises(StructureError):
        generator_independence_check(CHAIN3, DIAMOND_SLAT)


def test_functoriality_on_z_homs():
    pa = Presentation(zn(6), 1, ((1,),))
    pb = Presentation(zn(6), 1, ((2,),))
    a, b = pa.materialize(), pb.materialize()
    for h in enumerate_homs(a, b):
        assert functoriality_check(h, pa, pb)


def test_bad_generator():
    with pytest.raises(StructureError):
        Presentation(builtin("2dl"), 2, ((0, 2),))


def test_empty_generation_rejected():
    with pytest.raises(EmptyGeneration):
        _ = Presentation(builtin("2poset"), 2, ()).rows


def test_presentation_dict_round_trip():
    d = CHAIN3.to_dict(ambient="builtin:2dl")
    assert Presentation.from_dict(d).rows.tolist() == CHAIN3.rows.tolist()
    inline = Presentation.from_dict(CHAIN3.to_dict())
    assert inline.m1 == CHAIN3.m1


@settings(max_examples=25, deadline=None)
@given(st.sets(st.sampled_from([tuple(r) for r in power_rows(3, 2).tolist()]), min_size=1))
def test_z3_routes_agree(gens):
    p = Presentation(zn(3), 2, tuple(sorted(gens)))
    rep = crosscheck_equivalence(p, builtin_pair("z3"))
    assert rep.agree
    assert natural_extension_definitional(p).is_iso_via_evaluation()


@settings(max_examples=25, deadline=None)
@given(st.sets(st.sampled_from([tuple(r) for r in power_rows(2, 3).tolist()]), min_size=1))
def test_poset_presentations_hom_set_matches_oracle(gens):
    p = Presentation(builtin("2poset"), 3, tuple(sorted(gens)))
    a = p.materialize()
    assert np.array_equal(hom_set_of(p).maps, brute_force_homs(a, builtin("2poset")).maps)
