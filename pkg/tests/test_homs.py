import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualforge.errors import BudgetExceeded, SignatureMismatch
from dualforge.homs import (HomSearchConfig, brute_force_homs, count_homs, enumerate_automorphisms,
                            enumerate_embeddings, enumerate_homs, is_homomorphism)
from dualforge.library import builtin, chain_dl, poset_from_pairs, two_dl, zn
from dualforge.structure import Hom, Structure, power


def test_constant_map_to_idempotent_point():
    s = builtin("2slat")
    assert is_homomorphism([1, 1], s, s)[0]          # 1 is idempotent and the constant
    assert not is_homomorphism([0, 0], s, s)[0]      # top must go to top


def test_order_reversal_violation():
    c = builtin("2chain")
    ok, v = is_homomorphism([1, 0], c, c)
    assert not ok
    assert v.kind == "rel" and v.args == (0, 1)


def test_projections_of_diamond():
    d, m = power(two_dl(), 2), two_dl()
    assert is_homomorphism([0, 0, 1, 1], d, m)[0]
    assert is_homomorphism([0, 1, 0, 1], d, m)[0]


@pytest.mark.parametrize("a, b, expect", [
    ("2chain", "2chain", [[0, 0], [0, 1], [1, 1]]),
    ("2antichain", "2chain", [[0, 0], [0, 1], [1, 0], [1, 1]]),
    ("diamond", "2dl", [[0, 0, 1, 1], [0, 1, 0, 1]]),
])
def test_hom_examples(a, b, expect):
    assert enumerate_homs(builtin(a), builtin(b)).as_lists() == expect


def test_three_chain_dl_has_two_homs():
    assert count_homs(chain_dl(3), two_dl()) == 2


def test_automorphisms_and_embeddings():
    assert len(enumerate_automorphisms(builtin("2antichain"))) == 2
    assert len(enumerate_automorphisms(builtin("2chain"))) == 1
    assert len(enumerate_embeddings(builtin("2chain"), builtin("3chain"))) == 3


def test_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        enumerate_homs(builtin("2dl"), builtin("2poset"))


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        enumerate_homs(builtin("z6"), builtin("z6"), HomSearchConfig(budget=2))


def test_empty_domain_has_one_map():
    empty = Structure.build(0, rels={"le": (2, [])})
    assert count_homs(empty, builtin("2chain")) == 1


def test_injective_into_smaller_is_empty():
    assert len(enumerate_embeddings(builtin("3chain"), builtin("2chain"))) == 0


@pytest.mark.parametrize("a, b", [("z6", "z3"), ("S3", "S1"), ("3dl", "diamond"),
                                  ("D3", "D5"), ("unary3-kleene", "unary3-usual")])
def test_engine_matches_oracle(a, b):
    a, b = builtin(a), builtin(b)
    for order in ("degree", "index"):
        e = enumerate_homs(a, b, HomSearchConfig(var_order=order))
        assert np.array_equal(e.maps, brute_force_homs(a, b).maps)
    assert np.array_equal(enumerate_embeddings(a, b).maps, brute_force_homs(a, b, True).maps)


@pytest.mark.parametrize("a, b", [("z6", "z6"), ("S3", "S3"), ("D5", "D5")])
def test_parallel_is_deterministic(a, b):
    a, b = builtin(a), builtin(b)
    serial = enumerate_homs(a, b).maps
    for w in (1, 2, 3, 8):
        par = enumerate_homs(a, b, HomSearchConfig(parallel=True, workers=w)).maps
        assert par.tobytes() == serial.tobytes()


def test_composition_of_homs_is_hom():
    a, b, c = builtin("S5"), builtin("S3"), builtin("S1")
    for f in enumerate_homs(a, b):
        for g in enumerate_homs(b, c):
            h = g.compose(f)
            assert is_homomorphism(h.map, a, c)[0]


@st.composite
def small_posets(draw):
    n = draw(st.integers(1, 4))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=5))
    # transitive closure of a relation on 0..n-1 that only goes upward in index
    strict = {(min(x, y), max(x, y)) for x, y in pairs if x != y}
    return poset_from_pairs(n, sorted(strict))


@settings(max_examples=60, deadline=None)
@given(small_posets(), small_posets())
def test_random_posets_match_oracle(a, b):
    assert np.array_equal(enumerate_homs(a, b).maps, brute_force_homs(a, b).maps)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6))
def test_group_hom_count(n, m):
    # homomorphisms Z_n -> Z_m are determined by the image of 1, which has order dividing n
    assert count_homs(zn(n), zn(m)) == np.gcd(n, m)
