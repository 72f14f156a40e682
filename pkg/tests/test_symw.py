import random
from collections import Counter
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from linf import build_space
from linf.gspace import EVEN, ODD
from linf.symw import (
    MonomialError,
    check_monomial,
    coproduct,
    enumerate_monomials,
    koszul_sign,
    monomial_product,
    unshuffles,
)
from oracles import inversion_sign, permutation_count_unshuffles

SPACES = [
    build_space(["e"], []),
    build_space([], ["f"]),
    build_space(["e"], ["f"]),
    build_space([], ["f1", "f2"]),
    build_space(["e1", "e2"], []),
    build_space(["e"], ["f1", "f2"]),
    build_space(["e1", "e2"], ["f"]),
    build_space([], ["f1", "f2", "f3"]),
]


@pytest.mark.parametrize("k", range(1, 7))
def test_mixed_line_monomials(mixed, k):
    assert enumerate_monomials(mixed, k) == ((k, 0), (k - 1, 1))


def test_odd_plane_monomials(odd_plane):
    assert enumerate_monomials(odd_plane, 2) == ((1, 1),)
    assert enumerate_monomials(odd_plane, 3) == ()


def test_degree_zero_rejected(mixed):
    with pytest.raises(MonomialError):
        enumerate_monomials(mixed, 0)


def test_odd_square_rejected(mixed):
    with pytest.raises(MonomialError, match="odd basis vector squared"):
        check_monomial(mixed, (0, 2))


@pytest.mark.parametrize("n", range(0, 11))
def test_unshuffle_counts(n):
    for k in range(n + 1):
        sh = unshuffles(k, n)
        assert len(sh) == comb(n, k)
        for left, right in sh:
            assert sorted(left + right) == list(range(1, n + 1))
            assert list(left) == sorted(left) and list(right) == sorted(right)


@pytest.mark.parametrize("k,n", [(2, 3), (1, 3), (2, 4), (3, 5)])
def test_unshuffle_count_matches_permutation_filter(k, n):
    assert len(unshuffles(k, n)) == permutation_count_unshuffles(k, n)


def test_unshuffle_errors():
    with pytest.raises(ValueError):
        unshuffles(4, 3)
    with pytest.raises(ValueError):
        unshuffles(-1, 3)


@pytest.mark.parametrize("parities,perm,want", [
    ([EVEN] * 4, [4, 2, 3, 1], 1),
    ([ODD, ODD], [2, 1], -1),
    ([ODD, ODD, ODD], [3, 2, 1], -1),
    ([ODD, EVEN, ODD], [3, 2, 1], -1),
])
def test_koszul_examples(parities, perm, want):
    assert koszul_sign(parities, perm) == want


def test_koszul_index_error():
    with pytest.raises(IndexError):
        koszul_sign([ODD, ODD], [1, 5])


@settings(max_examples=200)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.lists(st.sampled_from([EVEN, ODD]), min_size=n, max_size=n),
    st.permutations(range(1, n + 1)),
    st.permutations(range(1, n + 1)),
)))
def test_koszul_multiplicative(data):
    par, s, t = data
    moved = [par[i - 1] for i in s]
    both = [s[i - 1] for i in t]
    assert koszul_sign(par, both) == koszul_sign(par, s) * koszul_sign(moved, t)
    assert koszul_sign(par, s) == inversion_sign([int(p) for p in par], [i - 1 for i in s])


def test_products(mixed, odd_plane):
    assert monomial_product(mixed, (0, 1), (0, 1)) is None
    assert monomial_product(mixed, (2, 0), (3, 0)) == (1, (5, 0))
    assert monomial_product(odd_plane, (0, 1), (1, 0)) == (-1, (1, 1))


def _monos(W, top=3):
    return [m for k in range(1, top + 1) for m in enumerate_monomials(W, k)]


def _parity(W, m):
    return sum(k for i, k in enumerate(m) if W.parity(i) == ODD) % 2


@pytest.mark.parametrize("W", SPACES, ids=str)
def test_product_graded_commutative(W):
    for a in _monos(W):
        for b in _monos(W):
            ab, ba = monomial_product(W, a, b), monomial_product(W, b, a)
            assert (ab is None) == (ba is None)
            if ab is not None:
                assert ab[1] == ba[1]
                assert ab[0] == (-1) ** (_parity(W, a) * _parity(W, b)) * ba[0]


def test_coproduct_examples(odd_plane, mixed):
    assert coproduct(odd_plane, (1, 1)) == [(1, (1, 0), (0, 1)), (-1, (0, 1), (1, 0))]
    assert coproduct(mixed, (1, 0)) == []
    assert coproduct(mixed, (2, 0)) == [(2, (1, 0), (1, 0))]


def _iterate(W, m, left):
    out = Counter()
    for c, a, b in coproduct(W, m):
        if left:
            for c2, a1, a2 in coproduct(W, a):
                out[(a1, a2, b)] += c * c2
        else:
            for c2, b1, b2 in coproduct(W, b):
                # moving the coproduct past a costs the Koszul sign of a against nothing: it is even
                out[(a, b1, b2)] += c * c2
    return {k: v for k, v in out.items() if v}


@pytest.mark.parametrize("W", [W for W in SPACES if W.dim <= 3], ids=str)
def test_coassociative(W):
    for m in _monos(W, 5):
        assert _iterate(W, m, True) == _iterate(W, m, False)


def test_random_words_sort_consistently():
    rng = random.Random(3)
    W = build_space(["e"], ["f1", "f2", "f3"])
    for _ in range(50):
        letters = rng.sample(range(4), 3)
        a = tuple(1 if i == letters[0] else 0 for i in range(4))
        b = tuple(1 if i == letters[1] else 0 for i in range(4))
        c = tuple(1 if i == letters[2] else 0 for i in range(4))
        ab = monomial_product(W, a, b)
        left = monomial_product(W, ab[1], c)
        bc = monomial_product(W, b, c)
        right = monomial_product(W, a, bc[1])
        assert ab[0] * left[0] == bc[0] * right[0]
        assert left[1] == right[1]
