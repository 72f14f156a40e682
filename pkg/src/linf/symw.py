"""Monomials, Koszul signs and the unshuffle coproduct of the reduced S(W).

A monomial is an exponent tuple indexed by the global basis order of its
space.  Its canonical word lists basis vectors in that order with
multiplicity; every sign below is taken relative to canonical words.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterator, Sequence

from linf.gspace import ODD, GradedSpace, Parity

Monomial = tuple[int, ...]


class MonomialError(ValueError):
    pass


def degree(m: Monomial) -> int:
    return sum(m)


def mono_factorial(m: Monomial) -> int:
    out = 1
    for k in m:
        out *= factorial(k)
    return out


def mono_parity(space: GradedSpace, m: Monomial) -> Parity:
    n_even = len(space.even_basis)
    return Parity(sum(m[n_even:]) % 2)


def check_monomial(space: GradedSpace, m: Monomial) -> Monomial:
    m = tuple(m)
    if len(m) != space.dim:
        raise MonomialError(f"monomial {m} has wrong length for a {space} space")
    if any(k < 0 for k in m):
        raise MonomialError("negative exponent")
    n_even = len(space.even_basis)
    if any(k > 1 for k in m[n_even:]):
        raise MonomialError("odd basis vector squared")
    if sum(m) < 1:
        raise MonomialError("the reduced symmetric algebra has no degree-0 part")
    return m


def unit_monomial(space: GradedSpace, i: int) -> Monomial:
    return tuple(1 if j == i else 0 for j in range(space.dim))


def word(m: Monomial) -> list[int]:
    """Canonical word of a monomial as a list of basis indices."""
    return [i for i, k in enumerate(m) for _ in range(k)]


def _compositions(total: int, caps: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if not caps:
        if total == 0:
            yield ()
        return
    head, rest = caps[0], caps[1:]
    for k in range(min(head, total), -1, -1):
        for tail in _compositions(total - k, rest):
            yield (k,) + tail


@lru_cache(maxsize=None)
def enumerate_monomials(space: GradedSpace, n: int) -> tuple[Monomial, ...]:
    """All degree-n monomials, graded-lexicographic in basis order.

    For a 1|1 space this yields (e^n, e^(n-1) f).
    """
    if n < 1:
        raise MonomialError("degree must be at least 1")
    m_even, n_odd = space.dims
    caps = [n] * m_even + [1] * n_odd
    return tuple(_compositions(n, caps))


def unshuffles(k: int, n: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Unshuffles of type (k, n-k) as (left, right) 1-based index blocks."""
    if k < 0 or k > n:
        raise ValueError(f"no unshuffles of type ({k}, {n - k})")
    full = range(1, n + 1)
    out = []
    for left in itertools.combinations(full, k):
        right = tuple(i for i in full if i not in left)
        out.append((left, right))
    return out


def koszul_sign(parities: Sequence[Parity], perm: Sequence[int]) -> int:
    """Sign e with w_perm(1) ... w_perm(n) = e * w_1 ... w_n.

    ``perm`` is 1-based; an unshuffle may be passed as (left, right).
    """
    if len(perm) == 2 and all(isinstance(p, (tuple, list)) for p in perm):
        perm = tuple(perm[0]) + tuple(perm[1])
    n = len(parities)
    if sorted(perm) != list(range(1, n + 1)):
        raise IndexError(f"{perm} is not a permutation of 1..{n}")
    sign = 1
    for a in range(n):
        for b in range(a + 1, n):
            i, j = perm[a], perm[b]
            if i > j and parities[i - 1] == ODD and parities[j - 1] == ODD:
                sign = -sign
    return sign


def _odd_indices(space: GradedSpace, m: Monomial) -> list[int]:
    n_even = len(space.even_basis)
    return [i for i in range(n_even, space.dim) if m[i]]


def split_sign(space: GradedSpace, m: Monomial, b: Monomial) -> int:
    """Koszul sign of moving the letters of b to the front of m's word."""
    n_even = len(space.even_basis)
    sign = 1
    passed = 0  # odd letters of the complement seen so far
    for i in range(n_even, space.dim):
        if not m[i]:
            continue
        if b[i]:
            if passed % 2:
                sign = -sign
        else:
            passed += 1
    return sign


def monomial_product(space: GradedSpace, a: Monomial, b: Monomial) -> tuple[int, Monomial] | None:
    """Product a*b in canonical form with its sign, or None when zero."""
    n_even = len(space.even_basis)
    inversions = 0
    for j in range(n_even, space.dim):
        if not b[j]:
            continue
        if a[j]:
            return None
        inversions += sum(a[i] for i in range(j + 1, space.dim))
    prod = tuple(x + y for x, y in zip(a, b))
    return (-1 if inversions % 2 else 1), prod


def sub_monomials(m: Monomial, k: int) -> Iterator[Monomial]:
    """Sub-multisets of m of total degree k."""
    yield from _compositions(k, m)


def split_terms(space: GradedSpace, m: Monomial, k: int) -> Iterator[tuple[int, Monomial, Monomial]]:
    """Grouped unshuffles of m's word of type (k, n-k).

    Yields (signed multiplicity, first block, second block); the
    multiplicity counts positions of repeated even letters.
    """
    for b in sub_monomials(m, k):
        c = tuple(x - y for x, y in zip(m, b))
        mult = 1
        for x, y in zip(m, b):
            mult *= comb(x, y)
        yield split_sign(space, m, b) * mult, b, c


def coproduct(space: GradedSpace, m: Monomial) -> list[tuple[Fraction, Monomial, Monomial]]:
    """Reduced coproduct; degree-1 monomials give the empty list."""
    n = degree(m)
    out = []
    for k in range(1, n):
        for coeff, b, c in split_terms(space, m, k):
            out.append((Fraction(coeff), b, c))
    return out


def format_monomial(space: GradedSpace, m: Monomial) -> str:
    parts = []
    for name, k in zip(space.names, m):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return " ".join(parts)
