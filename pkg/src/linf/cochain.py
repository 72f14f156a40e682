"""Cochains L = Hom(S(W), W), the coderivation lift and the L-infinity bracket.

A cochain is stored in factorial-normalised coordinates: the coefficient c
of the key (m, o) stands for c times the basis cochain sending m to m!*o,
where m! is the product of the factorials of the exponents of m.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Union

from linf.gspace import EVEN, ODD, GradedSpace, Parity, SpaceError, scalar
from linf.symw import (
    Monomial,
    check_monomial,
    degree,
    enumerate_monomials,
    format_monomial,
    mono_factorial,
    mono_parity,
    monomial_product,
    split_terms,
    unit_monomial,
)

Key = tuple[Monomial, int]
Vector = dict[int, Fraction]
MonomialSum = dict[Monomial, Fraction]


class CochainError(ValueError):
    pass


@dataclass(frozen=True)
class ArityWindow:
    min_arity: int = 1
    max_arity: int = 6

    def __post_init__(self) -> None:
        if self.min_arity < 1 or self.max_arity < self.min_arity:
            raise CochainError(f"bad arity window {self.min_arity}:{self.max_arity}")

    def __contains__(self, arity: int) -> bool:
        return self.min_arity <= arity <= self.max_arity

    @classmethod
    def parse(cls, text: str) -> ArityWindow:
        lo, sep, hi = str(text).partition(":")
        if not sep:
            raise CochainError(f"window must look like A:B, got {text!r}")
        try:
            return cls(int(lo), int(hi))
        except ValueError:
            raise CochainError(f"window must look like A:B, got {text!r}") from None

    def __str__(self) -> str:
        return f"{self.min_arity}:{self.max_arity}"


def key_parity(space: GradedSpace, key: Key) -> Parity:
    m, o = key
    return space.parity(o) + mono_parity(space, m)


def canonical_index(space: GradedSpace, key: Key) -> tuple[int, int, int]:
    """Sort key: arity, then monomial order, then output basis index."""
    m, o = key
    n = degree(m)
    return n, enumerate_monomials(space, n).index(m), o


def cochain_basis(space: GradedSpace, arity: int, parity: Parity | None = None) -> list[Key]:
    out = []
    for m in enumerate_monomials(space, arity):
        for o in range(space.dim):
            if parity is None or key_parity(space, (m, o)) == parity:
                out.append((m, o))
    return out


class Cochain:
    """A finite sum of basis cochains over one space.  Treat as immutable."""

    __slots__ = ("space", "terms", "_parity", "_hash")

    def __init__(self, space: GradedSpace, terms: Mapping[Key, Fraction] | None = None):
        self.space = space
        self.terms: dict[Key, Fraction] = {k: Fraction(v) for k, v in (terms or {}).items() if v != 0}
        parities = {key_parity(space, k) for k in self.terms}
        if len(parities) > 1:
            raise CochainError("cochain mixes even and odd terms")
        self._parity = parities.pop() if parities else EVEN
        self._hash = None

    @classmethod
    def zero(cls, space: GradedSpace) -> Cochain:
        return cls(space, {})

    @classmethod
    def from_values(cls, space: GradedSpace, values: Mapping[Monomial, Mapping[int, Fraction]]) -> Cochain:
        """Build from plain values phi(m) = sum_o v_o * o."""
        terms = {}
        for m, vec in values.items():
            f = mono_factorial(m)
            for o, v in vec.items():
                terms[m, o] = Fraction(v) / f
        return cls(space, terms)

    @property
    def parity(self) -> Parity:
        return self._parity

    def is_zero(self) -> bool:
        return not self.terms

    def arities(self) -> list[int]:
        return sorted({degree(m) for m, _ in self.terms})

    def arity_part(self, arity: int) -> Cochain:
        return Cochain(self.space, {k: v for k, v in self.terms.items() if degree(k[0]) == arity})

    def restrict(self, window: ArityWindow | None) -> Cochain:
        if window is None:
            return self
        return Cochain(self.space, {k: v for k, v in self.terms.items() if degree(k[0]) in window})

    def evaluate(self, m: Monomial) -> Vector:
        f = mono_factorial(m)
        return {o: c * f for (mm, o), c in self.terms.items() if mm == m}

    def items(self) -> list[tuple[Key, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: canonical_index(self.space, kv[0]))

    def _same(self, other: Cochain) -> None:
        if other.space != self.space:
            raise CochainError("cochains live over different spaces")

    def __add__(self, other: Cochain) -> Cochain:
        self._same(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Cochain(self.space, out)

    def __neg__(self) -> Cochain:
        return Cochain(self.space, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: Cochain) -> Cochain:
        return self + (-other)

    def __mul__(self, c) -> Cochain:
        c = scalar(c)
        return Cochain(self.space, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.space == other.space and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.space, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        parts = [f"{c}*[{format_monomial(self.space, m)} -> {self.space.names[o]}]" for (m, o), c in self.items()]
        return "Cochain(" + (" + ".join(parts) or "0") + ")"


def _as_monomial(space: GradedSpace, m) -> Monomial:
    if isinstance(m, Mapping):
        exps = [0] * space.dim
        for name, k in m.items():
            exps[space.index(name)] += k
        m = tuple(exps)
    return check_monomial(space, m)


def _as_output(space: GradedSpace, o: Union[int, str]) -> int:
    if isinstance(o, str):
        try:
            return space.index(o)
        except SpaceError as exc:
            raise CochainError(str(exc)) from None
    if not 0 <= o < space.dim:
        raise CochainError(f"output index {o} out of range for a {space} space")
    return o


def basis_cochain(space: GradedSpace, input, output) -> Cochain:
    """The cochain sending ``input`` to input! * output and every other monomial to 0."""
    return Cochain(space, {(_as_monomial(space, input), _as_output(space, output)): Fraction(1)})


def times_monomial(space: GradedSpace, vec: Mapping[int, Fraction], c: Monomial | None) -> MonomialSum:
    """The product v*c in S(W) of a vector with a monomial (c=None means 1)."""
    out: MonomialSum = {}
    for o, v in vec.items():
        u = unit_monomial(space, o)
        if c is None:
            out[u] = out.get(u, 0) + v
            continue
        r = monomial_product(space, u, c)
        if r is None:
            continue
        sign, prod = r
        out[prod] = out.get(prod, 0) + sign * v
    return {k: v for k, v in out.items() if v}


def tilde(phi: Cochain, m: Monomial) -> MonomialSum:
    """The coderivation lift of phi evaluated on a monomial."""
    space = phi.space
    m = check_monomial(space, m)
    n = degree(m)
    out: MonomialSum = {}
    for k in phi.arities():
        if k > n:
            break
        for coeff, b, c in split_terms(space, m, k):
            val = phi.evaluate(b)
            if not val:
                continue
            for mono, v in times_monomial(space, val, c if k < n else None).items():
                out[mono] = out.get(mono, 0) + coeff * v
    return {k: v for k, v in out.items() if v}


def apply(phi: Cochain, s: Mapping[Monomial, Fraction]) -> Vector:
    """phi extended linearly to a sum of monomials."""
    out: Vector = {}
    for m, c in s.items():
        for o, v in phi.evaluate(m).items():
            out[o] = out.get(o, 0) + c * v
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def _compose_basis(space: GradedSpace, a: Key, b: Key) -> tuple[Monomial, int, Fraction] | None:
    """(a o b~) for basis cochains: it is supported on one monomial only."""
    m1, o1 = a
    m2, o2 = b
    if m1[o2] == 0:
        return None
    rest = tuple(x - (1 if i == o2 else 0) for i, x in enumerate(m1))
    if degree(rest) == 0:
        m = m2
    else:
        r = monomial_product(space, m2, rest)
        if r is None:
            return None
        m = r[1]
    lifted = tilde(Cochain(space, {b: Fraction(1)}), m)
    v = lifted.get(m1, Fraction(0)) * mono_factorial(m1)
    if v == 0:
        return None
    return m, o1, v / mono_factorial(m)


@lru_cache(maxsize=None)
def basis_bracket(space: GradedSpace, a: Key, b: Key) -> tuple[tuple[Key, Fraction], ...]:
    """[a, b] for two basis cochains, as sorted normalised terms."""
    sign = -1 if key_parity(space, a) == ODD and key_parity(space, b) == ODD else 1
    out: dict[Key, Fraction] = {}
    ab = _compose_basis(space, a, b)
    if ab is not None:
        m, o, v = ab
        out[m, o] = out.get((m, o), 0) + v
    ba = _compose_basis(space, b, a)
    if ba is not None:
        m, o, v = ba
        out[m, o] = out.get((m, o), 0) - sign * v
    return tuple(sorted((k, v) for k, v in out.items() if v))


def bracket(a: Cochain, b: Cochain, window: ArityWindow | None = None) -> Cochain:
    """[a, b] = a o b~ - (-1)^{|a||b|} b o a~, keeping arities inside the window."""
    if a.space != b.space:
        raise CochainError("cannot bracket cochains over different spaces")
    space = a.space
    out: dict[Key, Fraction] = {}
    for ka, va in a.terms.items():
        da = degree(ka[0])
        for kb, vb in b.terms.items():
            if window is not None and da + degree(kb[0]) - 1 not in window:
                continue
            for k, v in basis_bracket(space, ka, kb):
                out[k] = out.get(k, 0) + va * vb * v
    return Cochain(space, out)


def differential(d: Cochain, phi: Cochain, window: ArityWindow | None = None) -> Cochain:
    """D(phi) = [d, phi]."""
    return bracket(d, phi, window)


@dataclass(frozen=True)
class CodifferentialCheck:
    ok: bool
    certificate: Cochain
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_codifferential(d: Cochain, window: ArityWindow | None = None) -> CodifferentialCheck:
    if d.terms and d.parity != ODD:
        return CodifferentialCheck(False, d, "not odd")
    sq = bracket(d, d, window)
    if sq.terms:
        return CodifferentialCheck(False, sq, "[d,d] does not vanish")
    return CodifferentialCheck(True, sq)


def jacobi_correspondence(d: Cochain, space: GradedSpace | None = None) -> bool:
    """Jacobi identity for the binary bracket x,y -> d(xy) on an all-odd space.

    The Jacobi sums over basis triples are compared with [d,d]/2; a
    disagreement would mean the bracket machinery is broken and raises.
    """
    space = space or d.space
    if space.even_basis:
        raise CochainError("the Jacobi correspondence is implemented for all-odd spaces")
    if d.space != space:
        raise CochainError("cochain lives over a different space")
    if any(k != 2 for k in d.arities()):
        raise CochainError("d must be concentrated in arity 2")
    half_sq = bracket(d, d) * Fraction(1, 2)
    holds = True
    for i, j, k in combinations(range(space.dim), 3):
        a, b, c = (unit_monomial(space, x) for x in (i, j, k))

        def dd(x, y, z):
            xy = monomial_product(space, x, y)
            if xy is None:
                return {}
            inner = {o: xy[0] * v for o, v in d.evaluate(xy[1]).items()}
            return apply(d, times_monomial(space, inner, z))

        total: Vector = {}
        for sign, vec in ((1, dd(a, b, c)), (1, dd(b, c, a)), (-1, dd(a, c, b))):
            for o, v in vec.items():
                total[o] = total.get(o, 0) + sign * v
        total = {o: v for o, v in total.items() if v}
        abc = tuple(x + y + z for x, y, z in zip(a, b, c))
        if total != half_sq.evaluate(abc):
            raise AssertionError(f"Jacobi sum disagrees with [d,d] on basis triple {(i, j, k)}")
        holds = holds and not total
    if holds != half_sq.is_zero():
        raise AssertionError("Jacobi identity and [d,d]=0 disagree")
    return holds
