"""Graded-commutative parameter rings K[[t]] (x) Lambda[theta], truncated.

Even generators commute with everything; odd generators anticommute and
square to zero.  A ring carries a truncation degree: products drop every
term of total degree above it, so all arithmetic is exact in
A / m^(truncation+1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence, Union

from linf.exactla import Echelon, SparseVec
from linf.gspace import EVEN, ODD, Parity, scalar

# (even exponents, odd bitmask); bit j stands for the j-th odd generator
PKey = tuple[tuple[int, ...], int]


class RingError(ValueError):
    pass


class TruncationError(RingError):
    pass


@dataclass(frozen=True)
class ParamRing:
    even: tuple[str, ...] = ()
    odd: tuple[str, ...] = ()
    truncation: int = 8

    def __post_init__(self) -> None:
        names = self.even + self.odd
        if len(set(names)) != len(names):
            raise RingError(f"generator names must be distinct: {names}")
        if self.truncation < 1:
            raise RingError("truncation degree must be positive")

    @property
    def names(self) -> tuple[str, ...]:
        return self.even + self.odd

    def with_truncation(self, truncation: int) -> ParamRing:
        return ParamRing(self.even, self.odd, truncation)

    @property
    def unit_key(self) -> PKey:
        return ((0,) * len(self.even), 0)

    def one(self) -> ParamPoly:
        return ParamPoly(self, {self.unit_key: Fraction(1)})

    def zero(self) -> ParamPoly:
        return ParamPoly(self, {})

    def const(self, c) -> ParamPoly:
        return ParamPoly(self, {self.unit_key: scalar(c)})

    def gen(self, name: str) -> ParamPoly:
        if name in self.even:
            i = self.even.index(name)
            exps = tuple(1 if j == i else 0 for j in range(len(self.even)))
            return ParamPoly(self, {(exps, 0): Fraction(1)})
        if name in self.odd:
            return ParamPoly(self, {(self.unit_key[0], 1 << self.odd.index(name)): Fraction(1)})
        raise RingError(f"unknown parameter {name!r}")

    def monomials(self, max_degree: int, min_degree: int = 0) -> list[PKey]:
        """All monomials in the given degree range, by degree then key."""
        out = []
        n_odd = len(self.odd)
        for d in range(min_degree, max_degree + 1):
            keys = []
            for k in range(0, min(d, n_odd) + 1):
                for subset in combinations(range(n_odd), k):
                    mask = sum(1 << j for j in subset)
                    for exps in _even_exps(len(self.even), d - k):
                        keys.append((exps, mask))
            out.extend(sorted(keys, key=_key_order))
        return out

    def parse(self, text: str) -> ParamPoly:
        return parse_poly(self, text)


def _even_exps(n: int, total: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        if total == 0:
            yield ()
        return
    for k in range(total, -1, -1):
        for rest in _even_exps(n - 1, total - k):
            yield (k,) + rest


def key_degree(key: PKey) -> int:
    return sum(key[0]) + bin(key[1]).count("1")


def key_parity(key: PKey) -> Parity:
    return Parity(bin(key[1]).count("1") % 2)


def _odd_bits(mask: int) -> list[int]:
    return [j for j in range(mask.bit_length()) if mask >> j & 1]


def _key_order(key: PKey):
    """Display/canonical order inside one degree: odd generators first."""
    return (key_degree(key), _odd_bits(key[1]), tuple(-e for e in key[0]))


@lru_cache(maxsize=None)
def _odd_sign(a: int, b: int) -> int:
    """Sign of theta_a * theta_b -> canonical order, for disjoint masks."""
    inversions = 0
    for j in _odd_bits(b):
        inversions += bin(a >> (j + 1)).count("1")
    return -1 if inversions % 2 else 1


def key_mul(a: PKey, b: PKey) -> tuple[int, PKey] | None:
    if a[1] & b[1]:
        return None
    exps = tuple(x + y for x, y in zip(a[0], b[0]))
    return _odd_sign(a[1], b[1]), (exps, a[1] | b[1])


class ParamPoly:
    """A truncated element of a parameter ring.  Treat as immutable."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: ParamRing, terms: Mapping[PKey, Fraction] | None = None):
        self.ring = ring
        t = ring.truncation
        self.terms: dict[PKey, Fraction] = {
            k: Fraction(v) for k, v in (terms or {}).items() if v != 0 and key_degree(k) <= t
        }
        self._hash = None

    # arithmetic -------------------------------------------------------
    def _check(self, other: ParamPoly) -> None:
        if other.ring.even != self.ring.even or other.ring.odd != self.ring.odd:
            raise RingError("polynomials live in different parameter rings")

    def _coerce(self, other) -> ParamPoly:
        if isinstance(other, ParamPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other) -> ParamPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return ParamPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> ParamPoly:
        return ParamPoly(self.ring, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> ParamPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> ParamPoly:
        return (-self) + other

    def __mul__(self, other) -> ParamPoly:
        if isinstance(other, (int, Fraction)):
            return ParamPoly(self.ring, {k: v * other for k, v in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_mul(self, other)

    def __rmul__(self, other) -> ParamPoly:
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __truediv__(self, other) -> ParamPoly:
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        other = self._coerce(other)
        return self * other.inverse()

    def __pow__(self, n: int) -> ParamPoly:
        out = self.ring.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        return self.ring.names == other.ring.names and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring.names, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    # structure --------------------------------------------------------
    def parity(self) -> Parity | None:
        """Common parity of all terms; None for the zero polynomial."""
        ps = {key_parity(k) for k in self.terms}
        if not ps:
            return None
        if len(ps) > 1:
            raise RingError(f"inhomogeneous parity in {self}")
        return ps.pop()

    def degree(self) -> int:
        return max((key_degree(k) for k in self.terms), default=-1)

    def order(self) -> int:
        """Lowest degree of a term (the m-adic order)."""
        return min((key_degree(k) for k in self.terms), default=-1)

    def part(self, degree: int) -> ParamPoly:
        return ParamPoly(self.ring, {k: v for k, v in self.terms.items() if key_degree(k) == degree})

    def truncate(self, degree: int) -> ParamPoly:
        return ParamPoly(self.ring, {k: v for k, v in self.terms.items() if key_degree(k) <= degree})

    def retruncate(self, ring: ParamRing) -> ParamPoly:
        return ParamPoly(ring, self.terms)

    def inverse(self) -> ParamPoly:
        """Inverse of a unit as a truncated geometric series."""
        c = augment(self)
        if c == 0:
            raise RingError(f"{self} is not a unit (zero constant term)")
        q = self * (1 / c) - 1
        out = self.ring.one()
        power = self.ring.one()
        for _ in range(self.ring.truncation):
            power = power * (-q)
            out = out + power
        return out * (1 / c)

    def substitute(self, images: Mapping[str, ParamPoly], target: ParamRing) -> ParamPoly:
        """Image under the ring map sending each generator to ``images[name]``."""
        out = target.zero()
        n_even = len(self.ring.even)
        gens = [images[n] for n in self.ring.even] + [images[n] for n in self.ring.odd]
        for (exps, mask), c in self.terms.items():
            term = target.const(c)
            for i, e in enumerate(exps):
                for _ in range(e):
                    term = term * gens[i]
            for j in _odd_bits(mask):
                term = term * gens[n_even + j]
            out = out + term
        return out

    def items(self) -> list[tuple[PKey, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: _key_order(kv[0]))

    # display ----------------------------------------------------------
    def monomial_str(self, key: PKey, latex: bool = False) -> str:
        exps, mask = key
        parts = []
        for j in _odd_bits(mask):
            parts.append(_fmt_name(self.ring.odd[j], latex))
        for name, e in zip(self.ring.even, exps):
            if e:
                s = _fmt_name(name, latex)
                parts.append(s if e == 1 else (f"{s}^{{{e}}}" if latex else f"{s}^{e}"))
        return ("" if latex else "*").join(parts)

    def format(self, latex: bool = False) -> str:
        if not self.terms:
            return "0"
        out = []
        for key, c in self.items():
            mono = self.monomial_str(key, latex)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if not mono:
                body = _fmt_coeff(mag, latex)
            elif mag == 1:
                body = mono
            else:
                body = _fmt_coeff(mag, latex) + ("" if latex else "*") + mono
            out.append((sign, body))
        s = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            s += f" {sign} {body}"
        return s

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"ParamPoly({self.format()!r})"


_GREEK = {"theta": r"\theta", "t": "t", "u": "u", "v": "v"}


def _fmt_name(name: str, latex: bool) -> str:
    if not latex:
        return name
    m = re.fullmatch(r"([A-Za-z]+)(\d+(?:_\d+)*)?", name)
    if not m:
        return name
    stem, idx = m.group(1), m.group(2)
    stem = _GREEK.get(stem, "\\" + stem if stem in ("lambda", "mu", "alpha", "beta") else stem)
    if not idx:
        return stem
    return f"{stem}_{{{idx.replace('_', ',')}}}"


def _fmt_coeff(c: Fraction, latex: bool) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    if latex:
        return rf"\frac{{{c.numerator}}}{{{c.denominator}}}"
    return f"{c.numerator}/{c.denominator}"


def poly_mul(a: ParamPoly, b: ParamPoly) -> ParamPoly:
    """Graded-commutative product, truncated at the ring's degree."""
    a._check(b)
    t = a.ring.truncation
    out: dict[PKey, Fraction] = {}
    for ka, va in a.terms.items():
        da = key_degree(ka)
        for kb, vb in b.terms.items():
            if da + key_degree(kb) > t:
                continue
            r = key_mul(ka, kb)
            if r is None:
                continue
            sign, k = r
            out[k] = out.get(k, 0) + sign * va * vb
    return ParamPoly(a.ring, out)


def augment(p: ParamPoly) -> Fraction:
    """Constant term: the image under the augmentation."""
    return p.terms.get(p.ring.unit_key, Fraction(0))


@dataclass(frozen=True)
class RelationIdeal:
    """An ideal given by generators, considered modulo m^(truncation+1)."""

    ring: ParamRing
    generators: tuple[ParamPoly, ...] = ()
    truncation: int = field(default=0)

    def __post_init__(self) -> None:
        if self.truncation == 0:
            object.__setattr__(self, "truncation", self.ring.truncation)
        gens = tuple(g for g in self.generators if g)
        for g in gens:
            if g.ring.names != self.ring.names:
                raise RingError("relation lives in a different ring")
        object.__setattr__(self, "generators", gens)

    def __len__(self) -> int:
        return len(self.generators)


class _SpanReducer:
    """Normal forms modulo span{g*mu} truncated at degree T.

    Pivots are placed on the highest-degree monomials, so normal forms keep
    low-degree terms.  With ``proper`` only monomials mu of degree >= 1 are
    used, i.e. the reduction is modulo m*I + m^(T+1).
    """

    def __init__(self, ring: ParamRing, generators: Sequence[ParamPoly], truncation: int, proper: bool):
        self.ring = ring.with_truncation(truncation)
        self.truncation = truncation
        monos = self.ring.monomials(truncation)
        # column 0 is the highest-degree monomial
        ordered = sorted(monos, key=lambda k: (-key_degree(k),) + _key_order(k)[1:])
        self.col = {k: i for i, k in enumerate(ordered)}
        self.key_of = ordered
        self.ech = Echelon()
        gens = [g.retruncate(self.ring) for g in generators]
        for g in gens:
            for mu in monos:
                if proper and key_degree(mu) == 0:
                    continue
                if key_degree(mu) + g.order() > truncation:
                    continue
                prod = poly_mul(g, ParamPoly(self.ring, {mu: Fraction(1)}))
                if prod:
                    self.ech.add(self._vec(prod))

    def _vec(self, p: ParamPoly) -> SparseVec:
        return {self.col[k]: v for k, v in p.terms.items()}

    def reduce(self, p: ParamPoly) -> ParamPoly:
        if p.degree() > self.truncation:
            raise TruncationError(
                f"polynomial of degree {p.degree()} exceeds truncation {self.truncation}; "
                "raise the truncation degree"
            )
        r = self.ech.reduce(self._vec(p.retruncate(self.ring)))
        return ParamPoly(p.ring, {self.key_of[c]: v for c, v in r.items()})


@lru_cache(maxsize=256)
def _reducer(ring: ParamRing, generators: tuple[ParamPoly, ...], truncation: int, proper: bool) -> _SpanReducer:
    return _SpanReducer(ring, generators, truncation, proper)


def span_reducer(ideal: RelationIdeal, proper: bool = False) -> _SpanReducer:
    return _reducer(ideal.ring.with_truncation(ideal.truncation), ideal.generators, ideal.truncation, proper)


def reduce_mod(p: ParamPoly, ideal: RelationIdeal) -> ParamPoly:
    """Canonical representative of p modulo the truncated ideal; 0 iff p is a member."""
    if p.ring.names != ideal.ring.names:
        raise RingError("polynomial and ideal live in different rings")
    return span_reducer(ideal).reduce(p)


def ideal_equal(a: RelationIdeal, b: RelationIdeal) -> bool:
    if a.ring.names != b.ring.names:
        raise RingError("ideals live in different rings")
    if a.truncation != b.truncation:
        raise RingError("ideals are truncated at different degrees")
    return all(not reduce_mod(g, b) for g in a.generators) and all(
        not reduce_mod(g, a) for g in b.generators
    )


# parsing ------------------------------------------------------------------

class PolyParseError(RingError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at offset {pos} in {text!r}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z][A-Za-z0-9_]*)|(\S))")


def parse_poly(ring: ParamRing, text: str) -> ParamPoly:
    """Parse +, -, *, /, ^ and parentheses; juxtaposition multiplies.

    Division is only allowed by units, which are inverted as truncated series.
    """
    tokens = []
    pos = 0
    text = str(text)
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        if m.group(1):
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2):
            tokens.append(("name", m.group(2), m.start(2)))
        elif m.group(3):
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        tok = tokens[i]
        i += 1
        return tok

    def expr() -> ParamPoly:
        if peek()[1] in "+-" and peek()[0] == "op":
            sign = -1 if take()[1] == "-" else 1
            out = term() * sign
        else:
            out = term()
        while peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            rhs = term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term() -> ParamPoly:
        out = factor()
        while True:
            kind, val, _ = peek()
            if kind == "op" and val == "*":
                take()
                out = out * factor()
            elif kind == "op" and val == "/":
                _, _, p = take()
                den = factor()
                try:
                    out = out / den
                except RingError as exc:
                    raise PolyParseError(str(exc), text, p) from None
            elif kind in ("num", "name") or (kind == "op" and val == "("):
                out = out * factor()
            else:
                return out

    def factor() -> ParamPoly:
        base = atom()
        if peek()[0] == "op" and peek()[1] == "^":
            take()
            kind, val, p = take()
            if kind != "num" or "/" in val:
                raise PolyParseError("expected integer exponent", text, p)
            base = base ** int(val)
        return base

    def atom() -> ParamPoly:
        kind, val, p = take()
        if kind == "num":
            return ring.const(Fraction(val))
        if kind == "name":
            try:
                return ring.gen(val)
            except RingError:
                raise PolyParseError(f"unknown parameter {val!r}", text, p) from None
        if kind == "op" and val == "(":
            inner = expr()
            k2, v2, p2 = take()
            if v2 != ")":
                raise PolyParseError("expected ')'", text, p2)
            return inner
        if kind == "op" and val == "-":
            return -atom()
        raise PolyParseError(f"unexpected {val or 'end of input'!r}", text, p)

    out = expr()
    kind, val, p = peek()
    if kind != "end":
        raise PolyParseError(f"unexpected {val!r}", text, p)
    return out


def poly_from_terms(ring: ParamRing, terms: Iterable[tuple[Mapping[str, int], Iterable[str], Fraction]]) -> ParamPoly:
    """Build from (even exponents by name, odd names in written order, coeff)."""
    out = ring.zero()
    for even, odd, c in terms:
        term = ring.const(c)
        for name in odd:
            term = term * ring.gen(name)
        for name, e in even.items():
            term = term * ring.gen(name) ** e
        out = out + term
    return out
