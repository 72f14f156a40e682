"""Coalgebra automorphisms of S(W) over a parameter ring, inverses,
transport of codifferentials and push-outs along ring maps.

Operators act with the sign convention (x p)(m q) = (-1)^{|p||m|} x(m) p q,
matching the cochain-then-parameter writing of ParamCochain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Mapping

from linf.cochain import ArityWindow, Cochain, Key, key_parity, tilde
from linf.deform import Deformation, ParamCochain, _replace
from linf.gspace import EVEN, ODD, GradedSpace
from linf.paramring import ParamPoly, ParamRing, RelationIdeal, augment, key_parity as pkey_parity, reduce_mod
from linf.symw import (
    Monomial,
    degree,
    enumerate_monomials,
    mono_factorial,
    mono_parity,
    monomial_product,
    split_sign,
    sub_monomials,
    unit_monomial,
)

# an element of S(W) (x) A, written monomial-then-parameter
MonoSum = dict[Monomial, ParamPoly]


class MorphismError(ValueError):
    pass


def _add_into(out: MonoSum, m: Monomial, p: ParamPoly) -> None:
    if m in out:
        s = out[m] + p
        if s:
            out[m] = s
        else:
            del out[m]
    elif p:
        out[m] = p


def _poly_parity(p: ParamPoly) -> int:
    par = p.parity()
    return 0 if par is None else int(par)


def evaluate(c: ParamCochain, m: Monomial) -> dict[int, ParamPoly]:
    """c(m) as output index -> parameter polynomial (signs included)."""
    space = c.space
    f = mono_factorial(m)
    odd_m = mono_parity(space, m) == ODD
    out = {}
    for (mm, o), p in c.terms.items():
        if mm != m:
            continue
        v = p * f
        if odd_m and _poly_parity(p):
            v = -v
        out[o] = v
    return out


def from_values(space: GradedSpace, ring: ParamRing, values: Mapping[Monomial, Mapping[int, ParamPoly]]) -> ParamCochain:
    """Inverse of ``evaluate``: the cochain with the given values."""
    terms = {}
    for m, vec in values.items():
        f = mono_factorial(m)
        odd_m = mono_parity(space, m) == ODD
        for o, v in vec.items():
            if not v:
                continue
            p = v * Fraction(1, f)
            if odd_m and _poly_parity(v):
                p = -p
            terms[m, o] = p
    return ParamCochain(space, ring, terms)


def _times(space: GradedSpace, vec: Mapping[int, ParamPoly], rest: Monomial | None, q: ParamPoly) -> MonoSum:
    """(sum_o o P_o) * (rest q) with Koszul signs."""
    out: MonoSum = {}
    rest_odd = rest is not None and mono_parity(space, rest) == ODD
    for o, P in vec.items():
        u = unit_monomial(space, o)
        sign = 1
        if rest is None:
            prod = u
        else:
            r = monomial_product(space, u, rest)
            if r is None:
                continue
            sign, prod = r
        if rest_odd and _poly_parity(P):
            sign = -sign
        _add_into(out, prod, P * q * sign)
    return out


@lru_cache(maxsize=None)
def _tilde_basis(space: GradedSpace, key: Key, m: Monomial) -> tuple[tuple[Monomial, Fraction], ...]:
    return tuple(sorted(tilde(Cochain(space, {key: Fraction(1)}), m).items()))


def apply_coderivation(d: ParamCochain, s: Mapping[Monomial, ParamPoly]) -> MonoSum:
    """The coderivation lift of d applied to an element of S(W) (x) A."""
    space = d.space
    out: MonoSum = {}
    for y, q in s.items():
        odd_y = mono_parity(space, y) == ODD
        for key, p in d.terms.items():
            if degree(key[0]) > degree(y):
                continue
            lifted = _tilde_basis(space, key, y)
            if not lifted:
                continue
            pq = p * q
            if odd_y and _poly_parity(p):
                pq = -pq
            for z, v in lifted:
                _add_into(out, z, pq * v)
    return out


def apply_cochain(c: ParamCochain, s: Mapping[Monomial, ParamPoly]) -> dict[int, ParamPoly]:
    out: dict[int, ParamPoly] = {}
    for y, q in s.items():
        for o, v in evaluate(c, y).items():
            out[o] = out[o] + v * q if o in out else v * q
    return {o: v for o, v in out.items() if v}


@dataclass
class MorphismData:
    """Components g_k : S^k(W) -> W (x) A of a coalgebra morphism.

    The morphism is g^(w_1...w_n) = sum over set partitions of the word of
    signed products g(B_1)...g(B_r).
    """

    space: GradedSpace
    ring: ParamRing
    components: dict[int, ParamCochain] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for k, c in list(self.components.items()):
            if c.space != self.space or c.ring.names != self.ring.names:
                raise MorphismError("component over a different space or ring")
            if any(degree(m) != k for m, _ in c.terms):
                raise MorphismError(f"component {k} has terms of another arity")
            if c.parity() == ODD:
                raise MorphismError("an automorphism is an even map; odd component rejected")
            if c.is_zero():
                del self.components[k]
        lin = self.linear_matrix(augmented=True)
        if _det(lin) == 0:
            raise MorphismError("linear part is not invertible after augmentation")

    @classmethod
    def identity(cls, space: GradedSpace, ring: ParamRing) -> MorphismData:
        terms = {(unit_monomial(space, i), i): ring.one() for i in range(space.dim)}
        return cls(space, ring, {1: ParamCochain(space, ring, terms)})

    @classmethod
    def identity_plus(cls, space: GradedSpace, ring: ParamRing, correction: ParamCochain) -> MorphismData:
        """Components I + correction, split by arity."""
        base = cls.identity(space, ring).components[1]
        comps: dict[int, ParamCochain] = {1: base}
        for k in sorted({degree(m) for m, _ in correction.terms}):
            part = correction.restrict(ArityWindow(k, k))
            comps[k] = comps[k] + part if k in comps else part
        return cls(space, ring, comps)

    @property
    def linear(self) -> ParamCochain:
        return self.components.get(1, ParamCochain(self.space, self.ring))

    @property
    def max_component(self) -> int:
        return max(self.components, default=1)

    def linear_matrix(self, augmented: bool = False) -> list[list]:
        """M[o][i]: coefficient of o in g_1(basis i)."""
        n = self.space.dim
        M = [[self.ring.zero() for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for o, v in evaluate(self.linear, unit_monomial(self.space, i)).items():
                M[o][i] = v
        if augmented:
            return [[augment(x) for x in row] for row in M]
        return M


def _det(M: list[list[Fraction]]) -> Fraction:
    n = len(M)
    A = [list(map(Fraction, row)) for row in M]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            for j in range(c, n):
                A[r][j] -= f * A[c][j]
    return det


class CoalgebraMorphism:
    """Evaluator of g^ on monomials, memoised, up to a maximal degree."""

    def __init__(self, g: MorphismData, max_degree: int):
        self.g = g
        self.max_degree = max_degree
        self._cache: dict[Monomial, MonoSum] = {}

    def __call__(self, m: Monomial) -> MonoSum:
        m = tuple(m)
        if degree(m) > self.max_degree:
            raise MorphismError(f"degree {degree(m)} exceeds the window bound {self.max_degree}")
        if m not in self._cache:
            self._cache[m] = self._compute(m)
        return self._cache[m]

    def _compute(self, m: Monomial) -> MonoSum:
        space, ring = self.g.space, self.g.ring
        first = next(i for i, x in enumerate(m) if x)
        out: MonoSum = {}
        n = degree(m)
        for k, comp in sorted(self.g.components.items()):
            if k > n:
                break
            for b in sub_monomials(m, k):
                if b[first] == 0:
                    continue
                mult = comb(m[first] - 1, b[first] - 1)
                for i, (x, y) in enumerate(zip(m, b)):
                    if i != first:
                        mult *= comb(x, y)
                val = evaluate(comp, b)
                if not val:
                    continue
                sign = split_sign(space, m, b) * mult
                rest = tuple(x - y for x, y in zip(m, b))
                if degree(rest) == 0:
                    for mono, p in _times(space, val, None, ring.one()).items():
                        _add_into(out, mono, p * sign)
                    continue
                for y, q in self(rest).items():
                    for mono, p in _times(space, val, y, q).items():
                        _add_into(out, mono, p * sign)
        return out

    def apply(self, s: Mapping[Monomial, ParamPoly]) -> MonoSum:
        out: MonoSum = {}
        for y, q in s.items():
            for z, p in self(y).items():
                _add_into(out, z, p * q)
        return out


def extend_to_coalgebra_morphism(g: MorphismData, window: ArityWindow) -> CoalgebraMorphism:
    return CoalgebraMorphism(g, window.max_arity)


def _matrix_inverse(M: list[list[ParamPoly]], ring: ParamRing) -> list[list[ParamPoly]]:
    """Inverse of a matrix over the ring whose augmentation is invertible."""
    n = len(M)
    A0 = [[augment(x) for x in row] for row in M]
    # exact inverse of the constant part
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A0)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    inv0 = [[ring.const(aug[i][n + j]) for j in range(n)] for i in range(n)]
    N = [[M[i][j] - A0[i][j] for j in range(n)] for i in range(n)]

    def mul(X, Y):
        return [[sum((X[i][k] * Y[k][j] for k in range(n)), ring.zero()) for j in range(n)] for i in range(n)]

    # (A0 + N)^-1 = sum_j (-A0^-1 N)^j A0^-1, nilpotent up to the truncation
    step = [[-x for x in row] for row in mul(inv0, N)]
    term = inv0
    total = inv0
    for _ in range(ring.truncation):
        term = mul(step, term)
        total = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(total, term)]
    return total


def invert_morphism(g: MorphismData, window: ArityWindow) -> MorphismData:
    """Components of h with h^ o g^ = identity up to the window's top degree."""
    space, ring = g.space, g.ring
    n = space.dim
    M = g.linear_matrix()
    Q = _matrix_inverse(M, ring)
    lin_vals = {unit_monomial(space, j): {k: Q[k][j] for k in range(n) if Q[k][j]} for j in range(n)}
    comps = {1: from_values(space, ring, lin_vals)}
    top = window.max_arity if space.max_arity is None else min(window.max_arity, space.max_arity)
    g_hat = CoalgebraMorphism(g, top)
    for arity in range(2, top + 1):
        h_lin = CoalgebraMorphism(MorphismData(space, ring, {1: comps[1]}), arity)
        values = {}
        for m in enumerate_monomials(space, arity):
            X = h_lin(m)
            gX = g_hat.apply(X)
            acc: dict[int, ParamPoly] = {}
            for k in range(1, arity):
                if k not in comps:
                    continue
                part = {y: q for y, q in gX.items() if degree(y) == k}
                for o, v in apply_cochain(comps[k], part).items():
                    acc[o] = acc[o] - v if o in acc else -v
            acc = {o: v for o, v in acc.items() if v}
            if acc:
                values[m] = acc
        comp = from_values(space, ring, values)
        if not comp.is_zero():
            comps[arity] = comp
    return MorphismData(space, ring, comps)


def transport(d: ParamCochain, g: MorphismData, window: ArityWindow, order: str = "pullback") -> ParamCochain:
    """g*(d) = pr_W g^-1 d~ g^ ("pullback") or pr_W g^ d~ g^-1 ("pushforward")."""
    if d.space != g.space:
        raise MorphismError("codifferential and morphism live over different spaces")
    if d.ring.names != g.ring.names:
        raise MorphismError("codifferential and morphism use different parameter rings")
    if order not in ("pullback", "pushforward"):
        raise MorphismError(f"unknown conjugation order {order!r}")
    space, ring = d.space, g.ring
    d = d.with_ring(ring)
    h = invert_morphism(g, window)
    top = window.max_arity if space.max_arity is None else min(window.max_arity, space.max_arity)
    inner, outer = (g, h) if order == "pullback" else (h, g)
    inner_hat = CoalgebraMorphism(inner, top)
    outer_hat = CoalgebraMorphism(outer, top)
    values = {}
    for arity in range(window.min_arity, top + 1):
        for m in enumerate_monomials(space, arity):
            z = outer_hat.apply(apply_coderivation(d, inner_hat(m)))
            vec = {}
            for y, p in z.items():
                if degree(y) == 1:
                    vec[y.index(1)] = p
            if vec:
                values[m] = vec
    return from_values(space, ring, values)


@dataclass(frozen=True)
class RingMorphism:
    source: ParamRing
    target: ParamRing
    images: Mapping[str, ParamPoly]

    def __post_init__(self) -> None:
        for name in self.source.names:
            if name not in self.images:
                raise MorphismError(f"no image given for parameter {name!r}")
        for name, p in self.images.items():
            if name not in self.source.names:
                raise MorphismError(f"{name!r} is not a parameter of the source ring")
            if p.ring.names != self.target.names:
                raise MorphismError(f"image of {name!r} lives in another ring")
            want = ODD if name in self.source.odd else EVEN
            if p and p.parity() != want:
                raise MorphismError(f"image of {name!r} must have parity {want}")
            if augment(p) != 0:
                raise MorphismError(f"image of {name!r} must lie in the maximal ideal")

    def __call__(self, p: ParamPoly) -> ParamPoly:
        return p.substitute(self.images, self.target)


def pushout(
    defm: Deformation,
    lam: RingMorphism,
    target_relations: RelationIdeal | None = None,
) -> Deformation:
    """lambda_*(d_A): apply lam to every coefficient and to the relations.

    With ``target_relations`` each relation image must reduce to zero
    modulo them; the result then carries the target relations.
    """
    if lam.source.names != defm.ring.names:
        raise MorphismError("ring morphism does not start at the deformation's base")
    images = [lam(r) for r in defm.relation_list()]
    if target_relations is not None:
        for r, img in zip(defm.relation_list(), images):
            if reduce_mod(img, target_relations):
                raise MorphismError(f"relation {r} is not mapped into the target relations")
        rel_map = dict(enumerate(target_relations.generators))
        ideal = target_relations
    else:
        rel_map = {i: p for i, p in enumerate(images) if p}
        ideal = RelationIdeal(lam.target, tuple(rel_map.values()), lam.target.truncation)
    current = defm.current.map_coefficients(lam, lam.target)
    return _replace(
        defm,
        current=current,
        relations=ideal,
        relation_map=rel_map,
        parameters=list(lam.target.names),
        alphas=[a.map_coefficients(lam, lam.target) for a in defm.alphas],
    )
