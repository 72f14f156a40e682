"""Cohomology of a codifferential and order-by-order miniversal deformations.

Everything happens in the truncated algebra L / L_{>N}, N the top of the
arity window.  Brackets never lower arity, so this quotient is again a Lie
algebra and each fixed arity is computed exactly.  Cohomology is only
trusted up to ``reliable_max``: above it, D of a basis cochain may reach
past N and be cut off.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from linf.cochain import (
    ArityWindow,
    Cochain,
    Key,
    basis_bracket,
    bracket,
    canonical_index,
    check_codifferential,
    cochain_basis,
    key_parity,
)
from linf.exactla import Echelon, SparseVec, SubspaceSolver, _kernel_sparse
from linf.gspace import EVEN, ODD, GradedSpace, Parity
from linf.paramring import (
    ParamPoly,
    ParamRing,
    PKey,
    RelationIdeal,
    RingError,
    TruncationError,
    _reducer,
    key_degree,
    key_parity as pkey_parity,
    reduce_mod,
)
from linf.symw import degree

_TAG = 1 << 40


class DeformationError(ValueError):
    pass


class NotACodifferential(DeformationError):
    def __init__(self, certificate: Cochain, reason: str):
        super().__init__(f"not a codifferential: {reason}")
        self.certificate = certificate


class NotACocycle(DeformationError):
    def __init__(self, monomial: str, residue: Cochain):
        super().__init__(f"obstruction coefficient of {monomial or '1'} is not a cocycle; widen the window")
        self.monomial = monomial
        self.residue = residue


# parameter-weighted cochains ----------------------------------------------

class ParamCochain:
    """A sum of basis cochains times parameters, written cochain first (x*p)."""

    __slots__ = ("space", "ring", "terms")

    def __init__(self, space: GradedSpace, ring: ParamRing, terms: Mapping[Key, ParamPoly] | None = None):
        self.space = space
        self.ring = ring
        self.terms: dict[Key, ParamPoly] = {}
        total = None
        for k, p in (terms or {}).items():
            p = p.retruncate(ring) if p.ring != ring else p
            if not p:
                continue
            for pk in p.terms:
                t = key_parity(space, k) + pkey_parity(pk)
                if total is None:
                    total = t
                elif t != total:
                    raise DeformationError("parameter cochain mixes total parities")
            self.terms[k] = p

    @classmethod
    def from_cochain(cls, c: Cochain, ring: ParamRing, poly: ParamPoly | None = None) -> ParamCochain:
        p = poly if poly is not None else ring.one()
        return cls(c.space, ring, {k: p * v for k, v in c.terms.items()})

    @classmethod
    def from_pairs(cls, space: GradedSpace, ring: ParamRing, pairs: Iterable[tuple[Cochain, ParamPoly]]) -> ParamCochain:
        out = cls(space, ring)
        for c, p in pairs:
            out = out + cls.from_cochain(c, ring, p)
        return out

    def pairs(self) -> list[tuple[Cochain, ParamPoly]]:
        return [(Cochain(self.space, {k: Fraction(1)}), p) for k, p in self.items()]

    def items(self) -> list[tuple[Key, ParamPoly]]:
        return sorted(self.terms.items(), key=lambda kv: canonical_index(self.space, kv[0]))

    def parity(self) -> Parity | None:
        for k, p in self.terms.items():
            return key_parity(self.space, k) + pkey_parity(next(iter(p.terms)))
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def _same(self, other: ParamCochain) -> None:
        if other.space != self.space or other.ring.names != self.ring.names:
            raise DeformationError("parameter cochains over different spaces or rings")

    def __add__(self, other: ParamCochain) -> ParamCochain:
        self._same(other)
        out = dict(self.terms)
        for k, p in other.terms.items():
            out[k] = out[k] + p if k in out else p
        return ParamCochain(self.space, self.ring, out)

    def __neg__(self) -> ParamCochain:
        return ParamCochain(self.space, self.ring, {k: -p for k, p in self.terms.items()})

    def __sub__(self, other: ParamCochain) -> ParamCochain:
        return self + (-other)

    def __mul__(self, c) -> ParamCochain:
        """Right multiplication by a scalar or a parameter polynomial."""
        return ParamCochain(self.space, self.ring, {k: p * c for k, p in self.terms.items()})

    def __rmul__(self, c) -> ParamCochain:
        if isinstance(c, ParamPoly):
            raise DeformationError("parameters multiply parameter cochains from the right")
        return self * c

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParamCochain):
            return NotImplemented
        return self.space == other.space and self.ring.names == other.ring.names and self.terms == other.terms

    def augment(self) -> Cochain:
        return Cochain(self.space, {k: p.terms.get(self.ring.unit_key, 0) for k, p in self.terms.items()})

    def restrict(self, window: ArityWindow | None = None, max_arity: int | None = None) -> ParamCochain:
        def keep(k):
            a = degree(k[0])
            return (window is None or a in window) and (max_arity is None or a <= max_arity)

        return ParamCochain(self.space, self.ring, {k: p for k, p in self.terms.items() if keep(k)})

    def truncate(self, param_degree: int) -> ParamCochain:
        return ParamCochain(self.space, self.ring, {k: p.truncate(param_degree) for k, p in self.terms.items()})

    def with_ring(self, ring: ParamRing) -> ParamCochain:
        return ParamCochain(self.space, ring, {k: p.retruncate(ring) for k, p in self.terms.items()})

    def map_coefficients(self, f, ring: ParamRing | None = None) -> ParamCochain:
        ring = ring or self.ring
        return ParamCochain(self.space, ring, {k: f(p) for k, p in self.terms.items()})

    def by_monomial(self) -> dict[PKey, Cochain]:
        """Cochain coefficient of each parameter monomial."""
        groups: dict[PKey, dict[Key, Fraction]] = {}
        for k, p in self.terms.items():
            for mu, c in p.terms.items():
                groups.setdefault(mu, {})[k] = c
        return {mu: Cochain(self.space, t) for mu, t in groups.items()}

    def coefficient(self, mu: PKey) -> Cochain:
        return Cochain(self.space, {k: p.terms.get(mu, 0) for k, p in self.terms.items()})

    def __repr__(self) -> str:
        return "ParamCochain(" + ", ".join(f"{k}: {p}" for k, p in self.items()) + ")"


def param_bracket(a: ParamCochain, b: ParamCochain, window: ArityWindow | None = None) -> ParamCochain:
    """[x p, y q] = (-1)^{|p||y|} [x, y] p q, extended bilinearly."""
    a._same(b)
    space, ring = a.space, a.ring
    out: dict[Key, ParamPoly] = {}
    for ka, pa in a.terms.items():
        da = degree(ka[0])
        par_a = pa.parity()
        for kb, pb in b.terms.items():
            if window is not None and da + degree(kb[0]) - 1 not in window:
                continue
            terms = basis_bracket(space, ka, kb)
            if not terms:
                continue
            prod = pa * pb
            if not prod:
                continue
            if par_a == ODD and key_parity(space, kb) == ODD:
                prod = -prod
            for k, v in terms:
                out[k] = out[k] + prod * v if k in out else prod * v
    return ParamCochain(space, ring, out)


# cohomology ---------------------------------------------------------------

def reliable_arity(d: Cochain, window: ArityWindow) -> int:
    """Highest arity whose cocycles and coboundaries are exact in the window."""
    n = window.max_arity
    top = d.space.max_arity
    if top is not None and n >= top:
        return n
    if d.is_zero():
        return n
    return max(window.min_arity, n - (max(d.arities()) - 1))


@dataclass
class CohomologyData:
    d: Cochain
    window: ArityWindow
    reliable_max: int
    keys: list[Key]
    cocycle_basis: list[Cochain]
    coboundary_basis: list[Cochain]
    coboundary_preimages: list[Cochain]
    delta_basis: list[Cochain]
    preimage_basis: list[Cochain] = field(default_factory=list)
    dims: dict[int, dict[str, int]] = field(default_factory=dict)
    _solver: SubspaceSolver | None = field(default=None, repr=False)

    @property
    def space(self) -> GradedSpace:
        return self.d.space

    @property
    def homology_dim(self) -> int:
        return len(self.delta_basis)

    def vec(self, c: Cochain) -> SparseVec:
        idx = self._index
        return {idx[k]: v for k, v in c.terms.items() if k in idx}

    def cochain(self, v: Mapping[int, Fraction]) -> Cochain:
        return Cochain(self.space, {self.keys[i]: x for i, x in v.items()})

    @property
    def _index(self) -> dict[Key, int]:
        return {k: i for i, k in enumerate(self.keys)}

    def _build_solver(self) -> SubspaceSolver:
        if self._solver is None:
            gens = [self.vec(c) for c in self.delta_basis]
            gens += [self.vec(bracket(self.d, x, self.window)) for x in self.preimage_basis]
            ech = Echelon()
            for g in gens:
                ech.add(g)
            used = set(ech.pivots)
            self._complement = [i for i in range(len(self.keys)) if i not in used]
            gens += [{i: Fraction(1)} for i in self._complement]
            self._solver = SubspaceSolver(gens)
        return self._solver

    def split(self, c: Cochain) -> tuple[list[Fraction], list[Fraction], Cochain]:
        """Write c = sum a_i delta_i + D(sum b_j x_j) + rest.

        The x_j run over ``preimage_basis``; returns (a, b, rest).  The part
        of rest up to ``reliable_max`` vanishes exactly when c is a cocycle
        there; rest above it is window debris and is meant to be dropped.
        """
        solver = self._build_solver()
        coords = solver.coordinates(self.vec(c))
        nd, nb = len(self.delta_basis), len(self.preimage_basis)
        rest = {self._complement[i]: x for i, x in enumerate(coords[nd + nb:]) if x}
        return coords[:nd], coords[nd:nd + nb], self.cochain(rest)

    def preimage(self, coords: Sequence[Fraction]) -> Cochain:
        out: dict[Key, Fraction] = {}
        for x, pre in zip(coords, self.preimage_basis):
            if x:
                for k, v in pre.terms.items():
                    out[k] = out.get(k, 0) + x * v
        return Cochain(self.space, out)

    def is_cocycle(self, c: Cochain) -> bool:
        return bracket(self.d, c.restrict(ArityWindow(1, self.reliable_max)), self.window).is_zero()


def cohomology(d: Cochain, window: ArityWindow) -> CohomologyData:
    chk = check_codifferential(d, ArityWindow(1, 2 * window.max_arity))
    if not chk:
        raise NotACodifferential(chk.certificate, chk.reason)
    space = d.space
    top = space.max_arity
    hi_arity = window.max_arity if top is None else min(window.max_arity, top)
    rel = min(reliable_arity(d, window), hi_arity)
    keys = [k for a in range(window.min_arity, hi_arity + 1) for k in cochain_basis(space, a)]
    idx = {k: i for i, k in enumerate(keys)}
    arity_of = [degree(k[0]) for k in keys]
    low = [i for i, a in enumerate(arity_of) if a <= rel]
    # high arities first so that rows pivoting in low columns are pure low
    rev_order = sorted(range(len(keys)), key=lambda i: (-arity_of[i], i))
    rev = {i: r for r, i in enumerate(rev_order)}
    n_high = sum(1 for a in arity_of if a > rel)

    images: list[SparseVec] = []
    for k in keys:
        img = bracket(d, Cochain(space, {k: Fraction(1)}), window)
        images.append({idx[kk]: v for kk, v in img.terms.items() if kk in idx})

    # cocycles: kernel of D on the reliable part
    rows: dict[int, SparseVec] = {}
    for j_local, j in enumerate(low):
        for i, v in images[j].items():
            rows.setdefault(i, {})[j_local] = v
    kernel = _kernel_sparse(list(rows.values()), len(low))
    z_ech = Echelon()
    for v in kernel:
        z_ech.add({low[j]: x for j, x in v.items()})
    cocycles = z_ech.basis()

    # canonical complement of ker D among the reliable arities: D is
    # injective on it and it carries all coboundary preimages
    full_rows: dict[int, SparseVec] = {}
    for j, img in enumerate(images):
        for i, v in img.items():
            full_rows.setdefault(i, {})[j] = v
    k_ech = Echelon()
    for v in _kernel_sparse(list(full_rows.values()), len(keys)):
        k_ech.add(v)
    k_piv = set(k_ech.rows)
    complement = [j for j in low if j not in k_piv]

    # coboundaries with preimages carried in tag columns
    img_ech = Echelon()
    for j, img in enumerate(images):
        row = {rev[i]: v for i, v in img.items()}
        row[_TAG + j] = Fraction(1)
        img_ech.add(row)
    b_ech = Echelon()
    for p, row in img_ech.rows.items():
        if n_high <= p < _TAG:
            vec = {rev_order[c]: v for c, v in row.items() if c < _TAG}
            vec.update({c: v for c, v in row.items() if c >= _TAG})
            b_ech.add(vec)
    beta_vals, beta_pre = [], []
    for p, row in sorted(b_ech.rows.items()):
        if p >= _TAG:
            continue
        val = {c: v for c, v in row.items() if c < _TAG}
        pre = {c - _TAG: v for c, v in row.items() if c >= _TAG}
        pre_low = z_ech.reduce({c: v for c, v in pre.items() if arity_of[c] <= rel})
        pre_high = {c: v for c, v in pre.items() if arity_of[c] > rel}
        if pre_high:
            hc = Cochain(space, {keys[c]: v for c, v in pre_high.items()})
            if bracket(d, hc, window).is_zero():
                pre_high = {}
        pre_low.update(pre_high)
        beta_vals.append(val)
        beta_pre.append(pre_low)

    beta_only = Echelon()
    for v in beta_vals:
        beta_only.add(v)
    d_ech = Echelon()
    for z in cocycles:
        d_ech.add(beta_only.reduce(z))
    deltas = d_ech.basis()

    def to_c(v):
        return Cochain(space, {keys[i]: x for i, x in v.items()})

    dims: dict[int, dict[str, int]] = {}
    for a in range(window.min_arity, rel + 1):
        dims[a] = {"cocycles": 0, "coboundaries": 0, "homology": 0}
    for name, vecs in (("cocycles", cocycles), ("coboundaries", beta_vals), ("homology", deltas)):
        for v in vecs:
            dims[arity_of[min(v)]][name] += 1

    return CohomologyData(
        d=d,
        window=window,
        reliable_max=rel,
        keys=keys,
        cocycle_basis=[to_c(v) for v in cocycles],
        coboundary_basis=[to_c(v) for v in beta_vals],
        coboundary_preimages=[to_c(v) for v in beta_pre],
        preimage_basis=[Cochain(space, {keys[j]: Fraction(1)}) for j in complement],
        delta_basis=[to_c(v) for v in deltas],
        dims=dims,
    )


# parameters ---------------------------------------------------------------

def parameter_names(deltas: Sequence[Cochain]) -> list[str]:
    """theta<arity> for odd parameters, t<arity> for even ones, with a
    position suffix when several deltas share arity and parity."""
    info = []
    for c in deltas:
        arity = min(c.arities())
        par = ODD if c.parity == EVEN else EVEN
        info.append((arity, par))
    names = []
    for i, (arity, par) in enumerate(info):
        stem = "theta" if par == ODD else "t"
        same = [j for j, x in enumerate(info) if x == (arity, par)]
        if len(same) == 1:
            names.append(f"{stem}{arity}")
        else:
            names.append(f"{stem}{arity}_{same.index(i) + 1}")
    return names


def _ring_for(deltas: Sequence[Cochain], truncation: int) -> tuple[ParamRing, list[str]]:
    names = parameter_names(deltas)
    even = tuple(n for n, c in zip(names, deltas) if c.parity == ODD)
    odd = tuple(n for n, c in zip(names, deltas) if c.parity == EVEN)
    return ParamRing(even, odd, truncation), names


# deformations -------------------------------------------------------------

@dataclass
class Deformation:
    base: Cochain
    current: ParamCochain
    relations: RelationIdeal
    order: int
    window: ArityWindow
    cohomology: CohomologyData
    parameters: list[str]
    relation_map: dict[int, ParamPoly] = field(default_factory=dict)
    status: str = "in progress"
    verified: bool | None = None
    alphas: list[ParamCochain] = field(default_factory=list)

    @property
    def ring(self) -> ParamRing:
        return self.current.ring

    @property
    def space(self) -> GradedSpace:
        return self.base.space

    @property
    def reliable_max(self) -> int:
        return self.cohomology.reliable_max

    def relation_list(self) -> list[ParamPoly]:
        return [self.relation_map[i] for i in sorted(self.relation_map)]

    def half_square(self, window: ArityWindow | None = None) -> ParamCochain:
        return param_bracket(self.current, self.current, window or self.window) * Fraction(1, 2)

    def residual(self, param_degree: int | None = None) -> ParamCochain:
        """Self-bracket reduced modulo relations + m^(param_degree+1)."""
        deg = self.order + 1 if param_degree is None else param_degree
        sq = self.half_square().truncate(deg).restrict(max_arity=self.reliable_max)
        ideal = RelationIdeal(self.ring, tuple(self.relation_list()), deg) if deg >= 1 else None
        if ideal is None:
            return sq
        red = _reducer(self.ring.with_truncation(deg), ideal.generators, deg, False)
        return sq.map_coefficients(red.reduce)


class ObstructionSplit(NamedTuple):
    alpha: ParamCochain
    relations: list[ParamPoly]


def universal_infinitesimal(d: Cochain, H: CohomologyData, truncation: int = 3) -> Deformation:
    """d_1 = d + sum delta_i u^i with one fresh parameter per delta."""
    ring, names = _ring_for(H.delta_basis, truncation)
    cur = ParamCochain.from_cochain(d, ring)
    for c, name in zip(H.delta_basis, names):
        cur = cur + ParamCochain.from_cochain(c, ring, ring.gen(name))
    order = 1 if names else 0
    return Deformation(
        base=d,
        current=cur,
        relations=RelationIdeal(ring, (), truncation),
        order=order,
        window=H.window,
        cohomology=H,
        parameters=names,
    )


def _fmt_mu(ring: ParamRing, mu: PKey) -> str:
    return ParamPoly(ring, {mu: Fraction(1)}).format()


def decompose_obstruction(obs: ParamCochain, H: CohomologyData) -> ObstructionSplit:
    """Split obs (half the self-bracket) as -D(alpha) + sum delta_i R^i.

    Cochain coefficients are taken per parameter monomial; each must be a
    cocycle up to the reliable arity, otherwise NotACocycle is raised.
    """
    ring = obs.ring
    alpha: dict[Key, ParamPoly] = {}
    rels = [ring.zero() for _ in H.delta_basis]
    for mu, x in sorted(obs.by_monomial().items(), key=lambda kv: (key_degree(kv[0]), kv[0])):
        dc, bc, rest = H.split(x)
        if not rest.restrict(ArityWindow(1, H.reliable_max)).is_zero():
            raise NotACocycle(_fmt_mu(ring, mu), rest)
        mono = ParamPoly(ring, {mu: Fraction(1)})
        for i, a in enumerate(dc):
            if a:
                rels[i] = rels[i] + mono * a
        pre = H.preimage(bc)
        for k, v in pre.terms.items():
            term = mono * (-v)
            alpha[k] = alpha[k] + term if k in alpha else term
    return ObstructionSplit(ParamCochain(obs.space, ring, alpha), rels)


def extend_order(defm: Deformation) -> Deformation:
    """One step d_n -> d_(n+1); the status becomes 'miniversal' when the
    obstruction has no coboundary part (then the order is unchanged)."""
    n = defm.order
    ring = defm.ring
    if n + 1 > ring.truncation:
        raise TruncationError(f"order {n + 1} exceeds the parameter truncation {ring.truncation}")
    if not defm.parameters:
        return _replace(defm, status="miniversal")
    sq = defm.half_square().truncate(n + 1)
    gens = tuple(defm.relation_list())
    if gens:
        red = _reducer(ring.with_truncation(n + 1), gens, n + 1, True)
        sq = sq.map_coefficients(red.reduce)
    split = decompose_obstruction(sq, defm.cohomology)
    rel_map = {i: p for i, p in enumerate(split.relations) if p}
    relations = RelationIdeal(ring, tuple(rel_map[i] for i in sorted(rel_map)), n + 1)
    if split.alpha.is_zero():
        return _replace(defm, relation_map=rel_map, relations=relations, status="miniversal")
    return _replace(
        defm,
        current=defm.current + split.alpha,
        order=n + 1,
        relation_map=rel_map,
        relations=relations,
        alphas=defm.alphas + [split.alpha],
    )


def _replace(defm: Deformation, **changes) -> Deformation:
    values = {f: getattr(defm, f) for f in defm.__dataclass_fields__}
    values.update(changes)
    return Deformation(**values)


def finalize(defm: Deformation) -> Deformation:
    """Exact relations from the full self-bracket up to the ring truncation.

    The delta coefficients become the relations; every other coefficient
    must then vanish modulo them, which sets ``verified``.
    """
    ring = defm.ring
    T = ring.truncation
    sq = defm.half_square().restrict(max_arity=defm.reliable_max)
    H = defm.cohomology
    rels = [ring.zero() for _ in H.delta_basis]
    others: dict[Key, ParamPoly] = {}
    for mu, x in sq.by_monomial().items():
        dc, bc, rest = H.split(x)
        mono = ParamPoly(ring, {mu: Fraction(1)})
        for i, a in enumerate(dc):
            if a:
                rels[i] = rels[i] + mono * a
        leftover = x - sum((c * a for c, a in zip(H.delta_basis, dc)), Cochain.zero(x.space))
        for k, v in leftover.terms.items():
            others[k] = others[k] + mono * v if k in others else mono * v
    rel_map = {i: p for i, p in enumerate(rels) if p}
    ideal = RelationIdeal(ring, tuple(rel_map[i] for i in sorted(rel_map)), T)
    verified = all(not reduce_mod(p, ideal) for p in others.values())
    return _replace(defm, relation_map=rel_map, relations=ideal, verified=verified)


def miniversal(
    d: Cochain,
    max_order: int = 6,
    window: ArityWindow | None = None,
    truncation: int | None = None,
) -> Deformation:
    window = window or ArityWindow(1, max_order + 3)
    T = truncation if truncation is not None else max_order + 2
    H = cohomology(d, window)
    defm = universal_infinitesimal(d, H, T)
    if not defm.parameters:
        return _replace(defm, status="miniversal", verified=True)
    while True:
        if defm.order >= max_order:
            defm = _replace(defm, status="truncated")
            break
        defm = extend_order(defm)
        if defm.status == "miniversal":
            break
    return finalize(defm)
