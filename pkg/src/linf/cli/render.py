"""Plain, LaTeX and structured (JSON) renderings of engine results."""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

import linf
from linf.cochain import ArityWindow, Cochain, Key, key_parity
from linf.deform import CohomologyData, Deformation, ParamCochain
from linf.gspace import EVEN, GradedSpace, build_space
from linf.paramring import ParamPoly, ParamRing, key_degree
from linf.symw import degree, enumerate_monomials

SCHEMA = "linf.result.v1"


def _label(name: str) -> str:
    m = re.search(r"(\d+)$", name)
    return m.group(1) if m else name


class Notation:
    """Names of basis cochains in the usual phi/psi style.

    Even cochains are phi, odd ones psi.  Indices: the arity for a
    one-dimensional W; the output for one-dimensional S^k(W);
    arity and output when those determine the cochain (the 1|1 case);
    input and output for arity one; otherwise multi-index and output.
    """

    def __init__(self, space: GradedSpace):
        self.space = space
        self._unique: dict[int, bool] = {}

    def _is_unique(self, arity: int) -> bool:
        if arity not in self._unique:
            seen = set()
            ok = True
            for m in enumerate_monomials(self.space, arity):
                for o in range(self.space.dim):
                    tag = (o, key_parity(self.space, (m, o)))
                    ok = ok and tag not in seen
                    seen.add(tag)
            self._unique[arity] = ok
        return self._unique[arity]

    def name(self, key: Key, latex: bool = False) -> str:
        m, o = key
        space = self.space
        arity = degree(m)
        even = key_parity(space, key) == EVEN
        letter = ("\\varphi" if even else "\\psi") if latex else ("phi" if even else "psi")
        out = _label(space.names[o])

        def sub(x):
            return f"_{{{x}}}" if latex else f"_{x}"

        def sup(x):
            return f"^{{{x}}}" if latex else f"^{x}"

        if space.dim == 1:
            return letter if space.max_arity == 1 else letter + sub(arity)
        if len(enumerate_monomials(space, arity)) == 1:
            return letter + sub(out)
        if self._is_unique(arity):
            return letter + sup(arity) + sub(out)
        if arity == 1:
            return letter + sup(_label(space.names[m.index(1)])) + sub(out)
        multi = ",".join(str(x) for x in m)
        return letter + sub(f"({multi}),{out}")


def _coeff(c: Fraction, latex: bool) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return rf"\frac{{{c.numerator}}}{{{c.denominator}}}" if latex else f"{c.numerator}/{c.denominator}"


def _join(parts: list[tuple[int, str]]) -> str:
    if not parts:
        return "0"
    sign, body = parts[0]
    out = ("-" if sign < 0 else "") + body
    for sign, body in parts[1:]:
        out += (" - " if sign < 0 else " + ") + body
    return out


def _product(factors: list[str], latex: bool) -> str:
    return ("" if latex else "*").join(f for f in factors if f)


def _scaled(c: Fraction, factors: list[str], latex: bool) -> tuple[int, str]:
    mag = abs(c)
    fs = list(factors)
    if mag != 1 or not any(fs):
        fs.insert(0, _coeff(mag, latex))
    return (-1 if c < 0 else 1), _product(fs, latex)


def cochain_parts(c: Cochain, names: Notation, latex: bool) -> list[tuple[int, str]]:
    return [_scaled(v, [names.name(k, latex)], latex) for k, v in c.items()]


def render_cochain(c: Cochain, names: Notation, latex: bool = False) -> str:
    return _join(cochain_parts(c, names, latex))


def normalize_sign(p: ParamPoly) -> ParamPoly:
    items = p.items()
    return -p if items and items[0][1] < 0 else p


def render_poly(p: ParamPoly, latex: bool = False) -> str:
    return p.format(latex)


def _weighted(name: str, p: ParamPoly, latex: bool) -> tuple[int, str]:
    """name * p, with parentheses only when p has several terms."""
    items = p.items()
    if len(items) == 1:
        key, c = items[0]
        return _scaled(c, [name, p.monomial_str(key, latex)], latex)
    body = p.format(latex)
    return 1, _product([name, f"({body})"], latex)


class DeltaNames:
    """Display names for delta cochains.

    Composite deltas become h^k.  A single-term delta of the same parity and
    leading output as some composite one joins that family, so the names
    stay uniform along a family whose members happen to be pure for some k.
    On a 1|1 space the even deltas landing in e always form that family.
    """

    def __init__(self, deltas: list[Cochain], names: Notation):
        self.names = names
        self.labels: list[tuple[str, str]] = []  # (plain, latex)
        self.legend: list[int] = []

        def lead(c):
            return c.parity, min(o for _, o in c.terms)

        families = {lead(c) for c in deltas if len(c.terms) > 1}
        if names.space.dims == (1, 1):
            families.add((EVEN, 0))
        family = [len(c.terms) > 1 or lead(c) in families for c in deltas]
        by_arity: dict[int, list[int]] = {}
        for i, c in enumerate(deltas):
            if family[i]:
                by_arity.setdefault(min(c.arities()), []).append(i)
        for i, c in enumerate(deltas):
            if not family[i]:
                (key, v), = c.terms.items()
                plain = names.name(key)
                tex = names.name(key, True)
                if v != 1:
                    plain, tex = f"{_coeff(v, False)}*{plain}", f"{_coeff(v, True)}{tex}"
                self.labels.append((plain, tex))
                continue
            arity = min(c.arities())
            group = by_arity[arity]
            if len(group) == 1:
                self.labels.append((f"h^{arity}", f"h^{{{arity}}}"))
            else:
                j = group.index(i) + 1
                self.labels.append((f"h^{arity}_{j}", f"h^{{{arity}}}_{{{j}}}"))
            self.legend.append(i)

    def label(self, i: int, latex: bool) -> str:
        return self.labels[i][1 if latex else 0]


def deformation_parts(defm: Deformation, names: Notation, latex: bool) -> tuple[list[tuple[int, str]], DeltaNames]:
    H = defm.cohomology
    ring = defm.ring
    dn = DeltaNames(H.delta_basis, names)
    parts = cochain_parts(defm.base, names, latex)
    rest = defm.current - ParamCochain.from_cochain(defm.base, ring)
    order = sorted(range(len(defm.parameters)), key=lambda i: (defm.parameters[i] not in ring.odd, i))
    for i in order:
        pname = defm.parameters[i]
        c = H.delta_basis[i]
        p = ring.gen(pname)
        rest = rest - ParamCochain.from_cochain(c, ring, p)
        parts.append((1, _product([dn.label(i, latex), ring.gen(pname).format(latex)], latex)))
    for key, p in rest.items():
        parts.append(_weighted(names.name(key, latex), p, latex))
    return parts, dn


def _legend(dn: DeltaNames, deltas: list[Cochain], latex: bool) -> list[str]:
    eq = " = "
    return [dn.label(i, latex) + eq + render_cochain(deltas[i], dn.names, latex) for i in dn.legend]


def render_deformation(defm: Deformation, latex: bool = False, symbol: str | None = None) -> str:
    names = Notation(defm.space)
    parts, dn = deformation_parts(defm, names, latex)
    lines = []
    status = defm.status
    if status == "miniversal":
        status += f" at order {defm.order}"
    if defm.verified is not None:
        status += ", closure verified" if defm.verified else ", closure NOT verified"
    left = symbol or (f"d_{{{defm.order}}}" if latex else f"d_{defm.order}")
    if latex:
        lines.append(f"% status: {status}")
        lines.append(f"{left} = {_join(parts)}")
        for item in _legend(dn, defm.cohomology.delta_basis, True):
            lines.append(f"% where {item}")
        rels = [normalize_sign(r).format(True) for r in defm.relation_list()]
        lines.append("R = \\{" + ", ".join(rels) + "\\}" if rels else "% no relations")
        return "\n".join(lines) + "\n"
    lines.append(f"space {defm.space}, window {defm.window}, parameter truncation {defm.ring.truncation}")
    lines.append(f"d = {render_cochain(defm.base, names)}")
    lines.append(f"status: {status}")
    lines.append(f"{left} = {_join(parts)}")
    legend = _legend(dn, defm.cohomology.delta_basis, False)
    if legend:
        lines.append("where")
        lines.extend("  " + x for x in legend)
    rels = defm.relation_list()
    if rels:
        lines.append("relations:")
        lines.extend(f"  {normalize_sign(r)} = 0" for r in rels)
    else:
        lines.append("no relations")
    if defm.space.max_arity is None:
        lines.append(f"note: cochains above arity {defm.reliable_max} are outside the computed window")
    return "\n".join(lines) + "\n"


def render_cohomology(H: CohomologyData, latex: bool = False) -> str:
    names = Notation(H.space)
    dn = DeltaNames(H.delta_basis, names)

    def lst(cs):
        return [render_cochain(c, names, latex) for c in cs]

    lines = [f"space {H.space}, window {H.window}, exact up to arity {H.reliable_max}"]
    lines.append(f"d = {render_cochain(H.d, names, latex)}")
    lines.append(f"dim H = {H.homology_dim}")
    for a, dims in sorted(H.dims.items()):
        lines.append(f"  arity {a}: cocycles {dims['cocycles']}, coboundaries {dims['coboundaries']}, homology {dims['homology']}")
    lines.append("cocycles: " + ", ".join(lst(H.cocycle_basis) or ["none"]))
    lines.append("coboundaries: " + ", ".join(lst(H.coboundary_basis) or ["none"]))
    deltas = [dn.label(i, latex) for i in range(len(H.delta_basis))]
    lines.append("homology representatives: " + ", ".join(deltas or ["none"]))
    lines.extend("  " + x for x in _legend(dn, H.delta_basis, latex))
    return "\n".join(lines) + "\n"


def render_param_cochain(c: ParamCochain, latex: bool = False) -> str:
    names = Notation(c.space)
    parts = []
    for key, p in c.items():
        if len(p.terms) == 1 and p.ring.unit_key in p.terms:
            parts.append(_scaled(p.terms[p.ring.unit_key], [names.name(key, latex)], latex))
        else:
            parts.append(_weighted(names.name(key, latex), p, latex))
    return _join(parts)


# structured output ---------------------------------------------------------

def _q(c: Fraction) -> str:
    return str(Fraction(c))


def encode_monomial(space: GradedSpace, m) -> dict[str, int]:
    return {n: k for n, k in zip(space.names, m) if k}


def encode_poly(p: ParamPoly) -> list[dict[str, Any]]:
    ring = p.ring
    out = []
    for (exps, mask), c in p.items():
        out.append({
            "even": {n: e for n, e in zip(ring.even, exps) if e},
            "odd": [n for j, n in enumerate(ring.odd) if mask >> j & 1],
            "coeff": _q(c),
        })
    return out


def decode_poly(ring: ParamRing, data: list[dict[str, Any]]) -> ParamPoly:
    out = ring.zero()
    for t in data:
        term = ring.const(Fraction(t["coeff"]))
        for n in t["odd"]:
            term = term * ring.gen(n)
        for n, e in t["even"].items():
            term = term * ring.gen(n) ** e
        out = out + term
    return out


def encode_cochain(c: Cochain) -> list[dict[str, Any]]:
    return [
        {"input": encode_monomial(c.space, m), "output": c.space.names[o], "coeff": _q(v)}
        for (m, o), v in c.items()
    ]


def _decode_key(space: GradedSpace, t: dict[str, Any]) -> Key:
    exps = [0] * space.dim
    for n, k in t["input"].items():
        exps[space.index(n)] = k
    return tuple(exps), space.index(t["output"])


def decode_cochain(space: GradedSpace, data: list[dict[str, Any]]) -> Cochain:
    return Cochain(space, {_decode_key(space, t): Fraction(t["coeff"]) for t in data})


def encode_param_cochain(c: ParamCochain) -> list[dict[str, Any]]:
    return [
        {"input": encode_monomial(c.space, m), "output": c.space.names[o], "coeff": encode_poly(p)}
        for (m, o), p in c.items()
    ]


def decode_param_cochain(space: GradedSpace, ring: ParamRing, data: list[dict[str, Any]]) -> ParamCochain:
    return ParamCochain(space, ring, {_decode_key(space, t): decode_poly(ring, t["coeff"]) for t in data})


def _header(command: str, space: GradedSpace, window: ArityWindow | None, truncation: int | None) -> dict[str, Any]:
    return {
        "schema": SCHEMA,
        "engine": f"linf {linf.__version__}",
        "command": command,
        "space": {"even": list(space.even_basis), "odd": list(space.odd_basis)},
        "window": [window.min_arity, window.max_arity] if window else None,
        "truncation": truncation,
    }


def structured_deformation(defm: Deformation) -> dict[str, Any]:
    ring = defm.ring
    doc = _header("deform", defm.space, defm.window, ring.truncation)
    doc.update({
        "parameters": {"even": list(ring.even), "odd": list(ring.odd)},
        "base": encode_cochain(defm.base),
        "deformation": encode_param_cochain(defm.current),
        "deltas": [encode_cochain(c) for c in defm.cohomology.delta_basis],
        "delta_parameters": list(defm.parameters),
        "relations": [encode_poly(r) for r in defm.relation_list()],
        "order": defm.order,
        "status": defm.status,
        "verified": defm.verified,
        "reliable_arity": defm.reliable_max,
    })
    return doc


def structured_cohomology(H: CohomologyData) -> dict[str, Any]:
    doc = _header("cohomology", H.space, H.window, None)
    doc.update({
        "d": encode_cochain(H.d),
        "reliable_arity": H.reliable_max,
        "dims": {str(a): v for a, v in sorted(H.dims.items())},
        "homology_dim": H.homology_dim,
        "cocycles": [encode_cochain(c) for c in H.cocycle_basis],
        "coboundaries": [encode_cochain(c) for c in H.coboundary_basis],
        "deltas": [encode_cochain(c) for c in H.delta_basis],
    })
    return doc


def dumps(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def parse_structured(text: str) -> dict[str, Any]:
    """Rebuild engine objects from a structured document.

    Returns the document with "space", and where present "ring", "base",
    "deformation", "deltas", "relations", "d", "result" replaced by objects.
    """
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    space = build_space(doc["space"]["even"], doc["space"]["odd"])
    out = dict(doc)
    out["space"] = space
    if doc.get("window"):
        out["window"] = ArityWindow(*doc["window"])
    ring = None
    if "parameters" in doc:
        ring = ParamRing(tuple(doc["parameters"]["even"]), tuple(doc["parameters"]["odd"]), doc["truncation"])
        out["ring"] = ring
    for k in ("base", "d"):
        if k in doc:
            out[k] = decode_cochain(space, doc[k])
    for k in ("deltas", "cocycles", "coboundaries"):
        if k in doc:
            out[k] = [decode_cochain(space, c) for c in doc[k]]
    if ring is not None:
        for k in ("deformation", "result"):
            if k in doc:
                out[k] = decode_param_cochain(space, ring, doc[k])
        if "relations" in doc:
            out["relations"] = [decode_poly(ring, r) for r in doc["relations"]]
    return out
