"""Job configuration files (YAML) with position-annotated diagnostics.

Grammar (all keys optional except ``space`` and, for most commands,
``differential``)::

    space:
      even: [e]            # names of even basis vectors
      odd: [f]             # names of odd basis vectors
    parameters:            # parameter ring for transport jobs
      even: [t1, t2]
      odd: [theta1, theta2]
    differential:          # list of terms input -> coeff * output
      - {input: "e^2 f", output: e, coeff: 1}
      - {input: {e: 1}, output: f, coeff: "-1/2"}
    window: "1:7"          # arity window A:B
    order: 4               # maximal deformation order
    truncation: 6          # parameter degree kept in power series
    ring_map:              # push-out of the miniversal base, name -> poly
      theta1_1: "theta1_1 + t2*theta1_2/(1+t1)"
    morphism:
      identity_plus: true  # g = I + terms (default) or g = terms
      terms:
        - {input: f1, output: f2, coeff: u1}
    conjugation: pullback  # or pushforward
    expect:                # optional comparison target for transport
      - {input: "f1 f2", output: f1, coeff: "1 + t1"}

Coefficients are integers, strings ``"p/q"``, or, when ``parameters`` are
declared, polynomials in the parameters.  Floats are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml

from linf.cochain import ArityWindow, Cochain, CochainError, key_parity
from linf.deform import ParamCochain
from linf.gspace import EVEN, GradedSpace, SpaceError, build_space
from linf.paramring import ParamPoly, ParamRing, RingError, parse_poly
from linf.symw import MonomialError, check_monomial, format_monomial

KNOWN_KEYS = {
    "space", "parameters", "differential", "window", "order", "truncation",
    "ring_map", "morphism", "conjugation", "expect", "max_arity", "name",
}


class ConfigError(ValueError):
    """A configuration problem, located at line/column when known (1-based)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, expected: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.expected = expected
        super().__init__(str(self))

    def __str__(self) -> str:
        where = f"line {self.line}, column {self.column}: " if self.line is not None else ""
        hint = f" (expected {self.expected})" if self.expected else ""
        return f"{where}{self.message}{hint}"


@dataclass
class MorphismSpec:
    terms: list[tuple[Any, int, Any]]  # (monomial, output, coefficient)
    identity_plus: bool = True


@dataclass
class JobConfig:
    space: GradedSpace
    differential: Cochain | ParamCochain | None
    ring: ParamRing | None = None
    window: ArityWindow | None = None
    order: int | None = None
    truncation: int | None = None
    max_arity: int | None = None
    ring_map: dict[str, ParamPoly] = field(default_factory=dict)
    morphism: MorphismSpec | None = None
    conjugation: str = "pullback"
    expect: ParamCochain | None = None
    name: str | None = None


class _Locator:
    def __init__(self, root):
        self.marks: dict[tuple, Any] = {}
        self.raw: dict[tuple, str] = {}
        if root is not None:
            self._walk(root, ())

    def _walk(self, node, path):
        self.marks[path] = node.start_mark
        if isinstance(node, yaml.ScalarNode):
            self.raw[path] = node.value
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                self.marks[path + (k.value, "<key>")] = k.start_mark
                self._walk(v, path + (k.value,))
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                self._walk(v, path + (i,))

    def error(self, path, message, expected=None, key=False) -> ConfigError:
        path = tuple(path)
        look = path + ("<key>",) if key else path
        while look not in self.marks and look:
            look = look[:-1]
        mark = self.marks.get(look)
        if mark is None:
            return ConfigError(message, expected=expected)
        return ConfigError(message, mark.line + 1, mark.column + 1, expected)


_RATIONAL = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")
_FACTOR = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*)\s*(?:\^\s*(\d+))?\s*\*?")


def _parse_monomial_text(text: str) -> dict[str, int] | None:
    out: dict[str, int] = {}
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _FACTOR.match(text, pos)
        if not m or m.end() == pos:
            return None
        out[m.group(1)] = out.get(m.group(1), 0) + int(m.group(2) or 1)
        pos = m.end()
    return out or None


class _Parser:
    def __init__(self, text: str):
        try:
            root = yaml.compose(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            problem = getattr(exc, "problem", None) or str(exc)
            if mark is not None:
                raise ConfigError(f"malformed document: {problem}", mark.line + 1, mark.column + 1) from None
            raise ConfigError(f"malformed document: {problem}") from None
        self.loc = _Locator(root)
        self.data = yaml.safe_load(text) if root is not None else None

    def err(self, path, message, expected=None, key=False):
        return self.loc.error(path, message, expected, key)

    def mapping(self, value, path, what):
        if not isinstance(value, dict):
            raise self.err(path, f"{what} must be a mapping")
        return value

    def names(self, value, path) -> list[str]:
        if value is None:
            return []
        if isinstance(value, str):
            value = value.split()
        if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
            raise self.err(path, "expected a list of names")
        return value

    def integer(self, value, path, what, minimum=1) -> int:
        if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
            raise self.err(path, f"{what} must be an integer >= {minimum}")
        return value

    def coefficient(self, value, path, ring: ParamRing | None):
        if isinstance(value, bool) or isinstance(value, float):
            raise self.err(path, f"non-rational coefficient {value!r}", "an integer or a string 'p/q'")
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            if _RATIONAL.match(value):
                try:
                    return Fraction(re.sub(r"\s", "", value))
                except ZeroDivisionError:
                    raise self.err(path, f"zero denominator in {value!r}") from None
            if ring is not None:
                try:
                    return parse_poly(ring, value)
                except RingError as exc:
                    raise self.err(path, f"bad coefficient {value!r}: {exc}") from None
            raise self.err(path, f"non-rational coefficient {value!r}", "an integer or a string 'p/q'")
        raise self.err(path, f"non-rational coefficient {value!r}", "an integer or a string 'p/q'")

    def monomial(self, value, path, space: GradedSpace):
        if isinstance(value, str):
            parsed = _parse_monomial_text(value)
            if parsed is None:
                raise self.err(path, f"cannot read monomial {value!r}", "names with optional ^k, e.g. 'e^2 f'")
            value = parsed
        if not isinstance(value, dict) or not value:
            raise self.err(path, "input must be a monomial", "a mapping name: exponent or a string like 'e^2 f'")
        exps = [0] * space.dim
        for name, k in value.items():
            if name not in space.names:
                raise self.err(path, f"unknown basis name {name!r}", "one of " + ", ".join(space.names))
            if isinstance(k, bool) or not isinstance(k, int) or k < 0:
                raise self.err(path + [name], f"exponent of {name!r} must be a nonnegative integer")
            exps[space.index(name)] += k
        try:
            return check_monomial(space, tuple(exps))
        except MonomialError as exc:
            raise self.err(path, str(exc)) from None

    def terms(self, value, path, space: GradedSpace, ring: ParamRing | None):
        if value is None:
            return []
        if not isinstance(value, list):
            raise self.err(path, "expected a list of terms")
        out = []
        for i, t in enumerate(value):
            p = path + [i]
            t = self.mapping(t, p, "a term")
            for k in t:
                if k not in ("input", "output", "coeff"):
                    raise self.err(p + [k], f"unknown term key {k!r}", "input, output, coeff", key=True)
            if "input" not in t or "output" not in t:
                raise self.err(p, "term needs 'input' and 'output'")
            m = self.monomial(t["input"], p + ["input"], space)
            o = t["output"]
            if not isinstance(o, str) or o not in space.names:
                raise self.err(p + ["output"], f"unknown basis name {o!r}", "one of " + ", ".join(space.names))
            c = self.coefficient(t.get("coeff", 1), p + ["coeff"], ring)
            out.append((m, space.index(o), c))
        return out


def _cochain(terms, space: GradedSpace, ring: ParamRing | None):
    if ring is None:
        c = Cochain.zero(space)
        for m, o, v in terms:
            c = c + Cochain(space, {(m, o): v})
        return c
    c = ParamCochain(space, ring)
    for m, o, v in terms:
        p = v if isinstance(v, ParamPoly) else ring.const(v)
        c = c + ParamCochain(space, ring, {(m, o): p})
    return c


def parse_config(text: str) -> JobConfig:
    P = _Parser(text)
    data = P.data
    if data is None:
        raise ConfigError("empty configuration", expected="a mapping with at least 'space'")
    data = P.mapping(data, [], "the configuration")
    for k in data:
        if k not in KNOWN_KEYS:
            raise P.err([k], f"unknown key {k!r}", ", ".join(sorted(KNOWN_KEYS)), key=True)
    if "space" not in data:
        raise ConfigError("missing key 'space'", 1, 1, "space: {even: [...], odd: [...]}")
    sp = P.mapping(data["space"], ["space"], "space")
    for k in sp:
        if k not in ("even", "odd"):
            raise P.err(["space", k], f"unknown key {k!r}", "even, odd", key=True)
    try:
        space = build_space(P.names(sp.get("even"), ["space", "even"]), P.names(sp.get("odd"), ["space", "odd"]))
    except SpaceError as exc:
        raise P.err(["space"], str(exc)) from None

    truncation = None
    if "truncation" in data:
        truncation = P.integer(data["truncation"], ["truncation"], "truncation")
    order = None
    if "order" in data:
        order = P.integer(data["order"], ["order"], "order", minimum=0)
    ring = None
    if "parameters" in data:
        pr = P.mapping(data["parameters"], ["parameters"], "parameters")
        even = P.names(pr.get("even"), ["parameters", "even"])
        odd = P.names(pr.get("odd"), ["parameters", "odd"])
        clash = set(even + odd) & set(space.names)
        if clash:
            raise P.err(["parameters"], f"parameter names clash with basis names: {sorted(clash)}")
        try:
            ring = ParamRing(tuple(even), tuple(odd), truncation or 4)
        except RingError as exc:
            raise P.err(["parameters"], str(exc)) from None

    window = None
    if "window" in data:
        # unquoted 1:7 is a base-60 integer to YAML 1.1, so read the raw scalar
        w = P.loc.raw.get(("window",), data["window"])
        try:
            window = ArityWindow.parse(w) if not isinstance(w, list) else ArityWindow(*w)
        except (CochainError, TypeError, ValueError) as exc:
            raise P.err(["window"], f"bad window {w!r}: {exc}", "A:B with 1 <= A <= B") from None

    differential = None
    if "differential" in data:
        terms = P.terms(data["differential"], ["differential"], space, ring)
        for i, (m, o, _) in enumerate(terms):
            if key_parity(space, (m, o)) == EVEN:
                raise P.err(["differential", i], f"term {format_monomial(space, m)} -> {space.names[o]} is even", "odd terms only: a codifferential is odd")
        differential = _cochain(terms, space, ring)

    ring_map = {}
    if "ring_map" in data:
        if ring is None:
            raise P.err(["ring_map"], "ring_map needs declared target 'parameters'")
        rm = P.mapping(data["ring_map"], ["ring_map"], "ring_map")
        for name, v in rm.items():
            c = P.coefficient(v if not isinstance(v, (int,)) else str(v), ["ring_map", name], ring)
            ring_map[str(name)] = c if isinstance(c, ParamPoly) else ring.const(c)

    morphism = None
    if "morphism" in data:
        if ring is None:
            ring = ParamRing((), (), truncation or 4)
        mo = P.mapping(data["morphism"], ["morphism"], "morphism")
        for k in mo:
            if k not in ("identity_plus", "terms"):
                raise P.err(["morphism", k], f"unknown key {k!r}", "identity_plus, terms", key=True)
        ip = mo.get("identity_plus", True)
        if not isinstance(ip, bool):
            raise P.err(["morphism", "identity_plus"], "identity_plus must be true or false")
        morphism = MorphismSpec(P.terms(mo.get("terms"), ["morphism", "terms"], space, ring), ip)

    conjugation = data.get("conjugation", "pullback")
    if conjugation not in ("pullback", "pushforward"):
        raise P.err(["conjugation"], f"unknown conjugation {conjugation!r}", "pullback or pushforward")

    expect = None
    if "expect" in data:
        if ring is None:
            ring = ParamRing((), (), truncation or 4)
        expect = _cochain(P.terms(data["expect"], ["expect"], space, ring), space, ring)

    max_arity = None
    if "max_arity" in data:
        max_arity = P.integer(data["max_arity"], ["max_arity"], "max_arity")
    name = data.get("name")
    return JobConfig(
        space=space, differential=differential, ring=ring, window=window, order=order,
        truncation=truncation, max_arity=max_arity, ring_map=ring_map, morphism=morphism,
        conjugation=conjugation, expect=expect, name=None if name is None else str(name),
    )


def load_config(path: str | Path) -> JobConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def shipped_configs() -> dict[str, Path]:
    """The example configurations installed with the package, by stem."""
    here = Path(__file__).resolve().parent.parent / "data" / "configs"
    return {p.stem: p for p in sorted(here.glob("*.yaml"))}
