"""linf <command> --config <path> [--format plain|latex|structured] [--window A:B] [--order N] [--out <path>]"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from linf.cli import render
from linf.cli.config import ConfigError, JobConfig, load_config
from linf.cochain import ArityWindow, Cochain, CochainError, bracket, check_codifferential, cochain_basis
from linf.deform import DeformationError, ParamCochain, cohomology, miniversal
from linf.gspace import SpaceError
from linf.morph import MorphismData, MorphismError, RingMorphism, pushout, transport
from linf.paramring import ParamRing, RingError, TruncationError
from linf.symw import MonomialError

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_TRUNCATED = 4

COMMANDS = ("bracket-table", "cohomology", "deform", "transport", "check")


class Precondition(Exception):
    """Input is well formed but the computation cannot proceed."""

    def __init__(self, message: str, certificate: str = ""):
        super().__init__(message)
        self.certificate = certificate


@dataclass
class Result:
    text: str
    status: int = EXIT_OK


def _default_window(cfg: JobConfig, max_arity: int) -> ArityWindow:
    top = cfg.space.max_arity
    return ArityWindow(1, max_arity if top is None else min(max_arity, top))


def _need_differential(cfg: JobConfig) -> Cochain:
    d = cfg.differential
    if d is None:
        raise ConfigError("this command needs a 'differential'")
    if isinstance(d, ParamCochain):
        if any(p.degree() > 0 for _, p in d.items()):
            raise ConfigError("the differential must have constant coefficients for this command")
        return d.augment()
    return d


def _codifferential(d: Cochain, window: ArityWindow) -> None:
    # [d,d] may reach arity 2*top-1, so check on a window with margin
    chk = check_codifferential(d, ArityWindow(1, 2 * window.max_arity))
    if not chk:
        names = render.Notation(d.space)
        raise Precondition(f"not a codifferential: {chk.reason}", "[d,d] = " + render.render_cochain(chk.certificate, names))


def cmd_check(cfg: JobConfig, fmt: str, window: ArityWindow | None, order: int | None) -> Result:
    d = _need_differential(cfg)
    window = window or cfg.window or _default_window(cfg, 6)
    chk = check_codifferential(d, ArityWindow(1, 2 * window.max_arity))
    names = render.Notation(d.space)
    latex = fmt == "latex"
    if fmt == "structured":
        doc = render._header("check", d.space, window, None)
        doc.update({"d": render.encode_cochain(d), "ok": chk.ok, "reason": chk.reason,
                    "certificate": render.encode_cochain(chk.certificate)})
        return Result(render.dumps(doc), EXIT_OK if chk else EXIT_PRECONDITION)
    lines = [f"d = {render.render_cochain(d, names, latex)}"]
    if chk:
        lines.append("d is a codifferential: [d,d] = 0")
    else:
        lines.append(f"d is NOT a codifferential: {chk.reason}")
        lines.append(f"certificate: [d,d] = {render.render_cochain(chk.certificate, names, latex)}")
    return Result("\n".join(lines) + "\n", EXIT_OK if chk else EXIT_PRECONDITION)


def cmd_bracket_table(cfg: JobConfig, fmt: str, window: ArityWindow | None, order: int | None) -> Result:
    window = window or cfg.window or _default_window(cfg, cfg.max_arity or 6)
    space = cfg.space
    top = window.max_arity if space.max_arity is None else min(window.max_arity, space.max_arity)
    keys = [k for a in range(window.min_arity, top + 1) for k in cochain_basis(space, a)]
    names = render.Notation(space)
    latex = fmt == "latex"
    entries = []
    for i, a in enumerate(keys):
        for b in keys[i:]:
            ca, cb = Cochain(space, {a: 1}), Cochain(space, {b: 1})
            entries.append((a, b, bracket(ca, cb, window)))
    if fmt == "structured":
        doc = render._header("bracket-table", space, window, None)
        doc["entries"] = [
            {"a": render.encode_cochain(Cochain(space, {a: 1})), "b": render.encode_cochain(Cochain(space, {b: 1})),
             "bracket": render.encode_cochain(c)}
            for a, b, c in entries
        ]
        return Result(render.dumps(doc))
    lines = [] if latex else [f"space {space}, window {window}, {len(entries)} brackets"]
    for a, b, c in entries:
        left = f"[{names.name(a, latex)}, {names.name(b, latex)}]"
        lines.append(f"{left} = {render.render_cochain(c, names, latex)}" + (r" \\" if latex else ""))
    return Result("\n".join(lines) + "\n")


def cmd_cohomology(cfg: JobConfig, fmt: str, window: ArityWindow | None, order: int | None) -> Result:
    d = _need_differential(cfg)
    window = window or cfg.window or _default_window(cfg, 6)
    _codifferential(d, window)
    H = cohomology(d, window)
    if fmt == "structured":
        return Result(render.dumps(render.structured_cohomology(H)))
    return Result(render.render_cohomology(H, fmt == "latex"))


def _deform(cfg: JobConfig, window: ArityWindow | None, order: int | None):
    d = _need_differential(cfg)
    max_order = order if order is not None else (cfg.order if cfg.order is not None else 6)
    window = window or cfg.window or ArityWindow(1, max_order + 3)
    _codifferential(d, window)
    return miniversal(d, max_order=max_order, window=window, truncation=cfg.truncation)


def cmd_deform(cfg: JobConfig, fmt: str, window: ArityWindow | None, order: int | None) -> Result:
    defm = _deform(cfg, window, order)
    status = EXIT_TRUNCATED if defm.status == "truncated" else EXIT_OK
    if fmt == "structured":
        return Result(render.dumps(render.structured_deformation(defm)), status)
    return Result(render.render_deformation(defm, fmt == "latex"), status)


def _morphism(cfg: JobConfig, ring: ParamRing) -> MorphismData:
    mor = cfg.morphism
    corr = ParamCochain(cfg.space, ring)
    for m, o, c in mor.terms:
        p = c.retruncate(ring) if hasattr(c, "retruncate") else ring.const(c)
        corr = corr + ParamCochain(cfg.space, ring, {(m, o): p})
    if mor.identity_plus:
        return MorphismData.identity_plus(cfg.space, ring, corr)
    comps = {}
    for k in sorted({sum(m) for m, _ in corr.terms}):
        comps[k] = corr.restrict(ArityWindow(k, k))
    return MorphismData(cfg.space, ring, comps)


def cmd_transport(cfg: JobConfig, fmt: str, window: ArityWindow | None, order: int | None) -> Result:
    space = cfg.space
    ring = cfg.ring or ParamRing((), (), cfg.truncation or 4)
    lines = []
    if cfg.ring_map:
        defm = _deform(cfg, None, order)
        lam = RingMorphism(defm.ring, ring, cfg.ring_map)
        d = pushout(defm, lam).current
        lines.append(f"pushed out the order-{defm.order} miniversal deformation ({defm.status})")
    else:
        d = cfg.differential
        if d is None:
            raise ConfigError("transport needs a 'differential'")
        d = ParamCochain.from_cochain(d, ring) if isinstance(d, Cochain) else d
    window = window or cfg.window or _default_window(cfg, 6)
    if cfg.morphism is not None:
        g = _morphism(cfg, ring)
        out = transport(d, g, window, cfg.conjugation)
        lines.append(f"transported by g ({cfg.conjugation})")
    else:
        out = d
    out = out.restrict(window)
    status = EXIT_OK
    match = None
    if cfg.expect is not None:
        match = out == cfg.expect.with_ring(ring).restrict(window)
        status = EXIT_OK if match else EXIT_MISMATCH
    if fmt == "structured":
        doc = render._header("transport", space, window, ring.truncation)
        doc.update({
            "parameters": {"even": list(ring.even), "odd": list(ring.odd)},
            "conjugation": cfg.conjugation,
            "result": render.encode_param_cochain(out),
            "matches_expected": match,
        })
        return Result(render.dumps(doc), status)
    latex = fmt == "latex"
    body = render.render_param_cochain(out, latex)
    if latex:
        return Result(f"g^*(d) = {body}\n", status)
    lines.insert(0, f"space {space}, window {window}, parameter truncation {ring.truncation}")
    lines.append(f"g*(d) = {body}")
    if match is not None:
        lines.append("matches expected: " + ("yes" if match else "NO"))
    return Result("\n".join(lines) + "\n", status)


HANDLERS = {
    "bracket-table": cmd_bracket_table,
    "cohomology": cmd_cohomology,
    "deform": cmd_deform,
    "transport": cmd_transport,
    "check": cmd_check,
}


def execute(command: str, cfg: JobConfig, fmt: str = "plain", window: ArityWindow | None = None,
            order: int | None = None) -> Result:
    """Run one command; engine precondition failures become exit status 3."""
    try:
        return HANDLERS[command](cfg, fmt, window, order)
    except Precondition as exc:
        text = f"error: {exc}\n" + (f"{exc.certificate}\n" if exc.certificate else "")
        return Result(text, EXIT_PRECONDITION)
    except TruncationError as exc:
        return Result(f"error: {exc}\n", EXIT_TRUNCATED)
    except (DeformationError, MorphismError, RingError, CochainError, MonomialError, SpaceError) as exc:
        return Result(f"error: {exc}\n", EXIT_PRECONDITION)


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="linf", description="Exact L-infinity structure computations.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="YAML job description")
    ap.add_argument("--format", choices=("plain", "latex", "structured"), default="plain")
    ap.add_argument("--window", help="arity window A:B")
    ap.add_argument("--order", type=int, help="maximal deformation order")
    ap.add_argument("--out", help="write the result here instead of stdout")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        window = ArityWindow.parse(args.window) if args.window else None
    except (ConfigError, CochainError) as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.order is not None and args.order < 0:
        print("--order must be nonnegative", file=sys.stderr)
        return EXIT_PARSE
    try:
        res = execute(args.command, cfg, args.format, window, args.order)
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if res.status in (EXIT_PRECONDITION,) and res.text.startswith("error:"):
        print(res.text, end="", file=sys.stderr)
        return res.status
    if args.out:
        write_atomic(args.out, res.text)
    else:
        sys.stdout.write(res.text)
    return res.status


if __name__ == "__main__":
    sys.exit(main())
