"""Command line front door.

Exit codes are part of the contract: 0 ok, 1 parse/elaborate errors, 2 bad
or unconvertible documents, 3 counterexample found, 4 inconclusive check,
10 I/O failure, 11 bad flag value, 12 service bind failure.  Verbosity via
the CCRS_LOG environment variable (debug/info/warning/error).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from ccrs.diagnostics import Diagnostic, has_errors
from ccrs.emit import EmitError, emit
from ccrs.hdl.elaborate import ElaboratedDesign, elaborate
from ccrs.hdl.lexer import tokenize
from ccrs.hdl.parser import parse
from ccrs.ir.canonical import canonical_form
from ccrs.ir.model import CcrsDocument
from ccrs.ir.serial import deserialize, serialize
from ccrs.ir.validate import validate
from ccrs.layout.engine import LayoutGeometry, layout
from ccrs.lower.templater import lower_with_library
from ccrs.render.svg import RenderOptions, render
from ccrs.sim.equivalence import check_equivalence
from ccrs.sim.stimulus import SimulationError

log = logging.getLogger("ccrs")

EXIT_OK = 0
EXIT_HDL_ERRORS = 1
EXIT_DOC_ERRORS = 2
EXIT_COUNTEREXAMPLE = 3
EXIT_INCONCLUSIVE = 4
EXIT_IO = 10
EXIT_FLAG = 11
EXIT_BIND = 12


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"ccrs: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())


def _configure_logging() -> None:
    level = os.environ.get("CCRS_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(name)s %(levelname)s %(message)s")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccrs",
        description="Convert between an HDL subset and its graphical "
                    "document form, render drawings, and check equivalence.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="HDL -> .ccrs.json")
    p.add_argument("input", help="input .v file")
    p.add_argument("-o", "--out", help="output document path")
    p.add_argument("--top", help="top module (default: the uninstantiated one)")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("emit", help=".ccrs.json -> HDL")
    p.add_argument("input", help="input document")
    p.add_argument("-o", "--out", help="output .v path")
    p.add_argument("--self-check", action="store_true",
                   help="re-parse and re-lower the output and verify the round trip")
    p.set_defaults(func=_cmd_emit)

    p = sub.add_parser("render", help=".ccrs.json -> .svg")
    p.add_argument("input")
    p.add_argument("-o", "--out", help="output .svg path")
    p.add_argument("--clock-regions", action="store_true")
    p.add_argument("--net-names", action="store_true")
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("check", help="equivalence of two designs (.v or .ccrs.json)")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--budget", type=int, default=1 << 20)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--vectors", type=int, default=1000)
    p.add_argument("--cycles", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("validate", help="check a document's structure")
    p.add_argument("input")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("serve", help="run the HTTP service and studio")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--static", help="directory of studio assets to serve")
    p.set_defaults(func=_cmd_serve)
    return parser


def _print_diags(diags: list[Diagnostic], filename: str) -> None:
    for d in diags:
        print(d.render(filename), file=sys.stderr)


def _load_design(path: str) -> tuple[ElaboratedDesign | None, list[Diagnostic]]:
    source = Path(path).read_text(encoding="utf-8")
    tokens, diags = tokenize(source)
    if has_errors(diags):
        return None, diags
    tree, parse_diags = parse(tokens)
    diags.extend(parse_diags)
    if tree is None:
        return None, diags
    design, elab_diags = elaborate(tree)
    diags.extend(elab_diags)
    return design, diags


def _load_document(path: str) -> tuple[CcrsDocument | None, list[Diagnostic]]:
    doc, diags = deserialize(Path(path).read_bytes())
    if doc is not None:
        diags = diags + validate(doc)
        if has_errors(diags):
            return None, diags
    return doc, diags


# --- commands ------------------------------------------------------------------

def _cmd_convert(args) -> int:
    design, diags = _load_design(args.input)
    _print_diags(diags, args.input)
    if design is None:
        return EXIT_HDL_ERRORS
    try:
        top = args.top if args.top else design.top_candidates()[0] \
            if len(design.top_candidates()) == 1 else None
        if top is None:
            print(f"ccrs: top module is ambiguous, use --top "
                  f"(candidates: {', '.join(design.top_candidates())})",
                  file=sys.stderr)
            return EXIT_HDL_ERRORS
        if args.top and args.top not in design.modules:
            print(f"ccrs: no module named {args.top!r}", file=sys.stderr)
            return EXIT_HDL_ERRORS
    except KeyError:
        return EXIT_HDL_ERRORS
    result = lower_with_library(design, top)
    if result.doc is None:
        _print_diags(result.diagnostics, args.input)
        return EXIT_DOC_ERRORS
    out = Path(args.out) if args.out else Path(args.input).with_suffix(".ccrs.json")
    out.write_bytes(serialize(result.doc))
    log.info("wrote %s", out)
    return EXIT_OK


def _cmd_emit(args) -> int:
    doc, diags = _load_document(args.input)
    _print_diags(diags, args.input)
    if doc is None:
        return EXIT_DOC_ERRORS
    try:
        text = emit(doc)
    except EmitError as exc:
        _print_diags([exc.diag], args.input)
        return EXIT_DOC_ERRORS
    out = Path(args.out) if args.out else Path(args.input).with_suffix(".v")
    out.write_text(text, encoding="utf-8")
    if args.self_check:
        design, check_diags = _load_design(str(out))
        if design is None:
            _print_diags(check_diags, str(out))
            print("ccrs: self-check failed: output does not re-elaborate",
                  file=sys.stderr)
            return EXIT_DOC_ERRORS
        relowered = lower_with_library(design, doc.module)
        if relowered.doc is None or \
                canonical_form(relowered.doc) != canonical_form(doc):
            print("ccrs: self-check failed: round trip is not isomorphic",
                  file=sys.stderr)
            return EXIT_DOC_ERRORS
    log.info("wrote %s", out)
    return EXIT_OK


def _cmd_render(args) -> int:
    if args.scale <= 0:
        print("ccrs: --scale must be positive", file=sys.stderr)
        return EXIT_FLAG
    doc, diags = _load_document(args.input)
    _print_diags(diags, args.input)
    if doc is None:
        return EXIT_DOC_ERRORS
    geometry = LayoutGeometry.from_json(doc.geometry) if doc.geometry \
        else layout(doc)
    options = RenderOptions(show_clock_regions=args.clock_regions,
                            show_net_names=args.net_names, scale=args.scale)
    svg = render(doc, geometry, options=options)
    out = Path(args.out) if args.out else Path(args.input).with_suffix(".svg")
    out.write_bytes(svg)
    log.info("wrote %s", out)
    return EXIT_OK


def _load_side(path: str) -> tuple[object | None, int]:
    if path.endswith(".v"):
        design, diags = _load_design(path)
        _print_diags(diags, path)
        return (design, EXIT_HDL_ERRORS) if design is None else (design, EXIT_OK)
    doc, diags = _load_document(path)
    _print_diags(diags, path)
    return (doc, EXIT_DOC_ERRORS) if doc is None else (doc, EXIT_OK)


def _cmd_check(args) -> int:
    a, code = _load_side(args.a)
    if a is None:
        return code
    b, code = _load_side(args.b)
    if b is None:
        return code
    try:
        verdict = check_equivalence(a, b, budget=args.budget, depth=args.depth,
                                    vectors=args.vectors, cycles=args.cycles,
                                    seed=args.seed)
    except SimulationError as exc:
        print(f"ccrs: {exc}", file=sys.stderr)
        return EXIT_DOC_ERRORS
    print(verdict.describe())
    if verdict.kind == "counterexample":
        _print_counterexample(verdict)
        return EXIT_COUNTEREXAMPLE
    if verdict.kind == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _print_counterexample(verdict) -> None:
    names = sorted(verdict.stimulus.cycles[0]) if verdict.stimulus.cycles else []
    print("cycle  " + "  ".join(names))
    for k, row in enumerate(verdict.stimulus.cycles):
        marker = " <- mismatch" if k == verdict.cycle else ""
        print(f"{k:5}  " + "  ".join(str(row[n]) for n in names) + marker)


def _cmd_validate(args) -> int:
    doc, diags = deserialize(Path(args.input).read_bytes())
    if doc is not None:
        diags = diags + validate(doc)
    _print_diags(diags, args.input)
    if doc is None or has_errors(diags):
        return EXIT_DOC_ERRORS
    print(f"{args.input}: ok")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from ccrs.service import create_app

    static = args.static
    if static is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static = str(bundled) if bundled.is_dir() else None
    app = create_app(static_dir=static)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"ccrs: cannot serve: {exc}", file=sys.stderr)
        return EXIT_BIND
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
