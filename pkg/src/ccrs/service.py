"""Stateless HTTP API mirroring the CLI, plus static studio assets.

Every endpoint is a pure function of its request body; errors come back as
HTTP 422 with a ``diagnostics`` array in the same shape the CLI prints.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ccrs.diagnostics import Diagnostic, has_errors
from ccrs.emit import EmitError, emit
from ccrs.hdl.elaborate import elaborate
from ccrs.hdl.lexer import tokenize
from ccrs.hdl.parser import parse
from ccrs.ir.canonical import canonical_form
from ccrs.ir.model import CcrsDocument
from ccrs.ir.serial import from_json
from ccrs.ir.validate import validate
from ccrs.layout.engine import LayoutGeometry, layout
from ccrs.lower.symbols import OPCODES, SYMBOLS
from ccrs.lower.templater import lower_with_library
from ccrs.render.svg import RenderOptions, render
from ccrs.sim.equivalence import check_equivalence
from ccrs.sim.stimulus import SimulationError, Stimulus


class _ApiError(Exception):
    def __init__(self, diags: list[Diagnostic]):
        self.diags = diags


def _fail(message: str, code: str = "E-SCHEMA") -> _ApiError:
    from ccrs.diagnostics import error
    return _ApiError([error(code, message)])


def create_app(static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="ccrs", docs_url=None, redoc_url=None)

    @app.exception_handler(_ApiError)
    async def _api_error(_request: Request, exc: _ApiError):
        return JSONResponse(status_code=422,
                            content={"diagnostics": [d.to_json() for d in exc.diags]})

    async def _body(request: Request) -> dict:
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise _fail(f"request body is not valid JSON: {exc}")
        if not isinstance(body, dict):
            raise _fail("request body must be a JSON object")
        return body

    def _design_of(source: object):
        if not isinstance(source, str):
            raise _fail("'source' must be a string of HDL text")
        tokens, diags = tokenize(source)
        if has_errors(diags):
            raise _ApiError(diags)
        tree, parse_diags = parse(tokens)
        if tree is None:
            raise _ApiError(diags + parse_diags)
        design, elab_diags = elaborate(tree)
        if design is None:
            raise _ApiError(diags + parse_diags + elab_diags)
        return design

    def _document_of(obj: object) -> CcrsDocument:
        doc, diags = from_json(obj)
        if doc is None:
            raise _ApiError(diags)
        violations = validate(doc)
        if has_errors(violations):
            raise _ApiError(violations)
        return doc

    def _side_of(body: dict, key: str):
        side = body.get(key)
        if not isinstance(side, dict):
            raise _fail(f"'{key}' must be an object with 'source' or 'document'")
        if "source" in side:
            return _design_of(side["source"])
        if "document" in side:
            return _document_of(side["document"])
        raise _fail(f"'{key}' needs a 'source' or 'document' entry")

    @app.post("/api/v1/convert")
    async def convert(request: Request):
        body = await _body(request)
        design = _design_of(body.get("source"))
        top = body.get("top")
        if top is None:
            candidates = design.top_candidates()
            if len(candidates) != 1:
                raise _fail(f"top module is ambiguous: {', '.join(candidates)}")
            top = candidates[0]
        if top not in design.modules:
            raise _fail(f"no module named {top!r}", "E-UNKNOWN-MODULE")
        result = lower_with_library(design, top)
        if result.doc is None:
            raise _ApiError(result.diagnostics)
        result.doc.geometry = layout(result.doc).to_json()
        return {"document": result.doc.to_json()}

    @app.post("/api/v1/emit")
    async def emit_endpoint(request: Request):
        body = await _body(request)
        doc = _document_of(body.get("document"))
        try:
            return {"source": emit(doc)}
        except EmitError as exc:
            raise _ApiError([exc.diag])

    @app.post("/api/v1/render")
    async def render_endpoint(request: Request):
        body = await _body(request)
        doc = _document_of(body.get("document"))
        options = body.get("options") or {}
        try:
            opts = RenderOptions(
                show_clock_regions=bool(options.get("clockRegions", False)),
                show_net_names=bool(options.get("netNames", False)),
                scale=float(options.get("scale", 1.0)))
        except (TypeError, ValueError) as exc:
            raise _fail(f"bad render options: {exc}")
        geometry = LayoutGeometry.from_json(doc.geometry) if doc.geometry \
            else layout(doc)
        return {"svg": render(doc, geometry, options=opts).decode("utf-8")}

    @app.post("/api/v1/layout")
    async def layout_endpoint(request: Request):
        body = await _body(request)
        doc = _document_of(body.get("document"))
        doc.geometry = layout(doc).to_json()
        return {"document": doc.to_json()}

    @app.post("/api/v1/validate")
    async def validate_endpoint(request: Request):
        body = await _body(request)
        doc, diags = from_json(body.get("document"))
        if doc is not None:
            diags = diags + validate(doc)
        return {"diagnostics": [d.to_json() for d in diags]}

    @app.post("/api/v1/simulate")
    async def simulate_endpoint(request: Request):
        body = await _body(request)
        design = _side_of(body, "design") if "design" in body \
            else _document_of(body.get("document"))
        stim = body.get("stimulus")
        if not isinstance(stim, list) or not stim:
            raise _fail("'stimulus' must be a non-empty array of input maps")
        from ccrs.sim.equivalence import build_simulator
        try:
            sim = build_simulator(design)
            trace = sim.run(Stimulus.of(stim))
        except SimulationError as exc:
            raise _fail(str(exc), "E-WIDTH")
        return {"trace": trace.to_json()}

    @app.post("/api/v1/check")
    async def check_endpoint(request: Request):
        body = await _body(request)
        a = _side_of(body, "a")
        b = _side_of(body, "b")
        try:
            verdict = check_equivalence(
                a, b,
                budget=int(body.get("budget", 1 << 20)),
                depth=int(body.get("depth", 4)),
                vectors=int(body.get("vectors", 1000)),
                cycles=int(body.get("cycles", 32)),
                seed=int(body.get("seed", 0)))
        except SimulationError as exc:
            raise _fail(str(exc), "E-WIDTH")
        return {"verdict": verdict.to_json()}

    @app.post("/api/v1/canonical")
    async def canonical_endpoint(request: Request):
        body = await _body(request)
        doc = _document_of(body.get("document"))
        return {"canonical": canonical_form(doc).decode("utf-8")}

    @app.get("/api/v1/symbols")
    async def symbols_endpoint():
        return {
            "operations": [
                {"opcode": op, "class": cls, "code": code,
                 "glyph": SYMBOLS.glyph(op, cls)}
                for (op, cls), code in sorted(OPCODES.items())
            ],
            "keywords": dict(sorted(SYMBOLS.keywords.items())),
        }

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="studio")

    return app
