"""Canonical byte encoding of documents.

Serialization is canonical: keys sorted, separators fixed, no insignificant
whitespace, raw UTF-8.  Structurally equal documents always produce
identical bytes.  Deserialization checks the schema and duplicate ids and
reports failures as diagnostics.
"""

from __future__ import annotations

import json

from ccrs.diagnostics import Diagnostic, error
from ccrs.ir.model import (
    FORMAT_VERSION, ID_RE, KINDS, CcrsDocument, DocPort, Lwc, Stn,
)


def serialize(doc: CcrsDocument) -> bytes:
    return dumps(doc.to_json())


def dumps(obj: dict) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")


def deserialize(data: bytes | str) -> tuple[CcrsDocument | None, list[Diagnostic]]:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            return None, [error("E-SCHEMA", f"not UTF-8: {exc}")]
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        return None, [error("E-SCHEMA", f"not valid JSON: {exc}")]
    return from_json(obj)


def from_json(obj: object) -> tuple[CcrsDocument | None, list[Diagnostic]]:
    diags: list[Diagnostic] = []
    doc = _document(obj, diags)
    if any(d.is_error for d in diags):
        return None, diags
    return doc, diags


# --- schema walking -----------------------------------------------------------

def _document(obj: object, diags: list) -> CcrsDocument | None:
    if not isinstance(obj, dict):
        diags.append(error("E-SCHEMA", "document must be a JSON object"))
        return None
    version = obj.get("version")
    if version != FORMAT_VERSION:
        diags.append(error("E-VERSION", f"unknown format version {version!r} "
                                        f"(expected {FORMAT_VERSION!r})"))
        return None
    module = obj.get("module")
    if not isinstance(module, str) or not module:
        diags.append(error("E-SCHEMA", "'module' must be a non-empty string"))
        return None

    ports = []
    for i, p in enumerate(_list(obj, "ports", diags)):
        port = _port(p, i, diags)
        if port is not None:
            ports.append(port)
    stns = []
    for i, s in enumerate(_list(obj, "stns", diags)):
        stn = _stn(s, f"stns[{i}]", diags)
        if stn is not None:
            stns.append(stn)
    lwcs = []
    for i, w in enumerate(_list(obj, "lwcs", diags)):
        lwc = _lwc(w, f"lwcs[{i}]", diags)
        if lwc is not None:
            lwcs.append(lwc)
    domains = []
    for i, d in enumerate(_list(obj, "clockDomains", diags)):
        if (isinstance(d, dict) and isinstance(d.get("id"), str)
                and isinstance(d.get("clock"), str)):
            domains.append((d["id"], d["clock"]))
        else:
            diags.append(error("E-SCHEMA", f"clockDomains[{i}] needs 'id' and 'clock'"))

    metadata = obj.get("metadata", {})
    if not isinstance(metadata, dict):
        diags.append(error("E-SCHEMA", "'metadata' must be an object"))
        metadata = {}
    metadata = _metadata(metadata, diags)

    geometry = obj.get("geometry")
    if geometry is not None and not isinstance(geometry, dict):
        diags.append(error("E-SCHEMA", "'geometry' must be an object"))
        geometry = None

    doc = CcrsDocument(module, ports, stns, lwcs, domains, metadata, geometry)
    _check_duplicate_ids(doc, diags)
    return doc


def _metadata(metadata: dict, diags: list) -> dict:
    out = dict(metadata)
    modules = out.get("modules")
    if modules is None:
        return out
    if not isinstance(modules, dict):
        diags.append(error("E-SCHEMA", "metadata 'modules' must be an object"))
        out.pop("modules")
        return out
    parsed = {}
    for name, sub in modules.items():
        subdoc = _document(sub, diags)
        if subdoc is not None:
            parsed[name] = subdoc
    out["modules"] = parsed
    return out


def _list(obj: dict, key: str, diags: list) -> list:
    v = obj.get(key, [])
    if not isinstance(v, list):
        diags.append(error("E-SCHEMA", f"'{key}' must be an array"))
        return []
    return v


def _port(p: object, i: int, diags: list) -> DocPort | None:
    if (not isinstance(p, dict) or not isinstance(p.get("name"), str)
            or p.get("dir") not in ("in", "out")
            or not isinstance(p.get("width"), int) or p["width"] < 1):
        diags.append(error("E-SCHEMA", f"ports[{i}] needs name, dir in/out, width >= 1"))
        return None
    return DocPort(p["name"], p["dir"], p["width"])


def _port_list(v: object, where: str, diags: list) -> list[tuple[str, int]]:
    out: list[tuple[str, int]] = []
    if not isinstance(v, list):
        diags.append(error("E-SCHEMA", f"{where} must be an array of [name, width]"))
        return out
    for entry in v:
        if (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], str)
                and isinstance(entry[1], int) and entry[1] >= 1):
            out.append((entry[0], entry[1]))
        else:
            diags.append(error("E-SCHEMA", f"{where} entries must be [name, width >= 1]"))
    return out


def _stn(s: object, where: str, diags: list) -> Stn | None:
    if not isinstance(s, dict):
        diags.append(error("E-SCHEMA", f"{where} must be an object"))
        return None
    sid = s.get("id")
    if not isinstance(sid, str) or not ID_RE.match(sid):
        diags.append(error("E-ID", f"{where} has a malformed id {sid!r}"))
        return None
    kind = s.get("kind")
    if kind not in KINDS:
        diags.append(error("E-SCHEMA", f"{where} ({sid}) has unknown kind {kind!r}"))
        return None
    label = s.get("label", "")
    if not isinstance(label, str):
        diags.append(error("E-SCHEMA", f"{where} ({sid}) label must be a string"))
        label = ""
    opcode = s.get("opcode")
    if opcode is not None and not isinstance(opcode, str):
        diags.append(error("E-SCHEMA", f"{where} ({sid}) opcode must be a string"))
        opcode = None
    inputs = _port_list(s.get("inputs", []), f"{where}.inputs", diags)
    outputs = _port_list(s.get("outputs", []), f"{where}.outputs", diags)
    children = []
    kids = s.get("children", [])
    if not isinstance(kids, list):
        diags.append(error("E-SCHEMA", f"{where}.children must be an array"))
        kids = []
    for i, c in enumerate(kids):
        child = _stn(c, f"{where}.children[{i}]", diags)
        if child is not None:
            children.append(child)
    attrs = s.get("attrs", {})
    if not isinstance(attrs, dict):
        diags.append(error("E-SCHEMA", f"{where} ({sid}) attrs must be an object"))
        attrs = {}
    return Stn(sid, kind, label, opcode, inputs, outputs, children, attrs)


def _lwc(w: object, where: str, diags: list) -> Lwc | None:
    if not isinstance(w, dict):
        diags.append(error("E-SCHEMA", f"{where} must be an object"))
        return None
    wid = w.get("id")
    if not isinstance(wid, str) or not ID_RE.match(wid):
        diags.append(error("E-ID", f"{where} has a malformed id {wid!r}"))
        return None
    width = w.get("width")
    if not isinstance(width, int) or width < 1:
        diags.append(error("E-SCHEMA", f"{where} ({wid}) width must be >= 1"))
        return None
    source = w.get("source")
    if not (isinstance(source, list) and len(source) == 2 and isinstance(source[0], str)
            and isinstance(source[1], int) and source[1] >= 0):
        diags.append(error("E-SCHEMA", f"{where} ({wid}) source must be [stn, portIndex]"))
        return None
    sinks = []
    raw_sinks = w.get("sinks", [])
    if not isinstance(raw_sinks, list):
        diags.append(error("E-SCHEMA", f"{where} ({wid}) sinks must be an array"))
        raw_sinks = []
    for s in raw_sinks:
        if (isinstance(s, list) and len(s) == 2 and isinstance(s[0], str)
                and isinstance(s[1], int) and s[1] >= 0):
            sinks.append((s[0], s[1]))
        else:
            diags.append(error("E-SCHEMA",
                               f"{where} ({wid}) sinks must be [stn, portIndex] pairs"))
    return Lwc(wid, width, (source[0], source[1]), sinks)


def _check_duplicate_ids(doc: CcrsDocument, diags: list) -> None:
    seen: set[str] = set()
    for stn in doc.all_stns():
        if stn.id in seen:
            diags.append(error("E-DUP-ID", f"duplicated stn id '{stn.id}'"))
        seen.add(stn.id)
    wseen: set[str] = set()
    for lwc in doc.lwcs:
        if lwc.id in wseen:
            diags.append(error("E-DUP-ID", f"duplicated lwc id '{lwc.id}'"))
        wseen.add(lwc.id)
