"""The document graph model.

A document is one module drawn as nodes (STNs) and wires (LWCs).  An STN is
a rectangle with an input side and an output side; what it does is one of a
small set of kinds.  An LWC carries one value from a single source port to
one or more sink ports of equal width.

Branch and CaseSelect nodes own rows, stored under ``attrs["rows"]``: each
row selects either a value input port or a nested child node, and the last
row of a Branch is the default (it has no condition).  Nested children live
in ``children`` in row order; a child's output is consumed by its parent
row structurally, without a wire.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

FORMAT_VERSION = "ccrs-doc/1"

DATA_OP = "DataOp"
BRANCH = "Branch"
CASE_SELECT = "CaseSelect"
TIMING = "Timing"
CONSTANT = "Constant"
PORT = "Port"
INSTANCE = "Instance"

KINDS = (DATA_OP, BRANCH, CASE_SELECT, TIMING, CONSTANT, PORT, INSTANCE)

#: Kinds that must carry a non-empty glyph label.
LABELED_KINDS = (DATA_OP, BRANCH, CASE_SELECT, TIMING)

ID_RE = re.compile(r"[A-Za-z0-9_.\-]+\Z")


@dataclass
class Stn:
    id: str
    kind: str
    label: str = ""
    opcode: str | None = None
    inputs: list[tuple[str, int]] = field(default_factory=list)
    outputs: list[tuple[str, int]] = field(default_factory=list)
    children: list["Stn"] = field(default_factory=list)
    attrs: dict = field(default_factory=dict)

    def input_index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.inputs):
            if n == name:
                return i
        raise KeyError(name)

    def walk(self) -> Iterator["Stn"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "label": self.label,
            "opcode": self.opcode,
            "inputs": [[n, w] for n, w in self.inputs],
            "outputs": [[n, w] for n, w in self.outputs],
            "children": [c.to_json() for c in self.children],
            "attrs": self.attrs,
        }


@dataclass
class Lwc:
    id: str
    width: int
    source: tuple[str, int]  # (stn id, output port index)
    sinks: list[tuple[str, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "width": self.width,
            "source": [self.source[0], self.source[1]],
            "sinks": [[s, i] for s, i in self.sinks],
        }


@dataclass
class DocPort:
    name: str
    direction: str  # "in" or "out"
    width: int

    def to_json(self) -> dict:
        return {"name": self.name, "dir": self.direction, "width": self.width}


@dataclass
class CcrsDocument:
    module: str
    ports: list[DocPort] = field(default_factory=list)
    stns: list[Stn] = field(default_factory=list)
    lwcs: list[Lwc] = field(default_factory=list)
    clock_domains: list[tuple[str, str]] = field(default_factory=list)  # (id, clock net)
    metadata: dict = field(default_factory=dict)
    geometry: dict | None = None
    version: str = FORMAT_VERSION

    def all_stns(self) -> Iterator[Stn]:
        for stn in self.stns:
            yield from stn.walk()

    def stn_map(self) -> dict[str, Stn]:
        return {s.id: s for s in self.all_stns()}

    def port_stn(self, name: str) -> Stn | None:
        for s in self.stns:
            if s.kind == PORT and s.attrs.get("port") == name:
                return s
        return None

    def library(self) -> dict[str, "CcrsDocument"]:
        """Embedded child-module documents (hierarchical designs)."""
        return self.metadata.get("modules", {})

    def to_json(self) -> dict:
        out = {
            "version": self.version,
            "module": self.module,
            "ports": [p.to_json() for p in self.ports],
            "stns": [s.to_json() for s in self.stns],
            "lwcs": [w.to_json() for w in self.lwcs],
            "clockDomains": [{"id": d, "clock": c} for d, c in self.clock_domains],
            "metadata": _metadata_json(self.metadata),
        }
        if self.geometry is not None:
            out["geometry"] = self.geometry
        return out


def _metadata_json(metadata: dict) -> dict:
    out = dict(metadata)
    if "modules" in out:
        out["modules"] = {name: doc.to_json() if isinstance(doc, CcrsDocument) else doc
                          for name, doc in out["modules"].items()}
    return out
