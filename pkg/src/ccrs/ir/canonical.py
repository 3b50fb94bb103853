"""Name- and order-independent canonical labeling.

Two documents get identical canonical bytes iff they are the same graph:
kinds, opcodes, labels, port order, row structure and connectivity all
count; generated node/wire ids and list order do not.  User-chosen module
port names stay significant.

The labeling refines a structural key per top-level node with its in/out
neighborhoods (both directions, state edges tagged), then orders nodes
topologically over the combinational DAG with refined keys as tie-breaks.
Nested children inherit their parent's canonical id plus a row-position
suffix, so they never need independent disambiguation.
"""

from __future__ import annotations

import copy
import hashlib
import json

from ccrs.ir.model import TIMING, CcrsDocument, Stn
from ccrs.ir.serial import serialize


def canonical_form(doc: CcrsDocument) -> bytes:
    return serialize(canonicalize(doc))


def canonicalize(doc: CcrsDocument, keep_metadata: bool = False) -> CcrsDocument:
    """Return a structurally equal document with canonical ids and ordering,
    geometry stripped, and (unless kept for consumers that need the embedded
    module library) metadata stripped."""
    tops = doc.stns
    order = _canonical_order(doc)

    new_stns: list[Stn] = []
    rename: dict[str, str] = {}
    for i, old_idx in enumerate(order):
        new_stns.append(_rename_tree(tops[old_idx], f"s{i}", rename))

    sort_pos: dict[str, tuple] = {}
    for i, stn in enumerate(new_stns):
        for depth_path, node in _walk_paths(stn):
            sort_pos[node.id] = (i, depth_path)

    lwcs = []
    for lwc in doc.lwcs:
        src = (rename[lwc.source[0]], lwc.source[1])
        sinks = sorted(((rename[s], i) for s, i in lwc.sinks),
                       key=lambda e: (sort_pos[e[0]], e[1]))
        lwcs.append((src, sinks, lwc.width))
    lwcs.sort(key=lambda e: (sort_pos[e[0][0]], e[0][1], [(sort_pos[s], i) for s, i in e[1]]))

    from ccrs.ir.model import Lwc  # local import avoids a cycle at module load
    new_lwcs = [Lwc(f"w{j}", width, src, list(sinks))
                for j, (src, sinks, width) in enumerate(lwcs)]

    return CcrsDocument(
        module=doc.module,
        ports=copy.deepcopy(doc.ports),
        stns=new_stns,
        lwcs=new_lwcs,
        clock_domains=sorted(doc.clock_domains),
        metadata=copy.deepcopy(doc.metadata) if keep_metadata else {},
        geometry=None,
    )


# --- ordering ---------------------------------------------------------------------

def _canonical_order(doc: CcrsDocument) -> list[int]:
    tops = doc.stns
    n = len(tops)
    top_of: dict[str, int] = {}
    path_of: dict[str, tuple[int, ...]] = {}
    for i, stn in enumerate(tops):
        for path, node in _walk_paths(stn):
            top_of[node.id] = i
            path_of[node.id] = path

    by_id = doc.stn_map()
    in_edges: dict[int, list[tuple]] = {i: [] for i in range(n)}
    out_edges: dict[int, list[tuple]] = {i: [] for i in range(n)}
    comb_in: dict[int, set[int]] = {i: set() for i in range(n)}
    comb_out: dict[int, set[int]] = {i: set() for i in range(n)}
    for lwc in doc.lwcs:
        src_id, sp = lwc.source
        src_top = top_of[src_id]
        is_state = by_id[src_id].kind == TIMING
        for sink_id, dp in lwc.sinks:
            dst_top = top_of[sink_id]
            edge = (path_of[src_id], sp, path_of[sink_id], dp, is_state)
            in_edges[dst_top].append((src_top,) + edge)
            out_edges[src_top].append((dst_top,) + edge)
            if not is_state and src_top != dst_top:
                comb_in[dst_top].add(src_top)
                comb_out[src_top].add(dst_top)

    keys = [_digest(_structural_key(stn)) for stn in tops]
    for _ in range(n + 2):
        keys = [
            _digest([
                keys[i],
                sorted((keys[e[0]],) + e[1:] for e in in_edges[i]),
                sorted((keys[e[0]],) + e[1:] for e in out_edges[i]),
            ])
            for i in range(n)
        ]

    indeg = {i: len(comb_in[i]) for i in range(n)}
    assigned: dict[int, int] = {}
    ready = [i for i in range(n) if indeg[i] == 0]
    order: list[int] = []
    while ready:
        def pick_key(i: int) -> tuple:
            stn = tops[i]
            fanin = sorted((assigned[e[0]],) + e[1:] for e in in_edges[i]
                           if e[0] in assigned)
            return (stn.kind, stn.opcode or "", stn.label, fanin, keys[i], i)
        ready.sort(key=pick_key)
        i = ready.pop(0)
        assigned[i] = len(order)
        order.append(i)
        for j in sorted(comb_out[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    if len(order) != n:  # pragma: no cover - validate() rejects cycles first
        raise ValueError("document has a combinational cycle")
    return order


def _structural_key(stn: Stn) -> list:
    rows_key = []
    for row in stn.attrs.get("rows", []):
        cond = row.get("cond")
        cond_idx = -1 if cond is None else stn.input_index(cond)
        if row.get("value") is not None:
            slot: list = ["v", stn.input_index(row["value"])]
        else:
            child_ids = [c.id for c in stn.children]
            slot = ["child", child_ids.index(row["child"])]
        rows_key.append([cond_idx, slot, row.get("match")])
    attrs_key = [
        stn.attrs.get("value"),
        stn.attrs.get("width"),
        stn.attrs.get("module"),
        sorted((stn.attrs.get("clocks") or {}).items()),
        stn.attrs.get("clockDomain"),
        stn.attrs.get("port"),
        stn.attrs.get("msb"),
        stn.attrs.get("lsb"),
        rows_key,
    ]
    return [
        stn.kind,
        stn.opcode or "",
        stn.label,
        [w for _, w in stn.inputs],
        [w for _, w in stn.outputs],
        attrs_key,
        [_structural_key(c) for c in stn.children],
    ]


def _digest(obj: object) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=list)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


# --- renaming ------------------------------------------------------------------------

def _walk_paths(stn: Stn, path: tuple[int, ...] = ()):
    yield path, stn
    for i, child in enumerate(stn.children):
        yield from _walk_paths(child, path + (i,))


def _rename_tree(stn: Stn, new_id: str, rename: dict[str, str]) -> Stn:
    clone = copy.deepcopy(stn)
    _apply_rename(clone, new_id, rename)
    return clone


def _apply_rename(stn: Stn, new_id: str, rename: dict[str, str]) -> None:
    rename[stn.id] = new_id
    old_to_new_child: dict[str, str] = {}
    for i, child in enumerate(stn.children):
        child_id = f"{new_id}.{i}"
        old_to_new_child[child.id] = child_id
        _apply_rename(child, child_id, rename)
    stn.id = new_id
    rows = stn.attrs.get("rows")
    if rows:
        stn.attrs = dict(stn.attrs)
        stn.attrs["rows"] = [
            {**row, "child": old_to_new_child[row["child"]]}
            if row.get("child") is not None else dict(row)
            for row in rows
        ]
