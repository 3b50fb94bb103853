"""Layered left-to-right layout.

Producers sit left of consumers (register feedback exempt), nodes are
uniform rectangles sized by label and port count, children nest inside a
parent padding frame, wires run as orthogonal trunk-and-branch routes
through the box-free channels between layers, and each clock domain gets a
bounding region.  Everything is integer arithmetic, so identical documents
yield identical geometry bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ccrs.ir.model import CONSTANT, INSTANCE, PORT, TIMING, CcrsDocument, Stn
from ccrs.ir.validate import comb_edges, top_ancestor_map

PORT_PITCH = 16
MIN_BOX_W = 48
MIN_BOX_H = 32
LAYER_GAP = 64
TRUNK_SPACING = 8
REGION_MARGIN = 12

GLYPH_W = 16
NODE_VGAP = 24
FRAME_MARGIN = 32
CHILD_PAD = 12
LANE_BASE = 16

Rect = tuple[int, int, int, int]
Segment = tuple[int, int, int, int]


@dataclass
class LayoutGeometry:
    boxes: dict[str, Rect] = field(default_factory=dict)
    anchors: dict[tuple[str, str, int], tuple[int, int]] = field(default_factory=dict)
    routes: dict[str, list[Segment]] = field(default_factory=dict)
    regions: dict[str, Rect] = field(default_factory=dict)
    size: tuple[int, int] = (0, 0)
    layers: dict[str, int] = field(default_factory=dict)       # internal
    layer_x: list[tuple[int, int]] = field(default_factory=list)  # (x, max width)

    def anchor(self, stn_id: str, side: str, idx: int) -> tuple[int, int]:
        return self.anchors[(stn_id, side, idx)]

    def to_json(self) -> dict:
        return {
            "boxes": {k: list(v) for k, v in sorted(self.boxes.items())},
            "anchors": {f"{s}:{side}:{i}": [x, y]
                        for (s, side, i), (x, y) in sorted(self.anchors.items())},
            "routes": {k: [list(seg) for seg in v]
                       for k, v in sorted(self.routes.items())},
            "regions": {k: list(v) for k, v in sorted(self.regions.items())},
            "size": list(self.size),
        }

    @staticmethod
    def from_json(obj: dict) -> "LayoutGeometry":
        geom = LayoutGeometry()
        geom.boxes = {k: tuple(v) for k, v in obj.get("boxes", {}).items()}
        for key, point in obj.get("anchors", {}).items():
            stn, side, idx = key.rsplit(":", 2)
            geom.anchors[(stn, side, int(idx))] = (point[0], point[1])
        geom.routes = {k: [tuple(seg) for seg in v]
                       for k, v in obj.get("routes", {}).items()}
        geom.regions = {k: tuple(v) for k, v in obj.get("regions", {}).items()}
        size = obj.get("size", [0, 0])
        geom.size = (size[0], size[1])
        return geom


def layout(doc: CcrsDocument) -> LayoutGeometry:
    layers = assign_layers(doc)
    ordering = order_layers(doc, layers)
    geom = size_and_place(doc, ordering)
    geom.layers = layers
    geom.routes = route_lwc(doc, geom)
    geom.regions = partition_clock_domains(doc, geom)
    geom.size = _overall_size(geom)
    return geom


# --- layer assignment ------------------------------------------------------------

def assign_layers(doc: CcrsDocument) -> dict[str, int]:
    """Longest path from the inputs over combinational edges; edges leaving
    a Timing node are feedback and impose no ordering."""
    edges = comb_edges(doc)
    succ: dict[str, list[str]] = {}
    indeg: dict[str, int] = {stn.id: 0 for stn in doc.stns}
    for a, b in sorted(edges):
        succ.setdefault(a, []).append(b)
        indeg[b] += 1
    layers = {stn.id: 0 for stn in doc.stns}
    ready = [sid for sid in layers if indeg[sid] == 0]
    while ready:
        sid = ready.pop(0)
        for nxt in succ.get(sid, ()):
            layers[nxt] = max(layers[nxt], layers[sid] + 1)
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                ready.append(nxt)
    return layers


# --- crossing reduction ------------------------------------------------------------

def order_layers(doc: CcrsDocument, layers: dict[str, int]) -> list[list[str]]:
    """Barycenter ordering, exactly 4 down-up passes, never worse than the
    initial document order.  Layer-skipping edges get internal dummy nodes
    that are dropped from the returned ordering."""
    n_layers = (max(layers.values()) + 1) if layers else 0
    ordering: list[list[str]] = [[] for _ in range(n_layers)]
    for stn in doc.stns:
        ordering[layers[stn.id]].append(stn.id)

    edges: list[tuple[str, str]] = []
    node_layer = dict(layers)
    dummy_n = 0
    for a, b in sorted(_forward_edges(doc, layers)):
        la, lb = layers[a], layers[b]
        prev = a
        for step in range(la + 1, lb):
            dummy = f"\x00d{dummy_n}"
            dummy_n += 1
            node_layer[dummy] = step
            ordering[step].append(dummy)
            edges.append((prev, dummy))
            prev = dummy
        edges.append((prev, b))

    preds: dict[str, list[str]] = {}
    succs: dict[str, list[str]] = {}
    for a, b in edges:
        preds.setdefault(b, []).append(a)
        succs.setdefault(a, []).append(b)

    def crossings(order: list[list[str]]) -> int:
        total = 0
        for li in range(len(order) - 1):
            pos = {nid: i for i, nid in enumerate(order[li + 1])}
            pairs = []
            for i, nid in enumerate(order[li]):
                for nxt in succs.get(nid, ()):
                    if nxt in pos:
                        pairs.append((i, pos[nxt]))
            for i in range(len(pairs)):
                for j in range(i + 1, len(pairs)):
                    (a1, b1), (a2, b2) = pairs[i], pairs[j]
                    if (a1 < a2 and b1 > b2) or (a1 > a2 and b1 < b2):
                        total += 1
        return total

    def sweep(order: list[list[str]], neighbors: dict[str, list[str]],
              fixed_layer_of: int, moving: int) -> None:
        pos = {nid: i for i, nid in enumerate(order[fixed_layer_of])}
        current = {nid: i for i, nid in enumerate(order[moving])}
        def bary(nid: str) -> tuple[float, str]:
            ns = [pos[x] for x in neighbors.get(nid, ()) if x in pos]
            return (sum(ns) / len(ns) if ns else float(current[nid]), nid)
        order[moving].sort(key=bary)

    best = [list(layer) for layer in ordering]
    best_crossings = crossings(best)
    work = [list(layer) for layer in ordering]
    for _ in range(4):
        for li in range(1, n_layers):
            sweep(work, preds, li - 1, li)
        for li in range(n_layers - 2, -1, -1):
            sweep(work, succs, li + 1, li)
        c = crossings(work)
        if c < best_crossings:
            best_crossings = c
            best = [list(layer) for layer in work]
    return [[nid for nid in layer if not nid.startswith("\x00")] for layer in best]


def _forward_edges(doc: CcrsDocument, layers: dict[str, int]) -> set[tuple[str, str]]:
    ancestor = top_ancestor_map(doc)
    edges: set[tuple[str, str]] = set()
    for lwc in doc.lwcs:
        a = ancestor.get(lwc.source[0])
        for sink, _ in lwc.sinks:
            b = ancestor.get(sink)
            if a is None or b is None or a == b:
                continue
            if layers[a] < layers[b]:
                edges.add((a, b))
    return edges


# --- sizing and placement ------------------------------------------------------------

def _box_size(stn: Stn) -> tuple[int, int]:
    label_w = GLYPH_W * len(stn.label) + GLYPH_W if stn.label else 0
    width = max(MIN_BOX_W, label_w)
    height = max(MIN_BOX_H, max(len(stn.inputs), len(stn.outputs), 1) * PORT_PITCH)
    if stn.children:
        sizes = [_box_size(c) for c in stn.children]
        content_w = max(w for w, _ in sizes)
        content_h = sum(h for _, h in sizes) + CHILD_PAD * (len(sizes) + 1)
        width = max(width, content_w + 2 * CHILD_PAD)
        height = max(height, MIN_BOX_H + content_h)
    return width, height


def size_and_place(doc: CcrsDocument, ordering: list[list[str]]) -> LayoutGeometry:
    geom = LayoutGeometry()
    by_id = {stn.id: stn for stn in doc.stns}
    sizes = {sid: _box_size(by_id[sid]) for layer in ordering for sid in layer}

    x = FRAME_MARGIN
    for layer in ordering:
        max_w = max((sizes[sid][0] for sid in layer), default=MIN_BOX_W)
        geom.layer_x.append((x, max_w))
        y = FRAME_MARGIN
        for sid in layer:
            w, h = sizes[sid]
            _place_tree(geom, by_id[sid], x, y, w, h)
            y += h + NODE_VGAP
        x += max_w + LAYER_GAP
    return geom


def _place_tree(geom: LayoutGeometry, stn: Stn, x: int, y: int,
                w: int, h: int) -> None:
    geom.boxes[stn.id] = (x, y, w, h)
    for side, ports in (("in", stn.inputs), ("out", stn.outputs)):
        n = len(ports)
        edge_x = x if side == "in" else x + w
        offset = (h - n * PORT_PITCH) // 2 + PORT_PITCH // 2
        for i in range(n):
            geom.anchors[(stn.id, side, i)] = (edge_x, y + offset + i * PORT_PITCH)
    child_y = y + MIN_BOX_H + CHILD_PAD
    for child in stn.children:
        cw, ch = _box_size(child)
        _place_tree(geom, child, x + CHILD_PAD, child_y, cw, ch)
        child_y += ch + CHILD_PAD


# --- wire routing -------------------------------------------------------------------

def route_lwc(doc: CcrsDocument, geom: LayoutGeometry) -> dict[str, list[Segment]]:
    """Trunk-and-branch orthogonal routes.  The trunk drops in the channel
    right of the source layer; sinks more than one layer away (or behind,
    for register feedback) travel along a lane above all boxes and come
    down in the channel left of their own layer."""
    ancestor = top_ancestor_map(doc)
    by_id = doc.stn_map()
    channel_slots: dict[int, int] = {}
    lane_slots = 0
    n_slots = LAYER_GAP // TRUNK_SPACING - 1

    def channel_x(channel: int) -> int:
        slot = channel_slots.get(channel, 0)
        channel_slots[channel] = slot + 1
        if channel < 0:
            start = geom.layer_x[0][0] - LAYER_GAP
        else:
            start = geom.layer_x[channel][0] + geom.layer_x[channel][1]
        return start + TRUNK_SPACING * (1 + slot % n_slots)

    routes: dict[str, list[Segment]] = {}
    for lwc in doc.lwcs:
        src_stn = by_id[lwc.source[0]]
        sx, sy = geom.anchor(src_stn.id, "out", lwc.source[1])
        src_layer = geom.layers[ancestor[src_stn.id]]
        trunk_x = channel_x(src_layer)

        near: list[tuple[int, int]] = []   # sink anchors one layer to the right
        far: list[tuple[int, tuple[int, int]]] = []  # (sink layer, anchor)
        for sink_id, idx in lwc.sinks:
            tx, ty = geom.anchor(sink_id, "in", idx)
            sink_layer = geom.layers[ancestor[sink_id]]
            if sink_layer == src_layer + 1:
                near.append((tx, ty))
            else:
                far.append((sink_layer, (tx, ty)))

        segments: list[Segment] = [(sx, sy, trunk_x, sy)]
        trunk_ys = [sy] + [ty for _, ty in near]
        lane_y = None
        if far:
            lane_y = -(LANE_BASE + (lane_slots % n_slots) * TRUNK_SPACING)
            lane_slots += 1
            trunk_ys.append(lane_y)
        if min(trunk_ys) != max(trunk_ys):
            segments.append((trunk_x, min(trunk_ys), trunk_x, max(trunk_ys)))
        for tx, ty in near:
            segments.append((trunk_x, ty, tx, ty))
        if far:
            entries: dict[int, tuple[int, list[tuple[int, int]]]] = {}
            for sink_layer, anchor in sorted(far):
                if sink_layer not in entries:
                    entries[sink_layer] = (channel_x(sink_layer - 1), [])
                entries[sink_layer][1].append(anchor)
            xs = [trunk_x] + [ex for ex, _ in entries.values()]
            segments.append((min(xs), lane_y, max(xs), lane_y))
            for sink_layer in sorted(entries):
                entry_x, anchors = entries[sink_layer]
                ys = [lane_y] + [ty for _, ty in anchors]
                segments.append((entry_x, min(ys), entry_x, max(ys)))
                for tx, ty in anchors:
                    segments.append((entry_x, ty, tx, ty))
        routes[lwc.id] = segments
    return routes


# --- clock-domain regions -------------------------------------------------------------

def partition_clock_domains(doc: CcrsDocument,
                            geom: LayoutGeometry) -> dict[str, Rect]:
    """Bounding rectangle per domain over the nodes uniquely attributable to
    it: its Timing nodes, instances clocked by it alone, and the
    combinational nodes feeding or fed by those, walked up to the next
    Port/Timing/Instance boundary."""
    by_id = {stn.id: stn for stn in doc.stns}
    ancestor = top_ancestor_map(doc)
    preds: dict[str, set[str]] = {}
    succs: dict[str, set[str]] = {}
    for lwc in doc.lwcs:
        a = ancestor.get(lwc.source[0])
        for sink_id, _ in lwc.sinks:
            b = ancestor.get(sink_id)
            if a is None or b is None or a == b:
                continue
            preds.setdefault(b, set()).add(a)
            succs.setdefault(a, set()).add(b)

    attribution: dict[str, set[str]] = {}

    def attribute(sid: str, domain: str) -> None:
        attribution.setdefault(sid, set()).add(domain)

    def walk(seed: str, neighbors: dict[str, set[str]], domain: str) -> None:
        stack = sorted(neighbors.get(seed, ()))
        seen = set(stack)
        while stack:
            sid = stack.pop()
            stn = by_id[sid]
            if stn.kind in (PORT, TIMING, INSTANCE):
                continue  # boundaries are attributed on their own terms
            attribute(sid, domain)
            for nxt in sorted(neighbors.get(sid, ())):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)

    domains = [d for d, _ in doc.clock_domains]
    for stn in doc.stns:
        if stn.kind == TIMING:
            domain = stn.attrs.get("clockDomain")
            if domain in domains:
                attribute(stn.id, domain)
                walk(stn.id, preds, domain)
                walk(stn.id, succs, domain)
        elif stn.kind == INSTANCE:
            bound = {d for d in (stn.attrs.get("clocks") or {}).values()
                     if d in domains}
            for domain in sorted(bound):
                attribute(stn.id, domain)

    regions: dict[str, Rect] = {}
    for domain in domains:
        members = [sid for sid, doms in attribution.items()
                   if doms == {domain} and by_id[sid].kind != CONSTANT]
        if not members:
            continue
        rects = [geom.boxes[sid] for sid in sorted(members)]
        x0 = min(r[0] for r in rects) - REGION_MARGIN
        y0 = min(r[1] for r in rects) - REGION_MARGIN
        x1 = max(r[0] + r[2] for r in rects) + REGION_MARGIN
        y1 = max(r[1] + r[3] for r in rects) + REGION_MARGIN
        regions[domain] = (x0, y0, x1 - x0, y1 - y0)
    return regions


def _overall_size(geom: LayoutGeometry) -> tuple[int, int]:
    xs = [0]
    ys = [0]
    for x, y, w, h in geom.boxes.values():
        xs.extend((x, x + w))
        ys.extend((y, y + h))
    for segs in geom.routes.values():
        for x1, y1, x2, y2 in segs:
            xs.extend((x1, x2))
            ys.extend((y1, y2))
    for x, y, w, h in geom.regions.values():
        xs.extend((x, x + w))
        ys.extend((y, y + h))
    return (max(xs) + FRAME_MARGIN, max(ys) + FRAME_MARGIN)
