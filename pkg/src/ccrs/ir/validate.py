"""Structural validation of documents.

Violations are data, not exceptions: each one becomes a diagnostic naming
the offending id.  A document is well formed iff the list comes back empty.
"""

from __future__ import annotations

from ccrs.diagnostics import Diagnostic, error
from ccrs.ir.model import (
    BRANCH, CASE_SELECT, CONSTANT, DATA_OP, INSTANCE, LABELED_KINDS, PORT,
    TIMING, CcrsDocument, Stn,
)


def validate(doc: CcrsDocument) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    stns = list(doc.all_stns())
    by_id: dict[str, Stn] = {}
    for stn in stns:
        if stn.id in by_id:
            diags.append(error("E-DUP-ID", f"duplicated stn id '{stn.id}'"))
        by_id[stn.id] = stn

    for stn in stns:
        _check_stn(stn, diags)

    _check_ports(doc, diags)
    feed_counts = _check_lwcs(doc, by_id, diags)
    _check_fed_inputs(doc, stns, feed_counts, diags)
    _check_domains(doc, diags)
    _check_acyclic(doc, by_id, diags)
    return diags


# --- per-node shape ------------------------------------------------------------

def _check_stn(stn: Stn, diags: list) -> None:
    if stn.kind in LABELED_KINDS and not stn.label:
        diags.append(error("E-NO-LABEL", f"{stn.kind} '{stn.id}' needs a label"))
    if stn.kind == CONSTANT:
        if stn.inputs or len(stn.outputs) != 1:
            diags.append(error("E-CONST-SHAPE",
                               f"constant '{stn.id}' must have 0 inputs and 1 output"))
    if stn.kind == PORT:
        one_side = (len(stn.inputs) == 1 and not stn.outputs) or \
                   (len(stn.outputs) == 1 and not stn.inputs)
        if not one_side:
            diags.append(error("E-PORT-SHAPE",
                               f"port node '{stn.id}' must populate exactly one side"))
    if stn.kind == INSTANCE and not stn.attrs.get("module"):
        diags.append(error("E-INSTANCE", f"instance '{stn.id}' names no module"))
    if stn.kind == BRANCH:
        _check_branch_rows(stn, diags)
    elif stn.kind == CASE_SELECT:
        _check_case_rows(stn, diags)
    elif stn.children:
        diags.append(error("E-BRANCH-ROWS",
                           f"'{stn.id}' of kind {stn.kind} cannot nest children"))


def _row_shape_ok(stn: Stn, row: object) -> bool:
    if not isinstance(row, dict):
        return False
    has_value = isinstance(row.get("value"), str)
    has_child = isinstance(row.get("child"), str)
    if has_value == has_child:  # exactly one of the two
        return False
    if has_value:
        try:
            stn.input_index(row["value"])
        except KeyError:
            return False
    else:
        if row["child"] not in {c.id for c in stn.children}:
            return False
    return True


def _check_branch_rows(stn: Stn, diags: list) -> None:
    rows = stn.attrs.get("rows")
    if not isinstance(rows, list) or not rows:
        diags.append(error("E-BRANCH-ROWS", f"branch '{stn.id}' has no rows"))
        return
    defaults = [r for r in rows if isinstance(r, dict) and r.get("cond") is None]
    for row in rows:
        if not _row_shape_ok(stn, row):
            diags.append(error("E-BRANCH-ROWS", f"branch '{stn.id}' has a malformed row"))
            return
        cond = row.get("cond")
        if cond is not None:
            try:
                stn.input_index(cond)
            except KeyError:
                diags.append(error("E-BRANCH-ROWS",
                                   f"branch '{stn.id}' row condition port "
                                   f"'{cond}' does not exist"))
                return
    if len(defaults) != 1 or rows[-1].get("cond") is not None:
        diags.append(error("E-BRANCH-ROWS",
                           f"branch '{stn.id}' needs exactly one trailing default row"))
    _check_row_children(stn, rows, diags)


def _check_case_rows(stn: Stn, diags: list) -> None:
    rows = stn.attrs.get("rows")
    if not isinstance(rows, list) or not rows:
        diags.append(error("E-BRANCH-ROWS", f"case '{stn.id}' has no rows"))
        return
    if not stn.inputs:
        diags.append(error("E-BRANCH-ROWS", f"case '{stn.id}' has no selector input"))
        return
    sel_width = stn.inputs[0][1]
    labels: list[int] = []
    has_default = False
    for row in rows:
        if not _row_shape_ok(stn, row):
            diags.append(error("E-BRANCH-ROWS", f"case '{stn.id}' has a malformed row"))
            return
        match = row.get("match")
        if match is None:
            has_default = True
            continue
        if not isinstance(match, int) or not (0 <= match < (1 << sel_width)):
            diags.append(error("E-RANGE",
                               f"case '{stn.id}' label {match!r} does not fit the "
                               f"{sel_width}-bit selector"))
            continue
        labels.append(match)
    dupes = {v for v in labels if labels.count(v) > 1}
    for v in sorted(dupes):
        diags.append(error("E-DUP-CASE", f"case '{stn.id}' repeats label {v}"))
    if has_default and rows[-1].get("match") is not None:
        diags.append(error("E-BRANCH-ROWS",
                           f"case '{stn.id}' default row must come last"))
    if not has_default:
        covered = sel_width <= 20 and len(set(labels)) == (1 << sel_width)
        if not covered:
            diags.append(error("E-CASE-COVER",
                               f"case '{stn.id}' has no default and does not cover "
                               f"all selector values"))
    _check_row_children(stn, rows, diags)


def _check_row_children(stn: Stn, rows: list, diags: list) -> None:
    row_children = [r.get("child") for r in rows
                    if isinstance(r, dict) and r.get("child") is not None]
    child_ids = [c.id for c in stn.children]
    if row_children != child_ids:
        diags.append(error("E-BRANCH-ROWS",
                           f"'{stn.id}' children must match its rows in order"))


# --- ports ----------------------------------------------------------------------

def _check_ports(doc: CcrsDocument, diags: list) -> None:
    port_stns = {}
    for stn in doc.stns:  # port nodes live at top level
        if stn.kind == PORT:
            name = stn.attrs.get("port")
            if not isinstance(name, str):
                diags.append(error("E-PORT-MISMATCH",
                                   f"port node '{stn.id}' names no module port"))
                continue
            if name in port_stns:
                diags.append(error("E-PORT-MISMATCH",
                                   f"two port nodes claim module port '{name}'"))
            port_stns[name] = stn
    declared = {p.name: p for p in doc.ports}
    for name, p in sorted(declared.items()):
        stn = port_stns.get(name)
        if stn is None:
            diags.append(error("E-PORT-MISMATCH", f"module port '{name}' has no node"))
            continue
        sides_ok = (p.direction == "in" and stn.outputs and not stn.inputs) or \
                   (p.direction == "out" and stn.inputs and not stn.outputs)
        widths = [w for _, w in stn.inputs + stn.outputs]
        if not sides_ok or widths != [p.width]:
            diags.append(error("E-PORT-MISMATCH",
                               f"port node '{stn.id}' does not match module port "
                               f"'{name}' ({p.direction}, width {p.width})"))
    for name in sorted(set(port_stns) - set(declared)):
        diags.append(error("E-PORT-MISMATCH",
                           f"port node for '{name}' has no module port entry"))


# --- wires ------------------------------------------------------------------------

def _check_lwcs(doc: CcrsDocument, by_id: dict[str, Stn],
                diags: list) -> dict[tuple[str, int], int]:
    feed_counts: dict[tuple[str, int], int] = {}
    seen: set[str] = set()
    for lwc in doc.lwcs:
        if lwc.id in seen:
            diags.append(error("E-DUP-ID", f"duplicated lwc id '{lwc.id}'"))
        seen.add(lwc.id)
        if not lwc.sinks:
            diags.append(error("E-NO-SINK", f"lwc '{lwc.id}' has no sinks"))
        src = by_id.get(lwc.source[0])
        if src is None or lwc.source[1] >= len(src.outputs):
            diags.append(error("E-BAD-REF",
                               f"lwc '{lwc.id}' source does not resolve"))
        else:
            if src.outputs[lwc.source[1]][1] != lwc.width:
                diags.append(error("E-WIDTH",
                                   f"lwc '{lwc.id}' width {lwc.width} does not match "
                                   f"its source port"))
        for stn_id, idx in lwc.sinks:
            sink = by_id.get(stn_id)
            if sink is None or idx >= len(sink.inputs):
                diags.append(error("E-BAD-REF",
                                   f"lwc '{lwc.id}' sink ({stn_id}, {idx}) does not "
                                   f"resolve"))
                continue
            if sink.inputs[idx][1] != lwc.width:
                diags.append(error("E-WIDTH",
                                   f"lwc '{lwc.id}' width {lwc.width} does not match "
                                   f"sink ({stn_id}, {idx})"))
            feed_counts[(stn_id, idx)] = feed_counts.get((stn_id, idx), 0) + 1
    return feed_counts


def _check_fed_inputs(doc: CcrsDocument, stns: list[Stn],
                      feed_counts: dict[tuple[str, int], int], diags: list) -> None:
    for stn in stns:
        for idx in range(len(stn.inputs)):
            n = feed_counts.get((stn.id, idx), 0)
            if n == 0:
                diags.append(error("E-UNFED",
                                   f"input {idx} of '{stn.id}' is not fed"))
            elif n > 1:
                diags.append(error("E-MULTI-FEED",
                                   f"input {idx} of '{stn.id}' is fed {n} times"))


def _check_domains(doc: CcrsDocument, diags: list) -> None:
    domains = {d for d, _ in doc.clock_domains}
    for stn in doc.all_stns():
        if stn.kind == TIMING:
            dom = stn.attrs.get("clockDomain")
            if dom not in domains:
                diags.append(error("E-CLOCK-DOMAIN",
                                   f"timing node '{stn.id}' references unknown clock "
                                   f"domain {dom!r}"))
        if stn.kind == INSTANCE:
            for dom in (stn.attrs.get("clocks") or {}).values():
                if dom not in domains:
                    diags.append(error("E-CLOCK-DOMAIN",
                                       f"instance '{stn.id}' references unknown clock "
                                       f"domain {dom!r}"))


# --- combinational acyclicity -----------------------------------------------------

def top_ancestor_map(doc: CcrsDocument) -> dict[str, str]:
    """stn id -> id of its top-level ancestor."""
    out: dict[str, str] = {}
    for top in doc.stns:
        for stn in top.walk():
            out[stn.id] = top.id
    return out


def comb_edges(doc: CcrsDocument) -> set[tuple[str, str]]:
    """Edges between top-level nodes, excluding those leaving a Timing node
    (register outputs start a new cycle's worth of logic)."""
    ancestor = top_ancestor_map(doc)
    by_id = doc.stn_map()
    edges: set[tuple[str, str]] = set()
    for lwc in doc.lwcs:
        src = by_id.get(lwc.source[0])
        if src is None or src.kind == TIMING:
            continue
        src_top = ancestor.get(lwc.source[0])
        for sink_id, _ in lwc.sinks:
            dst_top = ancestor.get(sink_id)
            if src_top is None or dst_top is None or src_top == dst_top:
                continue
            edges.add((src_top, dst_top))
    return edges


def _check_acyclic(doc: CcrsDocument, by_id: dict[str, Stn], diags: list) -> None:
    edges = comb_edges(doc)
    succ: dict[str, list[str]] = {}
    for a, b in sorted(edges):
        succ.setdefault(a, []).append(b)
    state: dict[str, int] = {}
    cycle_nodes: set[str] = set()

    def visit(v: str, path: list[str]) -> None:
        state[v] = 0
        path.append(v)
        for w in succ.get(v, ()):
            if state.get(w) == 0:
                cycle_nodes.update(path[path.index(w):])
            elif w not in state:
                visit(w, path)
        path.pop()
        state[v] = 1

    for stn in doc.stns:
        if stn.id not in state:
            visit(stn.id, [])
    if cycle_nodes:
        names = ", ".join(sorted(cycle_nodes))
        diags.append(error("E-COMB-CYCLE", f"combinational cycle through {{{names}}}"))
