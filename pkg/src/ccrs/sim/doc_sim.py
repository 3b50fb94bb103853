"""Cycle-based interpreter for document graphs.

Mirrors the HDL interpreter's semantics through the shared operator table,
but walks the node/wire graph instead of an AST, so the two sides of an
equivalence check stay independent implementations.
"""

from __future__ import annotations

from ccrs.ir.model import (
    BRANCH, CASE_SELECT, CONSTANT, DATA_OP, INSTANCE, PORT, TIMING,
    CcrsDocument, Stn,
)
from ccrs.sim import ops
from ccrs.sim.stimulus import SimulationError, Stimulus, Trace


class DocSimulator:
    def __init__(self, doc: CcrsDocument,
                 library: dict[str, CcrsDocument] | None = None):
        self.doc = doc
        self.library = dict(doc.library())
        if library:
            self.library.update(library)
        self.flat: list[Stn] = []
        for top in doc.stns:
            self.flat.extend(_post_order(top))
        self.feeds: dict[tuple[str, int], tuple[str, int]] = {}
        for lwc in doc.lwcs:
            for sink in lwc.sinks:
                self.feeds[sink] = lwc.source
        self.ordered = self._topo_order()
        self.values: dict[str, list[int]] = {}
        self.state: dict[str, int] = {}
        self.children: dict[str, DocSimulator] = {}
        for stn in self.flat:
            if stn.kind == TIMING:
                self.state[stn.id] = 0
            elif stn.kind == INSTANCE:
                target = stn.attrs.get("module")
                child = self.library.get(target)
                if child is None:
                    raise SimulationError(
                        f"instance '{stn.id}' needs module '{target}' but the "
                        f"document embeds no such library entry")
                self.children[stn.id] = DocSimulator(child, self.library)

    # --- interface ------------------------------------------------------------

    def clock_ports(self) -> set[str]:
        clocks = {clock for _, clock in self.doc.clock_domains}
        return {p.name for p in self.doc.ports if p.name in clocks}

    def inputs(self) -> dict[str, int]:
        clocks = self.clock_ports()
        return {p.name: p.width for p in self.doc.ports
                if p.direction == "in" and p.name not in clocks}

    def outputs(self) -> dict[str, int]:
        return {p.name: p.width for p in self.doc.ports if p.direction == "out"}

    def ports(self) -> list[tuple[str, str, int]]:
        return [(p.name, p.direction, p.width) for p in self.doc.ports]

    def is_sequential(self) -> bool:
        return bool(self.state) or any(c.is_sequential()
                                       for c in self.children.values())

    # --- runs --------------------------------------------------------------------

    def run(self, stim: Stimulus) -> Trace:
        stim.check_against(self.inputs())
        self.reset()
        rows = []
        for row in stim.cycles:
            self.settle(dict(row))
            rows.append({p.name: self.port_value(p.name)
                         for p in self.doc.ports if p.direction == "out"})
            self.tick()
        return Trace(tuple(rows))

    def reset(self) -> None:
        for k in self.state:
            self.state[k] = 0
        self.values = {}
        for child in self.children.values():
            child.reset()

    def port_value(self, name: str) -> int:
        stn = self.doc.port_stn(name)
        if stn is None:
            raise SimulationError(f"no port node for '{name}'")
        if stn.outputs:
            return self.values[stn.id][0]
        return self._in_val(stn, 0)

    # --- evaluation -----------------------------------------------------------------

    def _topo_order(self) -> list[Stn] | None:
        """Value-dependency order: wires from non-Timing sources, plus the
        structural child-to-parent edges of Branch/CaseSelect rows."""
        by_id = {stn.id: stn for stn in self.flat}
        indeg = {stn.id: 0 for stn in self.flat}
        succ: dict[str, list[str]] = {stn.id: [] for stn in self.flat}

        def edge(a: str, b: str) -> None:
            succ[a].append(b)
            indeg[b] += 1

        for lwc in self.doc.lwcs:
            src = by_id.get(lwc.source[0])
            if src is None or src.kind == TIMING:
                continue
            for sink_id, _ in lwc.sinks:
                if sink_id in indeg:
                    edge(src.id, sink_id)
        for stn in self.flat:
            for child in stn.children:
                edge(child.id, stn.id)

        order = []
        ready = [stn.id for stn in self.flat if indeg[stn.id] == 0]
        while ready:
            sid = ready.pop(0)
            order.append(by_id[sid])
            for nxt in succ[sid]:
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    ready.append(nxt)
        return order if len(order) == len(self.flat) else None

    def settle(self, inputs: dict[str, int]) -> None:
        self._inputs = inputs
        if self.ordered is not None:  # acyclic: one ordered pass reaches fixpoint
            values = self.values
            for sid, state in self.state.items():  # registers first: their
                values[sid] = [state]              # outputs are prior state
            for stn in self.ordered:
                values[stn.id] = self._eval(stn)
            return
        for _ in range(len(self.flat) + 2):
            if not self._sweep():
                return
        raise SimulationError("document logic did not settle")  # pragma: no cover

    def _sweep(self) -> bool:
        changed = False
        for stn in self.flat:
            new = self._eval(stn)
            if self.values.get(stn.id) != new:
                self.values[stn.id] = new
                changed = True
        return changed

    def _in_val(self, stn: Stn, idx: int) -> int:
        src = self.feeds.get((stn.id, idx))
        if src is None:
            return 0  # validation flags unfed inputs; stay total anyway
        return self.values.get(src[0], [0] * (src[1] + 1))[src[1]]

    def _eval(self, stn: Stn) -> list[int]:
        if stn.kind == PORT:
            if stn.outputs:
                name = stn.attrs.get("port")
                return [self._inputs.get(name, 0)]
            return []
        if stn.kind == CONSTANT:
            return [int(stn.attrs.get("value", 0)) & ops.mask(stn.outputs[0][1])]
        if stn.kind == DATA_OP:
            args = [self._in_val(stn, i) for i in range(len(stn.inputs))]
            widths = [w for _, w in stn.inputs]
            return [ops.apply_op(stn.opcode or "", args, widths,
                                 stn.outputs[0][1], stn.attrs)]
        if stn.kind == TIMING:
            return [self.state[stn.id]]
        if stn.kind == BRANCH:
            return [self._eval_rows(stn, selector=None)]
        if stn.kind == CASE_SELECT:
            return [self._eval_rows(stn, selector=self._in_val(stn, 0))]
        if stn.kind == INSTANCE:
            child = self.children[stn.id]
            child_inputs = {name: self._in_val(stn, i)
                            for i, (name, _) in enumerate(stn.inputs)}
            child.settle(child_inputs)
            return [child.port_value(name) for name, _ in stn.outputs]
        raise SimulationError(f"cannot evaluate node kind {stn.kind!r}")

    def _eval_rows(self, stn: Stn, selector: int | None) -> int:
        width = stn.outputs[0][1]
        chosen = None
        for row in stn.attrs.get("rows", []):
            if selector is None:  # Branch: first truthy condition, else default
                cond = row.get("cond")
                if cond is None or self._in_val(stn, stn.input_index(cond)) != 0:
                    chosen = row
                    break
            else:  # CaseSelect: first matching label, else default
                match = row.get("match")
                if match is None or match == selector:
                    chosen = row
                    break
        if chosen is None:
            return 0
        if chosen.get("value") is not None:
            return self._in_val(stn, stn.input_index(chosen["value"])) & ops.mask(width)
        child_id = chosen["child"]
        return self.values.get(child_id, [0])[0] & ops.mask(width)

    def tick(self) -> None:
        pending = {}
        for stn in self.flat:
            if stn.kind == TIMING:
                pending[stn.id] = self._in_val(stn, 0) & ops.mask(stn.outputs[0][1])
        for child in self.children.values():
            child.tick()
        self.state.update(pending)


def _post_order(stn: Stn) -> list[Stn]:
    out: list[Stn] = []
    for child in stn.children:
        out.extend(_post_order(child))
    out.append(stn)
    return out
