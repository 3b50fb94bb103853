"""Lowering: elaborated HDL modules become document graphs.

Shape of the translation:

* one DataOp node per operator application, with left-spine chains of the
  same associative operator folded into a single n-ary node, so widening
  ``a & b`` to ``a & b & c`` grows one node's port list instead of adding
  nodes;
* named nets are shared (reading a wire twice gives one multi-sink wire),
  while subtrees inside one expression are not;
* ``?:`` and if/else chains become Branch nodes whose rows fire in source
  order, first match wins, with exactly one trailing default row; case
  statements become CaseSelect nodes (a default row is omitted only when
  the labels cover the whole selector space);
* each register target gets one Timing node; targets held on some paths
  feed their own output back through the default row;
* combinational targets that lack both a default and an earlier assignment
  have no latch to map to, so lowering stops with E-LATCH;
* ``assign y = a`` is a direct port-to-port wire, no node.

Every created node records the source span(s) it came from in the
document's metadata trace table.
"""

from __future__ import annotations

from dataclasses import dataclass

from ccrs.diagnostics import Diagnostic, Span, error
from ccrs.hdl import ast
from ccrs.hdl.elaborate import ElabModule, ElaboratedDesign, case_full_coverage
from ccrs.ir.model import (
    BRANCH, CASE_SELECT, CONSTANT, DATA_OP, INSTANCE, PORT, TIMING,
    CcrsDocument, DocPort, Lwc, Stn,
)
from ccrs.lower.symbols import SYMBOLS, SymbolTable
from ccrs.sim import ops

#: (stn id, output port index, width) of a value producer.
Binding = tuple[str, int, int]


@dataclass
class LowerResult:
    doc: CcrsDocument | None
    diagnostics: list[Diagnostic]


def lower_module(design: ElaboratedDesign, name: str,
                 symtab: SymbolTable = SYMBOLS) -> LowerResult:
    if name not in design.modules:
        return LowerResult(None, [error("E-UNKNOWN-MODULE",
                                        f"module '{name}' is not defined")])
    builder = _Builder(design, design.modules[name], symtab)
    try:
        doc = builder.build()
    except _LowerAbort as abort:
        return LowerResult(None, [abort.diag])
    return LowerResult(doc, [])


def lower_with_library(design: ElaboratedDesign, name: str,
                       symtab: SymbolTable = SYMBOLS) -> LowerResult:
    """Lower ``name`` and embed documents for every instantiated child under
    metadata["modules"], recursively, so one file carries the whole design."""
    result = lower_module(design, name, symtab)
    if result.doc is None:
        return result
    children = {inst.module for inst in design.modules[name].instances}
    library: dict[str, CcrsDocument] = {}
    for child in sorted(children):
        sub = lower_with_library(design, child, symtab)
        if sub.doc is None:
            return sub
        library[child] = sub.doc
    if library:
        result.doc.metadata["modules"] = library
    return result


class _LowerAbort(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


class _Builder:
    def __init__(self, design: ElaboratedDesign, module: ElabModule,
                 symtab: SymbolTable):
        self.design = design
        self.module = module
        self.symtab = symtab
        self.stns: list[Stn] = []
        self.connections: list[tuple[Binding, tuple[str, int]]] = []
        self.producers: dict[str, Binding] = {}
        self.trace: dict[str, list[list[int]]] = {}
        self._in_progress: set[str] = set()
        self._next_id = 0
        self._port_stns: dict[str, Stn] = {}
        self._timing: dict[str, Stn] = {}
        self._process_done: set[int] = set()

    # --- plumbing -------------------------------------------------------------

    def abort(self, code: str, message: str, span: Span | None) -> None:
        raise _LowerAbort(error(code, message, span))

    def new_stn(self, kind: str, label: str, span: Span | None,
                opcode: str | None = None,
                inputs: list[tuple[str, int]] | None = None,
                outputs: list[tuple[str, int]] | None = None,
                attrs: dict | None = None) -> Stn:
        stn = Stn(f"s{self._next_id}", kind, label, opcode,
                  inputs or [], outputs or [], [], attrs or {})
        self._next_id += 1
        self.stns.append(stn)
        if span is not None:
            self.mark(stn.id, span)
        return stn

    def mark(self, stn_id: str, span: Span) -> None:
        entry = [span.start, span.end]
        spans = self.trace.setdefault(stn_id, [])
        if entry not in spans:
            spans.append(entry)

    def connect(self, binding: Binding, stn: Stn, input_idx: int) -> None:
        self.connections.append(((binding[0], binding[1], binding[2]),
                                 (stn.id, input_idx)))

    def out_binding(self, stn: Stn, idx: int = 0) -> Binding:
        return (stn.id, idx, stn.outputs[idx][1])

    # --- module construction -----------------------------------------------------

    def build(self) -> CcrsDocument:
        m = self.module
        for p in m.ports:
            side = [(p.name, p.width)]
            stn = self.new_stn(PORT, p.name, p.span, attrs={"port": p.name},
                               inputs=side if p.direction == ast.OUT else [],
                               outputs=side if p.direction == ast.IN else [])
            self._port_stns[p.name] = stn
            if p.direction == ast.IN and p.name not in m.clock_nets:
                self.producers[p.name] = self.out_binding(stn)

        domains = sorted(m.clock_nets)
        for proc in m.processes:
            if proc.kind != ast.CLOCKED:
                continue
            for target in proc.targets:
                width = m.signals[target].width
                stn = self.new_stn(
                    TIMING, self.symtab.keyword("register"), proc.span,
                    inputs=[("d", width)], outputs=[("q", width)],
                    attrs={"clockDomain": proc.clock})
                self._timing[target] = stn
                self.producers[target] = self.out_binding(stn)

        instance_stns: list[tuple[Stn, object]] = []
        for inst in m.instances:
            child = self.design.modules.get(inst.module)
            if child is None:
                self.abort("E-UNKNOWN-MODULE",
                           f"module '{inst.module}' is not defined", inst.span)
            inputs = [(port, child.signals[port].width)
                      for port, _ in inst.data_bindings]
            outputs = [(p.name, p.width) for p in child.outputs]
            stn = self.new_stn(
                INSTANCE, self.symtab.keyword("instance"), inst.span,
                inputs=inputs, outputs=outputs,
                attrs={"module": inst.module, "instance": inst.name,
                       "clocks": dict(inst.clock_bindings)})
            instance_stns.append((stn, inst))
            for out_idx, (port, _) in enumerate(outputs):
                bound = dict(inst.output_bindings).get(port)
                if bound is not None:
                    self.producers[bound] = (stn.id, out_idx, child.signals[port].width)

        for stn, inst in instance_stns:
            for idx, (port, expr) in enumerate(inst.data_bindings):
                self.connect(self.lower_expr(expr, None), stn, idx)

        for p in m.ports:
            if p.direction != ast.OUT:
                continue
            binding = self.producer_of(p.name, p.span)
            self.connect(binding, self._port_stns[p.name], 0)

        for i, proc in enumerate(m.processes):
            self._lower_process(i)

        # unread assign targets still deserve nodes only if something reads
        # them; producer_of is demand driven, so nothing is left to do here.

        self._nest_rows()
        return self._finish(domains)

    def _finish(self, domains: list[str]) -> CcrsDocument:
        lwcs: list[Lwc] = []
        groups: dict[tuple[str, int], Lwc] = {}
        for (src_id, src_idx, width), sink in self.connections:
            key = (src_id, src_idx)
            lwc = groups.get(key)
            if lwc is None:
                lwc = Lwc(f"w{len(lwcs)}", width, (src_id, src_idx), [])
                groups[key] = lwc
                lwcs.append(lwc)
            lwc.sinks.append(sink)
        m = self.module
        doc = CcrsDocument(
            module=m.name,
            ports=[DocPort(p.name, p.direction, p.width) for p in m.ports],
            stns=self.stns,
            lwcs=lwcs,
            clock_domains=[(c, c) for c in domains],
            metadata={"trace": dict(sorted(self.trace.items()))},
        )
        return doc

    # --- producers ------------------------------------------------------------------

    def producer_of(self, name: str, span: Span | None) -> Binding:
        if name in self.producers:
            return self.producers[name]
        if name in self._in_progress:  # pragma: no cover - elaboration rejects cycles
            raise RuntimeError(f"lowering cycle through '{name}'")
        self._in_progress.add(name)
        try:
            binding = self._lower_driver(name, span)
        finally:
            self._in_progress.discard(name)
        self.producers[name] = binding
        return binding

    def _lower_driver(self, name: str, span: Span | None) -> Binding:
        m = self.module
        driver = m.drivers.get(name)
        if driver is None:
            self.abort("E-UNDRIVEN", f"'{name}' has no driver", span)
        if driver[0] == "assign":
            a = m.assigns[driver[1]]
            binding = self.adapt(self.lower_expr(a.expr, None),
                                 m.signals[name].width, a.span)
            self.mark(binding[0], a.span)
            return binding
        if driver[0] == "process":
            self._lower_process(driver[1])
            return self.producers[name]
        raise RuntimeError(f"unexpected driver {driver!r} for '{name}'")

    def _lower_process(self, index: int) -> None:
        if index in self._process_done:
            return
        self._process_done.add(index)
        proc = self.module.processes[index]
        clocked = proc.kind == ast.CLOCKED
        env = self._exec(proc.body, {}, clocked)
        for target in proc.targets:
            width = self.module.signals[target].width
            if clocked:
                binding = env.get(target, self.producers[target])
                stn = self._timing[target]
                self.connect(self.adapt(binding, width, proc.span), stn, 0)
            else:
                if target not in env:
                    self.abort("E-LATCH",
                               f"'{target}' is never assigned in this process",
                               proc.span)
                binding = env[target]
                self.mark(binding[0], proc.span)
                self.producers[target] = binding

    # --- statement lowering ------------------------------------------------------------

    def _exec(self, stmt: ast.Stmt, env: dict[str, Binding],
              clocked: bool) -> dict[str, Binding]:
        if isinstance(stmt, ast.Block):
            for s in stmt.stmts:
                env = self._exec(s, env, clocked)
            return env
        if isinstance(stmt, ast.AssignStmt):
            width = self.module.signals[stmt.target].width
            env = dict(env)
            env[stmt.target] = self.adapt(self.lower_expr(stmt.expr, env),
                                          width, stmt.span)
            return env
        if isinstance(stmt, ast.IfStmt):
            return self._exec_if(stmt, env, clocked)
        if isinstance(stmt, ast.CaseStmt):
            return self._exec_case(stmt, env, clocked)
        raise TypeError(f"unexpected statement node {type(stmt).__name__}")

    def _exec_if(self, stmt: ast.IfStmt, env: dict[str, Binding],
                 clocked: bool) -> dict[str, Binding]:
        # an else-if chain flattens into one Branch node, one row per condition
        conds: list[Binding] = []
        branches: list[dict[str, Binding]] = []
        node: ast.Stmt | None = stmt
        while isinstance(node, ast.IfStmt):
            conds.append(self.lower_expr(node.cond, env))
            branches.append(self._exec(node.then_stmt, dict(env), clocked))
            node = node.else_stmt
        default_env = self._exec(node, dict(env), clocked) if node is not None \
            else dict(env)

        targets = self._changed_targets(branches + [default_env], env)
        out = dict(env)
        for target in sorted(targets):
            rows = []
            for cond, benv in zip(conds, branches):
                rows.append((cond, self._row_value(target, benv, env, clocked,
                                                   stmt.span)))
            default = self._row_value(target, default_env, env, clocked, stmt.span)
            out[target] = self._make_branch(target, rows, default, stmt.span)
        return out

    def _exec_case(self, stmt: ast.CaseStmt, env: dict[str, Binding],
                   clocked: bool) -> dict[str, Binding]:
        selector = self.lower_expr(stmt.selector, env)
        sel_width = stmt.selector.width or 1
        labels: list[tuple[int, int]] = []  # (value, item index)
        seen: set[int] = set()
        default_idx: int | None = None
        item_envs: list[dict[str, Binding]] = []
        for i, item in enumerate(stmt.items):
            item_envs.append(self._exec(item.body, dict(env), clocked))
            if item.labels is None:
                default_idx = i
                continue
            for lab in item.labels:
                value = lab.value  # type: ignore[union-attr]
                if value in seen:
                    self.abort("E-DUP-CASE", f"case label {value} appears twice",
                               item.span)
                seen.add(value)
                labels.append((value, i))
        full = case_full_coverage([v for v, _ in labels], sel_width)

        targets = self._changed_targets(item_envs, env)
        out = dict(env)
        for target in sorted(targets):
            rows = [(value, self._row_value(target, item_envs[i], env, clocked,
                                            stmt.span))
                    for value, i in labels]
            default: Binding | None = None
            if default_idx is not None:
                default = self._row_value(target, item_envs[default_idx], env,
                                          clocked, stmt.span)
            elif not full:
                default = self._prior(target, env, clocked, stmt.span)
            out[target] = self._make_case(target, selector, sel_width, rows,
                                          default, stmt.span)
        return out

    def _changed_targets(self, envs: list[dict[str, Binding]],
                         base: dict[str, Binding]) -> set[str]:
        changed: set[str] = set()
        for e in envs:
            for t, b in e.items():
                if base.get(t) != b:
                    changed.add(t)
        return changed

    def _row_value(self, target: str, branch_env: dict[str, Binding],
                   base: dict[str, Binding], clocked: bool, span: Span) -> Binding:
        if target in branch_env:
            return branch_env[target]
        return self._prior(target, base, clocked, span)

    def _prior(self, target: str, env: dict[str, Binding], clocked: bool,
               span: Span) -> Binding:
        if target in env:
            return env[target]
        if clocked:
            return self.producers[target]  # hold: feed the register back
        self.abort("E-LATCH",
                   f"'{target}' has no value when no condition matches", span)
        raise AssertionError  # pragma: no cover

    def _make_branch(self, target: str, rows: list[tuple[Binding, Binding]],
                     default: Binding, span: Span) -> Binding:
        width = self.module.signals[target].width
        inputs: list[tuple[str, int]] = []
        row_meta: list[dict] = []
        wiring: list[tuple[Binding, int]] = []
        for i, (cond, value) in enumerate(rows):
            inputs.append((f"c{i}", cond[2]))
            wiring.append((cond, len(inputs) - 1))
            inputs.append((f"v{i}", value[2]))
            wiring.append((value, len(inputs) - 1))
            row_meta.append({"cond": f"c{i}", "value": f"v{i}"})
        inputs.append(("vd", default[2]))
        wiring.append((default, len(inputs) - 1))
        row_meta.append({"cond": None, "value": "vd"})
        stn = self.new_stn(BRANCH, self.symtab.keyword("condition"), span,
                           inputs=inputs, outputs=[("out", width)],
                           attrs={"rows": row_meta})
        for binding, idx in wiring:
            self.connect(binding, stn, idx)
        return self.out_binding(stn)

    def _make_case(self, target: str, selector: Binding, sel_width: int,
                   rows: list[tuple[int, Binding]], default: Binding | None,
                   span: Span) -> Binding:
        width = self.module.signals[target].width
        inputs: list[tuple[str, int]] = [("sel", sel_width)]
        wiring: list[tuple[Binding, int]] = [(selector, 0)]
        row_meta: list[dict] = []
        for i, (value, binding) in enumerate(rows):
            inputs.append((f"v{i}", binding[2]))
            wiring.append((binding, len(inputs) - 1))
            row_meta.append({"match": value, "value": f"v{i}"})
        if default is not None:
            inputs.append(("vd", default[2]))
            wiring.append((default, len(inputs) - 1))
            row_meta.append({"match": None, "value": "vd"})
        stn = self.new_stn(CASE_SELECT, self.symtab.keyword("case"), span,
                           inputs=inputs, outputs=[("out", width)],
                           attrs={"rows": row_meta})
        for binding, idx in wiring:
            self.connect(binding, stn, idx)
        return self.out_binding(stn)

    # --- expression lowering ----------------------------------------------------------

    def lower_expr(self, expr: ast.Expr, env: dict[str, Binding] | None) -> Binding:
        if isinstance(expr, ast.Literal):
            return self.constant(expr.value, expr.width, expr.span)
        if isinstance(expr, ast.Ref):
            if env is not None and expr.name in env:
                return env[expr.name]
            return self.producer_of(expr.name, expr.span)
        if isinstance(expr, ast.Select):
            base = self.producer_of(expr.name, expr.span) \
                if env is None or expr.name not in env else env[expr.name]
            if expr.lsb_val == 0 and expr.msb_val == base[2] - 1:
                return base  # full-width select is a passthrough
            return self.select(base, expr.msb_val, expr.lsb_val, expr.span)
        if isinstance(expr, ast.Unary):
            code, cls = ops.UNARY_CODES[expr.op]
            operand = self.lower_expr(expr.operand, env)
            return self.data_op(code, cls, [operand], expr.width, expr.span)
        if isinstance(expr, ast.Binary):
            code, cls = ops.BINARY_CODES[expr.op]
            parts = [self.lower_expr(e, env)
                     for e in _flatten_left(expr, expr.op, code)]
            return self.data_op(code, cls, parts, expr.width, expr.span)
        if isinstance(expr, ast.Ternary):
            cond = self.lower_expr(expr.cond, env)
            then_val = self.lower_expr(expr.then_val, env)
            else_val = self.lower_expr(expr.else_val, env)
            then_val = self.extend(then_val, expr.width, expr.span)
            else_val = self.extend(else_val, expr.width, expr.span)
            return self._make_ternary(cond, then_val, else_val, expr.width, expr.span)
        if isinstance(expr, ast.Concat):
            parts = [self.lower_expr(p, env) for p in expr.parts]
            return self.data_op("concat", "structural", parts, expr.width, expr.span)
        raise TypeError(f"unexpected expression node {type(expr).__name__}")

    def _make_ternary(self, cond: Binding, then_val: Binding, else_val: Binding,
                      width: int, span: Span) -> Binding:
        stn = self.new_stn(
            BRANCH, self.symtab.keyword("condition"), span,
            inputs=[("c0", cond[2]), ("v0", then_val[2]), ("vd", else_val[2])],
            outputs=[("out", width)],
            attrs={"rows": [{"cond": "c0", "value": "v0"},
                            {"cond": None, "value": "vd"}]})
        self.connect(cond, stn, 0)
        self.connect(then_val, stn, 1)
        self.connect(else_val, stn, 2)
        return self.out_binding(stn)

    def data_op(self, code: str, cls: str, operands: list[Binding], width: int,
                span: Span) -> Binding:
        label = self.symtab.glyph_for_code(code)
        inputs = [(f"in{i}", b[2]) for i, b in enumerate(operands)]
        stn = self.new_stn(DATA_OP, label, span, opcode=code,
                           inputs=inputs, outputs=[("out", width)])
        for i, b in enumerate(operands):
            self.connect(b, stn, i)
        return self.out_binding(stn)

    def constant(self, value: int, width: int, span: Span | None) -> Binding:
        stn = self.new_stn(CONSTANT, "", span, outputs=[("out", width)],
                           attrs={"value": value})
        return self.out_binding(stn)

    def select(self, base: Binding, msb: int, lsb: int, span: Span) -> Binding:
        stn = self.new_stn(DATA_OP, self.symtab.glyph_for_code("select"), span,
                           opcode="select", inputs=[("in0", base[2])],
                           outputs=[("out", msb - lsb + 1)],
                           attrs={"msb": msb, "lsb": lsb})
        self.connect(base, stn, 0)
        return self.out_binding(stn)

    def adapt(self, binding: Binding, width: int, span: Span) -> Binding:
        """Zero-extend or truncate a value to an assignment target's width."""
        if binding[2] == width:
            return binding
        if binding[2] > width:
            return self.select(binding, width - 1, 0, span)
        return self.extend(binding, width, span)

    def extend(self, binding: Binding, width: int, span: Span) -> Binding:
        if binding[2] >= width:
            return binding
        zero = self.constant(0, width - binding[2], span)
        return self.data_op("concat", "structural", [zero, binding], width, span)

    # --- nesting pass --------------------------------------------------------------

    def _nest_rows(self) -> None:
        """Move a Branch/CaseSelect that feeds exactly one row-value port of
        another Branch/CaseSelect inside that row, making the statement
        nesting visible as node nesting."""
        while True:
            consumers: dict[tuple[str, int], list[int]] = {}
            for ci, (src, _) in enumerate(self.connections):
                consumers.setdefault((src[0], src[1]), []).append(ci)
            by_id = {stn.id: stn for stn in self.stns}
            moved = False
            for stn in self.stns:
                if stn.kind not in (BRANCH, CASE_SELECT):
                    continue
                for row in stn.attrs["rows"]:
                    port = row.get("value")
                    if port is None:
                        continue
                    idx = stn.input_index(port)
                    feed = [ci for ci, (_, sink) in enumerate(self.connections)
                            if sink == (stn.id, idx)]
                    if len(feed) != 1:
                        continue
                    src, _ = self.connections[feed[0]]
                    child = by_id.get(src[0])
                    if (child is None or child is stn
                            or child.kind not in (BRANCH, CASE_SELECT)
                            or len(consumers.get((src[0], src[1]), ())) != 1
                            or child not in self.stns):
                        continue
                    self._adopt(stn, row, port, idx, child, feed[0])
                    moved = True
                    break
                if moved:
                    break
            if not moved:
                return

    def _adopt(self, parent: Stn, row: dict, port: str, idx: int, child: Stn,
               connection_idx: int) -> None:
        del self.connections[connection_idx]
        parent.inputs.pop(idx)
        fixed = []
        for src, (sink_id, sink_idx) in self.connections:
            if sink_id == parent.id and sink_idx > idx:
                fixed.append((src, (sink_id, sink_idx - 1)))
            else:
                fixed.append((src, (sink_id, sink_idx)))
        self.connections = fixed
        row.pop("value")
        row["child"] = child.id
        self.stns.remove(child)
        # children must mirror row order; rebuild from the rows list
        order = [r["child"] for r in parent.attrs["rows"] if r.get("child") is not None]
        existing = {c.id: c for c in parent.children}
        existing[child.id] = child
        parent.children = [existing[cid] for cid in order]


def _flatten_left(expr: ast.Expr, op: str, code: str) -> list[ast.Expr]:
    """Collect the left-spine operand run of an associative operator.
    ``a & b & c`` parses left-leaning and folds into one node; explicit
    right grouping like ``a & (b & c)`` stays two nodes."""
    if code not in ops.ASSOCIATIVE:
        return [expr.left, expr.right]  # type: ignore[union-attr]
    out: list[ast.Expr] = []
    node = expr
    while isinstance(node, ast.Binary) and node.op == op:
        out.append(node.right)
        node = node.left
    out.append(node)
    out.reverse()
    return out
