"""Cycle-based interpreter for elaborated HDL designs.

Each cycle: combinational logic settles to its fixpoint (guaranteed by the
acyclicity check), outputs are sampled, then every register updates
simultaneously.  Clocks are implicit; one cycle is one tick of every clock.
"""

from __future__ import annotations

from ccrs.hdl import ast
from ccrs.hdl.elaborate import ElabModule, ElaboratedDesign
from ccrs.sim import ops
from ccrs.sim.stimulus import SimulationError, Stimulus, Trace


class _Inst:
    def __init__(self, design: ElaboratedDesign, module: ElabModule):
        self.module = module
        self.regs: dict[str, int] = {}
        for p in module.processes:
            if p.kind == ast.CLOCKED:
                for t in p.targets:
                    self.regs[t] = 0
        self.env: dict[str, int] = {}
        self.children: dict[str, _Inst] = {}
        for inst in module.instances:
            self.children[inst.name] = _Inst(design, design.modules[inst.module])


def _unit_order(module: ElabModule) -> list[tuple[str, int]] | None:
    """Topological order over (kind, index) evaluation units, or None when a
    unit reads its own targets (latch-style), which needs fixpoint sweeps."""
    units: list[tuple[str, int]] = []
    targets: dict[tuple[str, int], set[str]] = {}
    for i, a in enumerate(module.assigns):
        units.append(("assign", i))
        targets[("assign", i)] = {a.target}
    for i, p in enumerate(module.processes):
        if p.kind == ast.COMB:
            units.append(("process", i))
            targets[("process", i)] = set(p.targets)
    for i, inst in enumerate(module.instances):
        units.append(("instance", i))
        targets[("instance", i)] = {net for _, net in inst.output_bindings}

    producer: dict[str, tuple[str, int]] = {}
    for unit, tset in targets.items():
        for t in tset:
            producer[t] = unit
    indeg = {u: 0 for u in units}
    succ: dict[tuple[str, int], list[tuple[str, int]]] = {u: [] for u in units}
    for unit, tset in targets.items():
        reads: set[str] = set()
        for t in tset:
            reads |= module.target_deps.get(t, set())
        for r in reads:
            src = producer.get(r)
            if src is None:
                continue
            if src == unit:
                return None
            succ[src].append(unit)
            indeg[unit] += 1
    order: list[tuple[str, int]] = []
    ready = [u for u in units if indeg[u] == 0]
    while ready:
        u = ready.pop(0)
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                ready.append(v)
    return order if len(order) == len(units) else None


class HdlSimulator:
    def __init__(self, design: ElaboratedDesign, top: str | None = None):
        self.design = design
        self.module = design.top(top)
        self.root = _Inst(design, self.module)
        self.plans: dict[str, list[tuple[str, int]] | None] = {
            name: _unit_order(mod) for name, mod in design.modules.items()}

    # --- interface ---------------------------------------------------------

    def inputs(self) -> dict[str, int]:
        return {p.name: p.width for p in self.module.data_inputs}

    def outputs(self) -> dict[str, int]:
        return {p.name: p.width for p in self.module.outputs}

    def ports(self) -> list[tuple[str, str, int]]:
        return [(p.name, p.direction, p.width) for p in self.module.ports]

    def is_sequential(self) -> bool:
        return self.module.has_state

    # --- runs ----------------------------------------------------------------

    def run(self, stim: Stimulus) -> Trace:
        stim.check_against(self.inputs())
        self.root = _Inst(self.design, self.module)  # registers reset to 0
        rows = []
        for row in stim.cycles:
            self._settle(self.root, dict(row))
            rows.append({p.name: self.root.env[p.name] for p in self.module.outputs})
            self._tick(self.root)
        return Trace(tuple(rows))

    # --- combinational settle ---------------------------------------------------

    def _settle(self, inst: _Inst, inputs: dict[str, int]) -> None:
        m = inst.module
        env = inst.env
        if not env:
            for sig in m.signals.values():
                env[sig.name] = 0
        env.update(inst.regs)
        for clock in m.clock_nets:
            env[clock] = 0
        env.update(inputs)

        plan = self.plans[m.name]
        if plan is not None:  # acyclic units settle in one ordered pass
            for kind, i in plan:
                self._eval_unit(inst, kind, i)
            return
        limit = len(m.assigns) + len(m.processes) + len(m.instances) + 2
        for _ in range(limit):
            if not self._sweep(inst):
                return
        raise SimulationError(
            f"combinational logic in '{m.name}' did not settle")  # pragma: no cover

    def _eval_unit(self, inst: _Inst, kind: str, i: int) -> bool:
        m = inst.module
        env = inst.env
        changed = False
        if kind == "assign":
            a = m.assigns[i]
            width = m.signals[a.target].width
            v = _eval(a.expr, env) & ops.mask(width)
            if env.get(a.target) != v:
                env[a.target] = v
                changed = True
        elif kind == "process":
            p = m.processes[i]
            overlay: dict[str, int] = {}
            _exec_stmt(p.body, env, overlay, m)
            for t, v in overlay.items():
                if env.get(t) != v:
                    env[t] = v
                    changed = True
        else:
            ei = m.instances[i]
            child = inst.children[ei.name]
            child_inputs = {}
            for port, expr in ei.data_bindings:
                width = child.module.signals[port].width
                child_inputs[port] = _eval(expr, env) & ops.mask(width)
            self._settle(child, child_inputs)
            for port, net in ei.output_bindings:
                v = child.env[port]
                if env.get(net) != v:
                    env[net] = v
                    changed = True
        return changed

    def _sweep(self, inst: _Inst) -> bool:
        m = inst.module
        changed = False
        for i in range(len(m.assigns)):
            changed |= self._eval_unit(inst, "assign", i)
        for i, p in enumerate(m.processes):
            if p.kind == ast.COMB:
                changed |= self._eval_unit(inst, "process", i)
        for i in range(len(m.instances)):
            changed |= self._eval_unit(inst, "instance", i)
        return changed

    # --- register update -----------------------------------------------------------

    def _tick(self, inst: _Inst) -> None:
        m = inst.module
        pending: dict[str, int] = {}
        for p in m.processes:
            if p.kind != ast.CLOCKED:
                continue
            overlay: dict[str, int] = {}
            _exec_stmt(p.body, inst.env, overlay, m, nonblocking=True)
            pending.update(overlay)
        for child in inst.children.values():
            self._tick(child)
        inst.regs.update(pending)


# --- expression / statement interpretation ------------------------------------------

def _eval(expr: ast.Expr, env: dict[str, int]) -> int:
    if isinstance(expr, ast.Literal):
        return expr.value
    if isinstance(expr, ast.Ref):
        return env[expr.name]
    if isinstance(expr, ast.Select):
        return ops.apply_op("select", [env[expr.name]], [0], expr.width,
                            {"msb": expr.msb_val, "lsb": expr.lsb_val})
    if isinstance(expr, ast.Unary):
        code, _ = ops.UNARY_CODES[expr.op]
        v = _eval(expr.operand, env)
        return ops.apply_op(code, [v], [expr.operand.width], expr.width)
    if isinstance(expr, ast.Binary):
        code, _ = ops.BINARY_CODES[expr.op]
        left = _eval(expr.left, env)
        right = _eval(expr.right, env)
        return ops.apply_op(code, [left, right],
                            [expr.left.width, expr.right.width], expr.width)
    if isinstance(expr, ast.Ternary):
        taken = expr.then_val if _eval(expr.cond, env) != 0 else expr.else_val
        return _eval(taken, env) & ops.mask(expr.width)
    if isinstance(expr, ast.Concat):
        values = [_eval(p, env) for p in expr.parts]
        widths = [p.width for p in expr.parts]
        return ops.apply_op("concat", values, widths, expr.width)
    raise TypeError(f"unexpected expression node {type(expr).__name__}")


def _exec_stmt(stmt: ast.Stmt, env: dict[str, int], overlay: dict[str, int],
               module: ElabModule, nonblocking: bool = False) -> None:
    """Execute a process body.  Blocking reads see earlier overlay writes;
    nonblocking reads see only the settled env."""
    def read_env(expr: ast.Expr) -> int:
        if nonblocking:
            return _eval(expr, env)
        return _eval(expr, _Overlay(env, overlay))

    if isinstance(stmt, ast.Block):
        for s in stmt.stmts:
            _exec_stmt(s, env, overlay, module, nonblocking)
    elif isinstance(stmt, ast.AssignStmt):
        width = module.signals[stmt.target].width
        overlay[stmt.target] = read_env(stmt.expr) & ops.mask(width)
    elif isinstance(stmt, ast.IfStmt):
        if read_env(stmt.cond) != 0:
            _exec_stmt(stmt.then_stmt, env, overlay, module, nonblocking)
        elif stmt.else_stmt is not None:
            _exec_stmt(stmt.else_stmt, env, overlay, module, nonblocking)
    elif isinstance(stmt, ast.CaseStmt):
        sel = read_env(stmt.selector)
        default = None
        for item in stmt.items:
            if item.labels is None:
                default = item
                continue
            if any(lab.value == sel for lab in item.labels):  # type: ignore[union-attr]
                _exec_stmt(item.body, env, overlay, module, nonblocking)
                return
        if default is not None:
            _exec_stmt(default.body, env, overlay, module, nonblocking)
    else:
        raise TypeError(f"unexpected statement node {type(stmt).__name__}")


class _Overlay(dict):
    """Read-through view merging a process overlay onto the module env."""

    def __init__(self, env: dict[str, int], overlay: dict[str, int]):
        super().__init__()
        self._env = env
        self._overlay = overlay

    def __getitem__(self, key: str) -> int:
        if key in self._overlay:
            return self._overlay[key]
        return self._env[key]
