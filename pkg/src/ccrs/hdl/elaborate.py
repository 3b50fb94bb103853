"""Semantic analysis: resolve names, compute widths, classify processes,
enforce the single-driver rule, and reject combinational cycles.

Width rules: bitwise/arithmetic/shift results take the widest operand;
comparisons, logical operators and reductions are 1 bit; concatenation
sums; assignment zero-extends or truncates to the target.  Unsized
literals are as wide as their value (at least 1 bit).  Parameters are
folded into literals here, so nothing downstream ever sees one.

Clocks are structural, not data: a clock must be a 1-bit input port, may
only appear in sensitivity lists or be passed to an instance clock port,
and reading one in an expression is an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ccrs.diagnostics import Diagnostic, Span, error, has_errors, warning
from ccrs.hdl import ast


@dataclass(frozen=True)
class Signal:
    name: str
    width: int
    kind: str  # "wire" or "reg"
    direction: str | None  # ast.IN, ast.OUT, or None for internal nets
    span: Span


@dataclass(frozen=True)
class ElabProcess:
    kind: str  # ast.CLOCKED or ast.COMB
    clock: str | None
    body: ast.Stmt
    targets: tuple[str, ...]
    span: Span


@dataclass(frozen=True)
class ElabInstance:
    name: str
    module: str
    data_bindings: tuple[tuple[str, ast.Expr], ...]   # child input port -> expr
    output_bindings: tuple[tuple[str, str], ...]      # child output port -> net
    clock_bindings: tuple[tuple[str, str], ...]       # child clock port -> clock net
    span: Span


@dataclass
class ElabModule:
    name: str
    ports: list[Signal]
    signals: dict[str, Signal]
    assigns: list[ast.ContAssign]
    processes: list[ElabProcess]
    instances: list[ElabInstance]
    clock_nets: set[str] = field(default_factory=set)
    clock_ports: set[str] = field(default_factory=set)
    drivers: dict[str, tuple] = field(default_factory=dict)
    target_deps: dict[str, set[str]] = field(default_factory=dict)
    io_comb_deps: dict[str, frozenset[str]] = field(default_factory=dict)
    has_state: bool = False
    span: Span | None = None

    @property
    def data_inputs(self) -> list[Signal]:
        return [p for p in self.ports
                if p.direction == ast.IN and p.name not in self.clock_nets]

    @property
    def outputs(self) -> list[Signal]:
        return [p for p in self.ports if p.direction == ast.OUT]


@dataclass
class ElaboratedDesign:
    modules: dict[str, ElabModule]
    order: list[str]  # children before parents

    def top_candidates(self) -> list[str]:
        instantiated = set()
        for m in self.modules.values():
            for inst in m.instances:
                instantiated.add(inst.module)
        return [name for name in self.order if name not in instantiated]

    def top(self, name: str | None = None) -> ElabModule:
        if name is not None:
            if name not in self.modules:
                raise KeyError(f"no module named {name!r}")
            return self.modules[name]
        candidates = self.top_candidates()
        if len(candidates) != 1:
            raise ValueError(
                f"top module is ambiguous (candidates: {', '.join(candidates) or 'none'})")
        return self.modules[candidates[0]]


def elaborate(tree: ast.HdlAst) -> tuple[ElaboratedDesign | None, list[Diagnostic]]:
    diags: list[Diagnostic] = []
    by_name: dict[str, ast.Module] = {}
    for mod in tree.modules:
        if mod.name in by_name:
            diags.append(error("E-REDECLARED", f"module '{mod.name}' declared twice",
                               mod.span))
        else:
            by_name[mod.name] = mod
    order, order_diags = _instantiation_order(by_name)
    diags.extend(order_diags)
    if has_errors(diags):
        return None, diags

    elaborated: dict[str, ElabModule] = {}
    for name in order:
        em = _elaborate_module(by_name[name], elaborated, diags)
        elaborated[name] = em
    if has_errors(diags):
        return None, diags
    return ElaboratedDesign(elaborated, order), diags


def _instantiation_order(by_name: dict[str, ast.Module]) \
        -> tuple[list[str], list[Diagnostic]]:
    """Children-first order over the instantiation graph."""
    diags: list[Diagnostic] = []
    order: list[str] = []
    state: dict[str, int] = {}  # 0 visiting, 1 done

    def visit(name: str, chain: list[str]) -> None:
        if state.get(name) == 1:
            return
        if state.get(name) == 0:
            diags.append(error(
                "E-RECURSION",
                "recursive instantiation: " + " -> ".join(chain + [name]),
                by_name[name].span))
            return
        state[name] = 0
        for inst in by_name[name].instances:
            if inst.module in by_name:
                visit(inst.module, chain + [name])
        state[name] = 1
        order.append(name)

    for name in by_name:
        visit(name, [])
    return order, diags


# --- constant folding -------------------------------------------------------

_CONST_BIN = {"+": lambda a, b: a + b, "-": lambda a, b: a - b,
              "*": lambda a, b: a * b, "<<": lambda a, b: a << b,
              ">>": lambda a, b: a >> b}


def _const_eval(expr: ast.Expr, params: dict[str, int]) -> int | None:
    """Evaluate a constant context (range bound, parameter, case label,
    shift amount) over plain integers.  None means not constant."""
    if isinstance(expr, ast.Literal):
        return expr.value
    if isinstance(expr, ast.Ref):
        return params.get(expr.name)
    if isinstance(expr, ast.Binary) and expr.op in _CONST_BIN:
        left = _const_eval(expr.left, params)
        right = _const_eval(expr.right, params)
        if left is None or right is None:
            return None
        return _CONST_BIN[expr.op](left, right)
    return None


def _literal_width(value: int) -> int:
    return max(1, value.bit_length())


# --- per-module elaboration --------------------------------------------------

class _ModuleScope:
    def __init__(self, mod: ast.Module, children: dict[str, ElabModule],
                 diags: list[Diagnostic]):
        self.mod = mod
        self.children = children
        self.diags = diags
        self.params: dict[str, int] = {}
        self.signals: dict[str, Signal] = {}

    def err(self, code: str, message: str, span: Span | None) -> None:
        self.diags.append(error(code, message, span))


def _elaborate_module(mod: ast.Module, children: dict[str, ElabModule],
                      diags: list[Diagnostic]) -> ElabModule:
    scope = _ModuleScope(mod, children, diags)
    _collect_params(scope)
    ports = _collect_signals(scope)

    em = ElabModule(mod.name, ports, scope.signals, [], [], [], span=mod.span)
    reads_anywhere: set[str] = set()
    drivers: dict[str, list[tuple]] = {p.name: [("input",)] for p in ports
                                       if p.direction == ast.IN}

    for i, assign in enumerate(mod.assigns):
        target = _check_target(scope, assign.target, assign.span, blocking=None)
        expr = _annotate(scope, assign.expr)
        if target is not None:
            if target.kind != "wire":
                scope.err("E-ASSIGN-KIND",
                          f"continuous assignment target '{target.name}' must be a wire",
                          assign.span)
            drivers.setdefault(target.name, []).append(("assign", i))
        reads_anywhere |= _reads(expr)
        em.assigns.append(replace(assign, expr=expr))

    for i, proc in enumerate(mod.processes):
        body = _annotate_stmt(scope, proc.body, proc.kind)
        targets = tuple(sorted(_targets(body)))
        for t in targets:
            sig = scope.signals.get(t)
            if sig is not None and sig.kind != "reg":
                scope.err("E-ASSIGN-KIND",
                          f"process target '{t}' must be declared 'reg'", proc.span)
            drivers.setdefault(t, []).append(("process", i))
        clock = proc.clock
        if proc.kind == ast.CLOCKED:
            em.has_state = True
            _check_clock(scope, clock, proc.span, em)
        reads_anywhere |= _stmt_reads(body)
        em.processes.append(ElabProcess(proc.kind, clock, body, targets, proc.span))

    for i, inst in enumerate(mod.instances):
        ei = _elaborate_instance(scope, inst, em, drivers, reads_anywhere)
        if ei is not None:
            em.instances.append(ei)
            child = children[ei.module]
            em.has_state = em.has_state or child.has_state

    _check_drivers(scope, em, drivers, reads_anywhere)
    _check_clock_data_use(scope, em)
    _dependency_analysis(scope, em)
    return em


def _collect_params(scope: _ModuleScope) -> None:
    for p in scope.mod.params:
        if p.name in scope.params:
            scope.err("E-REDECLARED", f"parameter '{p.name}' declared twice", p.span)
            continue
        value = _const_eval(p.expr, scope.params)
        if value is None:
            scope.err("E-NONCONST", f"parameter '{p.name}' needs a constant value", p.span)
            value = 0
        scope.params[p.name] = value


def _collect_signals(scope: _ModuleScope) -> list[Signal]:
    ports: list[Signal] = []
    for p in scope.mod.ports:
        width = _range_width(scope, p.range_, p.span)
        sig = Signal(p.name, width, "reg" if p.is_reg else "wire", p.direction, p.span)
        if _declare(scope, sig, p.span):
            ports.append(sig)
    for n in scope.mod.nets:
        if n.name in scope.params:
            scope.err("E-REDECLARED", f"'{n.name}' already declared as a parameter", n.span)
            continue
        width = _range_width(scope, n.range_, n.span)
        _declare(scope, Signal(n.name, width, n.kind, None, n.span), n.span)
    return ports


def _declare(scope: _ModuleScope, sig: Signal, span: Span) -> bool:
    if sig.name in scope.signals or sig.name in scope.params:
        scope.err("E-REDECLARED", f"'{sig.name}' declared twice", span)
        return False
    scope.signals[sig.name] = sig
    return True


def _range_width(scope: _ModuleScope, rng: tuple[ast.Expr, ast.Expr] | None,
                 span: Span) -> int:
    if rng is None:
        return 1
    msb = _const_eval(rng[0], scope.params)
    lsb = _const_eval(rng[1], scope.params)
    if msb is None or lsb is None:
        scope.err("E-NONCONST", "range bounds must be constant", span)
        return 1
    if lsb != 0:
        scope.err("E-RANGE", "declared ranges must end at bit 0", span)
        return 1
    if msb < 0:
        scope.err("E-RANGE", "range msb must be >= 0", span)
        return 1
    return msb + 1


def _check_target(scope: _ModuleScope, name: str, span: Span,
                  blocking: bool | None) -> Signal | None:
    sig = scope.signals.get(name)
    if sig is None:
        what = "parameter" if name in scope.params else "undeclared identifier"
        scope.err("E-UNDECLARED", f"cannot assign to {what} '{name}'", span)
        return None
    if sig.direction == ast.IN:
        scope.err("E-MULTI-DRIVER", f"input port '{name}' cannot be driven", span)
    return sig


def _check_clock(scope: _ModuleScope, clock: str | None, span: Span,
                 em: ElabModule) -> None:
    if clock is None:
        return
    sig = scope.signals.get(clock)
    if sig is None:
        scope.err("E-UNDECLARED", f"clock '{clock}' is not declared", span)
        return
    if sig.direction != ast.IN or sig.width != 1:
        scope.err("E-CLOCK", f"clock '{clock}' must be a 1-bit input port", span)
        return
    em.clock_nets.add(clock)
    em.clock_ports.add(clock)


# --- expression annotation ---------------------------------------------------

_BITWISE = {"&", "|", "^"}
_LOGICAL = {"&&", "||"}
_COMPARE = {"==", "!=", "<", "<=", ">", ">="}
_SHIFT = {"<<", ">>"}
_ARITH = {"+", "-", "*"}


def _annotate(scope: _ModuleScope, expr: ast.Expr) -> ast.Expr:
    if isinstance(expr, ast.Literal):
        width = expr.size if expr.size is not None else _literal_width(expr.value)
        return replace(expr, width=width)
    if isinstance(expr, ast.Ref):
        if expr.name in scope.params:
            value = scope.params[expr.name]
            return ast.Literal(expr.span, value, None, width=_literal_width(value))
        sig = scope.signals.get(expr.name)
        if sig is None:
            scope.err("E-UNDECLARED", f"'{expr.name}' is not declared", expr.span)
            return replace(expr, width=1)
        return replace(expr, width=sig.width)
    if isinstance(expr, ast.Select):
        return _annotate_select(scope, expr)
    if isinstance(expr, ast.Unary):
        operand = _annotate(scope, expr.operand)
        width = operand.width if expr.op == "~" else 1
        return replace(expr, operand=operand, width=width)
    if isinstance(expr, ast.Binary):
        return _annotate_binary(scope, expr)
    if isinstance(expr, ast.Ternary):
        cond = _annotate(scope, expr.cond)
        then_val = _annotate(scope, expr.then_val)
        else_val = _annotate(scope, expr.else_val)
        width = max(then_val.width or 1, else_val.width or 1)
        return replace(expr, cond=cond, then_val=then_val, else_val=else_val, width=width)
    if isinstance(expr, ast.Concat):
        parts = tuple(_annotate(scope, p) for p in expr.parts)
        width = sum(p.width or 1 for p in parts)
        return replace(expr, parts=parts, width=width)
    raise TypeError(f"unexpected expression node {type(expr).__name__}")


def _annotate_select(scope: _ModuleScope, expr: ast.Select) -> ast.Expr:
    sig = scope.signals.get(expr.name)
    if sig is None:
        kind = "parameter" if expr.name in scope.params else "undeclared identifier"
        scope.err("E-UNDECLARED" if kind != "parameter" else "E-RANGE",
                  f"bit-select of {kind} '{expr.name}'", expr.span)
        return replace(expr, width=1, msb_val=0, lsb_val=0)
    msb = _const_eval(expr.msb, scope.params)
    lsb = msb if expr.lsb is None else _const_eval(expr.lsb, scope.params)
    if msb is None or lsb is None:
        scope.err("E-NONCONST", "select indices must be constant", expr.span)
        return replace(expr, width=1, msb_val=0, lsb_val=0)
    if not (0 <= lsb <= msb < sig.width):
        scope.err("E-RANGE",
                  f"select [{msb}:{lsb}] is outside '{sig.name}' of width {sig.width}",
                  expr.span)
        msb = lsb = 0
    return replace(expr, width=msb - lsb + 1, msb_val=msb, lsb_val=lsb)


def _annotate_binary(scope: _ModuleScope, expr: ast.Binary) -> ast.Expr:
    left = _annotate(scope, expr.left)
    if expr.op in _SHIFT:
        amount = _const_eval(expr.right, scope.params)
        if amount is None or amount < 0:
            scope.err("E-NONCONST", "shift amounts must be non-negative constants",
                      expr.span)
            amount = 0
        right: ast.Expr = ast.Literal(expr.right.span, amount, None,
                                      width=_literal_width(amount))
    else:
        right = _annotate(scope, expr.right)
    lw, rw = left.width or 1, right.width or 1
    if expr.op in _BITWISE or expr.op in _ARITH or expr.op in _SHIFT:
        width = max(lw, rw)
    elif expr.op in _LOGICAL or expr.op in _COMPARE:
        width = 1
    else:
        raise ValueError(f"unknown binary operator {expr.op!r}")
    return replace(expr, left=left, right=right, width=width)


def _annotate_stmt(scope: _ModuleScope, stmt: ast.Stmt, proc_kind: str) -> ast.Stmt:
    if isinstance(stmt, ast.Block):
        return replace(stmt, stmts=tuple(_annotate_stmt(scope, s, proc_kind)
                                         for s in stmt.stmts))
    if isinstance(stmt, ast.AssignStmt):
        want_blocking = proc_kind == ast.COMB
        if stmt.blocking != want_blocking:
            have = "blocking '='" if stmt.blocking else "nonblocking '<='"
            need = "blocking '='" if want_blocking else "nonblocking '<='"
            scope.err("E-ASSIGN-KIND",
                      f"{proc_kind} process uses {have}; it must use {need}", stmt.span)
        _check_target(scope, stmt.target, stmt.span, stmt.blocking)
        return replace(stmt, expr=_annotate(scope, stmt.expr))
    if isinstance(stmt, ast.IfStmt):
        else_stmt = None if stmt.else_stmt is None \
            else _annotate_stmt(scope, stmt.else_stmt, proc_kind)
        return replace(stmt, cond=_annotate(scope, stmt.cond),
                       then_stmt=_annotate_stmt(scope, stmt.then_stmt, proc_kind),
                       else_stmt=else_stmt)
    if isinstance(stmt, ast.CaseStmt):
        selector = _annotate(scope, stmt.selector)
        sel_width = selector.width or 1
        items = []
        for item in stmt.items:
            labels = None
            if item.labels is not None:
                labels = tuple(_fold_label(scope, lab, sel_width) for lab in item.labels)
            items.append(ast.CaseItem(labels, _annotate_stmt(scope, item.body, proc_kind),
                                      item.span))
        return replace(stmt, selector=selector, items=tuple(items))
    raise TypeError(f"unexpected statement node {type(stmt).__name__}")


def _fold_label(scope: _ModuleScope, label: ast.Expr, sel_width: int) -> ast.Expr:
    value = _const_eval(label, scope.params)
    if value is None:
        scope.err("E-NONCONST", "case labels must be constant", label.span)
        value = 0
    if value >= (1 << sel_width):
        scope.err("E-RANGE",
                  f"case label {value} does not fit the {sel_width}-bit selector",
                  label.span)
        value &= (1 << sel_width) - 1
    return ast.Literal(label.span, value, None, width=sel_width)


# --- instances ----------------------------------------------------------------

def _elaborate_instance(scope: _ModuleScope, inst: ast.Instance, em: ElabModule,
                        drivers: dict[str, list[tuple]],
                        reads_anywhere: set[str]) -> ElabInstance | None:
    child = scope.children.get(inst.module)
    if child is None:
        scope.err("E-UNKNOWN-MODULE", f"module '{inst.module}' is not defined", inst.span)
        return None
    bound: dict[str, ast.Expr | None] = {}
    for port, expr in inst.bindings:
        if port in bound:
            scope.err("E-PORT-BINDING", f"port '{port}' bound twice on '{inst.name}'",
                      inst.span)
            continue
        bound[port] = expr
    child_ports = {p.name: p for p in child.ports}
    for port in bound:
        if port not in child_ports:
            scope.err("E-PORT-BINDING",
                      f"'{inst.module}' has no port '{port}'", inst.span)

    data_bindings: list[tuple[str, ast.Expr]] = []
    output_bindings: list[tuple[str, str]] = []
    clock_bindings: list[tuple[str, str]] = []
    for p in child.ports:  # child port order keeps everything deterministic
        expr = bound.get(p.name)
        if p.name in child.clock_ports:
            if not isinstance(expr, ast.Ref):
                scope.err("E-CLOCK",
                          f"clock port '{p.name}' of '{inst.name}' must be bound to a "
                          f"clock input", inst.span)
                continue
            sig = scope.signals.get(expr.name)
            if sig is None or sig.direction != ast.IN or sig.width != 1:
                scope.err("E-CLOCK",
                          f"clock '{expr.name}' must be a 1-bit input port", inst.span)
                continue
            em.clock_nets.add(expr.name)
            em.clock_ports.add(expr.name)
            clock_bindings.append((p.name, expr.name))
        elif p.direction == ast.IN:
            if expr is None:
                scope.err("E-PORT-BINDING",
                          f"input port '{p.name}' of '{inst.name}' is unbound", inst.span)
                continue
            annotated = _annotate(scope, expr)
            if (annotated.width or 1) != p.width:
                scope.err("E-WIDTH",
                          f"binding for '{p.name}' of '{inst.name}' is "
                          f"{annotated.width} bits, port is {p.width}", inst.span)
            reads_anywhere |= _reads(annotated)
            data_bindings.append((p.name, annotated))
        else:
            if expr is None:
                continue  # open output
            if not isinstance(expr, ast.Ref):
                scope.err("E-PORT-BINDING",
                          f"output port '{p.name}' of '{inst.name}' must be bound to "
                          f"a plain net", inst.span)
                continue
            sig = scope.signals.get(expr.name)
            if sig is None:
                scope.err("E-UNDECLARED", f"'{expr.name}' is not declared", expr.span)
                continue
            if sig.width != p.width:
                scope.err("E-WIDTH",
                          f"net '{expr.name}' is {sig.width} bits, output port "
                          f"'{p.name}' is {p.width}", inst.span)
            if sig.direction == ast.IN:
                scope.err("E-MULTI-DRIVER", f"input port '{expr.name}' cannot be driven",
                          inst.span)
            idx = len(em.instances)
            drivers.setdefault(expr.name, []).append(("instance", idx, p.name))
            output_bindings.append((p.name, expr.name))
    return ElabInstance(inst.name, inst.module, tuple(data_bindings),
                        tuple(output_bindings), tuple(clock_bindings), inst.span)


# --- whole-module checks --------------------------------------------------------

def _check_drivers(scope: _ModuleScope, em: ElabModule,
                   drivers: dict[str, list[tuple]], reads_anywhere: set[str]) -> None:
    for name, who in sorted(drivers.items()):
        if len(who) > 1:
            scope.err("E-MULTI-DRIVER", f"'{name}' has {len(who)} drivers",
                      em.signals[name].span if name in em.signals else None)
    for name, sig in sorted(em.signals.items()):
        driven = name in drivers
        needed = name in reads_anywhere or sig.direction == ast.OUT
        if needed and not driven and name not in em.clock_nets:
            scope.err("E-UNDRIVEN", f"'{name}' is used but never driven", sig.span)
    em.drivers = {name: who[0] for name, who in drivers.items() if len(who) == 1}


def _check_clock_data_use(scope: _ModuleScope, em: ElabModule) -> None:
    if not em.clock_nets:
        return

    def check_expr(expr: ast.Expr, span: Span) -> None:
        used = _reads(expr) & em.clock_nets
        for name in sorted(used):
            scope.err("E-CLOCK", f"clock '{name}' cannot be read as data", span)

    for a in em.assigns:
        check_expr(a.expr, a.span)
    for p in em.processes:
        for expr, span in _stmt_exprs(p.body):
            check_expr(expr, span)
    for inst in em.instances:
        for _, expr in inst.data_bindings:
            check_expr(expr, inst.span)


# --- reads / targets helpers ------------------------------------------------------

def _reads(expr: ast.Expr) -> set[str]:
    if isinstance(expr, ast.Literal):
        return set()
    if isinstance(expr, ast.Ref):
        return {expr.name}
    if isinstance(expr, ast.Select):
        return {expr.name}
    if isinstance(expr, ast.Unary):
        return _reads(expr.operand)
    if isinstance(expr, ast.Binary):
        return _reads(expr.left) | _reads(expr.right)
    if isinstance(expr, ast.Ternary):
        return _reads(expr.cond) | _reads(expr.then_val) | _reads(expr.else_val)
    if isinstance(expr, ast.Concat):
        out: set[str] = set()
        for p in expr.parts:
            out |= _reads(p)
        return out
    return set()


def _stmt_reads(stmt: ast.Stmt) -> set[str]:
    return {name for expr, _ in _stmt_exprs(stmt) for name in _reads(expr)}


def _stmt_exprs(stmt: ast.Stmt) -> list[tuple[ast.Expr, Span]]:
    out: list[tuple[ast.Expr, Span]] = []
    if isinstance(stmt, ast.Block):
        for s in stmt.stmts:
            out.extend(_stmt_exprs(s))
    elif isinstance(stmt, ast.AssignStmt):
        out.append((stmt.expr, stmt.span))
    elif isinstance(stmt, ast.IfStmt):
        out.append((stmt.cond, stmt.span))
        out.extend(_stmt_exprs(stmt.then_stmt))
        if stmt.else_stmt is not None:
            out.extend(_stmt_exprs(stmt.else_stmt))
    elif isinstance(stmt, ast.CaseStmt):
        out.append((stmt.selector, stmt.span))
        for item in stmt.items:
            out.extend(_stmt_exprs(item.body))
    return out


def _targets(stmt: ast.Stmt) -> set[str]:
    if isinstance(stmt, ast.Block):
        out: set[str] = set()
        for s in stmt.stmts:
            out |= _targets(s)
        return out
    if isinstance(stmt, ast.AssignStmt):
        return {stmt.target}
    if isinstance(stmt, ast.IfStmt):
        out = _targets(stmt.then_stmt)
        if stmt.else_stmt is not None:
            out |= _targets(stmt.else_stmt)
        return out
    if isinstance(stmt, ast.CaseStmt):
        out = set()
        for item in stmt.items:
            out |= _targets(item.body)
        return out
    return set()


# --- dependency / latch analysis ----------------------------------------------------

def case_full_coverage(labels: list[int], sel_width: int) -> bool:
    return sel_width <= 20 and len(set(labels)) == (1 << sel_width)


def _dependency_analysis(scope: _ModuleScope, em: ElabModule) -> None:
    deps: dict[str, set[str]] = {}
    for a in em.assigns:
        if a.target in em.signals:
            deps.setdefault(a.target, set()).update(_reads(a.expr))
    for p in em.processes:
        if p.kind != ast.COMB:
            continue
        env = _abstract_exec(p.body, {}, set())
        for target, (dset, total) in sorted(env.items()):
            deps.setdefault(target, set()).update(dset)
            if not total:
                scope.diags.append(warning(
                    "W-LATCH",
                    f"'{target}' is not assigned on every path of this process",
                    p.span))
    for inst in em.instances:
        child = scope.children.get(inst.module)
        if child is None:
            continue
        in_exprs = dict(inst.data_bindings)
        for out_port, net in inst.output_bindings:
            dset: set[str] = set()
            for in_port in child.io_comb_deps.get(out_port, frozenset()):
                expr = in_exprs.get(in_port)
                if expr is not None:
                    dset |= _reads(expr)
            deps.setdefault(net, set()).update(dset)

    em.target_deps = deps
    _reject_cycles(scope, em, deps)
    _io_closure(em, deps)


def _abstract_exec(stmt: ast.Stmt, env: dict[str, tuple[set[str], bool]],
                   cond_deps: set[str]) -> dict[str, tuple[set[str], bool]]:
    """Symbolic pass mirroring the lowering rules: per-target dependency sets
    plus whether the target is assigned on every path so far."""
    def resolve(names: set[str], e: dict) -> set[str]:
        out: set[str] = set()
        for n in names:
            if n in e:
                d, total = e[n]
                out |= d if total else d | {n}
            else:
                out.add(n)
        return out

    def merge(envs: list[dict], base: dict) -> dict:
        keys = set(base)
        for e in envs:
            keys |= set(e)
        merged: dict[str, tuple[set[str], bool]] = {}
        for k in keys:
            dset: set[str] = set()
            total = True
            for e in envs:
                if k in e:
                    d, t = e[k]
                    dset |= d
                    total = total and t
                else:
                    total = False
            merged[k] = (dset, total)
        return merged

    if isinstance(stmt, ast.Block):
        for s in stmt.stmts:
            env = _abstract_exec(s, env, cond_deps)
        return env
    if isinstance(stmt, ast.AssignStmt):
        env = dict(env)
        env[stmt.target] = (resolve(_reads(stmt.expr), env) | cond_deps, True)
        return env
    if isinstance(stmt, ast.IfStmt):
        cdeps = cond_deps | resolve(_reads(stmt.cond), env)
        branches = [_abstract_exec(stmt.then_stmt, dict(env), cdeps)]
        if stmt.else_stmt is not None:
            branches.append(_abstract_exec(stmt.else_stmt, dict(env), cdeps))
        else:
            branches.append(dict(env))
        return merge(branches, env)
    if isinstance(stmt, ast.CaseStmt):
        cdeps = cond_deps | resolve(_reads(stmt.selector), env)
        labels: list[int] = []
        has_default = False
        branches = []
        for item in stmt.items:
            if item.labels is None:
                has_default = True
            else:
                labels.extend(lab.value for lab in item.labels
                              if isinstance(lab, ast.Literal))
            branches.append(_abstract_exec(item.body, dict(env), cdeps))
        sel_width = stmt.selector.width or 1
        if not has_default and not case_full_coverage(labels, sel_width):
            branches.append(dict(env))  # the fall-through path
        return merge(branches, env)
    return env


def _reject_cycles(scope: _ModuleScope, em: ElabModule,
                   deps: dict[str, set[str]]) -> None:
    """Tarjan SCC over the net dependency graph; any cycle is combinational
    by construction because clocked targets contribute no edges."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = [0]
    reported: list[set[str]] = []

    def strongconnect(v: str) -> None:
        work = [(v, iter(sorted(deps.get(v, ()))))]
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in deps:
                    continue
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(deps.get(w, ())))))
                    advanced = True
                    break
                if w in on_stack:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                scc = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    scc.append(w)
                    if w == node:
                        break
                if len(scc) > 1 or node in deps.get(node, ()):
                    reported.append(set(scc))

    for v in sorted(deps):
        if v not in index:
            strongconnect(v)
    for scc in reported:
        names = ", ".join(sorted(scc))
        scope.err("E-COMB-CYCLE", f"combinational cycle through {{{names}}}",
                  em.span)


def _io_closure(em: ElabModule, deps: dict[str, set[str]]) -> None:
    inputs = {p.name for p in em.ports if p.direction == ast.IN}
    memo: dict[str, frozenset[str]] = {}

    def closure(net: str, seen: frozenset[str]) -> frozenset[str]:
        if net in memo:
            return memo[net]
        if net in seen:
            return frozenset()
        out: set[str] = set()
        for d in deps.get(net, ()):
            if d in inputs:
                out.add(d)
            out |= closure(d, seen | {net})
        result = frozenset(out)
        memo[net] = result
        return result

    em.io_comb_deps = {p.name: closure(p.name, frozenset())
                       for p in em.ports if p.direction == ast.OUT}
