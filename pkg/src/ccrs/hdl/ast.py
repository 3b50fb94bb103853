"""AST for the HDL subset.

Nodes are frozen dataclasses carrying their source span.  Width fields stay
``None`` until elaboration, which rebuilds the tree with widths filled in
(parse output is never mutated).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ccrs.diagnostics import Span

IN = "in"
OUT = "out"


# --- expressions -----------------------------------------------------------

@dataclass(frozen=True)
class Expr:
    span: Span
    width: int | None = field(default=None, kw_only=True)


@dataclass(frozen=True)
class Literal(Expr):
    value: int = 0
    size: int | None = None  # declared width for sized literals


@dataclass(frozen=True)
class Ref(Expr):
    name: str = ""


@dataclass(frozen=True)
class Select(Expr):
    """Constant bit-select (lsb is None) or part-select of a named signal."""

    name: str = ""
    msb: Expr | None = None
    lsb: Expr | None = None
    msb_val: int | None = field(default=None, kw_only=True)
    lsb_val: int | None = field(default=None, kw_only=True)


@dataclass(frozen=True)
class Unary(Expr):
    op: str = ""  # ~ ! & | ^
    operand: Expr | None = None


@dataclass(frozen=True)
class Binary(Expr):
    op: str = ""
    left: Expr | None = None
    right: Expr | None = None


@dataclass(frozen=True)
class Ternary(Expr):
    cond: Expr | None = None
    then_val: Expr | None = None
    else_val: Expr | None = None


@dataclass(frozen=True)
class Concat(Expr):
    parts: tuple[Expr, ...] = ()


# --- statements ------------------------------------------------------------

@dataclass(frozen=True)
class Stmt:
    span: Span


@dataclass(frozen=True)
class Block(Stmt):
    stmts: tuple[Stmt, ...] = ()


@dataclass(frozen=True)
class AssignStmt(Stmt):
    target: str = ""
    expr: Expr | None = None
    blocking: bool = True


@dataclass(frozen=True)
class IfStmt(Stmt):
    cond: Expr | None = None
    then_stmt: Stmt | None = None
    else_stmt: Stmt | None = None


@dataclass(frozen=True)
class CaseItem:
    labels: tuple[Expr, ...] | None  # None marks the default item
    body: Stmt
    span: Span


@dataclass(frozen=True)
class CaseStmt(Stmt):
    selector: Expr | None = None
    items: tuple[CaseItem, ...] = ()


# --- module items ----------------------------------------------------------

@dataclass(frozen=True)
class PortDecl:
    name: str
    direction: str  # IN or OUT
    range_: tuple[Expr, Expr] | None
    is_reg: bool
    span: Span
    width: int | None = None


@dataclass(frozen=True)
class NetDecl:
    name: str
    kind: str  # "wire" or "reg"
    range_: tuple[Expr, Expr] | None
    span: Span
    width: int | None = None


@dataclass(frozen=True)
class ParamDecl:
    name: str
    expr: Expr
    span: Span
    value: int | None = None


@dataclass(frozen=True)
class ContAssign:
    target: str
    expr: Expr
    span: Span


CLOCKED = "clocked"
COMB = "combinational"


@dataclass(frozen=True)
class Process:
    kind: str  # CLOCKED or COMB
    clock: str | None  # clock net for CLOCKED processes
    body: Stmt
    span: Span


@dataclass(frozen=True)
class Instance:
    module: str
    name: str
    bindings: tuple[tuple[str, Expr | None], ...]  # (port, expr); None = open
    span: Span


@dataclass(frozen=True)
class Module:
    name: str
    ports: tuple[PortDecl, ...]
    nets: tuple[NetDecl, ...]
    params: tuple[ParamDecl, ...]
    assigns: tuple[ContAssign, ...]
    processes: tuple[Process, ...]
    instances: tuple[Instance, ...]
    span: Span


@dataclass(frozen=True)
class HdlAst:
    modules: tuple[Module, ...]

    def module(self, name: str) -> Module:
        for m in self.modules:
            if m.name == name:
                return m
        raise KeyError(name)
