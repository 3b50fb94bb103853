"""Diagnostic records shared by every pipeline stage.

A diagnostic is data, not an exception: stages collect them into lists and
callers decide whether any error severity means "stop".  Codes are drawn
from the fixed table below; tests enforce membership.
"""

from __future__ import annotations

from dataclasses import dataclass

ERROR = "error"
WARNING = "warning"

#: Every code the toolkit can emit, with a one-line meaning.
CODES: dict[str, str] = {
    # lexing
    "E-CHAR": "illegal character in source text",
    "E-COMMENT": "unterminated block comment",
    "E-LITERAL": "malformed sized literal",
    # parsing
    "E-SYNTAX": "syntax error",
    "E-UNSUPPORTED": "construct outside the supported subset",
    # elaboration
    "E-UNDECLARED": "identifier does not resolve to a declaration",
    "E-REDECLARED": "identifier declared more than once",
    "E-MULTI-DRIVER": "net driven from more than one place",
    "E-UNDRIVEN": "net is read or exported but never driven",
    "E-WIDTH": "width mismatch or zero-width result",
    "E-RANGE": "bit index or range outside the declared width",
    "E-NONCONST": "expression must be a compile-time constant",
    "E-COMB-CYCLE": "combinational dependency cycle",
    "E-ASSIGN-KIND": "wrong assignment kind for this process",
    "E-CLOCK": "clock signal misused or not a plain input",
    "E-UNKNOWN-MODULE": "instantiated module is not defined",
    "E-PORT-BINDING": "bad instance port binding",
    "E-RECURSION": "recursive module instantiation",
    "W-LATCH": "combinational target not assigned on every path",
    # lowering
    "E-LATCH": "combinational branch lacks a default and the target has no prior value",
    "E-DUP-CASE": "duplicate case label",
    # document schema / structural validation
    "E-SCHEMA": "document does not match the ccrs-doc schema",
    "E-VERSION": "unknown document format version",
    "E-DUP-ID": "duplicated element id",
    "E-ID": "malformed element id",
    "E-PORT-SHAPE": "port node must populate exactly one side",
    "E-CONST-SHAPE": "constant node must have no inputs and one output",
    "E-NO-LABEL": "node kind requires a non-empty label",
    "E-BRANCH-ROWS": "branch rows malformed (need >= 1 row, exactly one trailing default)",
    "E-CASE-COVER": "case node needs a default row or full label coverage",
    "E-BAD-REF": "wire endpoint does not resolve to an existing node port",
    "E-NO-SINK": "wire has no sinks",
    "E-UNFED": "node input port is not fed by any wire",
    "E-MULTI-FEED": "node input port is fed by more than one wire",
    "E-CLOCK-DOMAIN": "referenced clock domain is not declared",
    "E-PORT-MISMATCH": "module port list and port nodes disagree",
    "E-INSTANCE": "instance node lacks a target module",
    # rendering / emission
    "E-NO-GEOM": "no geometry for a node being rendered",
    "E-NO-SYNTAX": "document construct has no HDL rendering",
}


@dataclass(frozen=True)
class Span:
    """Half-open byte range into a source text plus the 1-based line/column
    of its first character."""

    line: int
    col: int
    start: int
    end: int

    def slice(self, source: str) -> str:
        return source[self.start:self.end]

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    message: str
    span: Span | None = None

    def __post_init__(self) -> None:
        if self.code not in CODES:
            raise ValueError(f"unknown diagnostic code {self.code!r}")

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    def render(self, filename: str = "<input>") -> str:
        line = self.span.line if self.span else 0
        col = self.span.col if self.span else 0
        return f"{filename}:{line}:{col}: {self.severity}[{self.code}]: {self.message}"

    def to_json(self) -> dict:
        out: dict = {"severity": self.severity, "code": self.code, "message": self.message}
        if self.span is not None:
            out["line"] = self.span.line
            out["col"] = self.span.col
        return out


def error(code: str, message: str, span: Span | None = None) -> Diagnostic:
    return Diagnostic(ERROR, code, message, span)


def warning(code: str, message: str, span: Span | None = None) -> Diagnostic:
    return Diagnostic(WARNING, code, message, span)


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.is_error for d in diags)
