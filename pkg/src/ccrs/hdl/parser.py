"""Recursive-descent parser for the HDL subset.

Precedence, loosest to tightest: ?: then || && | ^ & (==, !=) relational
shift additive multiplicative unary.  The same table drives the emitter's
parenthesization so text survives a round trip.
"""

from __future__ import annotations

from ccrs.diagnostics import Diagnostic, Span, error
from ccrs.hdl import ast
from ccrs.hdl.lexer import IDENT, KEYWORD, OPERATOR, PUNCT, SIZED, UNSIZED, Token

#: Constructs the lexer knows but the subset rejects, reported by name.
UNSUPPORTED = frozenset({
    "initial", "generate", "endgenerate", "genvar", "function", "endfunction",
    "task", "endtask", "for", "while", "repeat", "forever", "negedge",
    "signed", "integer", "real", "casex", "casez", "inout", "localparam",
    "wait", "fork", "join", "event", "specify", "endspecify", "deassign",
    "force", "release",
})

_BIN_LEVELS: tuple[tuple[str, ...], ...] = (
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("<<", ">>"),
    ("+", "-"),
    ("*",),
)

_UNARY_OPS = ("~", "!", "&", "|", "^")


class _ParseAbort(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


class _Cursor:
    def __init__(self, tokens: list[Token], eof_span: Span):
        self.tokens = tokens
        self.pos = 0
        self.eof_span = eof_span

    def peek(self, ahead: int = 0) -> Token | None:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind and (text is None or tok.text == text)

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise _ParseAbort(error("E-SYNTAX", "unexpected end of input", self.eof_span))
        self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok is None:
            want = text or kind
            raise _ParseAbort(error("E-SYNTAX", f"expected {want!r}, found end of input",
                                    self.eof_span))
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            raise _ParseAbort(error(
                "E-SYNTAX", f"expected {want!r}, found {tok.text!r}", tok.span))
        self.pos += 1
        return tok

    def span_here(self) -> Span:
        tok = self.peek()
        return tok.span if tok is not None else self.eof_span

    def reject_unsupported(self) -> None:
        tok = self.peek()
        if tok is not None and tok.kind == KEYWORD and tok.text in UNSUPPORTED:
            raise _ParseAbort(error(
                "E-UNSUPPORTED", f"'{tok.text}' is outside the supported subset", tok.span))


def _join(a: Span, b: Span) -> Span:
    return Span(a.line, a.col, a.start, b.end)


def parse(tokens: list[Token], eof_span: Span | None = None) \
        -> tuple[ast.HdlAst | None, list[Diagnostic]]:
    """Parse a token stream into an AST.  Returns (ast, diagnostics); the
    ast is None when a diagnostic is an error."""
    if eof_span is None:
        end = tokens[-1].span.end if tokens else 0
        line = tokens[-1].span.line if tokens else 1
        eof_span = Span(line, 1, end, end)
    cur = _Cursor(tokens, eof_span)
    try:
        modules = []
        while cur.peek() is not None:
            cur.reject_unsupported()
            modules.append(_module(cur))
        return ast.HdlAst(tuple(modules)), []
    except _ParseAbort as abort:
        return None, [abort.diag]


# --- declarations ----------------------------------------------------------

def _module(cur: _Cursor) -> ast.Module:
    start = cur.expect(KEYWORD, "module").span
    name = cur.expect(IDENT).text
    ports: list[ast.PortDecl] = []
    if cur.at(PUNCT, "("):
        cur.take()
        if not cur.at(PUNCT, ")"):
            ports.append(_port_decl(cur))
            while cur.at(PUNCT, ","):
                cur.take()
                ports.append(_port_decl(cur))
        cur.expect(PUNCT, ")")
    cur.expect(PUNCT, ";")

    nets: list[ast.NetDecl] = []
    params: list[ast.ParamDecl] = []
    assigns: list[ast.ContAssign] = []
    processes: list[ast.Process] = []
    instances: list[ast.Instance] = []
    while not cur.at(KEYWORD, "endmodule"):
        cur.reject_unsupported()
        tok = cur.peek()
        if tok is None:
            raise _ParseAbort(error("E-SYNTAX", "expected 'endmodule', found end of input",
                                    cur.eof_span))
        if tok.kind == KEYWORD and tok.text in ("wire", "reg"):
            nets.extend(_net_decl(cur))
        elif tok.kind == KEYWORD and tok.text == "parameter":
            params.append(_param_decl(cur))
        elif tok.kind == KEYWORD and tok.text == "assign":
            assigns.append(_cont_assign(cur))
        elif tok.kind == KEYWORD and tok.text == "always":
            processes.append(_process(cur))
        elif tok.kind == IDENT:
            instances.append(_instance(cur))
        else:
            raise _ParseAbort(error(
                "E-SYNTAX",
                f"expected a module item (wire/reg/parameter/assign/always/instance), "
                f"found {tok.text!r}", tok.span))
    end = cur.expect(KEYWORD, "endmodule").span
    return ast.Module(name, tuple(ports), tuple(nets), tuple(params), tuple(assigns),
                      tuple(processes), tuple(instances), _join(start, end))


def _range(cur: _Cursor) -> tuple[ast.Expr, ast.Expr] | None:
    if not cur.at(PUNCT, "["):
        return None
    cur.take()
    msb = _expr(cur)
    cur.expect(OPERATOR, ":")
    lsb = _expr(cur)
    cur.expect(PUNCT, "]")
    return (msb, lsb)


def _port_decl(cur: _Cursor) -> ast.PortDecl:
    cur.reject_unsupported()
    tok = cur.peek()
    if tok is None or tok.kind != KEYWORD or tok.text not in ("input", "output"):
        raise _ParseAbort(error(
            "E-SYNTAX", "expected 'input' or 'output' in port list", cur.span_here()))
    cur.take()
    direction = ast.IN if tok.text == "input" else ast.OUT
    is_reg = False
    if cur.at(KEYWORD, "wire"):
        cur.take()
    elif cur.at(KEYWORD, "reg"):
        cur.take()
        is_reg = True
    rng = _range(cur)
    name_tok = cur.expect(IDENT)
    return ast.PortDecl(name_tok.text, direction, rng, is_reg,
                        _join(tok.span, name_tok.span))


def _net_decl(cur: _Cursor) -> list[ast.NetDecl]:
    kw = cur.take()
    rng = _range(cur)
    decls = []
    name_tok = cur.expect(IDENT)
    decls.append(ast.NetDecl(name_tok.text, kw.text, rng, _join(kw.span, name_tok.span)))
    while cur.at(PUNCT, ","):
        cur.take()
        name_tok = cur.expect(IDENT)
        decls.append(ast.NetDecl(name_tok.text, kw.text, rng, _join(kw.span, name_tok.span)))
    cur.expect(PUNCT, ";")
    return decls


def _param_decl(cur: _Cursor) -> ast.ParamDecl:
    kw = cur.take()
    name = cur.expect(IDENT).text
    cur.expect(OPERATOR, "=")
    value = _expr(cur)
    end = cur.expect(PUNCT, ";").span
    return ast.ParamDecl(name, value, _join(kw.span, end))


def _cont_assign(cur: _Cursor) -> ast.ContAssign:
    kw = cur.take()
    target = cur.expect(IDENT)
    if cur.at(PUNCT, "["):
        raise _ParseAbort(error(
            "E-UNSUPPORTED", "bit-select on an assignment target is outside the subset",
            cur.span_here()))
    cur.expect(OPERATOR, "=")
    expr = _expr(cur)
    end = cur.expect(PUNCT, ";").span
    return ast.ContAssign(target.text, expr, _join(kw.span, end))


def _process(cur: _Cursor) -> ast.Process:
    kw = cur.take()
    cur.expect(PUNCT, "@")
    cur.expect(PUNCT, "(")
    if cur.at(OPERATOR, "*"):
        cur.take()
        kind, clock = ast.COMB, None
    else:
        cur.reject_unsupported()
        cur.expect(KEYWORD, "posedge")
        clock = cur.expect(IDENT).text
        kind = ast.CLOCKED
        if cur.at(IDENT, "or") or cur.at(KEYWORD, "negedge"):
            raise _ParseAbort(error(
                "E-UNSUPPORTED",
                "multi-edge sensitivity lists are outside the subset", cur.span_here()))
    cur.expect(PUNCT, ")")
    body = _stmt(cur)
    return ast.Process(kind, clock, body, _join(kw.span, body.span))


def _instance(cur: _Cursor) -> ast.Instance:
    mod_tok = cur.expect(IDENT)
    name_tok = cur.expect(IDENT)
    cur.expect(PUNCT, "(")
    bindings: list[tuple[str, ast.Expr | None]] = []
    if not cur.at(PUNCT, ")"):
        bindings.append(_binding(cur))
        while cur.at(PUNCT, ","):
            cur.take()
            bindings.append(_binding(cur))
    cur.expect(PUNCT, ")")
    end = cur.expect(PUNCT, ";").span
    return ast.Instance(mod_tok.text, name_tok.text, tuple(bindings),
                        _join(mod_tok.span, end))


def _binding(cur: _Cursor) -> tuple[str, ast.Expr | None]:
    tok = cur.peek()
    if tok is None or not cur.at(PUNCT, "."):
        raise _ParseAbort(error(
            "E-UNSUPPORTED", "positional port bindings are outside the subset "
            "(use .port(expr))", cur.span_here()))
    cur.take()
    port = cur.expect(IDENT).text
    cur.expect(PUNCT, "(")
    expr = None if cur.at(PUNCT, ")") else _expr(cur)
    cur.expect(PUNCT, ")")
    return (port, expr)


# --- statements -------------------------------------------------------------

def _stmt(cur: _Cursor) -> ast.Stmt:
    cur.reject_unsupported()
    tok = cur.peek()
    if tok is None:
        raise _ParseAbort(error("E-SYNTAX", "expected a statement, found end of input",
                                cur.eof_span))
    if tok.kind == KEYWORD and tok.text == "begin":
        return _block(cur)
    if tok.kind == KEYWORD and tok.text == "if":
        return _if(cur)
    if tok.kind == KEYWORD and tok.text == "case":
        return _case(cur)
    if tok.kind == IDENT:
        return _assign_stmt(cur)
    raise _ParseAbort(error(
        "E-SYNTAX", f"expected a statement (begin/if/case/assignment), found {tok.text!r}",
        tok.span))


def _block(cur: _Cursor) -> ast.Block:
    kw = cur.take()
    stmts = []
    while not cur.at(KEYWORD, "end"):
        if cur.peek() is None:
            raise _ParseAbort(error("E-SYNTAX", "expected 'end', found end of input",
                                    cur.eof_span))
        stmts.append(_stmt(cur))
    end = cur.expect(KEYWORD, "end").span
    return ast.Block(_join(kw.span, end), tuple(stmts))


def _if(cur: _Cursor) -> ast.IfStmt:
    kw = cur.take()
    cur.expect(PUNCT, "(")
    cond = _expr(cur)
    cur.expect(PUNCT, ")")
    then_stmt = _stmt(cur)
    else_stmt = None
    end_span = then_stmt.span
    if cur.at(KEYWORD, "else"):
        cur.take()
        else_stmt = _stmt(cur)
        end_span = else_stmt.span
    return ast.IfStmt(_join(kw.span, end_span), cond, then_stmt, else_stmt)


def _case(cur: _Cursor) -> ast.CaseStmt:
    kw = cur.take()
    cur.expect(PUNCT, "(")
    selector = _expr(cur)
    cur.expect(PUNCT, ")")
    items: list[ast.CaseItem] = []
    while not cur.at(KEYWORD, "endcase"):
        if cur.peek() is None:
            raise _ParseAbort(error("E-SYNTAX", "expected 'endcase', found end of input",
                                    cur.eof_span))
        items.append(_case_item(cur))
    end = cur.expect(KEYWORD, "endcase").span
    if not items:
        raise _ParseAbort(error("E-SYNTAX", "case statement needs at least one item",
                                _join(kw.span, end)))
    return ast.CaseStmt(_join(kw.span, end), selector, tuple(items))


def _case_item(cur: _Cursor) -> ast.CaseItem:
    start = cur.span_here()
    if cur.at(KEYWORD, "default"):
        cur.take()
        if cur.at(OPERATOR, ":"):
            cur.take()
        body = _stmt(cur)
        return ast.CaseItem(None, body, _join(start, body.span))
    labels = [_expr(cur)]
    while cur.at(PUNCT, ","):
        cur.take()
        labels.append(_expr(cur))
    cur.expect(OPERATOR, ":")
    body = _stmt(cur)
    return ast.CaseItem(tuple(labels), body, _join(start, body.span))


def _assign_stmt(cur: _Cursor) -> ast.AssignStmt:
    target = cur.take()
    if cur.at(PUNCT, "["):
        raise _ParseAbort(error(
            "E-UNSUPPORTED", "bit-select on an assignment target is outside the subset",
            cur.span_here()))
    if cur.at(OPERATOR, "<="):
        blocking = False
        cur.take()
    else:
        cur.expect(OPERATOR, "=")
        blocking = True
    expr = _expr(cur)
    end = cur.expect(PUNCT, ";").span
    return ast.AssignStmt(_join(target.span, end), target.text, expr, blocking)


# --- expressions ------------------------------------------------------------

def _expr(cur: _Cursor) -> ast.Expr:
    return _ternary(cur)


def _ternary(cur: _Cursor) -> ast.Expr:
    cond = _binary(cur, 0)
    if cur.at(OPERATOR, "?"):
        cur.take()
        then_val = _expr(cur)
        cur.expect(OPERATOR, ":")
        else_val = _expr(cur)
        return ast.Ternary(_join(cond.span, else_val.span), cond, then_val, else_val)
    return cond


def _binary(cur: _Cursor, level: int) -> ast.Expr:
    if level >= len(_BIN_LEVELS):
        return _unary(cur)
    ops = _BIN_LEVELS[level]
    left = _binary(cur, level + 1)
    while True:
        tok = cur.peek()
        if tok is None or tok.kind != OPERATOR or tok.text not in ops:
            return left
        cur.take()
        right = _binary(cur, level + 1)
        left = ast.Binary(_join(left.span, right.span), tok.text, left, right)


def _unary(cur: _Cursor) -> ast.Expr:
    tok = cur.peek()
    if tok is not None and tok.kind == OPERATOR and tok.text in _UNARY_OPS:
        cur.take()
        operand = _unary(cur)
        return ast.Unary(_join(tok.span, operand.span), tok.text, operand)
    return _primary(cur)


def _primary(cur: _Cursor) -> ast.Expr:
    cur.reject_unsupported()
    tok = cur.peek()
    if tok is None:
        raise _ParseAbort(error("E-SYNTAX", "expected an expression, found end of input",
                                cur.eof_span))
    if tok.kind in (SIZED, UNSIZED):
        cur.take()
        return ast.Literal(tok.span, tok.value or 0, tok.width)
    if tok.kind == IDENT:
        cur.take()
        if cur.at(PUNCT, "["):
            cur.take()
            msb = _expr(cur)
            lsb = None
            if cur.at(OPERATOR, ":"):
                cur.take()
                lsb = _expr(cur)
            end = cur.expect(PUNCT, "]").span
            return ast.Select(_join(tok.span, end), tok.text, msb, lsb)
        return ast.Ref(tok.span, tok.text)
    if tok.kind == PUNCT and tok.text == "(":
        cur.take()
        inner = _expr(cur)
        cur.expect(PUNCT, ")")
        return inner
    if tok.kind == PUNCT and tok.text == "{":
        cur.take()
        parts = [_expr(cur)]
        while cur.at(PUNCT, ","):
            cur.take()
            parts.append(_expr(cur))
        end = cur.expect(PUNCT, "}").span
        return ast.Concat(_join(tok.span, end), tuple(parts))
    if tok.kind == PUNCT and tok.text == "#":
        raise _ParseAbort(error("E-UNSUPPORTED", "delays are outside the subset", tok.span))
    raise _ParseAbort(error(
        "E-SYNTAX", f"expected an expression, found {tok.text!r}", tok.span))
