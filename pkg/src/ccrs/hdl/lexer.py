"""Tokenizer for the HDL subset.

Comments are discarded; every other lexeme becomes a token whose span
re-slices the original text exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ccrs.diagnostics import Diagnostic, Span, error

KEYWORD = "keyword"
IDENT = "identifier"
SIZED = "sized-literal"
UNSIZED = "unsized-literal"
OPERATOR = "operator"
PUNCT = "punctuation"

#: Keywords of the subset plus recognized-but-rejected ones, so the parser
#: can name the offending construct instead of calling it an identifier.
KEYWORDS = frozenset({
    "module", "endmodule", "input", "output", "wire", "reg", "parameter",
    "assign", "always", "begin", "end", "if", "else", "case", "endcase",
    "default", "posedge",
    "initial", "generate", "endgenerate", "genvar", "function", "endfunction",
    "task", "endtask", "for", "while", "repeat", "forever", "negedge",
    "signed", "integer", "real", "casex", "casez", "inout", "localparam",
    "wait", "fork", "join", "event", "specify", "endspecify", "deassign",
    "force", "release",
})

_TWO_CHAR_OPS = ("&&", "||", "==", "!=", "<=", ">=", "<<", ">>")
_ONE_CHAR_OPS = "~!&|^+-*<>=?:"
_PUNCT = "()[]{};,.@#"

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_SIZED_RE = re.compile(r"(\d[\d_]*)'([bBdDhHoO])([0-9a-fA-FxXzZ_?]+)")
_UNSIZED_RE = re.compile(r"\d[\d_]*")

_BASES = {"b": 2, "d": 10, "h": 16, "o": 8}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span
    width: int | None = None  # sized literals only
    value: int | None = None  # literals only

    def __repr__(self) -> str:  # compact for test failures
        return f"Token({self.kind}, {self.text!r}, L{self.span.line}:{self.span.col})"


def tokenize(source: str) -> tuple[list[Token], list[Diagnostic]]:
    """Scan ``source`` into tokens.  Returns (tokens, diagnostics); any
    diagnostic is an error and the offending characters are skipped."""
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    pos = 0
    line = 1
    col = 1
    n = len(source)

    def span(start: int, end: int, sline: int, scol: int) -> Span:
        return Span(sline, scol, start, end)

    def advance(text: str) -> None:
        nonlocal line, col
        for ch in text:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1

    while pos < n:
        ch = source[pos]
        if ch in " \t\r\n":
            advance(ch)
            pos += 1
            continue
        if source.startswith("//", pos):
            end = source.find("\n", pos)
            end = n if end == -1 else end
            advance(source[pos:end])
            pos = end
            continue
        if source.startswith("/*", pos):
            end = source.find("*/", pos + 2)
            if end == -1:
                diags.append(error("E-COMMENT", "unterminated block comment",
                                   span(pos, n, line, col)))
                break
            advance(source[pos:end + 2])
            pos = end + 2
            continue

        sline, scol = line, col
        m = _SIZED_RE.match(source, pos)
        if m:
            text = m.group(0)
            tok, diag = _sized_literal(m, span(pos, m.end(), sline, scol))
            if diag is not None:
                diags.append(diag)
            else:
                tokens.append(tok)
            advance(text)
            pos = m.end()
            continue
        m = _UNSIZED_RE.match(source, pos)
        if m:
            text = m.group(0)
            value = int(text.replace("_", ""))
            tokens.append(Token(UNSIZED, text, span(pos, m.end(), sline, scol), None, value))
            advance(text)
            pos = m.end()
            continue
        m = _IDENT_RE.match(source, pos)
        if m:
            text = m.group(0)
            kind = KEYWORD if text in KEYWORDS else IDENT
            tokens.append(Token(kind, text, span(pos, m.end(), sline, scol)))
            advance(text)
            pos = m.end()
            continue
        two = source[pos:pos + 2]
        if two in _TWO_CHAR_OPS:
            tokens.append(Token(OPERATOR, two, span(pos, pos + 2, sline, scol)))
            advance(two)
            pos += 2
            continue
        if ch in _ONE_CHAR_OPS:
            tokens.append(Token(OPERATOR, ch, span(pos, pos + 1, sline, scol)))
            advance(ch)
            pos += 1
            continue
        if ch in _PUNCT:
            tokens.append(Token(PUNCT, ch, span(pos, pos + 1, sline, scol)))
            advance(ch)
            pos += 1
            continue
        diags.append(error("E-CHAR", f"illegal character {ch!r}",
                           span(pos, pos + 1, sline, scol)))
        advance(ch)
        pos += 1

    return tokens, diags


def _sized_literal(m: re.Match, sp: Span) -> tuple[Token | None, Diagnostic | None]:
    text = m.group(0)
    width = int(m.group(1).replace("_", ""))
    base_ch = m.group(2).lower()
    digits = m.group(3).replace("_", "")
    if width < 1:
        return None, error("E-LITERAL", f"literal width must be >= 1 in {text!r}", sp)
    if re.search(r"[xXzZ?]", digits):
        return None, error("E-LITERAL", f"x/z digits are not supported in {text!r}", sp)
    try:
        value = int(digits, _BASES[base_ch])
    except ValueError:
        return None, error("E-LITERAL", f"bad digits for base '{base_ch} in {text!r}", sp)
    if value >= (1 << width):
        return None, error(
            "E-LITERAL", f"value {value} does not fit in {width} bits in {text!r}", sp)
    return Token(SIZED, text, sp, width, value), None
