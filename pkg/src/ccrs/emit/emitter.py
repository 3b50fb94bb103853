"""Turn a document back into HDL text.

The output stays inside the front end's subset and re-lowers to the same
canonical graph: DataOp trees inline into expressions, Branch nodes become
if/else chains (the default row is the final else), CaseSelect becomes a
case statement, Timing becomes a clocked always block, Instance becomes a
named-binding instantiation.  Emission runs on the canonicalized document,
so isomorphic inputs produce byte-identical text; generated nets are named
n0, n1, ... in canonical order.
"""

from __future__ import annotations

import re

from ccrs.diagnostics import Diagnostic, error
from ccrs.hdl.lexer import KEYWORDS
from ccrs.ir.canonical import canonicalize
from ccrs.ir.model import (
    BRANCH, CASE_SELECT, CONSTANT, DATA_OP, INSTANCE, PORT, TIMING,
    CcrsDocument, Stn,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

#: opcode -> (token, precedence); higher binds tighter.
_BINARY_TOKENS = {
    "log_or": ("||", 15),
    "log_and": ("&&", 20),
    "bit_or": ("|", 25),
    "bit_xor": ("^", 30),
    "bit_and": ("&", 35),
    "eq": ("==", 40), "ne": ("!=", 40),
    "lt": ("<", 45), "le": ("<=", 45), "gt": (">", 45), "ge": (">=", 45),
    "shl": ("<<", 50), "shr": (">>", 50),
    "add": ("+", 55), "sub": ("-", 55),
    "mul": ("*", 60),
}
_UNARY_TOKENS = {"bit_not": "~", "log_not": "!", "red_and": "&",
                 "red_or": "|", "red_xor": "^"}
_UNARY_PREC = 90
_ATOM = 100

#: associative opcodes whose textual chains fold into one n-ary node.
_REFOLDING = frozenset({"bit_and", "bit_or", "bit_xor", "log_and", "log_or",
                        "add", "mul"})


class EmitError(Exception):
    def __init__(self, diag: Diagnostic):
        super().__init__(diag.message)
        self.diag = diag


def emit(doc: CcrsDocument) -> str:
    """Emit HDL for ``doc`` plus any embedded child modules (children first,
    so the output is a self-contained compilation unit)."""
    texts: dict[str, str] = {}
    _emit_recursive(doc, texts)
    return "\n".join(texts.values())


def _emit_recursive(doc: CcrsDocument, texts: dict[str, str]) -> None:
    canon = canonicalize(doc, keep_metadata=True)
    for name in sorted(canon.library()):
        if name not in texts:
            _emit_recursive(canon.library()[name], texts)
    if canon.module not in texts:
        texts[canon.module] = _ModuleEmitter(canon).text()


class _ModuleEmitter:
    def __init__(self, doc: CcrsDocument):
        self.doc = doc
        self.by_id = doc.stn_map()
        self.tops = list(doc.stns)
        # single feed per input port, single lwc per source port (validated)
        self.feeds: dict[tuple[str, int], tuple[str, int]] = {}
        self.sinks: dict[tuple[str, int], list[tuple[str, int]]] = {}
        for lwc in doc.lwcs:
            self.sinks.setdefault(lwc.source, []).extend(lwc.sinks)
            for sink in lwc.sinks:
                self.feeds[sink] = lwc.source
        self.names: dict[tuple[str, int], str] = {}
        self.materialized: set[tuple[str, int]] = set()
        self.used_names: set[str] = set()
        self._plan()

    # --- planning -----------------------------------------------------------

    def _plan(self) -> None:
        for p in self.doc.ports:
            self._check_ident(p.name)
            self.used_names.add(p.name)
        out_port_of: dict[tuple[str, int], str] = {}
        for stn in self.tops:
            if stn.kind == PORT and stn.inputs:
                src = self.feeds.get((stn.id, 0))
                if src is not None and src not in out_port_of:
                    out_port_of[src] = stn.attrs["port"]

        for stn in self.tops:
            for idx in range(len(stn.outputs)):
                key = (stn.id, idx)
                consumed = bool(self.sinks.get(key))
                if stn.kind in (BRANCH, CASE_SELECT, TIMING):
                    self.materialized.add(key)
                elif stn.kind == INSTANCE and consumed:
                    self.materialized.add(key)
                elif stn.kind in (DATA_OP, CONSTANT):
                    if len(self.sinks.get(key, [])) != 1:
                        self.materialized.add(key)

        # two inlining hazards force a named wire: a select needs an
        # identifier base, and a first operand that repeats its parent's
        # associative opcode would re-fold into one n-ary node when parsed
        changed = True
        while changed:
            changed = False
            for stn in self._walk_all():
                if stn.kind != DATA_OP:
                    continue
                src = self.feeds.get((stn.id, 0))
                if src is None or src in self.materialized:
                    continue
                src_stn = self.by_id[src[0]]
                force = False
                if stn.opcode == "select":
                    force = src_stn.kind in (DATA_OP, CONSTANT)
                elif stn.opcode in _REFOLDING:
                    force = src_stn.kind == DATA_OP and src_stn.opcode == stn.opcode
                if force:
                    self.materialized.add(src)
                    changed = True

        counter = 0
        for stn in self.tops:
            for idx in range(len(stn.outputs)):
                key = (stn.id, idx)
                if key not in self.materialized:
                    continue
                if key in out_port_of:
                    self.names[key] = out_port_of[key]
                    continue
                name = f"n{counter}"
                counter += 1
                while name in self.used_names:
                    name = f"n{counter}"
                    counter += 1
                self.used_names.add(name)
                self.names[key] = name

    def _walk_all(self):
        for stn in self.doc.all_stns():
            yield stn

    def _check_ident(self, name: str) -> None:
        if not _IDENT.match(name) or name in KEYWORDS:
            raise EmitError(error("E-NO-SYNTAX",
                                  f"{name!r} is not a renderable identifier"))

    # --- assembly ------------------------------------------------------------

    def text(self) -> str:
        body: list[str] = []
        body.extend(self._decls())
        body.extend(self._wire_assigns())
        body.extend(self._output_assigns())
        body.extend(self._comb_blocks())
        body.extend(self._clocked_blocks())
        body.extend(self._instances())
        header = self._header()
        lines = [header] + body + ["endmodule"]
        return "\n".join(lines) + "\n"

    def _header(self) -> str:
        regs = {self.names[key] for key in self.materialized
                if self.by_id[key[0]].kind in (BRANCH, CASE_SELECT, TIMING)}
        decls = []
        for p in self.doc.ports:
            kw = "input" if p.direction == "in" else "output"
            if p.direction == "out" and p.name in regs:
                kw += " reg"
            decls.append(f"{kw}{_range_text(p.width)} {p.name}")
        inner = ", ".join(decls)
        return f"module {self.doc.module}({inner});"

    def _decls(self) -> list[str]:
        out = []
        port_names = {p.name for p in self.doc.ports}
        for stn in self.tops:
            for idx in range(len(stn.outputs)):
                key = (stn.id, idx)
                if key not in self.materialized or self.names[key] in port_names:
                    continue
                kind = "reg" if stn.kind in (BRANCH, CASE_SELECT, TIMING) else "wire"
                width = stn.outputs[idx][1]
                out.append(f"  {kind}{_range_text(width)} {self.names[key]};")
        return out

    def _wire_assigns(self) -> list[str]:
        out = []
        for stn in self.tops:
            if stn.kind not in (DATA_OP, CONSTANT):
                continue
            key = (stn.id, 0)
            if key in self.materialized:
                text, _ = self._render_op(stn)
                out.append(f"  assign {self.names[key]} = {text};")
        return out

    def _output_assigns(self) -> list[str]:
        out = []
        for p in self.doc.ports:
            if p.direction != "out":
                continue
            stn = self.doc.port_stn(p.name)
            src = self.feeds.get((stn.id, 0))
            if src is None:
                raise EmitError(error("E-NO-SYNTAX",
                                      f"output port '{p.name}' is undriven"))
            if self.names.get(src) == p.name:
                continue  # written directly by its defining construct
            text, _ = self._render(src)
            out.append(f"  assign {p.name} = {text};")
        return out

    def _comb_blocks(self) -> list[str]:
        out = []
        for stn in self.tops:
            if stn.kind not in (BRANCH, CASE_SELECT):
                continue
            if self._inlined_into_timing(stn):
                continue
            name = self.names[(stn.id, 0)]
            out.append("  always @(*) begin")
            out.extend(self._render_rows(stn, name, "=", "    "))
            out.append("  end")
        return out

    def _clocked_blocks(self) -> list[str]:
        out = []
        for stn in self.tops:
            if stn.kind != TIMING:
                continue
            clock = self._clock_of(stn)
            name = self.names[(stn.id, 0)]
            src = self.feeds.get((stn.id, 0))
            if src is None:
                raise EmitError(error("E-NO-SYNTAX",
                                      f"timing node '{stn.id}' has no data input"))
            src_stn = self.by_id[src[0]]
            out.append(f"  always @(posedge {clock}) begin")
            if (src_stn.kind in (BRANCH, CASE_SELECT)
                    and self._inlined_into_timing(src_stn)):
                out.extend(self._render_rows(src_stn, name, "<=", "    "))
            else:
                text, _ = self._render(src)
                out.append(f"    {name} <= {text};")
            out.append("  end")
        return out

    def _inlined_into_timing(self, stn: Stn) -> bool:
        sinks = self.sinks.get((stn.id, 0), [])
        if len(sinks) != 1:
            return False
        target = self.by_id[sinks[0][0]]
        return target.kind == TIMING and sinks[0][1] == 0

    def _clock_of(self, stn: Stn) -> str:
        domain = stn.attrs.get("clockDomain")
        for d, clock in self.doc.clock_domains:
            if d == domain:
                self._check_ident(clock)
                return clock
        raise EmitError(error("E-NO-SYNTAX",
                              f"timing node '{stn.id}' has no clock domain"))

    def _instances(self) -> list[str]:
        out = []
        counter = 0
        for stn in self.tops:
            if stn.kind != INSTANCE:
                continue
            module = stn.attrs.get("module", "")
            self._check_ident(module)
            inst_name = stn.attrs.get("instance") or f"u{counter}"
            counter += 1
            if not _IDENT.match(inst_name) or inst_name in self.used_names \
                    or inst_name in KEYWORDS:
                inst_name = f"u{counter}"
                counter += 1
            self.used_names.add(inst_name)
            bindings = []
            for port, domain in sorted((stn.attrs.get("clocks") or {}).items()):
                clock = next((c for d, c in self.doc.clock_domains if d == domain),
                             None)
                if clock is None:
                    raise EmitError(error("E-NO-SYNTAX",
                                          f"instance '{stn.id}' clock port '{port}' "
                                          f"references unknown domain"))
                bindings.append(f".{port}({clock})")
            for idx, (port, _) in enumerate(stn.inputs):
                src = self.feeds.get((stn.id, idx))
                if src is None:
                    raise EmitError(error("E-NO-SYNTAX",
                                          f"instance '{stn.id}' input '{port}' is "
                                          f"unfed"))
                text, _ = self._render(src)
                bindings.append(f".{port}({text})")
            for idx, (port, _) in enumerate(stn.outputs):
                key = (stn.id, idx)
                if self.sinks.get(key):
                    bindings.append(f".{port}({self.names[key]})")
            out.append(f"  {module} {inst_name} ({', '.join(bindings)});")
        return out

    # --- statement rendering ----------------------------------------------------

    def _render_rows(self, stn: Stn, target: str, assign_op: str,
                     indent: str) -> list[str]:
        if stn.kind == BRANCH:
            return self._render_branch(stn, target, assign_op, indent)
        return self._render_case(stn, target, assign_op, indent)

    def _row_stmt(self, stn: Stn, row: dict, target: str, assign_op: str,
                  indent: str) -> list[str]:
        if row.get("value") is not None:
            idx = stn.input_index(row["value"])
            src = self.feeds.get((stn.id, idx))
            if src is None:
                raise EmitError(error("E-NO-SYNTAX",
                                      f"row value of '{stn.id}' is unfed"))
            text, _ = self._render(src)
            return [f"{indent}{target} {assign_op} {text};"]
        child = next(c for c in stn.children if c.id == row["child"])
        lines = [f"{indent}begin"]
        lines.extend(self._render_rows(child, target, assign_op, indent + "  "))
        lines.append(f"{indent}end")
        return lines

    def _render_branch(self, stn: Stn, target: str, assign_op: str,
                       indent: str) -> list[str]:
        lines: list[str] = []
        rows = stn.attrs["rows"]
        for i, row in enumerate(rows):
            cond = row.get("cond")
            if cond is not None:
                idx = stn.input_index(cond)
                src = self.feeds.get((stn.id, idx))
                if src is None:
                    raise EmitError(error("E-NO-SYNTAX",
                                          f"row condition of '{stn.id}' is unfed"))
                text, _ = self._render(src)
                kw = "if" if i == 0 else "else if"
                lines.append(f"{indent}{kw} ({text})")
            else:
                lines.append(f"{indent}else")
            lines.extend(self._row_stmt(stn, row, target, assign_op, indent + "  "))
        return lines

    def _render_case(self, stn: Stn, target: str, assign_op: str,
                     indent: str) -> list[str]:
        src = self.feeds.get((stn.id, 0))
        if src is None:
            raise EmitError(error("E-NO-SYNTAX", f"case '{stn.id}' selector is unfed"))
        sel_text, _ = self._render(src)
        sel_width = stn.inputs[0][1]
        lines = [f"{indent}case ({sel_text})"]
        for row in stn.attrs["rows"]:
            match = row.get("match")
            label = "default:" if match is None else f"{sel_width}'d{match}:"
            lines.append(f"{indent}  {label}")
            lines.extend(self._row_stmt(stn, row, target, assign_op, indent + "    "))
        lines.append(f"{indent}endcase")
        return lines

    # --- expression rendering ------------------------------------------------------

    def _render(self, src: tuple[str, int]) -> tuple[str, int]:
        """Render the value at a source port; returns (text, precedence)."""
        stn = self.by_id[src[0]]
        if src in self.names:
            return self.names[src], _ATOM
        if stn.kind == PORT and stn.outputs:
            name = stn.attrs["port"]
            self._check_ident(name)
            return name, _ATOM
        if stn.kind in (DATA_OP, CONSTANT):
            return self._render_op(stn)
        raise EmitError(error("E-NO-SYNTAX",
                              f"node '{stn.id}' of kind {stn.kind} cannot appear "
                              f"inside an expression"))

    def _operand(self, stn: Stn, idx: int) -> tuple[str, int]:
        src = self.feeds.get((stn.id, idx))
        if src is None:
            raise EmitError(error("E-NO-SYNTAX",
                                  f"input {idx} of '{stn.id}' is unfed"))
        return self._render(src)

    def _render_op(self, stn: Stn) -> tuple[str, int]:
        if stn.kind == CONSTANT:
            width = stn.outputs[0][1]
            value = int(stn.attrs.get("value", 0))
            return f"{width}'d{value}", _ATOM
        code = stn.opcode or ""
        if code == "select":
            base, prec = self._operand(stn, 0)
            if prec != _ATOM or not _IDENT.match(base):
                raise EmitError(error(
                    "E-NO-SYNTAX",
                    f"select '{stn.id}' applies to a non-identifier"))
            msb, lsb = int(stn.attrs["msb"]), int(stn.attrs["lsb"])
            return (f"{base}[{msb}]" if msb == lsb else f"{base}[{msb}:{lsb}]", _ATOM)
        if code == "concat":
            parts = [self._operand(stn, i)[0] for i in range(len(stn.inputs))]
            return "{" + ", ".join(parts) + "}", _ATOM
        if code in _UNARY_TOKENS:
            text, prec = self._operand(stn, 0)
            token = _UNARY_TOKENS[code]
            # parens when precedence demands them, or when gluing the token
            # onto the operand would lex as && or ||
            if prec < _UNARY_PREC or (token in "&|" and text.startswith(token)):
                text = f"({text})"
            return f"{token}{text}", _UNARY_PREC
        if code in ("shl", "shr"):
            left, lp = self._operand(stn, 0)
            token, prec = _BINARY_TOKENS[code]
            amount = self._shift_amount(stn)
            if lp < prec:
                left = f"({left})"
            return f"{left} {token} {amount}", prec
        if code in _BINARY_TOKENS:
            token, prec = _BINARY_TOKENS[code]
            rendered = []
            for i in range(len(stn.inputs)):
                text, p = self._operand(stn, i)
                if p < prec or (p == prec and i > 0):
                    text = f"({text})"
                rendered.append(text)
            return f" {token} ".join(rendered), prec
        raise EmitError(error("E-NO-SYNTAX",
                              f"opcode {code!r} of '{stn.id}' has no HDL rendering"))

    def _shift_amount(self, stn: Stn) -> str:
        src = self.feeds.get((stn.id, 1))
        if src is not None:
            src_stn = self.by_id[src[0]]
            if src_stn.kind == CONSTANT:
                return str(int(src_stn.attrs.get("value", 0)))
        raise EmitError(error("E-NO-SYNTAX",
                              f"shift '{stn.id}' needs a constant amount"))


def _range_text(width: int) -> str:
    return "" if width == 1 else f" [{width - 1}:0]"
