"""Glyph table for node labels.

Every operation the front end can produce maps to a short Chinese glyph of
one to three characters; bitwise and logical forms of the same operation
get distinct glyphs on purpose, which is what makes the drawing readable
without operator context.  The table is data: swap it out and nothing else
changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SymbolTable:
    entries: dict[tuple[str, str], str] = field(default_factory=dict)
    keywords: dict[str, str] = field(default_factory=dict)

    def glyph(self, opcode: str, semantic_class: str) -> str:
        """Glyph for (operation, class).  Unknown pairs are a programming
        bug, so this raises instead of returning a fallback."""
        key = (opcode, semantic_class)
        if key not in self.entries:
            raise KeyError(f"no glyph for opcode {opcode!r} in class {semantic_class!r}")
        return self.entries[key]

    def glyph_for_code(self, code: str) -> str:
        op, cls = _CODE_TO_PAIR[code]
        return self.glyph(op, cls)

    def keyword(self, name: str) -> str:
        return self.keywords[name]


#: (opcode name, semantic class) -> internal opcode used on DataOp nodes.
OPCODES: dict[tuple[str, str], str] = {
    ("and", "bitwise"): "bit_and",
    ("or", "bitwise"): "bit_or",
    ("xor", "bitwise"): "bit_xor",
    ("not", "bitwise"): "bit_not",
    ("and", "logical"): "log_and",
    ("or", "logical"): "log_or",
    ("not", "logical"): "log_not",
    ("and", "reduction"): "red_and",
    ("or", "reduction"): "red_or",
    ("xor", "reduction"): "red_xor",
    ("add", "arithmetic"): "add",
    ("sub", "arithmetic"): "sub",
    ("mul", "arithmetic"): "mul",
    ("shl", "arithmetic"): "shl",
    ("shr", "arithmetic"): "shr",
    ("eq", "comparison"): "eq",
    ("ne", "comparison"): "ne",
    ("lt", "comparison"): "lt",
    ("le", "comparison"): "le",
    ("gt", "comparison"): "gt",
    ("ge", "comparison"): "ge",
    ("concat", "structural"): "concat",
    ("select", "structural"): "select",
}

_CODE_TO_PAIR: dict[str, tuple[str, str]] = {code: pair for pair, code in OPCODES.items()}

_GLYPHS: dict[tuple[str, str], str] = {
    ("and", "bitwise"): "位与",
    ("or", "bitwise"): "位或",
    ("xor", "bitwise"): "位异或",
    ("not", "bitwise"): "位非",
    ("and", "logical"): "逻辑与",
    ("or", "logical"): "逻辑或",
    ("not", "logical"): "逻辑非",
    ("and", "reduction"): "缩与",
    ("or", "reduction"): "缩或",
    ("xor", "reduction"): "缩异或",
    ("add", "arithmetic"): "加",
    ("sub", "arithmetic"): "减",
    ("mul", "arithmetic"): "乘",
    ("shl", "arithmetic"): "左移",
    ("shr", "arithmetic"): "右移",
    ("eq", "comparison"): "等",
    ("ne", "comparison"): "不等",
    ("lt", "comparison"): "小于",
    ("le", "comparison"): "不大于",
    ("gt", "comparison"): "大于",
    ("ge", "comparison"): "不小于",
    ("concat", "structural"): "拼接",
    ("select", "structural"): "取位",
}

#: Structural keywords used on non-DataOp nodes and inside templates.
_KEYWORDS: dict[str, str] = {
    "condition": "条件",
    "value": "值",
    "default": "否则",
    "register": "寄存",
    "case": "选择",
    "instance": "模块",
    "constant": "常量",
}

SYMBOLS = SymbolTable(dict(_GLYPHS), dict(_KEYWORDS))


def symbol_for(opcode: str, semantic_class: str) -> str:
    return SYMBOLS.glyph(opcode, semantic_class)


def glyph_for_code(code: str) -> str:
    return SYMBOLS.glyph_for_code(code)
