"""Two-valued operator semantics shared by both simulators.

Both the HDL interpreter and the document interpreter evaluate through this
table so their operator meanings can never drift apart.  Values are plain
non-negative ints already masked to their declared widths.
"""

from __future__ import annotations


def mask(width: int) -> int:
    return (1 << width) - 1


def truthy(value: int) -> int:
    return 1 if value != 0 else 0


def apply_op(code: str, args: list[int], arg_widths: list[int], out_width: int,
             attrs: dict | None = None) -> int:
    """Evaluate opcode ``code`` over ``args``.  Variadic codes fold left."""
    if code == "bit_and":
        v = args[0]
        for a in args[1:]:
            v &= a
        return v & mask(out_width)
    if code == "bit_or":
        v = args[0]
        for a in args[1:]:
            v |= a
        return v & mask(out_width)
    if code == "bit_xor":
        v = args[0]
        for a in args[1:]:
            v ^= a
        return v & mask(out_width)
    if code == "bit_not":
        return ~args[0] & mask(out_width)
    if code == "log_and":
        v = 1
        for a in args:
            v &= truthy(a)
        return v
    if code == "log_or":
        v = 0
        for a in args:
            v |= truthy(a)
        return v
    if code == "log_not":
        return 1 - truthy(args[0])
    if code == "red_and":
        return 1 if args[0] == mask(arg_widths[0]) else 0
    if code == "red_or":
        return truthy(args[0])
    if code == "red_xor":
        return bin(args[0]).count("1") & 1
    if code == "add":
        v = 0
        for a in args:
            v += a
        return v & mask(out_width)
    if code == "sub":
        return (args[0] - args[1]) & mask(out_width)
    if code == "mul":
        v = 1
        for a in args:
            v *= a
        return v & mask(out_width)
    if code == "shl":
        return (args[0] << args[1]) & mask(out_width)
    if code == "shr":
        return (args[0] >> args[1]) & mask(out_width)
    if code == "eq":
        return 1 if args[0] == args[1] else 0
    if code == "ne":
        return 1 if args[0] != args[1] else 0
    if code == "lt":
        return 1 if args[0] < args[1] else 0
    if code == "le":
        return 1 if args[0] <= args[1] else 0
    if code == "gt":
        return 1 if args[0] > args[1] else 0
    if code == "ge":
        return 1 if args[0] >= args[1] else 0
    if code == "concat":
        v = 0
        for a, w in zip(args, arg_widths):  # first argument lands in the MSBs
            v = (v << w) | (a & mask(w))
        return v & mask(out_width)
    if code == "select":
        attrs = attrs or {}
        msb = int(attrs["msb"])
        lsb = int(attrs["lsb"])
        return (args[0] >> lsb) & mask(msb - lsb + 1)
    raise ValueError(f"unknown opcode {code!r}")


#: HDL operator token -> (opcode, semantic class), binary forms.
BINARY_CODES: dict[str, tuple[str, str]] = {
    "&": ("bit_and", "bitwise"),
    "|": ("bit_or", "bitwise"),
    "^": ("bit_xor", "bitwise"),
    "&&": ("log_and", "logical"),
    "||": ("log_or", "logical"),
    "+": ("add", "arithmetic"),
    "-": ("sub", "arithmetic"),
    "*": ("mul", "arithmetic"),
    "<<": ("shl", "arithmetic"),
    ">>": ("shr", "arithmetic"),
    "==": ("eq", "comparison"),
    "!=": ("ne", "comparison"),
    "<": ("lt", "comparison"),
    "<=": ("le", "comparison"),
    ">": ("gt", "comparison"),
    ">=": ("ge", "comparison"),
}

#: HDL operator token -> (opcode, semantic class), unary forms.
UNARY_CODES: dict[str, tuple[str, str]] = {
    "~": ("bit_not", "bitwise"),
    "!": ("log_not", "logical"),
    "&": ("red_and", "reduction"),
    "|": ("red_or", "reduction"),
    "^": ("red_xor", "reduction"),
}

#: Opcodes whose n-ary form folds the same way as a chain of binary ones.
ASSOCIATIVE = frozenset({"bit_and", "bit_or", "bit_xor", "log_and", "log_or",
                         "add", "mul", "concat"})
