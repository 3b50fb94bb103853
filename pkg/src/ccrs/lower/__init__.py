"""Lowering from elaborated HDL to the document graph."""

from ccrs.lower.symbols import SYMBOLS, SymbolTable, symbol_for
from ccrs.lower.templater import LowerResult, lower_module, lower_with_library

__all__ = [
    "SymbolTable",
    "SYMBOLS",
    "symbol_for",
    "lower_module",
    "lower_with_library",
    "LowerResult",
]
