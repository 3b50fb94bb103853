"""Front end for the synthesizable Verilog-flavored subset."""

from ccrs.hdl.lexer import Token, tokenize
from ccrs.hdl.parser import parse
from ccrs.hdl.elaborate import ElaboratedDesign, ElabModule, elaborate

__all__ = [
    "Token",
    "tokenize",
    "parse",
    "elaborate",
    "ElaboratedDesign",
    "ElabModule",
]
