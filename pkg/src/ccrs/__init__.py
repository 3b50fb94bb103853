"""Bidirectional toolkit between a synthesizable HDL subset and CCRS, a
graphical schematic notation whose nodes carry Chinese glyph labels.

Pipeline: tokenize -> parse -> elaborate -> lower_module (graph documents)
-> layout -> render, and emit back to HDL; simulate/check_equivalence prove
that a conversion preserved behavior.
"""

from ccrs.diagnostics import Diagnostic, Span
from ccrs.emit import emit
from ccrs.hdl import elaborate, parse, tokenize
from ccrs.ir import (
    CcrsDocument, canonical_form, canonicalize, deserialize, serialize, validate,
)
from ccrs.layout import layout
from ccrs.lower import lower_module, lower_with_library, symbol_for
from ccrs.render import render
from ccrs.sim import Stimulus, Trace, check_equivalence

__version__ = "0.1.0"

__all__ = [
    "Diagnostic", "Span",
    "tokenize", "parse", "elaborate",
    "CcrsDocument", "serialize", "deserialize", "validate",
    "canonical_form", "canonicalize",
    "symbol_for", "lower_module", "lower_with_library",
    "layout", "render", "emit",
    "Stimulus", "Trace", "check_equivalence",
    "__version__",
]
