"""Document model: STN/LWC graphs, validation, canonical serialization."""

from ccrs.ir.model import (
    BRANCH, CASE_SELECT, CONSTANT, DATA_OP, INSTANCE, PORT, TIMING,
    CcrsDocument, DocPort, Lwc, Stn, FORMAT_VERSION,
)
from ccrs.ir.serial import deserialize, serialize
from ccrs.ir.validate import validate
from ccrs.ir.canonical import canonical_form, canonicalize

__all__ = [
    "Stn", "Lwc", "DocPort", "CcrsDocument", "FORMAT_VERSION",
    "DATA_OP", "BRANCH", "CASE_SELECT", "TIMING", "CONSTANT", "PORT", "INSTANCE",
    "serialize", "deserialize", "validate", "canonical_form", "canonicalize",
]
