"""Document-to-HDL conversion."""

from ccrs.emit.emitter import EmitError, emit

__all__ = ["emit", "EmitError"]
