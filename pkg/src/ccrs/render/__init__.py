"""Deterministic SVG drawing of laid-out documents."""

from ccrs.render.svg import RenderError, RenderOptions, render

__all__ = ["render", "RenderOptions", "RenderError"]
