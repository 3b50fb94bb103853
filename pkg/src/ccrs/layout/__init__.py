"""Deterministic layered layout for documents."""

from ccrs.layout.engine import (
    LAYER_GAP, MIN_BOX_H, MIN_BOX_W, PORT_PITCH, REGION_MARGIN, TRUNK_SPACING,
    LayoutGeometry, assign_layers, layout, order_layers, partition_clock_domains,
    route_lwc, size_and_place,
)

__all__ = [
    "LayoutGeometry", "layout", "assign_layers", "order_layers",
    "size_and_place", "route_lwc", "partition_clock_domains",
    "PORT_PITCH", "MIN_BOX_W", "MIN_BOX_H", "LAYER_GAP", "TRUNK_SPACING",
    "REGION_MARGIN",
]
