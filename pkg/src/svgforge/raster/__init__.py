"""Rasterization of the SVG subset and the SSIM image metric."""

from .flatten import ellipse_outline, flatten_path, rect_outline
from .render import (
    DEFAULT_TOLERANCE,
    Raster,
    png_bytes,
    raster_from_png_bytes,
    rasterize,
    read_png,
    stroke_outline,
    to_luminance,
    write_png,
)
from .ssim import SsimParams, ssim, ssim_luminance

__all__ = [
    "DEFAULT_TOLERANCE",
    "Raster",
    "SsimParams",
    "ellipse_outline",
    "flatten_path",
    "png_bytes",
    "raster_from_png_bytes",
    "rasterize",
    "read_png",
    "rect_outline",
    "ssim",
    "ssim_luminance",
    "stroke_outline",
    "to_luminance",
    "write_png",
]
