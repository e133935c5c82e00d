"""SVG subset: AST, parser, serializer, viewBox normalization, structure checks."""

from .model import (
    Affine,
    Color,
    CSS_BASIC_COLORS,
    Issue,
    NodeKind,
    PathCmd,
    Severity,
    StyleAttrs,
    SvgDocument,
    SvgNode,
    UNSET,
    ValidationReport,
)
from .normalize import normalize_viewbox
from .parse import parse_color, parse_path_data, parse_svg, parse_transform
from .serialize import fmt_number, serialize
from .structure import code_length, extract_groups, validate_structure

__all__ = [
    "Affine",
    "Color",
    "CSS_BASIC_COLORS",
    "Issue",
    "NodeKind",
    "PathCmd",
    "Severity",
    "StyleAttrs",
    "SvgDocument",
    "SvgNode",
    "UNSET",
    "ValidationReport",
    "code_length",
    "extract_groups",
    "fmt_number",
    "normalize_viewbox",
    "parse_color",
    "parse_path_data",
    "parse_svg",
    "parse_transform",
    "serialize",
    "validate_structure",
]
