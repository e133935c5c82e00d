"""Serialize the AST back to SVG text.

Numeric output uses at most two decimal places (round half away from zero)
with trailing zeros stripped, matching the two-decimal fractional tokens of
the vocabulary.  Compact style emits no inter-element whitespace; pretty
style indents two spaces per depth.  Comments are preserved in both styles.
"""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal

from .model import (
    Affine,
    Color,
    NodeKind,
    PathCmd,
    StyleAttrs,
    SvgDocument,
    SvgNode,
    UNSET,
)


def fmt_number(v: float) -> str:
    """Format with <= 2 decimals, ties away from zero, trailing zeros stripped."""
    q = Decimal(repr(float(v))).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    s = format(q, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    if s in ("-0", ""):
        s = "0"
    return s


def fmt_color(c: Color | None) -> str:
    if c is None:
        return "none"
    return f"#{c.r:02x}{c.g:02x}{c.b:02x}"


def fmt_transform(t: Affine) -> str:
    vals = " ".join(fmt_number(v) for v in (t.a, t.b, t.c, t.d, t.e, t.f))
    return f"matrix({vals})"


def fmt_path_data(cmds: tuple[PathCmd, ...]) -> str:
    parts = []
    for cmd in cmds:
        if cmd.args:
            parts.append(cmd.op + " " + " ".join(fmt_number(a) for a in cmd.args))
        else:
            parts.append(cmd.op)
    return " ".join(parts)


_GEOM_ORDER = {
    NodeKind.RECT: ("x", "y", "width", "height", "rx", "ry"),
    NodeKind.CIRCLE: ("cx", "cy", "r"),
    NodeKind.ELLIPSE: ("cx", "cy", "rx", "ry"),
    NodeKind.LINE: ("x1", "y1", "x2", "y2"),
    NodeKind.USE: ("x", "y"),
}


def _style_attrs(style: StyleAttrs) -> list[tuple[str, str]]:
    out = []
    if style.fill is not UNSET:
        out.append(("fill", fmt_color(style.fill)))
    if style.stroke is not UNSET:
        out.append(("stroke", fmt_color(style.stroke)))
    if style.stroke_width is not UNSET:
        out.append(("stroke-width", fmt_number(style.stroke_width)))
    if style.stroke_linecap is not UNSET:
        out.append(("stroke-linecap", style.stroke_linecap))
    if style.stroke_linejoin is not UNSET:
        out.append(("stroke-linejoin", style.stroke_linejoin))
    if style.miter_limit is not UNSET:
        out.append(("stroke-miterlimit", fmt_number(style.miter_limit)))
    if style.fill_rule is not UNSET:
        out.append(("fill-rule", style.fill_rule))
    if style.opacity is not UNSET:
        out.append(("opacity", fmt_number(style.opacity)))
    if style.transform is not None:
        out.append(("transform", fmt_transform(style.transform)))
    if style.elem_id is not None:
        out.append(("id", style.elem_id))
    if style.class_id is not None:
        out.append(("class", style.class_id))
    return out


def _node_attrs(node: SvgNode) -> str:
    pairs: list[tuple[str, str]] = []
    if node.kind is NodeKind.PATH:
        pairs.append(("d", fmt_path_data(node.geom["commands"])))
    elif node.kind in (NodeKind.POLYLINE, NodeKind.POLYGON):
        pts = node.geom["points"]
        pairs.append(("points", " ".join(fmt_number(p) for p in pts)))
    else:
        for name in _GEOM_ORDER.get(node.kind, ()):
            if name in node.geom:
                pairs.append((name, fmt_number(node.geom[name])))
    pairs.extend(_style_attrs(node.style))
    return "".join(f' {k}="{v}"' for k, v in pairs)


def _emit(node: SvgNode, lines: list[str], depth: int, pretty: bool):
    indent = "  " * depth if pretty else ""
    if node.comment:
        for c in node.comment.split("\n"):
            lines.append(f"{indent}<!-- {c} -->")
    attrs = _node_attrs(node)
    tag = node.kind.value
    if node.kind in (NodeKind.GROUP, NodeKind.DEFS):
        if node.children:
            lines.append(f"{indent}<{tag}{attrs}>")
            for child in node.children:
                _emit(child, lines, depth + 1, pretty)
            lines.append(f"{indent}</{tag}>")
        else:
            lines.append(f"{indent}<{tag}{attrs}></{tag}>")
    else:
        lines.append(f"{indent}<{tag}{attrs}/>")


def serialize(doc: SvgDocument, style: str = "compact") -> str:
    """Render a document to SVG text; ``style`` is "compact" or "pretty"."""
    if style not in ("compact", "pretty"):
        raise ValueError(f"unknown style: {style!r}")
    pretty = style == "pretty"
    vb = " ".join(fmt_number(v) for v in doc.view_box)
    lines: list[str] = [f'<svg viewBox="{vb}">']
    for child in doc.root_children:
        _emit(child, lines, 1, pretty)
    lines.append("</svg>")
    return "\n".join(lines) if pretty else "".join(lines)
