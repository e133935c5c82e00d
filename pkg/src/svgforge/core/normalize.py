"""Rewrite document geometry into a square normalized viewBox.

The whole tree is mapped through N(p) = (p - viewBox origin) * s + offset
with s = target / max(width, height); non-square content is uniformly
scaled and centered along the short axis.  Transform attributes are
conjugated (N . T . N^-1) so rendered output is exactly the scaled
original; no wrapping transform is introduced.
"""

from __future__ import annotations

from dataclasses import replace

from ..errors import DegenerateViewBoxError
from .model import Affine, NodeKind, PathCmd, StyleAttrs, SvgDocument, SvgNode, UNSET


def _map_node(node: SvgNode, n: Affine, s: float) -> SvgNode:
    g = dict(node.geom)
    k = node.kind
    if k is NodeKind.RECT:
        g["x"], g["y"] = n.apply(g["x"], g["y"])
        g["width"] *= s
        g["height"] *= s
        for r in ("rx", "ry"):
            if r in g:
                g[r] *= s
    elif k is NodeKind.CIRCLE:
        g["cx"], g["cy"] = n.apply(g["cx"], g["cy"])
        g["r"] *= s
    elif k is NodeKind.ELLIPSE:
        g["cx"], g["cy"] = n.apply(g["cx"], g["cy"])
        g["rx"] *= s
        g["ry"] *= s
    elif k is NodeKind.LINE:
        g["x1"], g["y1"] = n.apply(g["x1"], g["y1"])
        g["x2"], g["y2"] = n.apply(g["x2"], g["y2"])
    elif k in (NodeKind.POLYLINE, NodeKind.POLYGON):
        pts = g["points"]
        mapped = []
        for i in range(0, len(pts), 2):
            x, y = n.apply(pts[i], pts[i + 1])
            mapped.extend((x, y))
        g["points"] = tuple(mapped)
    elif k is NodeKind.PATH:
        cmds = []
        for cmd in g["commands"]:
            if cmd.op in ("M", "L"):
                cmds.append(PathCmd(cmd.op, n.apply(*cmd.args)))
            elif cmd.op == "C":
                x1, y1, x2, y2, x, y = cmd.args
                cmds.append(PathCmd("C", (*n.apply(x1, y1), *n.apply(x2, y2), *n.apply(x, y))))
            elif cmd.op == "Q":
                x1, y1, x, y = cmd.args
                cmds.append(PathCmd("Q", (*n.apply(x1, y1), *n.apply(x, y))))
            elif cmd.op == "A":
                rx, ry, rot, laf, swf, x, y = cmd.args
                cmds.append(PathCmd("A", (rx * s, ry * s, rot, laf, swf, *n.apply(x, y))))
            else:
                cmds.append(cmd)
        g["commands"] = tuple(cmds)
    elif k is NodeKind.USE:
        if "x" in g or "y" in g:
            x, y = n.apply(g.get("x", 0.0), g.get("y", 0.0))
            g["x"], g["y"] = x, y

    style = node.style
    changes = {}
    if style.stroke_width is not UNSET:
        changes["stroke_width"] = style.stroke_width * s
    if style.miter_limit is not UNSET:
        pass  # ratio of lengths, scale-invariant
    if style.transform is not None:
        changes["transform"] = n @ style.transform @ n.inverse()
    if changes:
        style = replace(style, **changes)

    children = tuple(_map_node(c, n, s) for c in node.children)
    return SvgNode(k, g, style, children, node.comment)


def normalize_viewbox(doc: SvgDocument, target: float = 128.0) -> SvgDocument:
    """Return a copy of ``doc`` rewritten into a (0, 0, target, target) viewBox."""
    if target <= 0:
        raise ValueError(f"target must be positive, got {target}")
    mx, my, w, h = doc.view_box
    if w <= 0 or h <= 0:
        raise DegenerateViewBoxError(f"viewBox has non-positive size: {w} x {h}")

    s = target / max(w, h)
    ox = (target - w * s) / 2.0
    oy = (target - h * s) / 2.0
    n = Affine(s, 0.0, 0.0, s, ox - s * mx, oy - s * my)
    if n.is_identity() and (mx, my, w, h) == (0.0, 0.0, target, target):
        return doc

    children = tuple(_map_node(c, n, s) for c in doc.root_children)
    return SvgDocument(view_box=(0.0, 0.0, float(target), float(target)),
                       root_children=children, source_hash=doc.source_hash)
