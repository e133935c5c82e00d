"""Parse SVG text into the AST.

Strict mode (default) rejects anything outside the supported subset;
lenient mode skips unsupported elements/attributes and records a warning.
Comments are first-class: a comment is attached to the element that follows
it.  A trailing comment with no following element is dropped (documented
limitation; the serializer never produces one).
"""

from __future__ import annotations

import hashlib
import re
import xml.etree.ElementTree as ET

from ..errors import BadNumberError, SvgSyntaxError, UnsupportedElementError
from .model import (
    CSS_BASIC_COLORS,
    Affine,
    Color,
    NodeKind,
    PathCmd,
    StyleAttrs,
    SvgDocument,
    SvgNode,
    UNSET,
)

_FLOAT_RE = re.compile(r"[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?")
_HEX_COLOR_RE = re.compile(r"#([0-9a-fA-F]{3}|[0-9a-fA-F]{6})\Z")
_RGB_RE = re.compile(r"rgb\(\s*([^,]+)\s*,\s*([^,]+)\s*,\s*([^)]+)\s*\)\Z")
_TRANSFORM_RE = re.compile(r"(matrix|translate|scale|rotate|skewX|skewY)\s*\(([^)]*)\)")

#: Elements in the token vocabulary that the parser does not model.
VOCAB_UNSUPPORTED = frozenset({
    "text", "tspan", "textPath",
    "linearGradient", "radialGradient", "stop",
    "clipPath", "mask",
    "filter", "feGaussianBlur", "feColorMatrix", "feComposite", "feBlend",
})

_KIND_BY_TAG = {k.value: k for k in NodeKind}

_GEOM_ATTRS = {
    NodeKind.RECT: {"x", "y", "width", "height", "rx", "ry"},
    NodeKind.CIRCLE: {"cx", "cy", "r"},
    NodeKind.ELLIPSE: {"cx", "cy", "rx", "ry"},
    NodeKind.LINE: {"x1", "y1", "x2", "y2"},
    NodeKind.POLYLINE: {"points"},
    NodeKind.POLYGON: {"points"},
    NodeKind.PATH: {"d"},
    NodeKind.USE: {"x", "y"},
    NodeKind.GROUP: set(),
    NodeKind.DEFS: set(),
}

_STYLE_ATTRS = {
    "fill", "stroke", "stroke-width", "stroke-linecap", "stroke-linejoin",
    "stroke-miterlimit", "fill-rule", "opacity", "transform", "id", "class",
}


def _strip_ns(tag: str) -> str:
    return tag.rsplit("}", 1)[-1] if "}" in tag else tag


def parse_number(text: str, what: str = "number") -> float:
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise BadNumberError(f"cannot parse {what}: {text!r}") from None
    if v != v or v in (float("inf"), float("-inf")):
        raise BadNumberError(f"non-finite {what}: {text!r}")
    return v


def parse_color(text: str, what: str = "color") -> Color | None:
    """Parse #rgb, #rrggbb, rgb(r,g,b), a basic CSS keyword, or ``none``."""
    s = text.strip()
    if s == "none":
        return None
    m = _HEX_COLOR_RE.match(s)
    if m:
        h = m.group(1)
        if len(h) == 3:
            h = "".join(ch * 2 for ch in h)
        return Color(int(h[0:2], 16), int(h[2:4], 16), int(h[4:6], 16))
    m = _RGB_RE.match(s)
    if m:
        chans = []
        for part in m.groups():
            v = parse_number(part, what)
            chans.append(max(0, min(255, int(round(v)))))
        return Color(*chans)
    if s in CSS_BASIC_COLORS:
        return Color(*CSS_BASIC_COLORS[s])
    raise BadNumberError(f"cannot parse {what}: {text!r}")


def parse_transform(text: str) -> Affine:
    """Compose a transform attribute (left to right) into one matrix."""
    result = Affine.identity()
    matched_len = 0
    for m in _TRANSFORM_RE.finditer(text):
        matched_len += len(m.group(0))
        name = m.group(1)
        args = [parse_number(a, f"{name} argument") for a in _FLOAT_RE.findall(m.group(2))]
        if name == "matrix" and len(args) == 6:
            t = Affine(*args)
        elif name == "translate" and len(args) in (1, 2):
            t = Affine.translate(args[0], args[1] if len(args) == 2 else 0.0)
        elif name == "scale" and len(args) in (1, 2):
            t = Affine.scale(args[0], args[1] if len(args) == 2 else None)
        elif name == "rotate" and len(args) in (1, 3):
            t = Affine.rotate(*args)
        elif name == "skewX" and len(args) == 1:
            t = Affine.skew_x(args[0])
        elif name == "skewY" and len(args) == 1:
            t = Affine.skew_y(args[0])
        else:
            raise SvgSyntaxError(f"bad transform function: {m.group(0)!r}")
        result = result @ t
    leftover = _TRANSFORM_RE.sub("", text).strip().replace(",", "")
    if leftover or matched_len == 0:
        raise SvgSyntaxError(f"cannot parse transform: {text!r}")
    return result


def parse_points(text: str) -> tuple[float, ...]:
    return tuple(parse_number(t, "point coordinate") for t in _FLOAT_RE.findall(text))


class _PathScanner:
    def __init__(self, d: str):
        self.d = d
        self.pos = 0

    def skip_sep(self):
        while self.pos < len(self.d) and (self.d[self.pos].isspace() or self.d[self.pos] == ","):
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_sep()
        return self.pos >= len(self.d)

    def peek_is_number(self) -> bool:
        self.skip_sep()
        if self.pos >= len(self.d):
            return False
        ch = self.d[self.pos]
        return ch.isdigit() or ch in "+-."

    def read_number(self) -> float:
        self.skip_sep()
        m = _FLOAT_RE.match(self.d, self.pos)
        if not m:
            raise BadNumberError(f"bad path number at offset {self.pos}: {self.d[self.pos:self.pos + 12]!r}")
        self.pos = m.end()
        return parse_number(m.group(0), "path number")

    def read_flag(self) -> float:
        # Arc flags are single characters 0/1; SVG allows them to be unseparated.
        self.skip_sep()
        if self.pos < len(self.d) and self.d[self.pos] in "01":
            v = float(self.d[self.pos])
            self.pos += 1
            return v
        raise BadNumberError(f"bad arc flag at offset {self.pos}")

    def read_command(self) -> str:
        self.skip_sep()
        ch = self.d[self.pos]
        if ch not in "MmLlHhVvCcSsQqTtAaZz":
            raise SvgSyntaxError(f"bad path command {ch!r} at offset {self.pos}")
        self.pos += 1
        return ch


def parse_path_data(d: str) -> tuple[PathCmd, ...]:
    """Parse path data into canonical absolute commands (M, L, C, Q, A, Z).

    Relative commands are absolutized; H/V become L; S/T become C/Q with
    the reflected control point computed in.
    """
    sc = _PathScanner(d)
    cmds: list[PathCmd] = []
    cx = cy = 0.0            # current point
    sx = sy = 0.0            # subpath start
    prev_cubic_ctrl: tuple[float, float] | None = None
    prev_quad_ctrl: tuple[float, float] | None = None
    last_op = ""

    if sc.at_end():
        raise SvgSyntaxError("empty path data")

    while not sc.at_end():
        if sc.peek_is_number():
            if last_op in ("M", "m"):
                op = "L" if last_op == "M" else "l"   # implicit lineto after moveto
            elif last_op:
                op = last_op
            else:
                raise SvgSyntaxError("path data must start with a command")
        else:
            op = sc.read_command()
        last_op = op
        rel = op.islower()
        u = op.upper()

        if u == "M":
            x, y = sc.read_number(), sc.read_number()
            if rel:
                x, y = cx + x, cy + y
            cmds.append(PathCmd("M", (x, y)))
            cx, cy, sx, sy = x, y, x, y
            prev_cubic_ctrl = prev_quad_ctrl = None
        elif u == "L":
            x, y = sc.read_number(), sc.read_number()
            if rel:
                x, y = cx + x, cy + y
            cmds.append(PathCmd("L", (x, y)))
            cx, cy = x, y
            prev_cubic_ctrl = prev_quad_ctrl = None
        elif u == "H":
            x = sc.read_number()
            if rel:
                x = cx + x
            cmds.append(PathCmd("L", (x, cy)))
            cx = x
            prev_cubic_ctrl = prev_quad_ctrl = None
        elif u == "V":
            y = sc.read_number()
            if rel:
                y = cy + y
            cmds.append(PathCmd("L", (cx, y)))
            cy = y
            prev_cubic_ctrl = prev_quad_ctrl = None
        elif u in ("C", "S"):
            if u == "C":
                x1, y1 = sc.read_number(), sc.read_number()
                if rel:
                    x1, y1 = cx + x1, cy + y1
            else:
                if prev_cubic_ctrl is not None:
                    x1, y1 = 2 * cx - prev_cubic_ctrl[0], 2 * cy - prev_cubic_ctrl[1]
                else:
                    x1, y1 = cx, cy
            x2, y2 = sc.read_number(), sc.read_number()
            x, y = sc.read_number(), sc.read_number()
            if rel:
                x2, y2, x, y = cx + x2, cy + y2, cx + x, cy + y
            cmds.append(PathCmd("C", (x1, y1, x2, y2, x, y)))
            cx, cy = x, y
            prev_cubic_ctrl = (x2, y2)
            prev_quad_ctrl = None
        elif u in ("Q", "T"):
            if u == "Q":
                x1, y1 = sc.read_number(), sc.read_number()
                if rel:
                    x1, y1 = cx + x1, cy + y1
            else:
                if prev_quad_ctrl is not None:
                    x1, y1 = 2 * cx - prev_quad_ctrl[0], 2 * cy - prev_quad_ctrl[1]
                else:
                    x1, y1 = cx, cy
            x, y = sc.read_number(), sc.read_number()
            if rel:
                x, y = cx + x, cy + y
            cmds.append(PathCmd("Q", (x1, y1, x, y)))
            cx, cy = x, y
            prev_quad_ctrl = (x1, y1)
            prev_cubic_ctrl = None
        elif u == "A":
            rx_, ry_ = sc.read_number(), sc.read_number()
            rot = sc.read_number()
            laf, swf = sc.read_flag(), sc.read_flag()
            x, y = sc.read_number(), sc.read_number()
            if rel:
                x, y = cx + x, cy + y
            cmds.append(PathCmd("A", (abs(rx_), abs(ry_), rot, laf, swf, x, y)))
            cx, cy = x, y
            prev_cubic_ctrl = prev_quad_ctrl = None
        elif u == "Z":
            cmds.append(PathCmd("Z", ()))
            cx, cy = sx, sy
            prev_cubic_ctrl = prev_quad_ctrl = None

    if not cmds or cmds[0].op != "M":
        raise SvgSyntaxError("path must begin with a move command")
    return tuple(cmds)


def _parse_style(attrs: dict[str, str], node_path: str) -> StyleAttrs:
    kw: dict = {}
    if "fill" in attrs:
        kw["fill"] = parse_color(attrs["fill"], "fill")
    if "stroke" in attrs:
        kw["stroke"] = parse_color(attrs["stroke"], "stroke")
    if "stroke-width" in attrs:
        w = parse_number(attrs["stroke-width"], "stroke-width")
        if w < 0:
            raise BadNumberError(f"negative stroke-width at {node_path}")
        kw["stroke_width"] = w
    if "fill-rule" in attrs:
        v = attrs["fill-rule"].strip()
        if v not in ("nonzero", "evenodd"):
            raise UnsupportedElementError(f"fill-rule {v!r} at {node_path}")
        kw["fill_rule"] = v
    if "opacity" in attrs:
        # SVG clamps out-of-range opacity rather than erroring.
        kw["opacity"] = min(1.0, max(0.0, parse_number(attrs["opacity"], "opacity")))
    if "stroke-linecap" in attrs:
        v = attrs["stroke-linecap"].strip()
        if v not in ("butt", "round", "square"):
            raise UnsupportedElementError(f"stroke-linecap {v!r} at {node_path}")
        kw["stroke_linecap"] = v
    if "stroke-linejoin" in attrs:
        v = attrs["stroke-linejoin"].strip()
        if v not in ("miter", "round", "bevel"):
            raise UnsupportedElementError(f"stroke-linejoin {v!r} at {node_path}")
        kw["stroke_linejoin"] = v
    if "stroke-miterlimit" in attrs:
        kw["miter_limit"] = parse_number(attrs["stroke-miterlimit"], "stroke-miterlimit")
    if "transform" in attrs:
        kw["transform"] = parse_transform(attrs["transform"])
    if "class" in attrs:
        kw["class_id"] = attrs["class"]
    if "id" in attrs:
        kw["elem_id"] = attrs["id"]
    return StyleAttrs(**kw)


def _elem_attrs(elem) -> dict[str, str]:
    out = {}
    for k, v in elem.attrib.items():
        k = _strip_ns(k)
        if k.startswith("xmlns"):
            continue
        out[k] = v
    return out


def _build_node(elem, strict: bool, warnings: list[str] | None, path: str) -> SvgNode | None:
    tag = _strip_ns(elem.tag)
    kind = _KIND_BY_TAG.get(tag)
    if kind is None:
        known = tag in VOCAB_UNSUPPORTED
        msg = f"unsupported element <{tag}> at {path}" + ("" if known else " (outside the vocabulary)")
        if strict:
            raise UnsupportedElementError(msg)
        if warnings is not None:
            warnings.append(msg)
        return None

    attrs = _elem_attrs(elem)
    geom_names = _GEOM_ATTRS[kind]
    geom: dict = {}
    style_attrs: dict[str, str] = {}
    for name, value in attrs.items():
        if name in geom_names:
            geom[name] = value
        elif name in _STYLE_ATTRS:
            style_attrs[name] = value
        else:
            msg = f"unsupported attribute {name!r} on <{tag}> at {path}"
            if strict:
                raise UnsupportedElementError(msg)
            if warnings is not None:
                warnings.append(msg)

    g: dict = {}
    if kind is NodeKind.RECT:
        g["x"] = parse_number(geom.get("x", "0"), "x")
        g["y"] = parse_number(geom.get("y", "0"), "y")
        if "width" not in geom or "height" not in geom:
            raise SvgSyntaxError(f"<rect> missing width/height at {path}")
        g["width"] = parse_number(geom["width"], "width")
        g["height"] = parse_number(geom["height"], "height")
        if g["width"] < 0 or g["height"] < 0:
            raise BadNumberError(f"negative rect size at {path}")
        if "rx" in geom:
            g["rx"] = parse_number(geom["rx"], "rx")
        if "ry" in geom:
            g["ry"] = parse_number(geom["ry"], "ry")
    elif kind is NodeKind.CIRCLE:
        g["cx"] = parse_number(geom.get("cx", "0"), "cx")
        g["cy"] = parse_number(geom.get("cy", "0"), "cy")
        if "r" not in geom:
            raise SvgSyntaxError(f"<circle> missing r at {path}")
        g["r"] = parse_number(geom["r"], "r")
        if g["r"] < 0:
            raise BadNumberError(f"negative radius at {path}")
    elif kind is NodeKind.ELLIPSE:
        g["cx"] = parse_number(geom.get("cx", "0"), "cx")
        g["cy"] = parse_number(geom.get("cy", "0"), "cy")
        if "rx" not in geom or "ry" not in geom:
            raise SvgSyntaxError(f"<ellipse> missing rx/ry at {path}")
        g["rx"] = parse_number(geom["rx"], "rx")
        g["ry"] = parse_number(geom["ry"], "ry")
        if g["rx"] < 0 or g["ry"] < 0:
            raise BadNumberError(f"negative radius at {path}")
    elif kind is NodeKind.LINE:
        for n in ("x1", "y1", "x2", "y2"):
            g[n] = parse_number(geom.get(n, "0"), n)
    elif kind in (NodeKind.POLYLINE, NodeKind.POLYGON):
        g["points"] = parse_points(geom.get("points", ""))
    elif kind is NodeKind.PATH:
        if "d" not in geom:
            raise SvgSyntaxError(f"<path> missing d at {path}")
        g["commands"] = parse_path_data(geom["d"])
    elif kind is NodeKind.USE:
        if "x" in geom:
            g["x"] = parse_number(geom["x"], "x")
        if "y" in geom:
            g["y"] = parse_number(geom["y"], "y")

    style = _parse_style(style_attrs, path)

    children: list[SvgNode] = []
    pending_comment: list[str] = []
    for i, child in enumerate(elem):
        if child.tag is ET.Comment:
            pending_comment.append((child.text or "").strip())
            continue
        child_tag = _strip_ns(child.tag)
        child_path = f"{path}/{child_tag}[{i}]"
        if kind not in (NodeKind.GROUP, NodeKind.DEFS):
            raise SvgSyntaxError(f"<{tag}> cannot contain <{child_tag}> at {path}")
        node = _build_node(child, strict, warnings, child_path)
        if node is not None:
            if pending_comment:
                node = SvgNode(node.kind, node.geom, node.style, node.children,
                               "\n".join(pending_comment))
            children.append(node)
        pending_comment = []

    return SvgNode(kind, g, style, tuple(children))


def parse_svg(text: str, strict: bool = True,
              warnings: list[str] | None = None) -> SvgDocument:
    """Parse SVG text into a document.

    Raises SvgSyntaxError for malformed XML or structural violations,
    UnsupportedElementError for elements/attributes outside the subset
    (strict mode), and BadNumberError for unparseable numeric attributes.
    In lenient mode unsupported constructs are skipped and a message is
    appended to ``warnings`` when a list is supplied.
    """
    if not isinstance(text, str):
        raise SvgSyntaxError("input must be a str of SVG text")
    try:
        parser = ET.XMLParser(target=ET.TreeBuilder(insert_comments=True))
        root = ET.fromstring(text, parser=parser)
    except ET.ParseError as exc:
        raise SvgSyntaxError(f"malformed XML: {exc}") from exc

    if _strip_ns(root.tag) != "svg":
        raise SvgSyntaxError(f"root element is <{_strip_ns(root.tag)}>, expected <svg>")

    attrs = _elem_attrs(root)
    if "viewBox" in attrs:
        parts = [parse_number(p, "viewBox") for p in _FLOAT_RE.findall(attrs["viewBox"])]
        if len(parts) != 4:
            raise SvgSyntaxError(f"viewBox needs 4 numbers, got {len(parts)}")
        view_box = tuple(parts)
    elif "width" in attrs and "height" in attrs:
        view_box = (0.0, 0.0,
                    parse_number(attrs["width"].rstrip("px"), "width"),
                    parse_number(attrs["height"].rstrip("px"), "height"))
    else:
        raise SvgSyntaxError("<svg> has no viewBox (and no width/height fallback)")
    for name in attrs:
        if name not in ("viewBox", "width", "height", "version"):
            msg = f"unsupported attribute {name!r} on <svg>"
            if strict:
                raise UnsupportedElementError(msg)
            if warnings is not None:
                warnings.append(msg)

    children: list[SvgNode] = []
    pending_comment: list[str] = []
    for i, child in enumerate(root):
        if child.tag is ET.Comment:
            pending_comment.append((child.text or "").strip())
            continue
        child_path = f"/svg/{_strip_ns(child.tag)}[{i}]"
        node = _build_node(child, strict, warnings, child_path)
        if node is not None:
            if pending_comment:
                node = SvgNode(node.kind, node.geom, node.style, node.children,
                               "\n".join(pending_comment))
            children.append(node)
        pending_comment = []

    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return SvgDocument(view_box=view_box, root_children=tuple(children), source_hash=digest)
