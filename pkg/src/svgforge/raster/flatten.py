"""Flatten path commands and shape outlines into polylines.

Bezier segments are subdivided adaptively until the control polygon stays
within the tolerance of its chord; since the curve lies in the convex hull
of its control points, that bounds the true deviation.  Elliptical arcs use
the endpoint-to-center conversion and are sampled at an angular step chosen
from the sagitta bound.
"""

from __future__ import annotations

import math

from ..core.model import NodeKind, PathCmd, SvgNode

_MAX_DEPTH = 24

Point = tuple[float, float]


def _dist_point_line(px, py, x0, y0, x1, y1) -> float:
    dx, dy = x1 - x0, y1 - y0
    L = math.hypot(dx, dy)
    if L < 1e-12:
        return math.hypot(px - x0, py - y0)
    return abs((px - x0) * dy - (py - y0) * dx) / L


def _flatten_cubic(p0, p1, p2, p3, tol, out, depth=0):
    d1 = _dist_point_line(p1[0], p1[1], p0[0], p0[1], p3[0], p3[1])
    d2 = _dist_point_line(p2[0], p2[1], p0[0], p0[1], p3[0], p3[1])
    if max(d1, d2) <= tol or depth >= _MAX_DEPTH:
        out.append(p3)
        return
    m01 = ((p0[0] + p1[0]) / 2, (p0[1] + p1[1]) / 2)
    m12 = ((p1[0] + p2[0]) / 2, (p1[1] + p2[1]) / 2)
    m23 = ((p2[0] + p3[0]) / 2, (p2[1] + p3[1]) / 2)
    m012 = ((m01[0] + m12[0]) / 2, (m01[1] + m12[1]) / 2)
    m123 = ((m12[0] + m23[0]) / 2, (m12[1] + m23[1]) / 2)
    mid = ((m012[0] + m123[0]) / 2, (m012[1] + m123[1]) / 2)
    _flatten_cubic(p0, m01, m012, mid, tol, out, depth + 1)
    _flatten_cubic(mid, m123, m23, p3, tol, out, depth + 1)


def _flatten_quad(p0, p1, p2, tol, out, depth=0):
    d = _dist_point_line(p1[0], p1[1], p0[0], p0[1], p2[0], p2[1])
    if d <= tol or depth >= _MAX_DEPTH:
        out.append(p2)
        return
    m01 = ((p0[0] + p1[0]) / 2, (p0[1] + p1[1]) / 2)
    m12 = ((p1[0] + p2[0]) / 2, (p1[1] + p2[1]) / 2)
    mid = ((m01[0] + m12[0]) / 2, (m01[1] + m12[1]) / 2)
    _flatten_quad(p0, m01, mid, tol, out, depth + 1)
    _flatten_quad(mid, m12, p2, tol, out, depth + 1)


def _arc_step(r: float, tol: float) -> float:
    """Angular step so the sagitta of each chord stays within tol."""
    if r <= tol:
        return math.pi / 2
    return 2.0 * math.acos(max(-1.0, min(1.0, 1.0 - tol / r)))


def _flatten_arc(p0: Point, rx, ry, rot_deg, large_arc, sweep, p1: Point,
                 tol: float, out: list):
    """SVG endpoint arc; follows the standard endpoint-to-center mapping."""
    x1, y1 = p0
    x2, y2 = p1
    if rx == 0 or ry == 0 or (x1 == x2 and y1 == y2):
        out.append(p1)
        return
    rx, ry = abs(rx), abs(ry)
    phi = math.radians(rot_deg)
    cos_p, sin_p = math.cos(phi), math.sin(phi)

    dx2, dy2 = (x1 - x2) / 2.0, (y1 - y2) / 2.0
    x1p = cos_p * dx2 + sin_p * dy2
    y1p = -sin_p * dx2 + cos_p * dy2

    lam = (x1p / rx) ** 2 + (y1p / ry) ** 2
    if lam > 1:
        s = math.sqrt(lam)
        rx *= s
        ry *= s

    num = rx * rx * ry * ry - rx * rx * y1p * y1p - ry * ry * x1p * x1p
    den = rx * rx * y1p * y1p + ry * ry * x1p * x1p
    coef = math.sqrt(max(0.0, num / den)) if den > 0 else 0.0
    if large_arc == sweep:
        coef = -coef
    cxp = coef * rx * y1p / ry
    cyp = -coef * ry * x1p / rx
    cx = cos_p * cxp - sin_p * cyp + (x1 + x2) / 2.0
    cy = sin_p * cxp + cos_p * cyp + (y1 + y2) / 2.0

    def angle(ux, uy, vx, vy):
        dot = ux * vx + uy * vy
        L = math.hypot(ux, uy) * math.hypot(vx, vy)
        a = math.acos(max(-1.0, min(1.0, dot / L)))
        if ux * vy - uy * vx < 0:
            a = -a
        return a

    theta1 = angle(1.0, 0.0, (x1p - cxp) / rx, (y1p - cyp) / ry)
    dtheta = angle((x1p - cxp) / rx, (y1p - cyp) / ry,
                   (-x1p - cxp) / rx, (-y1p - cyp) / ry)
    if not sweep and dtheta > 0:
        dtheta -= 2 * math.pi
    elif sweep and dtheta < 0:
        dtheta += 2 * math.pi

    steps = max(2, int(math.ceil(abs(dtheta) / _arc_step(max(rx, ry), tol))))
    for k in range(1, steps + 1):
        t = theta1 + dtheta * (k / steps)
        ex = cx + rx * math.cos(t) * cos_p - ry * math.sin(t) * sin_p
        ey = cy + rx * math.cos(t) * sin_p + ry * math.sin(t) * cos_p
        out.append((ex, ey))
    out[-1] = p1  # land exactly on the endpoint


def flatten_path(commands: tuple[PathCmd, ...], tolerance: float = 0.1
                 ) -> list[tuple[list[Point], bool]]:
    """Flatten canonical path commands into subpath polylines.

    Returns one ``(points, closed)`` entry per subpath; a close command
    appends the subpath's start point and marks it closed.
    """
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    subpaths: list[tuple[list[Point], bool]] = []
    cur: list[Point] = []
    closed = False
    start: Point = (0.0, 0.0)

    def finish():
        nonlocal cur, closed
        if len(cur) >= 2:
            subpaths.append((cur, closed))
        cur = []
        closed = False

    for cmd in commands:
        if cmd.op == "M":
            finish()
            start = (cmd.args[0], cmd.args[1])
            cur = [start]
        elif cmd.op == "L":
            cur.append((cmd.args[0], cmd.args[1]))
        elif cmd.op == "C":
            x1, y1, x2, y2, x, y = cmd.args
            _flatten_cubic(cur[-1], (x1, y1), (x2, y2), (x, y), tolerance, cur)
        elif cmd.op == "Q":
            x1, y1, x, y = cmd.args
            _flatten_quad(cur[-1], (x1, y1), (x, y), tolerance, cur)
        elif cmd.op == "A":
            rx, ry, rot, laf, swf, x, y = cmd.args
            _flatten_arc(cur[-1], rx, ry, rot, bool(laf), bool(swf), (x, y),
                         tolerance, cur)
        elif cmd.op == "Z":
            if cur:
                cur.append(start)  # close always appends the start point
                closed = True
                finish()
                cur = [start]
    finish()
    return subpaths


def ellipse_outline(cx: float, cy: float, rx: float, ry: float,
                    tol: float = 0.1) -> list[Point]:
    """Closed polyline around an axis-aligned ellipse."""
    r = max(rx, ry)
    if r <= 0:
        return []
    steps = max(8, int(math.ceil(2 * math.pi / _arc_step(r, tol))))
    pts = []
    for k in range(steps):
        t = 2 * math.pi * k / steps
        pts.append((cx + rx * math.cos(t), cy + ry * math.sin(t)))
    pts.append(pts[0])
    return pts


def rect_outline(x: float, y: float, w: float, h: float,
                 rx: float = 0.0, ry: float = 0.0, tol: float = 0.1) -> list[Point]:
    """Closed polyline around a rectangle, with rounded corners when rx/ry > 0."""
    if rx <= 0 and ry <= 0:
        return [(x, y), (x + w, y), (x + w, y + h), (x, y + h), (x, y)]
    if rx <= 0:
        rx = ry
    if ry <= 0:
        ry = rx
    rx = min(rx, w / 2)
    ry = min(ry, h / 2)
    steps = max(2, int(math.ceil((math.pi / 2) / _arc_step(max(rx, ry), tol))))

    def corner(cx_, cy_, a0):
        return [(cx_ + rx * math.cos(a0 + (math.pi / 2) * k / steps),
                 cy_ + ry * math.sin(a0 + (math.pi / 2) * k / steps))
                for k in range(steps + 1)]

    pts: list[Point] = []
    pts += corner(x + w - rx, y + ry, -math.pi / 2)       # top-right
    pts += corner(x + w - rx, y + h - ry, 0.0)            # bottom-right
    pts += corner(x + rx, y + h - ry, math.pi / 2)        # bottom-left
    pts += corner(x + rx, y + ry, math.pi)                # top-left
    pts.append(pts[0])
    return pts


def node_fill_outlines(node: SvgNode, tol: float = 0.1
                       ) -> list[tuple[list[Point], bool]]:
    """Outline polylines used for filling a shape node (user space)."""
    k = node.kind
    g = node.geom
    if k is NodeKind.RECT:
        pts = rect_outline(g["x"], g["y"], g["width"], g["height"],
                           g.get("rx", 0.0), g.get("ry", 0.0), tol)
        return [(pts, True)] if pts else []
    if k is NodeKind.CIRCLE:
        pts = ellipse_outline(g["cx"], g["cy"], g["r"], g["r"], tol)
        return [(pts, True)] if pts else []
    if k is NodeKind.ELLIPSE:
        pts = ellipse_outline(g["cx"], g["cy"], g["rx"], g["ry"], tol)
        return [(pts, True)] if pts else []
    if k is NodeKind.POLYGON:
        pts = [(g["points"][i], g["points"][i + 1]) for i in range(0, len(g["points"]), 2)]
        pts.append(pts[0])
        return [(pts, True)]
    if k is NodeKind.POLYLINE:
        # An unclosed polyline still fills as if closed (SVG semantics).
        pts = [(g["points"][i], g["points"][i + 1]) for i in range(0, len(g["points"]), 2)]
        return [(pts, False)]
    if k is NodeKind.PATH:
        return flatten_path(g["commands"], tol)
    if k is NodeKind.LINE:
        return []  # lines have no fill
    return []


def node_stroke_polylines(node: SvgNode, tol: float = 0.1
                          ) -> list[tuple[list[Point], bool]]:
    """Centerline polylines used for stroking a shape node (user space)."""
    k = node.kind
    g = node.geom
    if k is NodeKind.LINE:
        return [([(g["x1"], g["y1"]), (g["x2"], g["y2"])], False)]
    return node_fill_outlines(node, tol)
