"""Scanline rasterizer for the shape/group subset.

Elements are painted in document order onto an opaque white canvas.  Fill
coverage is measured at ``supersample**2`` sample points per pixel with a
per-row scanline (nonzero or even-odd winding) and box-filtered down.
Strokes become filled outline polygons: per-segment quads plus join/cap
geometry, all consistently wound and filled with the nonzero rule.
Rendering is sequential and bit-deterministic.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image

from ..core.model import (
    Affine,
    Color,
    NodeKind,
    StyleAttrs,
    SvgDocument,
    SvgNode,
    UNSET,
)
from ..errors import RenderError
from .flatten import node_fill_outlines, node_stroke_polylines

Point = tuple[float, float]

DEFAULT_TOLERANCE = 0.1  # user units in 128-space


@dataclass(frozen=True, eq=False)
class Raster:
    """Immutable RGBA pixel buffer (straight alpha)."""

    data: np.ndarray  # (height, width, 4) uint8

    def __post_init__(self):
        d = self.data
        if d.ndim != 3 or d.shape[2] != 4 or d.dtype != np.uint8:
            raise ValueError("raster data must be (h, w, 4) uint8")
        d.setflags(write=False)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def pixels(self) -> bytes:
        return self.data.tobytes()

    def __eq__(self, other):
        return isinstance(other, Raster) and np.array_equal(self.data, other.data)

    @staticmethod
    def from_pixels(width: int, height: int, pixels: bytes) -> "Raster":
        if len(pixels) != width * height * 4:
            raise ValueError("pixel buffer length must be width*height*4")
        arr = np.frombuffer(pixels, dtype=np.uint8).reshape(height, width, 4).copy()
        return Raster(arr)


def write_png(img: Raster, path_or_fp) -> None:
    """Write as 8-bit RGBA PNG, non-interlaced."""
    Image.fromarray(img.data, mode="RGBA").save(path_or_fp, format="PNG")


def read_png(path_or_fp) -> Raster:
    with Image.open(path_or_fp) as im:
        return Raster(np.asarray(im.convert("RGBA"), dtype=np.uint8).copy())


def png_bytes(img: Raster) -> bytes:
    buf = io.BytesIO()
    write_png(img, buf)
    return buf.getvalue()


def raster_from_png_bytes(data: bytes) -> Raster:
    return read_png(io.BytesIO(data))


# --------------------------------------------------------------------------
# Inherited paint state
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _Paint:
    fill: Color | None
    stroke: Color | None
    stroke_width: float
    fill_rule: str
    linecap: str
    linejoin: str
    miter_limit: float
    alpha: float            # accumulated group x element opacity
    transform: Affine

    def child(self, style: StyleAttrs) -> "_Paint":
        t = self.transform
        if style.transform is not None:
            t = t @ style.transform
        return _Paint(
            fill=self.fill if style.fill is UNSET else style.fill,
            stroke=self.stroke if style.stroke is UNSET else style.stroke,
            stroke_width=self.stroke_width if style.stroke_width is UNSET else style.stroke_width,
            fill_rule=self.fill_rule if style.fill_rule is UNSET else style.fill_rule,
            linecap=self.linecap if style.stroke_linecap is UNSET else style.stroke_linecap,
            linejoin=self.linejoin if style.stroke_linejoin is UNSET else style.stroke_linejoin,
            miter_limit=self.miter_limit if style.miter_limit is UNSET else style.miter_limit,
            alpha=self.alpha * (1.0 if style.opacity is UNSET else style.opacity),
            transform=t,
        )


_ROOT_PAINT_DEFAULTS = dict(
    fill=Color(0, 0, 0), stroke=None, stroke_width=1.0, fill_rule="nonzero",
    linecap="butt", linejoin="miter", miter_limit=4.0, alpha=1.0,
)


# --------------------------------------------------------------------------
# Stroke outlining
# --------------------------------------------------------------------------

def _dedupe(points: list[Point]) -> list[Point]:
    out = [points[0]]
    for p in points[1:]:
        if p != out[-1]:
            out.append(p)
    return out


def _unit(dx: float, dy: float) -> Point:
    L = math.hypot(dx, dy)
    return (dx / L, dy / L) if L > 0 else (0.0, 0.0)


def _arc_points(center: Point, radius: float, a0: float, a1: float,
                tol: float) -> list[Point]:
    if radius <= 0:
        return []
    span = a1 - a0
    step = 2.0 * math.acos(max(-1.0, min(1.0, 1.0 - tol / radius)))
    steps = max(1, int(math.ceil(abs(span) / max(step, 1e-3))))
    return [(center[0] + radius * math.cos(a0 + span * k / steps),
             center[1] + radius * math.sin(a0 + span * k / steps))
            for k in range(steps + 1)]


def _ensure_positive(ring: list[Point]) -> list[Point]:
    area = 0.0
    for i in range(len(ring) - 1):
        x0, y0 = ring[i]
        x1, y1 = ring[i + 1]
        area += x0 * y1 - x1 * y0
    return ring if area >= 0 else ring[::-1]


def stroke_outline(points: list[Point], closed: bool, width: float,
                   linecap: str = "butt", linejoin: str = "miter",
                   miter_limit: float = 4.0, tol: float = DEFAULT_TOLERANCE
                   ) -> list[list[Point]]:
    """Rings (consistently wound) whose nonzero fill equals the stroked line."""
    pts = _dedupe(points)
    if closed and len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    if len(pts) < 2:
        return []
    o = width / 2.0
    if o <= 0:
        return []
    rings: list[list[Point]] = []

    n_pts = len(pts)
    seg_count = n_pts if closed else n_pts - 1
    normals = []
    for i in range(seg_count):
        p, q = pts[i], pts[(i + 1) % n_pts]
        ux, uy = _unit(q[0] - p[0], q[1] - p[1])
        normals.append((uy, -ux))  # right-hand normal

    # Segment quads.
    for i in range(seg_count):
        p, q = pts[i], pts[(i + 1) % n_pts]
        nx, ny = normals[i]
        ring = [
            (p[0] + nx * o, p[1] + ny * o),
            (q[0] + nx * o, q[1] + ny * o),
            (q[0] - nx * o, q[1] - ny * o),
            (p[0] - nx * o, p[1] - ny * o),
        ]
        ring.append(ring[0])
        rings.append(_ensure_positive(ring))

    # Join wedges at interior vertices.
    joint_range = range(n_pts) if closed else range(1, n_pts - 1)
    for j in joint_range:
        n_prev = normals[(j - 1) % seg_count]
        n_next = normals[j % seg_count]
        cross = n_prev[0] * n_next[1] - n_prev[1] * n_next[0]
        if abs(cross) < 1e-12:
            continue
        # Outer side of the turn: the normals pointing away from the bend.
        sign = 1.0 if cross > 0 else -1.0
        a = (pts[j][0] + sign * n_prev[0] * o, pts[j][1] + sign * n_prev[1] * o)
        b = (pts[j][0] + sign * n_next[0] * o, pts[j][1] + sign * n_next[1] * o)
        if linejoin == "round":
            a0 = math.atan2(a[1] - pts[j][1], a[0] - pts[j][0])
            a1 = math.atan2(b[1] - pts[j][1], b[0] - pts[j][0])
            while a1 - a0 > math.pi:
                a1 -= 2 * math.pi
            while a1 - a0 < -math.pi:
                a1 += 2 * math.pi
            arc = _arc_points(pts[j], o, a0, a1, tol)
            ring = [pts[j], *arc, pts[j]]
        elif linejoin == "miter":
            mx, my = n_prev[0] + n_next[0], n_prev[1] + n_next[1]
            mlen = math.hypot(mx, my)
            ring = None
            if mlen > 1e-12:
                ux, uy = sign * mx / mlen, sign * my / mlen
                cos_half = ux * sign * n_prev[0] + uy * sign * n_prev[1]
                if cos_half > 1e-9:
                    tip_dist = o / cos_half
                    # SVG rule: bevel when miterLength/strokeWidth exceeds the
                    # limit; miterLength is twice the vertex-to-tip distance.
                    if tip_dist / o <= miter_limit:
                        m = (pts[j][0] + ux * tip_dist, pts[j][1] + uy * tip_dist)
                        ring = [pts[j], a, m, b, pts[j]]
            if ring is None:
                ring = [pts[j], a, b, pts[j]]
        else:  # bevel
            ring = [pts[j], a, b, pts[j]]
        rings.append(_ensure_positive(ring))

    # Caps on open ends.
    if not closed and linecap != "butt":
        for end, into in ((0, 1), (n_pts - 1, n_pts - 2)):
            p = pts[end]
            ux, uy = _unit(p[0] - pts[into][0], p[1] - pts[into][1])  # outward
            nx, ny = (uy, -ux)
            if linecap == "square":
                ring = [
                    (p[0] + nx * o, p[1] + ny * o),
                    (p[0] + nx * o + ux * o, p[1] + ny * o + uy * o),
                    (p[0] - nx * o + ux * o, p[1] - ny * o + uy * o),
                    (p[0] - nx * o, p[1] - ny * o),
                ]
                ring.append(ring[0])
            else:  # round
                # sweep from +normal to -normal through the outward direction
                a0 = math.atan2(ny, nx)
                arc = _arc_points(p, o, a0, a0 + math.pi, tol)
                ring = [*arc, arc[0]]
            rings.append(_ensure_positive(ring))

    return rings


# --------------------------------------------------------------------------
# Scanline coverage
# --------------------------------------------------------------------------

def _coverage(rings: list[np.ndarray], w: int, h: int, ss: int,
              fill_rule: str) -> np.ndarray | None:
    """Per-pixel coverage in [0, 1] from sample-point winding on a ss grid."""
    segs = []
    for ring in rings:
        if len(ring) >= 2:
            segs.append(np.column_stack([ring[:-1], ring[1:]]))
    if not segs:
        return None
    edges = np.concatenate(segs)  # columns: x0 y0 x1 y1
    x0, y0, x1, y1 = edges[:, 0], edges[:, 1], edges[:, 2], edges[:, 3]
    keep = y0 != y1
    x0, y0, x1, y1 = x0[keep], y0[keep], x1[keep], y1[keep]
    if x0.size == 0:
        return None

    Ws, Hs = w * ss, h * ss
    ymin = min(np.min(y0), np.min(y1))
    ymax = max(np.max(y0), np.max(y1))
    row_lo = max(0, int(math.floor(ymin * ss - 0.5)))
    row_hi = min(Hs - 1, int(math.ceil(ymax * ss)))
    if row_hi < row_lo:
        return None

    cover = np.zeros((Hs, Ws), dtype=np.float32)
    inv_dy = 1.0 / (y1 - y0)
    direction = np.where(y1 > y0, 1, -1).astype(np.int32)
    ylo = np.minimum(y0, y1)
    yhi = np.maximum(y0, y1)

    for row in range(row_lo, row_hi + 1):
        yc = (row + 0.5) / ss
        hit = (ylo <= yc) & (yc < yhi)
        if not np.any(hit):
            continue
        xs = x0[hit] + (yc - y0[hit]) * (x1[hit] - x0[hit]) * inv_dy[hit]
        ds = direction[hit]
        order = np.argsort(xs, kind="stable")
        xs = xs[order]
        ds = ds[order]
        if fill_rule == "evenodd":
            inside = (np.arange(len(xs)) % 2) == 0
            lefts = xs[inside]
            rights = xs[~inside] if len(xs) % 2 == 0 else np.append(xs[~inside], np.inf)
            spans = zip(lefts, rights)
        else:
            wind = np.cumsum(ds)
            nz = wind != 0
            spans = []
            open_x = None
            for k in range(len(xs)):
                if nz[k] and open_x is None:
                    open_x = xs[k]
                elif not nz[k] and open_x is not None:
                    spans.append((open_x, xs[k]))
                    open_x = None
            if open_x is not None:
                spans.append((open_x, np.inf))
        r = cover[row]
        for xl, xr in spans:
            c0 = max(0, int(math.ceil(xl * ss - 0.5)))
            c1 = min(Ws, int(math.ceil(xr * ss - 0.5)))
            if c1 > c0:
                r[c0:c1] += 1.0
    np.clip(cover, 0.0, 1.0, out=cover)
    return cover.reshape(h, ss, w, ss).mean(axis=(1, 3))


def _composite(canvas: np.ndarray, color: Color, alpha_map: np.ndarray,
               alpha_scale: float):
    a = alpha_map * alpha_scale
    if color.a is not None:
        a = a * (color.a / 255.0)
    src = np.array([color.r, color.g, color.b], dtype=np.float64) / 255.0
    canvas[:, :, :3] = canvas[:, :, :3] * (1.0 - a)[:, :, None] + src[None, None, :] * a[:, :, None]


def _transform_ring(ring: list[Point], t: Affine) -> np.ndarray:
    arr = np.asarray(ring, dtype=np.float64)
    out = np.empty_like(arr)
    with np.errstate(over="ignore", invalid="ignore"):
        out[:, 0] = t.a * arr[:, 0] + t.c * arr[:, 1] + t.e
        out[:, 1] = t.b * arr[:, 0] + t.d * arr[:, 1] + t.f
    if not np.all(np.isfinite(out)):
        raise RenderError("non-finite coordinate after transform")
    return out


def _paint_node(node: SvgNode, paint: _Paint, canvas: np.ndarray,
                w: int, h: int, ss: int, tol: float):
    p = paint.child(node.style)
    if node.kind is NodeKind.DEFS or node.kind is NodeKind.USE:
        return  # definitions are not painted; <use> without href resolves to nothing
    if node.kind is NodeKind.GROUP:
        for child in node.children:
            _paint_node(child, p, canvas, w, h, ss, tol)
        return

    if p.fill is not None:
        outlines = node_fill_outlines(node, tol)
        rings = []
        for pts, _closed in outlines:
            ring = list(pts)
            if ring and ring[0] != ring[-1]:
                ring.append(ring[0])
            if len(ring) >= 3:
                rings.append(_transform_ring(ring, p.transform))
        if rings:
            cov = _coverage(rings, w, h, ss, p.fill_rule)
            if cov is not None:
                _composite(canvas, p.fill, cov, p.alpha)

    if p.stroke is not None and p.stroke_width > 0:
        polylines = node_stroke_polylines(node, tol)
        rings = []
        for pts, closed in polylines:
            for ring in stroke_outline(pts, closed, p.stroke_width,
                                       p.linecap, p.linejoin, p.miter_limit, tol):
                rings.append(_transform_ring(ring, p.transform))
        if rings:
            cov = _coverage(rings, w, h, ss, "nonzero")
            if cov is not None:
                _composite(canvas, p.stroke, cov, p.alpha)


def rasterize(doc: SvgDocument, out_size: int, supersample: int = 4,
              tolerance: float = DEFAULT_TOLERANCE) -> Raster:
    """Render a normalized document (viewBox 0 0 S S) to ``out_size`` pixels."""
    if out_size < 16:
        raise ValueError(f"out_size must be >= 16, got {out_size}")
    if supersample < 1:
        raise ValueError(f"supersample must be >= 1, got {supersample}")
    mx, my, vw, vh = doc.view_box
    if mx != 0 or my != 0 or vw != vh:
        raise ValueError("document must be normalized to a square 0-origin viewBox")

    scale = out_size / vw
    device = Affine.scale(scale)
    canvas = np.ones((out_size, out_size, 3), dtype=np.float64)
    canvas = np.concatenate([canvas, np.ones((out_size, out_size, 1))], axis=2)

    root = _Paint(transform=device, **_ROOT_PAINT_DEFAULTS)
    for node in doc.root_children:
        _paint_node(node, root, canvas, out_size, out_size, supersample, tolerance)

    rgba = np.clip(np.rint(canvas * 255.0), 0, 255).astype(np.uint8)
    return Raster(rgba)


def to_luminance(img: Raster) -> np.ndarray:
    """Rec. 709 luma of the alpha-over-white composite, scaled to [0, 1]."""
    d = img.data.astype(np.float64)
    a = d[:, :, 3:4] / 255.0
    rgb = d[:, :, :3] * a + 255.0 * (1.0 - a)
    return (0.2126 * rgb[:, :, 0] + 0.7152 * rgb[:, :, 1] + 0.0722 * rgb[:, :, 2]) / 255.0
