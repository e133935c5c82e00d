"""AST types for the supported SVG subset.

All types are immutable after construction; equality is structural.  A
document's ``source_hash`` records provenance and is excluded from equality,
so ``parse(serialize(doc)) == doc`` expresses the round-trip fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, NamedTuple

from ..errors import DegenerateViewBoxError, SvgSyntaxError


class _Unset:
    """Singleton marking a style attribute that was not specified."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNSET"


UNSET = _Unset()

#: The 16 basic CSS color keywords.
CSS_BASIC_COLORS = {
    "black": (0, 0, 0),
    "silver": (192, 192, 192),
    "gray": (128, 128, 128),
    "white": (255, 255, 255),
    "maroon": (128, 0, 0),
    "red": (255, 0, 0),
    "purple": (128, 0, 128),
    "fuchsia": (255, 0, 255),
    "green": (0, 128, 0),
    "lime": (0, 255, 0),
    "olive": (128, 128, 0),
    "yellow": (255, 255, 0),
    "navy": (0, 0, 128),
    "blue": (0, 0, 255),
    "teal": (0, 128, 128),
    "aqua": (0, 255, 255),
}


@dataclass(frozen=True)
class Color:
    """sRGB color as bytes; ``a`` is render-only (no serialized syntax)."""

    r: int
    g: int
    b: int
    a: int | None = None

    def __post_init__(self):
        for v in (self.r, self.g, self.b):
            if not 0 <= v <= 255:
                raise ValueError(f"color channel out of range: {v}")
        if self.a is not None and not 0 <= self.a <= 255:
            raise ValueError(f"alpha out of range: {self.a}")


@dataclass(frozen=True)
class Affine:
    """2x3 affine transform mapping (x, y) -> (a*x + c*y + e, b*x + d*y + f)."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    @staticmethod
    def identity() -> "Affine":
        return Affine(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)

    @staticmethod
    def translate(tx: float, ty: float = 0.0) -> "Affine":
        return Affine(1.0, 0.0, 0.0, 1.0, tx, ty)

    @staticmethod
    def scale(sx: float, sy: float | None = None) -> "Affine":
        return Affine(sx, 0.0, 0.0, sx if sy is None else sy, 0.0, 0.0)

    @staticmethod
    def rotate(deg: float, cx: float = 0.0, cy: float = 0.0) -> "Affine":
        t = math.radians(deg)
        cos_t, sin_t = math.cos(t), math.sin(t)
        rot = Affine(cos_t, sin_t, -sin_t, cos_t, 0.0, 0.0)
        if cx == 0.0 and cy == 0.0:
            return rot
        return Affine.translate(cx, cy) @ rot @ Affine.translate(-cx, -cy)

    @staticmethod
    def skew_x(deg: float) -> "Affine":
        return Affine(1.0, 0.0, math.tan(math.radians(deg)), 1.0, 0.0, 0.0)

    @staticmethod
    def skew_y(deg: float) -> "Affine":
        return Affine(1.0, math.tan(math.radians(deg)), 0.0, 1.0, 0.0, 0.0)

    def __matmul__(self, other: "Affine") -> "Affine":
        """Compose transforms; ``other`` is applied first."""
        a1, b1, c1, d1, e1, f1 = self.a, self.b, self.c, self.d, self.e, self.f
        a2, b2, c2, d2, e2, f2 = other.a, other.b, other.c, other.d, other.e, other.f
        return Affine(
            a1 * a2 + c1 * b2,
            b1 * a2 + d1 * b2,
            a1 * c2 + c1 * d2,
            b1 * c2 + d1 * d2,
            a1 * e2 + c1 * f2 + e1,
            b1 * e2 + d1 * f2 + f1,
        )

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return (self.a * x + self.c * y + self.e, self.b * x + self.d * y + self.f)

    def inverse(self) -> "Affine":
        det = self.a * self.d - self.b * self.c
        if det == 0:
            raise ValueError("singular transform")
        ia, ib = self.d / det, -self.b / det
        ic, id_ = -self.c / det, self.a / det
        return Affine(ia, ib, ic, id_, -(ia * self.e + ic * self.f), -(ib * self.e + id_ * self.f))

    def is_identity(self) -> bool:
        return self == Affine.identity()

    def max_scale(self) -> float:
        """Upper bound on how much the linear part stretches a unit vector."""
        return max(math.hypot(self.a, self.b), math.hypot(self.c, self.d))


class PathCmd(NamedTuple):
    """One canonical (absolute) path command: M, L, C, Q, A or Z."""

    op: str
    args: tuple[float, ...]


class NodeKind(Enum):
    GROUP = "g"
    DEFS = "defs"
    USE = "use"
    PATH = "path"
    RECT = "rect"
    CIRCLE = "circle"
    ELLIPSE = "ellipse"
    LINE = "line"
    POLYLINE = "polyline"
    POLYGON = "polygon"


CONTAINER_KINDS = frozenset({NodeKind.GROUP, NodeKind.DEFS})
SHAPE_KINDS = frozenset(NodeKind) - CONTAINER_KINDS - {NodeKind.USE}


@dataclass(frozen=True)
class StyleAttrs:
    """Styling attributes of a node; UNSET fields inherit during rendering.

    Paint values: a :class:`Color`, or ``None`` for the explicit keyword
    ``none`` (no paint).
    """

    fill: Color | None | _Unset = UNSET
    stroke: Color | None | _Unset = UNSET
    stroke_width: float | _Unset = UNSET
    fill_rule: str | _Unset = UNSET          # "nonzero" | "evenodd"
    opacity: float | _Unset = UNSET
    stroke_linecap: str | _Unset = UNSET     # "butt" | "round" | "square"
    stroke_linejoin: str | _Unset = UNSET    # "miter" | "round" | "bevel"
    miter_limit: float | _Unset = UNSET
    transform: Affine | None = None
    class_id: str | None = None
    elem_id: str | None = None

    def __post_init__(self):
        if self.opacity is not UNSET and not 0.0 <= self.opacity <= 1.0:
            raise ValueError(f"opacity out of range: {self.opacity}")
        if self.stroke_width is not UNSET and self.stroke_width < 0:
            raise ValueError(f"negative stroke-width: {self.stroke_width}")
        if self.fill_rule is not UNSET and self.fill_rule not in ("nonzero", "evenodd"):
            raise ValueError(f"bad fill-rule: {self.fill_rule}")


EMPTY_STYLE = StyleAttrs()


@dataclass(frozen=True)
class SvgNode:
    """One element of the tree.  ``geom`` holds kind-specific numeric fields:

    - rect: x, y, width, height, optional rx, ry
    - circle: cx, cy, r
    - ellipse: cx, cy, rx, ry
    - line: x1, y1, x2, y2
    - polyline/polygon: points (flat tuple of floats)
    - path: commands (tuple of PathCmd)
    - use: x, y
    """

    kind: NodeKind
    geom: dict[str, Any] = field(default_factory=dict)
    style: StyleAttrs = EMPTY_STYLE
    children: tuple["SvgNode", ...] = ()
    comment: str = ""

    def __post_init__(self):
        if self.children and self.kind not in CONTAINER_KINDS:
            raise SvgSyntaxError(f"<{self.kind.value}> cannot have child elements")
        if self.kind is NodeKind.PATH:
            cmds = self.geom.get("commands", ())
            if not cmds:
                raise SvgSyntaxError("path has no commands")
            if cmds[0].op != "M":
                raise SvgSyntaxError("path must begin with a move command")
        if self.kind in (NodeKind.POLYLINE, NodeKind.POLYGON):
            pts = self.geom.get("points", ())
            if len(pts) < 4 or len(pts) % 2 != 0:
                raise SvgSyntaxError(
                    f"<{self.kind.value}> needs an even coordinate count >= 4, got {len(pts)}"
                )


@dataclass(frozen=True)
class SvgDocument:
    """Parsed document: viewBox plus ordered root children.

    ``source_hash`` is an opaque digest of the originating text; it carries
    provenance only and does not participate in equality.
    """

    view_box: tuple[float, float, float, float]
    root_children: tuple[SvgNode, ...] = ()
    source_hash: str = field(default="", compare=False)

    def __post_init__(self):
        _, _, w, h = self.view_box
        if not (w > 0 and h > 0):
            raise DegenerateViewBoxError(f"viewBox has non-positive size: {w} x {h}")

    def structurally_equal(self, other: "SvgDocument") -> bool:
        return self == other


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


class Issue(NamedTuple):
    severity: Severity
    node_path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...]

    @property
    def ok(self) -> bool:
        return not any(i.severity is Severity.ERROR for i in self.issues)

    @property
    def warnings(self) -> tuple[Issue, ...]:
        return tuple(i for i in self.issues if i.severity is Severity.WARNING)
