"""Binary format gate for model outputs.

A conforming output is exactly one think block followed, up to whitespace,
by exactly one renderable SVG block and nothing else.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from ..core.normalize import normalize_viewbox
from ..core.parse import parse_svg
from ..errors import RenderError, SvgForgeError
from ..raster.render import rasterize


class FormatFailure(Enum):
    NO_THINK = "NoThink"
    MULTIPLE_THINK = "MultipleThink"
    NO_SVG = "NoSvg"
    MULTIPLE_SVG = "MultipleSvg"
    TRAILING_THINK = "TrailingThink"
    RENDER_FAIL = "RenderFail"
    PARSE_FAIL = "ParseFail"


@dataclass(frozen=True)
class FormatResult:
    ok: bool
    think_text: str | None = None
    svg_text: str | None = None
    failure_reason: FormatFailure | None = None

    def __post_init__(self):
        if self.ok and (self.think_text is None or self.svg_text is None
                        or self.failure_reason is not None):
            raise ValueError("ok result must carry both blocks and no failure")


@dataclass(frozen=True)
class ModelOutput:
    raw_text: str


_THINK_RE = re.compile(r"<think>(.*?)</think>", re.DOTALL)
_SVG_RE = re.compile(r"<svg\b.*?</svg>", re.DOTALL)


def check_format(out: ModelOutput, render_size: int = 256,
                 strict: bool = True) -> FormatResult:
    """Gate an output on structure plus an actual render of the SVG block."""
    text = out.raw_text

    thinks = list(_THINK_RE.finditer(text))
    if not thinks:
        return FormatResult(ok=False, failure_reason=FormatFailure.NO_THINK)
    if len(thinks) > 1:
        return FormatResult(ok=False, failure_reason=FormatFailure.MULTIPLE_THINK)

    svgs = list(_SVG_RE.finditer(text))
    if not svgs:
        return FormatResult(ok=False, failure_reason=FormatFailure.NO_SVG)
    if len(svgs) > 1:
        return FormatResult(ok=False, failure_reason=FormatFailure.MULTIPLE_SVG)

    think, svg = thinks[0], svgs[0]
    think_text = think.group(1).strip()
    svg_text = svg.group(0)

    # Outside the two blocks only whitespace may remain; the think block
    # must come first.
    before = text[:think.start()]
    between = text[think.end():svg.start()]
    after = text[svg.end():]
    if svg.start() < think.end() or before.strip() or between.strip() or after.strip():
        return FormatResult(ok=False, failure_reason=FormatFailure.TRAILING_THINK)

    try:
        doc = parse_svg(svg_text, strict=strict)
    except SvgForgeError:
        return FormatResult(ok=False, failure_reason=FormatFailure.PARSE_FAIL)
    try:
        rasterize(normalize_viewbox(doc), render_size)
    except (RenderError, SvgForgeError, ValueError, OverflowError):
        return FormatResult(ok=False, failure_reason=FormatFailure.RENDER_FAIL)

    return FormatResult(ok=True, think_text=think_text, svg_text=svg_text)
