"""Reward components and the gated total.

Components: a [0,1] visual similarity from shifted cosine of image
embeddings, a raw-cosine image-text similarity in [-1,1], and a quadratic
length penalty 1 - (max(0, L_gen - L_gt/2) / L_gt)^2 which is deliberately
unbounded below.  A failed format check gates the weighted sum to exactly
zero.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from ..core.model import SvgDocument
from ..core.normalize import normalize_viewbox
from ..core.serialize import serialize
from ..core.structure import code_length
from ..errors import ZeroGroundTruthLengthError
from ..raster.render import Raster, rasterize
from .embedders import EmbedderPort
from .format_check import FormatResult, ModelOutput, check_format


@dataclass(frozen=True)
class RewardWeights:
    """Component weights; the default normalizes the 2:1:1 ratio to unit sum."""

    w_dino: float = 0.5
    w_lclip: float = 0.25
    w_eff: float = 0.25

    def __post_init__(self):
        if min(self.w_dino, self.w_lclip, self.w_eff) < 0:
            raise ValueError("weights must be non-negative")

    @property
    def total(self) -> float:
        return self.w_dino + self.w_lclip + self.w_eff


@dataclass
class RewardBreakdown:
    r_format: int
    r_dino: float = 0.0
    r_lclip: float = 0.0
    r_eff: float = 0.0
    r_total: float = 0.0
    lengths: tuple[int, int] = (0, 0)  # (L_gen, L_gt)
    failure_reason: str | None = None
    timings_ms: dict[str, float] = field(default_factory=dict)

    def to_dict(self, include_timings: bool = False) -> dict:
        out = {
            "r_format": self.r_format,
            "r_dino": self.r_dino,
            "r_lclip": self.r_lclip,
            "r_eff": self.r_eff,
            "r_total": self.r_total,
            "lengths": {"gen": self.lengths[0], "gt": self.lengths[1]},
            "failure_reason": self.failure_reason,
        }
        if include_timings:
            out["timings_ms"] = {k: round(v, 3) for k, v in self.timings_ms.items()}
        return out

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings), sort_keys=True)


def dino_reward(gen: Raster, gt: Raster, embedder: EmbedderPort) -> float:
    """Shifted cosine of the two image embeddings, in [0, 1]."""
    e_gen = embedder.embed_image(gen, model="dino")
    e_gt = embedder.embed_image(gt, model="dino")
    cos = float(np.dot(e_gen, e_gt) / (np.linalg.norm(e_gen) * np.linalg.norm(e_gt)))
    return (cos + 1.0) / 2.0


def lclip_reward(gen: Raster, instruction: str, embedder: EmbedderPort) -> float:
    """Raw cosine of image and text embeddings, in [-1, 1] (not shifted)."""
    if not instruction:
        raise ValueError("instruction must be non-empty")
    e_img = embedder.embed_image(gen, model="lclip-image")
    e_txt = embedder.embed_text(instruction, model="lclip-text")
    e_img = e_img / np.linalg.norm(e_img)
    e_txt = e_txt / np.linalg.norm(e_txt)
    return float(np.dot(e_img, e_txt))


def efficiency_reward(l_gen: int, l_gt: int, clamp_at_zero: bool = False) -> float:
    """1 - (max(0, L_gen - L_gt/2) / L_gt)^2; <= 1, unbounded below by default."""
    if l_gt <= 0:
        raise ZeroGroundTruthLengthError(f"ground-truth length must be positive, got {l_gt}")
    if l_gen < 0:
        raise ValueError(f"generated length must be non-negative, got {l_gen}")
    excess = max(0.0, l_gen - l_gt / 2.0)
    r = 1.0 - (excess / l_gt) ** 2
    return max(0.0, r) if clamp_at_zero else r


def total_reward(fmt: FormatResult, r_dino: float, r_lclip: float, r_eff: float,
                 weights: RewardWeights = RewardWeights()) -> float:
    """Weighted sum gated multiplicatively by the binary format result."""
    if not fmt.ok:
        return 0.0
    return weights.w_dino * r_dino + weights.w_lclip * r_lclip + weights.w_eff * r_eff


def score(
    out: ModelOutput,
    context,
    gt_doc: SvgDocument,
    embedder: EmbedderPort,
    weights: RewardWeights = RewardWeights(),
    length_mode: str = "svg_tokens",
    render_size: int = 256,
    supersample: int = 4,
    strict: bool = True,
    clamp_efficiency: bool = False,
) -> RewardBreakdown:
    """Full reward pipeline for one sampled output against its ground truth.

    ``context`` is the task sample (its instruction drives the image-text
    reward) or a bare instruction string.  L_gt is measured on the
    canonically serialized ground-truth code; L_gen on the SVG block
    extracted from the output, both in ``length_mode``.
    """
    instruction = context if isinstance(context, str) else context.instruction
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    fmt = check_format(out, render_size=render_size, strict=strict)
    timings["format"] = (time.perf_counter() - t0) * 1000.0

    if not fmt.ok:
        return RewardBreakdown(
            r_format=0, r_total=0.0,
            failure_reason=fmt.failure_reason.value if fmt.failure_reason else None,
            timings_ms=timings,
        )

    t0 = time.perf_counter()
    gen_raster = rasterize(normalize_viewbox(parse_gen(fmt.svg_text, strict)),
                           render_size, supersample)
    gt_raster = rasterize(normalize_viewbox(gt_doc), render_size, supersample)
    timings["render"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    r_dino = dino_reward(gen_raster, gt_raster, embedder)
    timings["dino"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    r_lclip = lclip_reward(gen_raster, instruction, embedder)
    timings["lclip"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    l_gen = code_length(fmt.svg_text, length_mode)
    l_gt = code_length(serialize(gt_doc, "compact"), length_mode)
    r_eff = efficiency_reward(l_gen, l_gt, clamp_at_zero=clamp_efficiency)
    timings["efficiency"] = (time.perf_counter() - t0) * 1000.0

    r_total = total_reward(fmt, r_dino, r_lclip, r_eff, weights)
    return RewardBreakdown(
        r_format=1, r_dino=r_dino, r_lclip=r_lclip, r_eff=r_eff, r_total=r_total,
        lengths=(l_gen, l_gt), timings_ms=timings,
    )


def parse_gen(svg_text: str, strict: bool) -> SvgDocument:
    from ..core.parse import parse_svg

    return parse_svg(svg_text, strict=strict)
