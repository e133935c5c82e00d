"""svgforge: a vector-graphics RL environment toolkit.

Parses and normalizes an SVG subset, rasterizes it deterministically,
tokenizes SVG text with a domain vocabulary, scores rollouts with a
multi-reward stack (format gate, visual, image-text, code efficiency),
evaluates the group-relative clipped-surrogate objective, and filters
datasets with SSIM thresholds.
"""

__version__ = "0.1.0"

from .core import (
    SvgDocument,
    SvgNode,
    code_length,
    extract_groups,
    normalize_viewbox,
    parse_svg,
    serialize,
    validate_structure,
)
from .grpo import (
    GrpoConfig,
    RolloutGroup,
    Trajectory,
    group_advantages,
    grpo_objective,
    objective_gradient,
)
from .raster import Raster, SsimParams, rasterize, ssim, to_luminance
from .rewards import (
    BlockLumaEmbedder,
    ModelOutput,
    RewardWeights,
    check_format,
    dino_reward,
    efficiency_reward,
    lclip_reward,
    score,
    total_reward,
)
from .tokenizer import build_vocabulary, decode, encode

__all__ = [
    "BlockLumaEmbedder",
    "GrpoConfig",
    "ModelOutput",
    "Raster",
    "RewardWeights",
    "RolloutGroup",
    "SsimParams",
    "SvgDocument",
    "SvgNode",
    "Trajectory",
    "build_vocabulary",
    "check_format",
    "code_length",
    "decode",
    "dino_reward",
    "efficiency_reward",
    "encode",
    "extract_groups",
    "grpo_objective",
    "group_advantages",
    "lclip_reward",
    "normalize_viewbox",
    "objective_gradient",
    "parse_svg",
    "rasterize",
    "score",
    "serialize",
    "ssim",
    "to_luminance",
    "total_reward",
    "validate_structure",
]
