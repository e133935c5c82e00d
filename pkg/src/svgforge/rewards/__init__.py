"""Multi-reward scoring: format gate, visual/semantic/efficiency components."""

from .compute import (
    RewardBreakdown,
    RewardWeights,
    dino_reward,
    efficiency_reward,
    lclip_reward,
    score,
    total_reward,
)
from .embedders import BlockLumaEmbedder, EmbedderPort, HttpEmbedder, resolve_embedder
from .format_check import FormatFailure, FormatResult, ModelOutput, check_format

__all__ = [
    "BlockLumaEmbedder",
    "EmbedderPort",
    "FormatFailure",
    "FormatResult",
    "HttpEmbedder",
    "ModelOutput",
    "RewardBreakdown",
    "RewardWeights",
    "check_format",
    "dino_reward",
    "efficiency_reward",
    "lclip_reward",
    "resolve_embedder",
    "score",
    "total_reward",
]
