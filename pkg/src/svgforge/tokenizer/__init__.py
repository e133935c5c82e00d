"""SVG-specific tokenizer: vocabulary, codec, embedding initialization."""

from .codec import TokenSequence, decode, encode, quantize_number
from .embed_init import init_embeddings
from .vocab import (
    ATTR_TOKENS,
    INT_MAX,
    INT_MIN,
    TAG_TOKENS,
    VOCAB_VERSION,
    Vocabulary,
    build_vocabulary,
    default_vocabulary,
    vocabulary_from_json,
    vocabulary_to_json,
)

__all__ = [
    "ATTR_TOKENS",
    "INT_MAX",
    "INT_MIN",
    "TAG_TOKENS",
    "TokenSequence",
    "VOCAB_VERSION",
    "Vocabulary",
    "build_vocabulary",
    "decode",
    "default_vocabulary",
    "encode",
    "init_embeddings",
    "quantize_number",
    "vocabulary_from_json",
    "vocabulary_to_json",
]
