"""The SVG-specific token vocabulary.

Token classes, in id order: 49 tag tokens, 35 attribute tokens, 257 integer
tokens (-128..128), 100 two-decimal fractional tokens (.00-.99), 10
one-decimal fractional tokens (.0-.9), and 256 byte-fallback tokens that
stand in for the base tokenizer.  Construction is pure, so ids are stable
across processes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

VOCAB_VERSION = 1

# Tag tokens, grouped by role: root, grouping, shapes, text, gradients,
# clipping, filters.  Only the shape/group subset is renderable; the rest
# exist so token streams for arbitrary SVG remain expressible.
TAG_TOKENS: tuple[str, ...] = (
    "<svg", "</svg>", "<defs", "</defs>", "<use", "</use>", "/>",
    "<g", "</g>",
    "<path", "</path>", "<rect", "</rect>", "<circle", "</circle>",
    "<ellipse", "</ellipse>", "<line", "</line>", "<polyline", "</polyline>",
    "<polygon", "</polygon>",
    "<text", "</text>", "<tspan", "</tspan>", "<textPath", "</textPath>",
    "<linearGradient", "</linearGradient>", "<radialGradient", "</radialGradient>",
    "<stop", "</stop>",
    "<clipPath", "</clipPath>", "<mask", "</mask>",
    "<filter", "</filter>", "<feGaussianBlur", "</feGaussianBlur>",
    "<feColorMatrix", "</feColorMatrix>", "<feComposite", "</feComposite>",
    "<feBlend", "</feBlend>",
)

# Attribute tokens: geometry, styling, transform, text, gradients, identifiers.
ATTR_TOKENS: tuple[str, ...] = (
    'width="', 'height="', 'viewBox="', 'x="', 'y="', 'x1="', 'y1="',
    'x2="', 'y2="', 'cx="', 'cy="', 'r="', 'rx="', 'ry="', 'd="', 'points="',
    'fill="', 'stroke="', 'stroke-width="', 'stroke-linecap="',
    'stroke-linejoin="', 'stroke-miterlimit="', 'fill-rule="', 'opacity="',
    'transform="',
    'font-size="', 'font-family="', 'text-anchor="',
    'gradientUnits="', 'gradientTransform="', 'offset="', 'stop-color="',
    'id="', 'class="', 'clip-path="',
)

INT_MIN = -128
INT_MAX = 128

CLASS_TAG = "tag"
CLASS_ATTR = "attr"
CLASS_INT = "int"
CLASS_FRAC2 = "frac2"
CLASS_FRAC1 = "frac1"
CLASS_BYTE = "byte"


def _byte_text(b: int) -> str:
    return f"<0x{b:02X}>"


@dataclass(frozen=True)
class Vocabulary:
    tag_tokens: tuple[str, ...]
    attr_tokens: tuple[str, ...]
    int_tokens: tuple[str, ...]
    frac2_tokens: tuple[str, ...]
    frac1_tokens: tuple[str, ...]
    id_of: dict[str, int] = field(repr=False)
    text_of: tuple[str, ...] = field(repr=False)
    class_of: tuple[str, ...] = field(repr=False)
    byte_base: int = 0  # id of byte token 0x00

    @property
    def size(self) -> int:
        return len(self.text_of)

    def byte_id(self, b: int) -> int:
        return self.byte_base + b

    def is_byte(self, token_id: int) -> bool:
        return self.byte_base <= token_id < self.byte_base + 256

    def token_class(self, token_id: int) -> str:
        return self.class_of[token_id]


def build_vocabulary() -> Vocabulary:
    """Construct the vocabulary with deterministic ids (table order, then
    integers ascending, then fractional tokens, then the 256 byte tokens)."""
    int_tokens = tuple(str(i) for i in range(INT_MIN, INT_MAX + 1))
    frac2_tokens = tuple(f".{i:02d}" for i in range(100))
    frac1_tokens = tuple(f".{i}" for i in range(10))

    texts: list[str] = []
    classes: list[str] = []
    for toks, cls in (
        (TAG_TOKENS, CLASS_TAG),
        (ATTR_TOKENS, CLASS_ATTR),
        (int_tokens, CLASS_INT),
        (frac2_tokens, CLASS_FRAC2),
        (frac1_tokens, CLASS_FRAC1),
    ):
        texts.extend(toks)
        classes.extend(cls for _ in toks)
    byte_base = len(texts)
    for b in range(256):
        texts.append(_byte_text(b))
        classes.append(CLASS_BYTE)

    id_of = {t: i for i, t in enumerate(texts)}
    if len(id_of) != len(texts):
        raise AssertionError("vocabulary contains duplicate token strings")

    return Vocabulary(
        tag_tokens=TAG_TOKENS,
        attr_tokens=ATTR_TOKENS,
        int_tokens=int_tokens,
        frac2_tokens=frac2_tokens,
        frac1_tokens=frac1_tokens,
        id_of=id_of,
        text_of=tuple(texts),
        class_of=tuple(classes),
        byte_base=byte_base,
    )


_DEFAULT: Vocabulary | None = None


def default_vocabulary() -> Vocabulary:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = build_vocabulary()
    return _DEFAULT


def vocabulary_to_json(vocab: Vocabulary) -> str:
    """Versioned JSON export with stable ids."""
    tokens = [
        {"id": i, "text": vocab.text_of[i], "class": vocab.class_of[i]}
        for i in range(vocab.size)
    ]
    return json.dumps({"version": VOCAB_VERSION, "tokens": tokens},
                      ensure_ascii=False, separators=(",", ":"))


def vocabulary_from_json(text: str) -> Vocabulary:
    data = json.loads(text)
    if data.get("version") != VOCAB_VERSION:
        raise ValueError(f"unsupported vocabulary version: {data.get('version')}")
    vocab = build_vocabulary()
    for entry in data["tokens"]:
        i = entry["id"]
        if vocab.text_of[i] != entry["text"] or vocab.class_of[i] != entry["class"]:
            raise ValueError(f"vocabulary file disagrees with built-in table at id {i}")
    return vocab
