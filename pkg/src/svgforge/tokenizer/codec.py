"""Encode SVG text to token ids and decode ids back to text.

Encoding is greedy longest-match over the tag/attribute strings; numeric
literals are lexed as units and quantized (round half away from zero) to an
integer token plus an optional fractional token; whitespace between tokens
is dropped; everything else falls back to byte tokens.

With ``fallback=False`` the encoder acts as a strictness check for
canonical 128-space SVG: numbers whose integer part leaves [-128, 128]
raise TokenRangeError and non-ASCII characters raise TokenizeError (ASCII
punctuation such as ``>`` and ``"`` is always representable as byte
tokens, mirroring the base tokenizer the vocabulary extends).

Decoding inserts the minimal separators SVG needs (a space between a tag
token and a following attribute token, spaces between numbers, a ``>``
before a tag token that directly follows an unclosed open tag) so that
``decode(encode(x))`` parses to a document structurally equal to
``parse(x)`` for canonically serialized x.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from ..errors import TokenizeError, TokenRangeError, UnknownTokenIdError
from .vocab import (
    CLASS_ATTR,
    CLASS_BYTE,
    CLASS_FRAC1,
    CLASS_FRAC2,
    CLASS_INT,
    CLASS_TAG,
    INT_MAX,
    INT_MIN,
    Vocabulary,
)

_NUMBER_RE = re.compile(r"[-+]?(?:\d+(?:\.\d+)?|\.\d+)")
_HEX_DIGITS = frozenset("0123456789abcdefABCDEF")


@dataclass(frozen=True)
class TokenSequence:
    ids: tuple[int, ...]
    byte_spans: tuple[tuple[int, int], ...] = ()

    def __len__(self) -> int:
        return len(self.ids)


def _build_trie(vocab: Vocabulary) -> dict:
    """Map first char -> list of (token_text, token_id) sorted longest first."""
    trie: dict[str, list[tuple[str, int]]] = {}
    for text in (*vocab.tag_tokens, *vocab.attr_tokens):
        trie.setdefault(text[0], []).append((text, vocab.id_of[text]))
    for bucket in trie.values():
        bucket.sort(key=lambda p: len(p[0]), reverse=True)
    return trie


_TRIE_CACHE: dict[int, tuple[Vocabulary, dict]] = {}


def _trie_for(vocab: Vocabulary) -> dict:
    key = id(vocab)
    cached = _TRIE_CACHE.get(key)
    if cached is None or cached[0] is not vocab:
        cached = (vocab, _build_trie(vocab))
        _TRIE_CACHE[key] = cached
    return cached[1]


def quantize_number(text: str) -> tuple[str, str]:
    """Split a numeric literal into (integer-part text, fraction token text).

    The value is rounded to two decimals, half away from zero; a single
    significant decimal yields a one-decimal fraction token; a fraction of
    zero yields no fraction token (empty string).
    """
    q = Decimal(text).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    sign = "-" if q < 0 else ""
    whole, dot, frac = format(abs(q), "f").partition(".")
    if frac == "00":
        frac_tok = ""
    elif frac[1] == "0":
        frac_tok = f".{frac[0]}"
    else:
        frac_tok = f".{frac}"
    return sign + whole, frac_tok


def _ends_numeric(token_id: int, vocab: Vocabulary) -> bool:
    cls = vocab.token_class(token_id)
    if cls in (CLASS_INT, CLASS_FRAC2, CLASS_FRAC1):
        return True
    if cls == CLASS_BYTE:
        return chr(token_id - vocab.byte_base) in "0123456789."
    return False


def _emit_bytes(out_ids: list, out_spans: list, vocab: Vocabulary,
                text: str, start: int, end: int, fallback: bool):
    for off, ch in enumerate(text[start:end]):
        data = ch.encode("utf-8")
        if len(data) > 1 and not fallback:
            raise TokenizeError(
                f"non-ASCII character {ch!r} at offset {start + off} (use fallback=True)")
        for b in data:
            out_ids.append(vocab.byte_id(b))
            out_spans.append((start + off, start + off + 1))


def encode(text: str, vocab: Vocabulary, fallback: bool = True) -> TokenSequence:
    """Tokenize SVG text; see module docstring for the rules."""
    trie = _trie_for(vocab)
    ids: list[int] = []
    spans: list[tuple[int, int]] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue

        if ch == "<" and text.startswith("<!--", i):
            # Comments are opaque: bytes pass through verbatim, whitespace
            # included, so comment text survives the round trip.
            end = text.find("-->", i + 4)
            end = (end + 3) if end >= 0 else n
            _emit_bytes(ids, spans, vocab, text, i, end, fallback)
            i = end
            continue

        bucket = trie.get(ch)
        if bucket is not None:
            matched = False
            for tok_text, tok_id in bucket:
                if text.startswith(tok_text, i):
                    ids.append(tok_id)
                    spans.append((i, i + len(tok_text)))
                    i += len(tok_text)
                    matched = True
                    break
            if matched:
                continue

        if ch == "#":
            # Hex colors: emit '#' and the following hex digits as bytes so
            # the digits are never mistaken for numeric literals.
            j = i + 1
            while j < n and j - i <= 8 and text[j] in _HEX_DIGITS:
                j += 1
            _emit_bytes(ids, spans, vocab, text, i, j, fallback)
            i = j
            continue

        m = _NUMBER_RE.match(text, i)
        if m:
            literal = m.group(0)
            int_text, frac_tok = quantize_number(literal)
            int_val = int(int_text)
            if not INT_MIN <= int_val <= INT_MAX:
                if not fallback:
                    raise TokenRangeError(
                        f"integer part {int_text} outside [{INT_MIN}, {INT_MAX}] "
                        f"at offset {i}")
                # Keep a space byte so the digit run cannot merge with a
                # preceding number once whitespace is dropped.
                if ids and _ends_numeric(ids[-1], vocab):
                    ids.append(vocab.byte_id(0x20))
                    spans.append((i, i))
                _emit_bytes(ids, spans, vocab, text, i, m.end(), True)
                i = m.end()
                continue
            dot = literal.find(".")
            int_span_end = m.end() if dot < 0 else i + dot
            emitted = False
            if int_text == "-0":
                # No "-0" integer token; keep the sign as a byte.
                ids.append(vocab.byte_id(ord("-")))
                spans.append((i, i + 1))
                ids.append(vocab.id_of["0"])
                spans.append((i + 1, max(i + 1, int_span_end)))
                emitted = True
            elif not (literal.startswith(".") or literal.startswith("-.")
                      or literal.startswith("+.")):
                ids.append(vocab.id_of[int_text])
                spans.append((i, int_span_end))
                emitted = True
            if frac_tok:
                ids.append(vocab.id_of[frac_tok])
                spans.append((max(i, int_span_end), m.end()))
                emitted = True
            if not emitted:
                # Bare fraction that quantized to zero (".0", "-.0", ...).
                ids.append(vocab.id_of["0"])
                spans.append((i, m.end()))
            i = m.end()
            continue

        _emit_bytes(ids, spans, vocab, text, i, i + 1, fallback)
        i += 1

    return TokenSequence(ids=tuple(ids), byte_spans=tuple(spans))


def _is_tag_open(text: str) -> bool:
    return text.startswith("<") and not text.startswith("</")


def decode(tokens: TokenSequence, vocab: Vocabulary) -> str:
    """Reassemble token ids into SVG text (inverse of encode at parse level)."""
    parts: list[str] = []
    byte_buf = bytearray()
    prev_class: str | None = None
    prev_text = ""
    numeric = (CLASS_INT, CLASS_FRAC2, CLASS_FRAC1)

    def flush_bytes():
        nonlocal prev_class, prev_text
        if byte_buf:
            decoded = byte_buf.decode("utf-8", errors="replace")
            sep = ""
            # A digit run (byte-fallback number) must not merge with a
            # preceding numeric token.
            if prev_class in numeric and decoded[0] in "0123456789.":
                sep = " "
            parts.append(sep + decoded)
            prev_class = CLASS_BYTE
            prev_text = decoded[-1:] if decoded else ""
            byte_buf.clear()

    for tok_id in tokens.ids:
        if not 0 <= tok_id < vocab.size:
            raise UnknownTokenIdError(f"token id {tok_id} out of range")
        cls = vocab.token_class(tok_id)
        if cls == CLASS_BYTE:
            byte_buf.append(tok_id - vocab.byte_base)
            continue
        flush_bytes()
        text = vocab.text_of[tok_id]

        sep = ""
        if prev_class == CLASS_TAG and _is_tag_open(prev_text):
            if cls == CLASS_TAG:
                sep = ">"       # close the open tag before the next one
            elif cls == CLASS_ATTR:
                sep = " "
            elif cls in (CLASS_INT, CLASS_FRAC2, CLASS_FRAC1):
                sep = " "
        elif prev_class == CLASS_INT and cls == CLASS_INT:
            sep = " "
        elif prev_class in (CLASS_FRAC2, CLASS_FRAC1) and cls in numeric:
            sep = " "
        elif prev_class == CLASS_BYTE and prev_text == '"' and cls == CLASS_ATTR:
            sep = " "
        elif (prev_class == CLASS_BYTE and cls in numeric
              and prev_text in "0123456789." and prev_text != ""):
            sep = " "

        parts.append(sep + text)
        prev_class = cls
        prev_text = text

    flush_bytes()
    return "".join(parts)
