"""Subword-average initialization for the SVG-specific token embeddings."""

from __future__ import annotations

from typing import Callable, Iterable

import numpy as np

from ..errors import MissingSubwordError
from .vocab import CLASS_BYTE, Vocabulary


def init_embeddings(
    vocab: Vocabulary,
    base_subword_fn: Callable[[str], Iterable[str]],
    base_lookup: Callable[[str], "np.ndarray"],
) -> dict[int, np.ndarray]:
    """Initial embedding for each non-byte token: the arithmetic mean of the
    base-tokenizer subword embeddings of its text.

    ``base_subword_fn`` splits a token string into base subwords and
    ``base_lookup`` maps each subword to its pretrained vector.  Byte tokens
    belong to the base tokenizer itself and are skipped.
    """
    out: dict[int, np.ndarray] = {}
    dim: int | None = None
    for token_id in range(vocab.size):
        if vocab.token_class(token_id) == CLASS_BYTE:
            continue
        text = vocab.text_of[token_id]
        subwords = list(base_subword_fn(text))
        if not subwords:
            raise MissingSubwordError(f"no subwords for token {text!r}")
        vectors = []
        for sw in subwords:
            try:
                v = np.asarray(base_lookup(sw), dtype=np.float64)
            except KeyError as exc:
                raise MissingSubwordError(f"no base embedding for subword {sw!r}") from exc
            if v.ndim != 1:
                raise MissingSubwordError(f"subword {sw!r} vector is not 1-D")
            vectors.append(v)
        mean = np.mean(vectors, axis=0)
        if dim is None:
            dim = mean.shape[0]
        elif mean.shape[0] != dim:
            raise MissingSubwordError(
                f"dimension mismatch for token {text!r}: {mean.shape[0]} != {dim}")
        if not np.all(np.isfinite(mean)):
            raise MissingSubwordError(f"non-finite embedding for token {text!r}")
        out[token_id] = mean
    return out
