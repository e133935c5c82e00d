"""Embedding ports for the visual and semantic rewards.

An embedder maps rasters and instruction text to unit-norm vectors.  The
builtin test double works offline and deterministically: images become a
mean-centered 8x8 grid of block luminances, text becomes a rolling-hash
character-trigram histogram, both L2-normalized to 64 dimensions.  The
HTTP embedder speaks the embed-service wire format and selects the model
per call (dino for visual similarity, lclip-image/lclip-text for the
image-text reward).
"""

from __future__ import annotations

import base64
import json
from typing import Protocol

import numpy as np

from ..errors import EmbedderError
from ..raster.render import Raster, png_bytes, to_luminance


class EmbedderPort(Protocol):
    """Deterministic image/text feature extractors returning unit vectors."""

    name: str

    def embed_image(self, img: Raster, model: str = "dino") -> np.ndarray: ...

    def embed_text(self, text: str, model: str = "lclip-text") -> np.ndarray: ...


def _normalize(v: np.ndarray) -> np.ndarray:
    """Unit-normalize; a degenerate all-zero vector falls back to basis e0 so
    the unit-norm contract holds for any input."""
    n = float(np.linalg.norm(v))
    if n <= 1e-12:
        out = np.zeros_like(v)
        out[0] = 1.0
        return out
    return v / n


class BlockLumaEmbedder:
    """Offline test double behind the same port as the real extractors."""

    name = "builtin:block-luma"
    dim = 64

    def embed_image(self, img: Raster, model: str = "dino") -> np.ndarray:
        lum = to_luminance(img)
        h, w = lum.shape
        blocks = np.empty(64, dtype=np.float64)
        ys = np.linspace(0, h, 9).astype(int)
        xs = np.linspace(0, w, 9).astype(int)
        k = 0
        for i in range(8):
            for j in range(8):
                cell = lum[ys[i]:max(ys[i + 1], ys[i] + 1),
                           xs[j]:max(xs[j + 1], xs[j] + 1)]
                blocks[k] = float(cell.mean())
                k += 1
        centered = blocks - blocks.mean()
        if float(np.linalg.norm(centered)) <= 1e-12:
            return _normalize(blocks)  # constant image: keep raw magnitudes
        return _normalize(centered)

    def embed_text(self, text: str, model: str = "lclip-text") -> np.ndarray:
        hist = np.zeros(64, dtype=np.float64)
        data = text.encode("utf-8")
        h = 0
        for i, b in enumerate(data):
            h = (h * 31 + b) & 0xFFFFFFFF
            if i >= 2:
                hist[h % 64] += 1.0
        if len(data) < 3:  # too short for trigrams: fall back to bytes
            for b in data:
                hist[b % 64] += 1.0
        return _normalize(hist)


class HttpEmbedder:
    """Client for the embed-service /v1/embed endpoint."""

    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.name = base_url

    def _post(self, payload: dict) -> np.ndarray:
        import requests

        try:
            resp = requests.post(f"{self.base_url}/v1/embed", json=payload,
                                 timeout=self.timeout)
        except requests.RequestException as exc:
            raise EmbedderError(f"embed service unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise EmbedderError(
                f"embed service returned {resp.status_code}: {resp.text[:200]}")
        try:
            body = resp.json()
            vec = np.asarray(body["vector"], dtype=np.float64)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise EmbedderError(f"bad embed service response: {exc}") from exc
        if vec.ndim != 1 or not np.all(np.isfinite(vec)):
            raise EmbedderError("embed service returned a malformed vector")
        return _normalize(vec)

    def embed_image(self, img: Raster, model: str = "dino") -> np.ndarray:
        payload = {
            "kind": "image",
            "payload": base64.b64encode(png_bytes(img)).decode("ascii"),
            "model": model,
        }
        return self._post(payload)

    def embed_text(self, text: str, model: str = "lclip-text") -> np.ndarray:
        return self._post({"kind": "text", "payload": text, "model": model})


def resolve_embedder(uri: str) -> EmbedderPort:
    """Select an embedder by URI: builtin:block-luma or http(s)://host:port."""
    if uri == "builtin:block-luma":
        return BlockLumaEmbedder()
    if uri.startswith("http://") or uri.startswith("https://"):
        return HttpEmbedder(uri)
    raise EmbedderError(f"unknown embedder URI: {uri!r}")
