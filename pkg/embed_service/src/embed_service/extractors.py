"""Feature extractors behind the embed endpoint.

Three models are served: "dino" (image), "lclip-image" (image) and
"lclip-text" (text).  When MODEL_DIR points at HuggingFace checkpoints
(subdirectories ``dino/`` and ``lclip/``) the extractors run the real
networks with fixed seeds and no dropout.  Without MODEL_DIR the service
falls back to deterministic closed-form extractors with the same wire
contract, so the endpoint stays fully testable on machines without
checkpoints; which backend is active is visible in ``model_id``.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image, UnidentifiedImageError


class ImageDecodeError(Exception):
    """Payload bytes are not a decodable PNG image."""


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n <= 1e-12:
        out = np.zeros_like(v)
        out[0] = 1.0
        return out
    return v / n


def decode_png(data: bytes) -> np.ndarray:
    """PNG bytes -> (h, w, 4) uint8, or ImageDecodeError."""
    try:
        with Image.open(io.BytesIO(data)) as im:
            return np.asarray(im.convert("RGBA"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise ImageDecodeError(str(exc)) from exc


def _luminance(rgba: np.ndarray) -> np.ndarray:
    d = rgba.astype(np.float64)
    a = d[:, :, 3:4] / 255.0
    rgb = d[:, :, :3] * a + 255.0 * (1.0 - a)
    return (0.2126 * rgb[:, :, 0] + 0.7152 * rgb[:, :, 1]
            + 0.0722 * rgb[:, :, 2]) / 255.0


@dataclass
class GridLumaImageExtractor:
    """Mean-centered grid of block luminances; deterministic and offline."""

    grid: int
    model_id: str
    kind: str = "image"
    ready: bool = True

    @property
    def dim(self) -> int:
        return self.grid * self.grid

    def embed(self, payload: bytes) -> np.ndarray:
        lum = _luminance(decode_png(payload))
        h, w = lum.shape
        ys = np.linspace(0, h, self.grid + 1).astype(int)
        xs = np.linspace(0, w, self.grid + 1).astype(int)
        blocks = np.empty(self.dim, dtype=np.float64)
        k = 0
        for i in range(self.grid):
            for j in range(self.grid):
                cell = lum[ys[i]:max(ys[i + 1], ys[i] + 1),
                           xs[j]:max(xs[j + 1], xs[j] + 1)]
                blocks[k] = float(cell.mean())
                k += 1
        centered = blocks - blocks.mean()
        if float(np.linalg.norm(centered)) <= 1e-12:
            return _unit(blocks)
        return _unit(centered)


@dataclass
class TrigramTextExtractor:
    """Rolling-hash character-trigram histogram; deterministic and offline."""

    dim: int
    model_id: str
    max_chars: int = 4096
    kind: str = "text"
    ready: bool = True

    def embed(self, payload: str) -> tuple[np.ndarray, bool]:
        truncated = len(payload) > self.max_chars
        text = payload[:self.max_chars]
        hist = np.zeros(self.dim, dtype=np.float64)
        data = text.encode("utf-8")
        h = 0
        for i, b in enumerate(data):
            h = (h * 31 + b) & 0xFFFFFFFF
            if i >= 2:
                hist[h % self.dim] += 1.0
        if len(data) < 3:
            for b in data:
                hist[b % self.dim] += 1.0
        return _unit(hist), truncated


@dataclass
class HfImageExtractor:
    """transformers-backed image encoder (e.g. a DINOv2 checkpoint)."""

    checkpoint: str
    model_id: str
    kind: str = "image"
    ready: bool = False
    load_error: str = ""
    _model: object = field(default=None, repr=False)
    _processor: object = field(default=None, repr=False)
    _dim: int = 0

    def load(self) -> None:
        try:
            import torch
            from transformers import AutoImageProcessor, AutoModel

            torch.manual_seed(0)
            self._processor = AutoImageProcessor.from_pretrained(self.checkpoint)
            self._model = AutoModel.from_pretrained(self.checkpoint).eval()
            self._dim = int(self._model.config.hidden_size)
            self.ready = True
        except Exception as exc:  # missing deps, bad checkpoint dir, ...
            self.load_error = str(exc)
            self.ready = False

    @property
    def dim(self) -> int:
        return self._dim

    def embed(self, payload: bytes) -> np.ndarray:
        import torch

        rgba = decode_png(payload)
        pil = Image.fromarray(rgba, "RGBA").convert("RGB")
        with torch.inference_mode():
            inputs = self._processor(images=pil, return_tensors="pt")
            out = self._model(**inputs)
        # pooled CLS-style feature
        vec = out.last_hidden_state[:, 0, :].squeeze(0).double().numpy()
        return _unit(vec)


@dataclass
class HfTextExtractor:
    """transformers-backed text encoder (e.g. a long-context CLIP text tower)."""

    checkpoint: str
    model_id: str
    kind: str = "text"
    ready: bool = False
    load_error: str = ""
    _model: object = field(default=None, repr=False)
    _tokenizer: object = field(default=None, repr=False)
    _dim: int = 0

    def load(self) -> None:
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer

            torch.manual_seed(0)
            self._tokenizer = AutoTokenizer.from_pretrained(self.checkpoint)
            self._model = AutoModel.from_pretrained(self.checkpoint).eval()
            self._dim = int(self._model.config.hidden_size)
            self.ready = True
        except Exception as exc:
            self.load_error = str(exc)
            self.ready = False

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def max_chars(self) -> int:
        limit = getattr(self._tokenizer, "model_max_length", 512)
        return int(min(limit, 8192)) * 8  # rough chars-per-token headroom

    def embed(self, payload: str) -> tuple[np.ndarray, bool]:
        import torch

        truncated = len(payload) > self.max_chars
        with torch.inference_mode():
            inputs = self._tokenizer(payload, return_tensors="pt",
                                     truncation=True)
            out = self._model(**inputs)
        vec = out.last_hidden_state[:, 0, :].squeeze(0).double().numpy()
        return _unit(vec), truncated


def build_registry(model_dir: str | None) -> dict[str, object]:
    """Model name -> extractor.  Hf backends when MODEL_DIR is set."""
    if model_dir:
        dino = HfImageExtractor(os.path.join(model_dir, "dino"),
                                model_id="hf:dino")
        lclip_img = HfImageExtractor(os.path.join(model_dir, "lclip"),
                                     model_id="hf:lclip-image")
        lclip_txt = HfTextExtractor(os.path.join(model_dir, "lclip"),
                                    model_id="hf:lclip-text")
        for ex in (dino, lclip_img, lclip_txt):
            ex.load()
        return {"dino": dino, "lclip-image": lclip_img, "lclip-text": lclip_txt}
    return {
        "dino": GridLumaImageExtractor(16, "builtin:grid-luma-16"),
        "lclip-image": GridLumaImageExtractor(8, "builtin:grid-luma-8"),
        "lclip-text": TrigramTextExtractor(64, "builtin:trigram-64"),
    }
