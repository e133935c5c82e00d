"""FastAPI application exposing /v1/embed and /v1/health.

Wire contract: POST /v1/embed with {"kind": "image"|"text", "payload":
base64-PNG-or-text, "model": "dino"|"lclip-image"|"lclip-text"} returns
{"vector", "dim", "model_id", "norm"} with the vector unit-normalized
server-side.  400 covers malformed requests and kind/model mismatches,
422 an undecodable image, 503 a model that is not ready.  Text longer
than the encoder limit is truncated and flagged via the
X-Text-Truncated response header, never rejected.  Request bodies are
capped at 8 MiB.  Handlers are stateless; extractors are read-only after
startup.
"""

from __future__ import annotations

import base64
import binascii
import os

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .extractors import ImageDecodeError, build_registry

MAX_BODY_BYTES = 8 * 1024 * 1024
VALID_KINDS = ("image", "text")


def create_app(model_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="embed-service", version="0.1.0")
    registry = build_registry(
        model_dir if model_dir is not None else os.environ.get("MODEL_DIR"))

    @app.middleware("http")
    async def limit_body(request: Request, call_next):
        length = request.headers.get("content-length")
        if length is not None and int(length) > MAX_BODY_BYTES:
            return JSONResponse({"error": "request body exceeds 8 MiB"},
                                status_code=413)
        return await call_next(request)

    @app.get("/v1/health")
    def health():
        models = [
            {"model_id": ex.model_id, "dim": ex.dim, "ready": ex.ready}
            for ex in registry.values()
        ]
        all_ready = all(m["ready"] for m in models)
        body = {"status": "ok" if all_ready else "loading", "models": models}
        return JSONResponse(body, status_code=200 if all_ready else 503)

    @app.post("/v1/embed")
    async def embed(request: Request):
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"error": "body is not valid JSON"},
                                status_code=400)
        if not isinstance(body, dict):
            return JSONResponse({"error": "body must be a JSON object"},
                                status_code=400)

        kind = body.get("kind")
        payload = body.get("payload")
        model_name = body.get("model")
        if kind not in VALID_KINDS:
            return JSONResponse({"error": f"kind must be one of {VALID_KINDS}"},
                                status_code=400)
        if model_name not in registry:
            return JSONResponse(
                {"error": f"unknown model {model_name!r}; expected one of "
                          f"{sorted(registry)}"},
                status_code=400)
        if not isinstance(payload, str) or not payload:
            return JSONResponse({"error": "payload must be a non-empty string"},
                                status_code=400)

        extractor = registry[model_name]
        if extractor.kind != kind:
            return JSONResponse(
                {"error": f"model {model_name!r} expects kind "
                          f"{extractor.kind!r}, got {kind!r}"},
                status_code=400)
        if not extractor.ready:
            return JSONResponse({"error": f"model {model_name!r} is not ready"},
                                status_code=503)

        headers = {}
        if kind == "image":
            try:
                raw = base64.b64decode(payload, validate=True)
            except (binascii.Error, ValueError):
                return JSONResponse({"error": "payload is not valid base64"},
                                    status_code=400)
            try:
                vector = extractor.embed(raw)
            except ImageDecodeError as exc:
                return JSONResponse({"error": f"undecodable image: {exc}"},
                                    status_code=422)
        else:
            vector, truncated = extractor.embed(payload)
            if truncated:
                headers["X-Text-Truncated"] = "true"

        norm = float(np.linalg.norm(vector))
        return JSONResponse(
            {
                "vector": [float(v) for v in vector],
                "dim": int(vector.shape[0]),
                "model_id": extractor.model_id,
                "norm": norm,
            },
            headers=headers,
        )

    return app


app = create_app()


def serve():
    """Console entry point; BIND_ADDR is host:port (default 0.0.0.0:8791)."""
    import uvicorn

    bind = os.environ.get("BIND_ADDR", "0.0.0.0:8791")
    host, _, port = bind.rpartition(":")
    uvicorn.run("embed_service.app:app", host=host or "0.0.0.0",
                port=int(port), log_level="info")
