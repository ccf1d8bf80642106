"""HTTP embedding service implementing the POST /embed contract.

Request:  {"texts": ["...", ...]}
Response: {"dim": D, "vectors": [[f, ...], ...]} in request order.
Errors: 400 on malformed requests, 500 on inference failure.
"""

from __future__ import annotations

import fastapi
import uvicorn
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .export import Encoder


class EmbedRequest(BaseModel):
    texts: list[str]


def create_app(encoder: Encoder) -> fastapi.FastAPI:
    app = fastapi.FastAPI(title="embed-exporter")

    @app.exception_handler(fastapi.exceptions.RequestValidationError)
    async def _bad_request(request, exc):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.post("/embed")
    def embed(req: EmbedRequest):
        try:
            vectors = encoder.encode(req.texts)
        except Exception as exc:  # surfaced as a 500 with the cause
            return JSONResponse(status_code=500, content={"error": str(exc)})
        return {"dim": encoder.dim, "vectors": vectors.tolist()}

    return app


def serve(model_name: str, pooling: str = "mean", port: int = 8000,
          host: str = "127.0.0.1", device: str = "cpu") -> None:
    encoder = Encoder(model_name, pooling, device)
    uvicorn.run(create_app(encoder), host=host, port=port, log_level="warning")
