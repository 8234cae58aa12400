"""The request loop: handshake, then answer label queries line by line.

Protocol (newline-delimited JSON):
  handshake (server -> client, first line):  {"num_classes": <int>}
  request:   {"id": <int>, "width": <int>, "height": <int>,
              "pixels": "<base64 of row-major 8-bit RGB bytes>"}
  response:  {"id": <int>, "label": <int>}
  error:     {"id": <echoed or null>, "error": "<message>"}

Bad requests get an error response and the loop continues; only a failure
inside the wrapped model tears the server down.
"""

from __future__ import annotations

import base64
import binascii
import json
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Preprocess:
    """Optional resize / normalization applied before the wrapped model."""

    size: int | None = None  # nearest-neighbor resize to size x size
    mean: tuple[float, float, float] | None = None
    std: tuple[float, float, float] | None = None

    def __call__(self, img: np.ndarray) -> np.ndarray:
        if self.size is not None and img.shape[:2] != (self.size, self.size):
            rows = (np.arange(self.size) * img.shape[0] // self.size)
            cols = (np.arange(self.size) * img.shape[1] // self.size)
            img = img[rows][:, cols]
        if self.mean is not None:
            img = img - np.asarray(self.mean)
        if self.std is not None:
            img = img / np.asarray(self.std)
        return img


@dataclass
class BridgeConfig:
    """What to serve: a label function, its arity, and optional preprocessing."""

    predict: Callable[[np.ndarray], int]
    num_classes: int
    preprocess: Preprocess | None = None

    def __post_init__(self):
        if self.num_classes < 1:
            raise ValueError("num_classes must be >= 1")


class _BadRequest(Exception):
    pass


def _decode_request(req) -> tuple[int, np.ndarray]:
    if not isinstance(req, dict):
        raise _BadRequest("request must be a JSON object")
    missing = [key for key in ("id", "width", "height", "pixels") if key not in req]
    if missing:
        raise _BadRequest(f"request missing fields: {', '.join(missing)}")
    width, height = req["width"], req["height"]
    if not isinstance(width, int) or not isinstance(height, int) or width < 1 or height < 1:
        raise _BadRequest("width and height must be positive integers")
    try:
        raw = base64.b64decode(req["pixels"], validate=True)
    except (binascii.Error, TypeError, ValueError) as exc:
        raise _BadRequest(f"pixels is not valid base64: {exc}") from exc
    if len(raw) != 3 * width * height:
        raise _BadRequest(
            f"pixel payload has {len(raw)} bytes, expected {3 * width * height}")
    img = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3)
    return req["id"], img.astype(np.float64) / 255.0


def serve(config: BridgeConfig, reader, writer) -> None:
    """Emit the handshake, then answer requests until the stream ends."""

    def respond(payload: dict) -> None:
        writer.write(json.dumps(payload, separators=(",", ":")) + "\n")
        writer.flush()

    respond({"num_classes": config.num_classes})
    for line in reader:
        if not line.strip():
            continue
        try:
            req = json.loads(line)
        except json.JSONDecodeError as exc:
            respond({"id": None, "error": f"unparseable request: {exc}"})
            continue
        try:
            request_id, img = _decode_request(req)
        except _BadRequest as exc:
            echoed = req.get("id") if isinstance(req, dict) else None
            respond({"id": echoed, "error": str(exc)})
            continue
        if config.preprocess is not None:
            img = config.preprocess(img)
        label = int(config.predict(img))  # model failures tear the server down
        respond({"id": request_id, "label": label})
