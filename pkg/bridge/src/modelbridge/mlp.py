"""Standalone reader for the flat binary MLP checkpoint format.

The file is a 16-byte header (magic ``MLPW`` plus little-endian uint32
input, hidden and class sizes) followed by little-endian float32 arrays
W1 (input x hidden, row-major), b1, W2 (hidden x classes), b2.  The
forward pass is relu(x @ W1 + b1) @ W2 + b2 with argmax ties resolved to
the lowest class index.
"""

from __future__ import annotations

import struct
from typing import Callable, NamedTuple

import numpy as np

_HEADER = struct.Struct("<4sIII")
_MAGIC = b"MLPW"


class MlpWeights(NamedTuple):
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    @property
    def num_classes(self) -> int:
        return self.W2.shape[1]

    @property
    def input_dim(self) -> int:
        return self.W1.shape[0]


def load_mlp_file(path) -> MlpWeights:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise ValueError("model file shorter than its header")
    magic, input_dim, hidden, n_classes = _HEADER.unpack_from(blob)
    if magic != _MAGIC:
        raise ValueError(f"bad model magic {magic!r}")
    counts = [input_dim * hidden, hidden, hidden * n_classes, n_classes]
    expected = _HEADER.size + 4 * sum(counts)
    if len(blob) != expected:
        raise ValueError(f"model file has {len(blob)} bytes, expected {expected}")
    flat = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).astype(np.float64)
    if not np.all(np.isfinite(flat)):
        raise ValueError("model file contains non-finite parameters")
    offsets = np.cumsum([0] + counts)
    return MlpWeights(
        W1=flat[offsets[0]:offsets[1]].reshape(input_dim, hidden),
        b1=flat[offsets[1]:offsets[2]],
        W2=flat[offsets[2]:offsets[3]].reshape(hidden, n_classes),
        b2=flat[offsets[3]:offsets[4]],
    )


def mlp_predictor(weights: MlpWeights) -> Callable[[np.ndarray], int]:
    """Label function over one float image shaped (height, width, 3)."""

    def predict(img: np.ndarray) -> int:
        x = np.asarray(img, dtype=np.float64).reshape(1, -1)
        if x.shape[1] != weights.input_dim:
            raise ValueError(
                f"image has {x.shape[1]} values, model expects {weights.input_dim}")
        hidden = np.maximum(x @ weights.W1 + weights.b1, 0.0)
        scores = hidden @ weights.W2 + weights.b2
        return int(scores.argmax(axis=1)[0])

    return predict
