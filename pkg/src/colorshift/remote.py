"""Client for classifiers served over the newline-delimited JSON protocol.

The server sends one handshake line ``{"num_classes": <int>}`` on start,
then answers each request ``{"id", "width", "height", "pixels"}`` (pixels
is base64 of row-major 8-bit RGB) with ``{"id", "label"}``.  Responses may
arrive out of order and are matched by id.  A failed query raises instead
of returning, so attack trial counts stay exact; no retries are attempted.
"""

from __future__ import annotations

import base64
import json
import socket
import subprocess
import sys

import numpy as np

from .colorspace import rgb_to_uint8
from .errors import LabelRangeError, RemoteProtocolError, TransportError
from .validation import check_image_batch


class RemoteClassifier:
    """Queries a remote label server one image at a time over line streams."""

    thread_safe = False  # one connection, serialized queries

    def __init__(self, reader, writer, process: subprocess.Popen | None = None):
        self._reader = reader
        self._writer = writer
        self._process = process
        self._next_id = 0
        self._pending: dict[int, int] = {}
        self.num_classes = self._read_handshake()

    @classmethod
    def spawn(cls, command: list[str]) -> "RemoteClassifier":
        """Start a server subprocess and talk to it over stdin/stdout."""
        proc = subprocess.Popen(command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                stderr=sys.stderr, text=True)
        return cls(proc.stdout, proc.stdin, process=proc)

    @classmethod
    def connect(cls, host: str, port: int) -> "RemoteClassifier":
        """Connect to a server listening on a TCP port."""
        try:
            sock = socket.create_connection((host, port))
        except OSError as exc:
            raise TransportError(f"cannot connect to {host}:{port}: {exc}") from exc
        reader = sock.makefile("r", encoding="utf-8", newline="\n")
        writer = sock.makefile("w", encoding="utf-8", newline="\n")
        client = cls(reader, writer)
        client._socket = sock
        return client

    def _read_line(self) -> str:
        try:
            line = self._reader.readline()
        except OSError as exc:
            raise TransportError(f"read from classifier server failed: {exc}") from exc
        if line == "":
            raise TransportError("classifier server closed the connection")
        return line

    def _read_handshake(self) -> int:
        line = self._read_line()
        try:
            msg = json.loads(line)
            num_classes = msg["num_classes"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise RemoteProtocolError(f"bad handshake line {line!r}") from exc
        if not isinstance(num_classes, int) or num_classes < 1:
            raise RemoteProtocolError(f"handshake num_classes must be a positive int, got {num_classes!r}")
        return num_classes

    def _write_request(self, request: dict) -> None:
        try:
            self._writer.write(json.dumps(request, separators=(",", ":")) + "\n")
            self._writer.flush()
        except (OSError, ValueError) as exc:
            raise TransportError(f"write to classifier server failed: {exc}") from exc

    def _await_response(self, request_id: int) -> int:
        while request_id not in self._pending:
            line = self._read_line()
            try:
                msg = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RemoteProtocolError(f"unparseable response line {line!r}") from exc
            if not isinstance(msg, dict) or "id" not in msg:
                raise RemoteProtocolError(f"response without an id: {line!r}")
            if "error" in msg:
                raise RemoteProtocolError(f"server error for id {msg['id']}: {msg['error']}")
            label = msg.get("label")
            if not isinstance(msg["id"], int) or not isinstance(label, int):
                raise RemoteProtocolError(f"malformed response {line!r}")
            self._pending[msg["id"]] = label
        return self._pending.pop(request_id)

    def _query_one(self, img: np.ndarray) -> int:
        request_id = self._next_id
        self._next_id += 1
        height, width = img.shape[0], img.shape[1]
        payload = base64.b64encode(rgb_to_uint8(img).tobytes()).decode("ascii")
        self._write_request({"id": request_id, "width": width, "height": height,
                             "pixels": payload})
        label = self._await_response(request_id)
        if not 0 <= label < self.num_classes:
            raise LabelRangeError(
                f"server returned label {label} outside [0, {self.num_classes})")
        return label

    def predict(self, X) -> np.ndarray:
        X = check_image_batch(X)
        return np.array([self._query_one(img) for img in X], dtype=np.int64)

    def close(self) -> None:
        for stream in (self._writer, self._reader):
            try:
                stream.close()
            except OSError:
                pass
        if self._process is not None:
            self._process.terminate()
            self._process.wait(timeout=10)
        sock = getattr(self, "_socket", None)
        if sock is not None:
            sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()
