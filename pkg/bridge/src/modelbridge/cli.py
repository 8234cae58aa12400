"""Command-line server: wrap a checkpoint or a user loader and serve it.

By default the protocol runs over stdin/stdout, so an attack client can
spawn the bridge as a subprocess; --port listens on TCP instead and
serves connections one at a time.

A custom loader is named as ``module:callable``; the callable takes no
arguments and returns ``(predict_fn, num_classes)`` where predict_fn maps
one float image shaped (height, width, 3) in [0, 1] to a label.
"""

from __future__ import annotations

import argparse
import importlib
import socket
import sys

from .mlp import load_mlp_file, mlp_predictor
from .server import BridgeConfig, Preprocess, serve


def _triple(text: str) -> tuple[float, float, float]:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated floats")
    return tuple(parts)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="model-bridge",
                                     description="serve an image classifier over "
                                                 "newline-delimited JSON")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--mlp", help="path to a binary MLP checkpoint")
    source.add_argument("--loader", help="module:callable returning (predict_fn, num_classes)")
    parser.add_argument("--port", type=int, help="listen on TCP instead of stdin/stdout")
    parser.add_argument("--resize", type=int, help="nearest-neighbor resize before the model")
    parser.add_argument("--mean", type=_triple, help="per-channel mean to subtract, r,g,b")
    parser.add_argument("--std", type=_triple, help="per-channel std to divide by, r,g,b")
    return parser


def _load_config(args) -> BridgeConfig:
    if args.mlp:
        weights = load_mlp_file(args.mlp)
        predict, num_classes = mlp_predictor(weights), weights.num_classes
    else:
        module_name, _, attr = args.loader.partition(":")
        if not module_name or not attr:
            raise ValueError("--loader must look like package.module:callable")
        loader = getattr(importlib.import_module(module_name), attr)
        predict, num_classes = loader()
    preprocess = None
    if args.resize or args.mean or args.std:
        preprocess = Preprocess(size=args.resize, mean=args.mean, std=args.std)
    return BridgeConfig(predict=predict, num_classes=num_classes, preprocess=preprocess)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args)
    except (OSError, ValueError, ImportError, AttributeError) as exc:
        print(f"cannot load model: {exc}", file=sys.stderr)
        return 2
    if args.port is None:
        serve(config, sys.stdin, sys.stdout)
        return 0
    server = socket.create_server(("127.0.0.1", args.port))
    try:
        while True:
            conn, _ = server.accept()
            with conn, conn.makefile("r") as reader, conn.makefile("w") as writer:
                serve(config, reader, writer)
    except KeyboardInterrupt:
        return 0
    finally:
        server.close()


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
