"""Adapter that serves a framework-hosted image classifier over a
newline-delimited JSON label protocol (stdin/stdout or TCP).

The server is stateless per request and never caches, so a client
counting queries gets exact numbers.
"""

from .mlp import MlpWeights, load_mlp_file, mlp_predictor
from .server import BridgeConfig, Preprocess, serve

__version__ = "0.1.0"
