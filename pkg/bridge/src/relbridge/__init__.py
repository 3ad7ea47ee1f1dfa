"""A reference model server speaking the reliability engine's adapter
protocol: a checkpointed subword classifier and bigram generator served
over line-delimited JSON, launchable as a cmd: adapter."""

from .config import BridgeConfig
from .errors import BridgeError, LoadError
from .model import TinyCodeModel
from .server import handle_request, serve, serve_config

__version__ = "0.1.0"

__all__ = ["BridgeConfig", "BridgeError", "LoadError", "TinyCodeModel",
           "handle_request", "serve", "serve_config", "__version__"]
