"""Errors carrying the stable wire codes the protocol promises."""
from __future__ import annotations


class BridgeError(Exception):
    code = "internal"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class LoadError(BridgeError):
    """Model checkpoint missing, malformed, or unusable on this device."""
    code = "model_error"


class Unsupported(BridgeError):
    code = "missing_capability"


class WrongDimension(BridgeError):
    code = "dimension_mismatch"
