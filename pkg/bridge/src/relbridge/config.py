"""Server configuration: which model to load and which facets to expose."""
from __future__ import annotations

from dataclasses import dataclass

FLAGS = ("classify", "classify_stochastic", "embed", "classify_embedding",
         "generate", "sample", "step")

# everything the bundled model family supports; "step" stays out unless
# the operator explicitly exposes per-piece distributions
BASE_FLAGS = frozenset(FLAGS) - {"step"}


@dataclass(frozen=True)
class BridgeConfig:
    """Validated at construction; loading failures surface later as
    protocol errors so a parent process always gets structured answers."""

    model: str = "tiny-code-v0"
    device: str = "cpu"
    max_tokens: int = 160
    temperature: float = 1.0
    disable: tuple[str, ...] = ()
    expose_step: bool = False

    def __post_init__(self) -> None:
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be at least 1")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        unknown = set(self.disable) - set(FLAGS)
        if unknown:
            raise ValueError(f"unknown capability flags: {sorted(unknown)}")
        flags = self.active_flags()
        if "step" in flags and "generate" not in flags:
            raise ValueError("exposing step requires generate")
        if "classify_embedding" in flags and "embed" not in flags:
            raise ValueError(
                "disabling embed requires disabling classify_embedding too")

    def active_flags(self) -> frozenset[str]:
        flags = set(BASE_FLAGS)
        if self.expose_step:
            flags.add("step")
        return frozenset(flags - set(self.disable))
