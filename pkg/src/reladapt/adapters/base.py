"""Adapter interface and capability declarations."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError, MissingCapability

CAPABILITY_FLAGS = ("classify", "classify_stochastic", "embed",
                    "classify_embedding", "generate", "sample", "step")


@dataclass(frozen=True)
class AdapterCapabilities:
    """What an adapter can do, plus its label set and token vocabulary.

    Implication invariants: step implies generate, classify_embedding
    implies embed.
    """
    flags: frozenset[str]
    labels: tuple[str, ...] = ()
    vocabulary: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        unknown = self.flags - set(CAPABILITY_FLAGS)
        if unknown:
            raise ConfigError(f"unknown capability flags: {sorted(unknown)}")
        if "step" in self.flags and "generate" not in self.flags:
            raise ConfigError("capability 'step' requires 'generate'")
        if "classify_embedding" in self.flags and "embed" not in self.flags:
            raise ConfigError("capability 'classify_embedding' requires 'embed'")

    def supports(self, flag: str) -> bool:
        return flag in self.flags


class Adapter:
    """Inference surface; operations raise MissingCapability by default.

    Concrete adapters override what they support and must keep every
    overridden operation deterministic for fixed inputs and seeds.
    """

    adapter_id = "adapter"

    def capabilities(self) -> AdapterCapabilities:
        raise NotImplementedError

    def _unsupported(self, op: str):
        raise MissingCapability(f"{self.adapter_id} does not support {op}")

    def classify(self, program: str):
        self._unsupported("classify")

    def classify_stochastic(self, program: str, seed: int):
        self._unsupported("classify_stochastic")

    def embed(self, program: str) -> tuple[float, ...]:
        self._unsupported("embed")

    def classify_embedding(self, embedding):
        self._unsupported("classify_embedding")

    def generate(self, prompt, max_len: int = 160):
        self._unsupported("generate")

    def sample(self, prompt, n: int, temperature: float = 1.0,
               seed: int = 0, max_len: int = 160):
        self._unsupported("sample")

    def step(self, prefix):
        self._unsupported("step")

    def close(self) -> None:
        pass


def make_adapter(spec: str, **kwargs) -> Adapter:
    """Build an adapter from a selector: "builtin:name" or "cmd:...".

    The cmd form launches the given command line and speaks the wire
    protocol with it over stdin/stdout.
    """
    from .classifier import MockClassifier
    from .generator import MockGenerator
    from .protocol import SubprocessAdapter

    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        if name == "classifier":
            return MockClassifier(**kwargs)
        if name == "generator":
            return MockGenerator(**kwargs)
        raise ConfigError(f"unknown builtin adapter: {name}")
    if spec.startswith("cmd:"):
        return SubprocessAdapter(spec.split(":", 1)[1])
    raise ConfigError(f"adapter selector must be builtin:<name> or cmd:<...>: {spec}")
