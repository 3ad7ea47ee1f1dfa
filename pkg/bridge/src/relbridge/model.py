"""The wrapped model: a checkpointed linear classifier plus a subword
bigram language model sharing one tokenizer.

Classification pools the checkpoint's embedding rows over the input's
subword pieces and applies the trained head. Generation walks the
add-one-smoothed bigram table; greedy decoding breaks probability ties
by vocabulary index, and sampling is deterministic given seed. All
randomness is seeded through strings so results match across processes.
"""
from __future__ import annotations

import json
import math
import random
from importlib import resources
from pathlib import Path

import numpy as np

from .config import BridgeConfig
from .errors import LoadError, WrongDimension
from .tokenizer import Tokenizer

FORMAT = "relbridge-checkpoint-v1"
START_ID = -1


def _resolve(name: str) -> str:
    if "/" in name or name.endswith(".json"):
        path = Path(name)
        if not path.is_file():
            raise LoadError(f"no checkpoint file at {name}")
        return path.read_text(encoding="utf-8")
    bundled = resources.files("relbridge").joinpath("data", f"{name}.json")
    if not bundled.is_file():
        raise LoadError(f"no bundled model named {name!r}")
    return bundled.read_text(encoding="utf-8")


class TinyCodeModel:
    def __init__(self, checkpoint: dict, cfg: BridgeConfig):
        self.cfg = cfg
        try:
            if checkpoint["format"] != FORMAT:
                raise LoadError(
                    f"unsupported checkpoint format {checkpoint['format']!r}")
            self.model_id = checkpoint["model_id"]
            self.dim = int(checkpoint["dim"])
            self.labels = tuple(checkpoint["labels"])
            self.tokenizer = Tokenizer(checkpoint["vocab"])
            self.embedding = np.array(checkpoint["embedding"], dtype=float)
            self.head_w = np.array(checkpoint["head_weight"], dtype=float)
            self.head_b = np.array(checkpoint["head_bias"], dtype=float)
            self.dropout = float(checkpoint["dropout"])
            self._bigram = {int(p): {int(n): c for n, c in row.items()}
                            for p, row in checkpoint["bigram"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise LoadError(f"malformed checkpoint: {exc}") from exc
        v = len(self.tokenizer)
        if self.embedding.shape != (v, self.dim):
            raise LoadError("embedding table does not match vocabulary")
        if self.head_w.shape != (len(self.labels), self.dim):
            raise LoadError("classification head does not match dimensions")
        self.adapter_id = f"relbridge:{self.model_id}"

    @classmethod
    def load(cls, cfg: BridgeConfig) -> "TinyCodeModel":
        if cfg.device != "cpu":
            raise LoadError(
                f"device {cfg.device!r} unavailable; this build is cpu-only")
        try:
            checkpoint = json.loads(_resolve(cfg.model))
        except (OSError, json.JSONDecodeError) as exc:
            raise LoadError(f"cannot read checkpoint: {exc}") from exc
        return cls(checkpoint, cfg)

    # --- classification facet -------------------------------------------

    def _pool(self, text: str) -> np.ndarray:
        ids = self.tokenizer.encode(text)
        if not ids:
            return np.zeros(self.dim)
        return self.embedding[ids].mean(axis=0)

    def _head(self, x: np.ndarray) -> list[float]:
        logits = self.head_w @ x + self.head_b
        logits -= logits.max()
        p = np.exp(logits)
        return (p / p.sum()).tolist()

    def classify(self, text: str) -> list[float]:
        return self._head(self._pool(text))

    def classify_stochastic(self, text: str, seed: int) -> list[float]:
        # inference-time dropout on the pooled vector, inverted scaling
        rng = random.Random(f"relbridge:mcd:{seed}")
        keep = 1.0 - self.dropout
        mask = np.array([1.0 if rng.random() < keep else 0.0
                         for _ in range(self.dim)])
        return self._head(self._pool(text) * mask / keep)

    def embed(self, text: str) -> list[float]:
        return self._pool(text).tolist()

    def classify_embedding(self, embedding) -> list[float]:
        vec = np.asarray(embedding, dtype=float)
        if vec.shape != (self.dim,):
            raise WrongDimension(
                f"embedding must have {self.dim} components, got {vec.shape}")
        return self._head(vec)

    # --- generation facet -------------------------------------------------

    def _dist(self, prev: int) -> np.ndarray:
        v = len(self.tokenizer)
        row = np.ones(v)
        counts = self._bigram.get(prev)
        if counts:
            for nxt, c in counts.items():
                row[nxt] += c
        return row / row.sum()

    def step(self, prefix) -> list[float]:
        ids = self._prompt_ids(prefix)
        return self._dist(ids[-1] if ids else START_ID).tolist()

    def _prompt_ids(self, prompt) -> list[int]:
        if isinstance(prompt, (list, tuple)):
            prompt = " ".join(str(p) for p in prompt)
        return self.tokenizer.encode(str(prompt))

    def _decode(self, prev: int, max_len: int, choose) -> dict:
        tokens: list[str] = []
        logprobs: list[float] = []
        dists: list[list[float]] = []
        ended = False
        while len(tokens) < max_len:
            probs = self._dist(prev)
            idx = int(choose(probs))
            if idx == self.tokenizer.end_id:
                ended = True
                break
            tokens.append(self.tokenizer.vocab[idx])
            logprobs.append(math.log(float(probs[idx])))
            if self.cfg.expose_step:
                dists.append(probs.tolist())
            prev = idx
        return {"tokens": tokens, "logprobs": logprobs,
                "step_dists": dists if self.cfg.expose_step else None,
                "complete": ended}

    def generate(self, prompt, max_len: int | None = None) -> dict:
        max_len = self.cfg.max_tokens if max_len is None else max_len
        ids = self._prompt_ids(prompt)
        prev = ids[-1] if ids else START_ID
        return self._decode(prev, max_len, np.argmax)

    def sample(self, prompt, n: int, temperature: float | None = None,
               seed: int = 0, max_len: int | None = None) -> list[dict]:
        max_len = self.cfg.max_tokens if max_len is None else max_len
        temperature = (self.cfg.temperature if temperature is None
                       else float(temperature))
        if temperature <= 0:
            raise ValueError("temperature must be positive")
        ids = self._prompt_ids(prompt)
        prev = ids[-1] if ids else START_ID
        out = []
        for i in range(n):
            rng = random.Random(f"relbridge:sample:{seed}:{i}")

            def draw(probs):
                scaled = probs ** (1.0 / temperature)
                scaled /= scaled.sum()
                target = rng.random()
                acc = 0.0
                for j, p in enumerate(scaled):
                    acc += p
                    if target < acc:
                        return j
                return len(scaled) - 1

            out.append(self._decode(prev, max_len, draw))
        return out
