"""Order-2 n-gram generator over MiniLang tokens, fitted on the bundled
corpus with add-one smoothing.

Greedy decoding is deterministic; sampling is deterministic given seed;
natural-language prompts are conditioned by hashing their normalized text,
so prompts that normalize identically generate identically.
"""
from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass

from ..errors import UnknownToken
from ..metrics import GenerationResult, ProbVector
from ..minilang import lex
from ..minilang.lexer import KEYWORDS, SYMBOLS
from ..transforms.prompts import P3_NORMALIZE, nl_perturb
from .base import Adapter, AdapterCapabilities
from .corpusgen import bundled_corpus_texts

END = "<end>"
_START = "<start>"


@dataclass(frozen=True)
class GeneratorSpec:
    temperature: float = 1.0
    max_len: int = 120

    def __post_init__(self):
        if self.temperature <= 0 or self.max_len < 1:
            raise ValueError("spec constants out of range")


class MockGenerator(Adapter):
    adapter_id = "builtin:generator"

    def __init__(self, spec: GeneratorSpec | None = None,
                 corpus_texts: list[str] | None = None):
        self.spec = spec or GeneratorSpec()
        texts = bundled_corpus_texts() if corpus_texts is None else corpus_texts
        if len(texts) < 2:
            raise ValueError("generator needs a corpus to fit on")
        seen: set[str] = set(KEYWORDS) | set(SYMBOLS)
        sequences = []
        for text in texts:
            tokens = [t.text for t in lex(text)]
            seen.update(tokens)
            sequences.append(tokens)
        self.vocab: tuple[str, ...] = tuple(sorted(seen)) + (END,)
        self._index = {tok: i for i, tok in enumerate(self.vocab)}
        counts: dict[str, list[int]] = {}
        for tokens in sequences:
            chain = [_START] + tokens + [END]
            for prev, nxt in zip(chain, chain[1:]):
                row = counts.setdefault(prev, [0] * len(self.vocab))
                row[self._index[nxt]] += 1
        self._counts = counts

    def capabilities(self) -> AdapterCapabilities:
        return AdapterCapabilities(frozenset(("generate", "sample", "step")),
                                   vocabulary=self.vocab)

    # --- model ---------------------------------------------------------

    def _check_tokens(self, tokens) -> list[str]:
        tokens = list(tokens)
        for tok in tokens:
            if tok not in self._index:
                raise UnknownToken(f"token {tok!r} not in vocabulary")
        return tokens

    def _dist(self, prev: str) -> list[float]:
        row = self._counts.get(prev)
        v = len(self.vocab)
        if row is None:
            return [1.0 / v] * v
        total = sum(row) + v
        return [(c + 1) / total for c in row]

    def step(self, prefix) -> ProbVector:
        """Next-token distribution over the declared vocabulary."""
        tokens = self._check_tokens(prefix)
        prev = tokens[-1] if tokens else _START
        return ProbVector(self._dist(prev))

    def _decode(self, prev: str, max_len: int, choose) -> GenerationResult:
        tokens: list[str] = []
        logprobs: list[float] = []
        dists: list[ProbVector] = []
        ended = False
        while len(tokens) < max_len:
            probs = self._dist(prev)
            idx = choose(probs, len(tokens))
            if self.vocab[idx] == END:
                ended = True
                break
            tokens.append(self.vocab[idx])
            logprobs.append(math.log(probs[idx]))
            dists.append(ProbVector(probs))
            prev = self.vocab[idx]
        return GenerationResult(tokens, logprobs, dists, complete=ended)

    @staticmethod
    def _argmax(probs) -> int:
        return max(range(len(probs)), key=lambda i: (probs[i], -i))

    @staticmethod
    def _draw(rng: random.Random, probs, temperature: float) -> int:
        if temperature != 1.0:
            scaled = [p ** (1.0 / temperature) for p in probs]
            total = math.fsum(scaled)
            probs = [p / total for p in scaled]
        target = rng.random()
        acc = 0.0
        for i, p in enumerate(probs):
            acc += p
            if target < acc:
                return i
        return len(probs) - 1

    # --- prompt handling -------------------------------------------------

    def _prompt_mode(self, prompt):
        """(kind, payload): token-prefix continuation or hash-seeded NL."""
        if isinstance(prompt, (list, tuple)):
            return "prefix", self._check_tokens(prompt)
        text = getattr(prompt, "text", prompt)
        parts = text.split()
        if parts and all(p in self._index for p in parts):
            return "prefix", parts
        normalized = nl_perturb(text, P3_NORMALIZE)
        digest = hashlib.sha256(normalized.encode("utf-8")).hexdigest()
        return "nl", int(digest[:16], 16)

    def generate(self, prompt, max_len: int | None = None) -> GenerationResult:
        max_len = self.spec.max_len if max_len is None else max_len
        mode, payload = self._prompt_mode(prompt)
        if mode == "prefix":
            prev = payload[-1] if payload else _START
            return self._decode(prev, max_len, lambda p, _: self._argmax(p))
        rng = random.Random(f"gennl:{payload}")

        def choose(probs, position):
            if position == 0:
                return self._draw(rng, probs, 1.0)
            return self._argmax(probs)

        return self._decode(_START, max_len, choose)

    def sample(self, prompt, n: int, temperature: float | None = None,
               seed: int = 0, max_len: int | None = None) -> list[GenerationResult]:
        max_len = self.spec.max_len if max_len is None else max_len
        temperature = self.spec.temperature if temperature is None else temperature
        mode, payload = self._prompt_mode(prompt)
        prev = (payload[-1] if payload else _START) if mode == "prefix" else _START
        key = "/".join(payload) if mode == "prefix" else f"nl{payload}"
        results = []
        for i in range(n):
            rng = random.Random(f"gensample:{seed}:{i}:{key}")
            results.append(self._decode(
                prev, max_len, lambda p, _: self._draw(rng, p, temperature)))
        return results
