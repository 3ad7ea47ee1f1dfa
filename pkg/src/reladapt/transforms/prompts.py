"""Meaning-preserving rewrites for natural-language task descriptions."""
from __future__ import annotations

import importlib.resources
import random
import re

from ..errors import ConfigError

P1_SYNONYM = "P1_SynonymSwap"
P2_REORDER = "P2_ConstraintReorder"
P3_NORMALIZE = "P3_Normalize"

PROMPT_KINDS = (P1_SYNONYM, P2_REORDER, P3_NORMALIZE)

# A sentence chunk keeps its terminator run and trailing whitespace, so that
# concatenating the chunks reproduces the text byte for byte.
_SENTENCE_CHUNK = re.compile(r"[^.?!]*[.?!]+\s*")
_WORD = re.compile(r"[A-Za-z']+")


def split_sentences(text: str) -> list[str]:
    chunks = _SENTENCE_CHUNK.findall(text)
    consumed = sum(len(c) for c in chunks)
    if consumed < len(text):
        chunks.append(text[consumed:])
    return chunks


class PromptText:
    """A task description plus the sentence view the rewrites operate on."""

    def __init__(self, text: str):
        self.text = text

    @property
    def sentences(self) -> list[str]:
        return split_sentences(self.text)

    def __eq__(self, other) -> bool:
        return isinstance(other, PromptText) and self.text == other.text

    def __hash__(self) -> int:
        return hash(("PromptText", self.text))

    def __repr__(self) -> str:
        return f"PromptText({self.text!r})"


def load_synonyms(path=None) -> dict[str, str]:
    """Word pairs, one TAB-separated pair per line, usable in both directions."""
    if path is None:
        resource = importlib.resources.files("reladapt.transforms").joinpath(
            "data/synonyms.tsv")
        raw = resource.read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    table: dict[str, str] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not all(p.strip() for p in parts):
            raise ConfigError(f"synonyms line {lineno}: expected two words")
        a, b = (p.strip().lower() for p in parts)
        table[a] = b
        table[b] = a
    return table


def _match_case(replacement: str, original: str) -> str:
    if original.isupper():
        return replacement.upper()
    if original[:1].isupper():
        return replacement.capitalize()
    return replacement


def _swap_synonyms(text: str, seed: int, table: dict[str, str]) -> str:
    occurrences = [m for m in _WORD.finditer(text)
                   if m.group().lower() in table]
    if not occurrences:
        return text
    rng = random.Random(f"p1:{seed}")
    chosen = sorted(rng.sample(range(len(occurrences)),
                               min(2, len(occurrences))))
    out = []
    prev = 0
    for idx in chosen:
        m = occurrences[idx]
        out.append(text[prev:m.start()])
        out.append(_match_case(table[m.group().lower()], m.group()))
        prev = m.end()
    out.append(text[prev:])
    return "".join(out)


def _rotate_sentences(text: str, seed: int) -> str:
    sentences = [s.strip() for s in split_sentences(text)]
    sentences = [s for s in sentences if s]
    if len(sentences) < 2:
        return text
    head, rest = sentences[0], sentences[1:]
    k = seed % len(rest)
    return " ".join([head] + rest[k:] + rest[:k])


def _normalize(text: str) -> str:
    collapsed = re.sub(r"\s+", " ", text).strip()
    return re.sub(r"([.?!,])\1+", r"\1", collapsed)


def nl_perturb(prompt, kind: str, seed: int = 0,
               synonyms: dict[str, str] | None = None):
    """Deterministic meaning-preserving rewrite of a task description.

    Accepts a PromptText or a plain string and returns the same shape.
    """
    text = prompt.text if isinstance(prompt, PromptText) else prompt
    if kind == P1_SYNONYM:
        table = load_synonyms() if synonyms is None else synonyms
        result = _swap_synonyms(text, seed, table)
    elif kind == P2_REORDER:
        result = _rotate_sentences(text, seed)
    elif kind == P3_NORMALIZE:
        result = _normalize(text)
    else:
        raise ConfigError(f"unknown perturbation kind {kind!r}")
    return PromptText(result) if isinstance(prompt, PromptText) else result
