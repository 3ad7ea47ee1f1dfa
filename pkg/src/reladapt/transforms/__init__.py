"""Semantics-preserving program rewrites and meaning-preserving prompt edits."""
from .code import (
    CODE_KINDS, TransformSite, apply_transform, enumerate_applicable,
)
from .prompts import (
    PROMPT_KINDS, PromptText, load_synonyms, nl_perturb, split_sentences,
)

__all__ = [
    "CODE_KINDS", "TransformSite", "apply_transform", "enumerate_applicable",
    "PROMPT_KINDS", "PromptText", "load_synonyms", "nl_perturb",
    "split_sentences",
]
