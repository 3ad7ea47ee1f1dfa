"""Deterministic mock classifier with a planted surface-form bias.

The hidden rule labels a program "defective" when it divides (/ or %) or
nests a loop inside a loop. The planted bias: any identifier of length <= 2
pushes the wrong class hard enough to flip the argmax, so renaming
identifiers is a sufficient fix. The embedding head sees only structural
counts, never identifier length, so it is immune to the bias by
construction.
"""
from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass

from ..errors import DimensionMismatch
from ..metrics import ProbVector
from ..minilang import parse, pretty
from ..minilang.ast import (
    Assign, Binary, Call, Ident, If, Let, Program, While, children, walk,
)
from .base import Adapter, AdapterCapabilities

LABELS = ("clean", "defective")

_CMP_OPS = ("<", ">", "<=", ">=", "==", "!=")
_DIV_OPS = ("/", "%")

# Feature order: functions, params, lets, ifs, whiles, divisions,
# comparisons, max loop depth.
_HEAD_WEIGHTS = (0.0, 0.0, 0.0, 0.0, 0.2, 8.0, 0.0, 5.0)
_HEAD_BIAS = -6.0


@dataclass(frozen=True)
class ClassifierSpec:
    """Tunable constants of the mock.

    logit_gap keeps unbiased confidence at sigmoid(2.5) ~ 0.924;
    bias_strength exceeds the gap so biased inputs flip their argmax;
    noise_sigma keeps the unbiased flip rate under stochastic passes
    far below 1%.
    """
    logit_gap: float = 2.5
    bias_strength: float = 3.2
    noise_sigma: float = 0.3

    def __post_init__(self):
        if self.logit_gap <= 0 or self.bias_strength < 0 or self.noise_sigma < 0:
            raise ValueError("spec constants out of range")


def _as_program(program) -> Program:
    return program if isinstance(program, Program) else parse(program)


def _max_loop_depth(program: Program) -> int:
    deepest = 0

    def descend(node, depth: int):
        nonlocal deepest
        if isinstance(node, While):
            depth += 1
            deepest = max(deepest, depth)
        for child in children(node):
            descend(child, depth)

    descend(program, 0)
    return deepest


def feature_vector(program) -> tuple[float, ...]:
    """8 structural counts: functions, params, lets, ifs, whiles,
    division-family operators, comparisons, max loop nesting depth."""
    p = _as_program(program)
    n_fn = len(p.functions)
    n_param = sum(len(f.params) for f in p.functions)
    n_let = n_if = n_while = n_div = n_cmp = 0
    for _, node in walk(p):
        if isinstance(node, Let):
            n_let += 1
        elif isinstance(node, If):
            n_if += 1
        elif isinstance(node, While):
            n_while += 1
        elif isinstance(node, Binary):
            if node.op in _DIV_OPS:
                n_div += 1
            elif node.op in _CMP_OPS:
                n_cmp += 1
    return (float(n_fn), float(n_param), float(n_let), float(n_if),
            float(n_while), float(n_div), float(n_cmp),
            float(_max_loop_depth(p)))


def hidden_label(program) -> str:
    """Ground truth: divides, or nests a loop in a loop."""
    p = _as_program(program)
    divides = any(isinstance(n, Binary) and n.op in _DIV_OPS
                  for _, n in walk(p))
    return "defective" if divides or _max_loop_depth(p) >= 2 else "clean"


def _identifiers(program: Program) -> set[str]:
    """Variable identifiers: params, binding targets, and reads.

    Function and call names are deliberately excluded: they are the names a
    renaming pass must leave alone, and the length bias is designed to be
    fully removable by renaming."""
    names: set[str] = set()
    for fn in program.functions:
        names.update(fn.params)
    for _, node in walk(program):
        match node:
            case Ident(name) | Let(name, _) | Assign(name, _):
                names.add(name)
            case _:
                pass
    return names


def is_biased(program) -> bool:
    p = _as_program(program)
    return any(len(name) <= 2 for name in _identifiers(p))


def _softmax(logits) -> ProbVector:
    peak = max(logits)
    exps = [math.exp(x - peak) for x in logits]
    total = math.fsum(exps)
    return ProbVector([e / total for e in exps])


def _text_digest(program) -> str:
    # canonical pretty-printed form, so the same AST seeds the same noise
    # whether it arrives parsed or as wire text
    text = pretty(parse(program)) if isinstance(program, str) else pretty(program)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


class MockClassifier(Adapter):
    adapter_id = "builtin:classifier"

    def __init__(self, spec: ClassifierSpec | None = None):
        self.spec = spec or ClassifierSpec()

    def capabilities(self) -> AdapterCapabilities:
        return AdapterCapabilities(
            frozenset(("classify", "classify_stochastic", "embed",
                       "classify_embedding")),
            labels=LABELS)

    def _logits(self, program) -> list[float]:
        p = _as_program(program)
        half = self.spec.logit_gap / 2.0
        truth = hidden_label(p)
        logits = [half if lab == truth else -half for lab in LABELS]
        if is_biased(p):
            wrong = 1 - LABELS.index(truth)
            logits[wrong] += self.spec.bias_strength
        return logits

    def classify(self, program) -> ProbVector:
        return _softmax(self._logits(program))

    def classify_stochastic(self, program, seed: int) -> ProbVector:
        logits = self._logits(program)
        rng = random.Random(f"mockcls:{seed}:{_text_digest(program)}")
        noisy = [x + rng.gauss(0.0, self.spec.noise_sigma) for x in logits]
        return _softmax(noisy)

    def embed(self, program) -> tuple[float, ...]:
        return feature_vector(program)

    def classify_embedding(self, embedding) -> ProbVector:
        if len(embedding) != len(_HEAD_WEIGHTS):
            raise DimensionMismatch(
                f"head expects {len(_HEAD_WEIGHTS)} features, got {len(embedding)}")
        gap = math.fsum(w * float(x) for w, x in zip(_HEAD_WEIGHTS, embedding))
        gap += _HEAD_BIAS
        # gap is logit(defective) - logit(clean)
        return _softmax([-gap / 2.0, gap / 2.0])
