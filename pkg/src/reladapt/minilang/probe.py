"""Seeded argument probes and execution digests.

Two programs are treated as behaviorally equivalent when they produce
identical Outcome tuples over the same seeded probe vectors; the digest of
that tuple doubles as a correctness check for generated code.
"""
from __future__ import annotations

import hashlib
import random

from .ast import Program
from .interp import DEFAULT_FUEL, Outcome, interpret, vbool, vint, Value

_BOOL_PROB = 0.2


def probe_vectors(seed: int, arity: int, count: int = 10,
                  int_lo: int = -10, int_hi: int = 10) -> list[tuple[Value, ...]]:
    """Deterministic argument vectors: mostly small ints, some booleans."""
    rng = random.Random(f"probe:{seed}:{arity}")
    vectors = []
    for _ in range(count):
        vec = []
        for _ in range(arity):
            if rng.random() < _BOOL_PROB:
                vec.append(vbool(rng.random() < 0.5))
            else:
                vec.append(vint(rng.randint(int_lo, int_hi)))
        vectors.append(tuple(vec))
    return vectors


def run_outcomes(program: Program, entry: str,
                 vectors: list[tuple[Value, ...]],
                 fuel: int = DEFAULT_FUEL) -> tuple[Outcome, ...]:
    return tuple(interpret(program, entry, vec, fuel) for vec in vectors)


def outcome_key(outcomes: tuple[Outcome, ...]) -> str:
    return ";".join(str(o) for o in outcomes)


def outcomes_digest(program: Program, entry: str, seed: int,
                    count: int = 10, fuel: int = DEFAULT_FUEL) -> str:
    """Hex digest of the outcome tuple on the seeded probe set."""
    fn = next((f for f in program.functions if f.name == entry), None)
    arity = len(fn.params) if fn is not None else 0
    vectors = probe_vectors(seed, arity, count)
    key = outcome_key(run_outcomes(program, entry, vectors, fuel))
    return hashlib.sha256(key.encode()).hexdigest()
