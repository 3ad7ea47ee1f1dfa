"""A small imperative language used as the adaptation testbed.

The language is deliberately tiny: integers and booleans, single-assignment
environments per function call, structured control flow, and no I/O. What
matters is that programs round-trip through the pretty-printer, interpret
deterministically under a fuel budget, and support exact prefix-viability
queries for constrained decoding.
"""
from .lexer import Token, lex, token_from_text, KEYWORDS, SYMBOLS
from .ast import (
    Assign, Binary, Block, BoolLit, Call, FnDef, Ident, If, IntLit, Let,
    Program, Return, Unary, While, children, node_at, replace_at, walk,
)
from .parser import parse, parse_tokens, prefix_viable, tokens_from_texts
from .printer import pretty
from .interp import (
    DEFAULT_FUEL, ERROR_KINDS, Outcome, interpret, vbool, vint, wrap64,
)
from .probe import outcome_key, outcomes_digest, probe_vectors, run_outcomes

__all__ = [
    "Token", "lex", "token_from_text", "KEYWORDS", "SYMBOLS",
    "Assign", "Binary", "Block", "BoolLit", "Call", "FnDef", "Ident", "If",
    "IntLit", "Let", "Program", "Return", "Unary", "While",
    "children", "node_at", "replace_at", "walk",
    "parse", "parse_tokens", "prefix_viable", "tokens_from_texts",
    "pretty",
    "DEFAULT_FUEL", "ERROR_KINDS", "Outcome", "interpret", "vbool", "vint",
    "wrap64",
    "outcome_key", "outcomes_digest", "probe_vectors", "run_outcomes",
]
