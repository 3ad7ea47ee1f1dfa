"""Tokenizer: source text to a flat token list with 1-based spans."""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError

KEYWORDS = ("fn", "let", "if", "else", "while", "return", "true", "false")

# Two-character symbols must be matched before their one-character prefixes.
_TWO_CHAR = ("==", "!=", "<=", ">=", "&&", "||")
_ONE_CHAR = ("(", ")", "{", "}", ",", ";", "=", "<", ">", "+", "-", "*", "/",
             "%", "!")
SYMBOLS = _TWO_CHAR + _ONE_CHAR


@dataclass(frozen=True, slots=True)
class Token:
    """One lexeme.  `kind` is "IDENT", "INT", or the literal spelling."""
    kind: str
    text: str
    line: int
    col: int


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def lex(source: str) -> list[Token]:
    """Tokenize `source`; raises ParseError on the first bad character."""
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("INT", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_char(source[j]):
                j += 1
            text = source[i:j]
            kind = text if text in KEYWORDS else "IDENT"
            tokens.append(Token(kind, text, line, col))
            col += j - i
            i = j
            continue
        two = source[i:i + 2]
        if two in _TWO_CHAR:
            tokens.append(Token(two, two, line, col))
            i += 2
            col += 2
            continue
        if ch in _ONE_CHAR:
            tokens.append(Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch in "&|":
            # Bare & or | is never a token; name the pair the caller wanted.
            raise ParseError(
                f"stray {ch!r}, expected {ch*2!r}",
                line=line, col=col, expected=(ch * 2,), found=ch,
                index=len(tokens))
        raise ParseError(
            f"unexpected character {ch!r}",
            line=line, col=col, expected=(), found=ch, index=len(tokens))
    return tokens


def token_from_text(text: str, line: int = 1, col: int = 1) -> Token:
    """Classify a bare token spelling, as used by decoding vocabularies."""
    if text in KEYWORDS:
        return Token(text, text, line, col)
    if text in SYMBOLS:
        return Token(text, text, line, col)
    if text and all(c.isdigit() for c in text):
        return Token("INT", text, line, col)
    if text and _is_ident_start(text[0]) and all(_is_ident_char(c) for c in text):
        return Token("IDENT", text, line, col)
    raise ValueError(f"not a single token: {text!r}")
