"""Recursive-descent parser and exact prefix viability.

The grammar is LL(1): every parse decision is forced by the next token, so
the first mismatch is final. That gives an exact viability test for free: if
the parser only fails because input ran out, some continuation exists; if it
fails on a real token, none does.
"""
from __future__ import annotations

from ..errors import ParseError
from .ast import (
    Assign, Binary, Block, BoolLit, Call, Expr, FnDef, Ident, If, IntLit,
    Let, Program, Return, Stmt, Unary, While, INT64_MAX,
)
from .lexer import Token, lex, token_from_text

_CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
_STMT_START = ("let", "IDENT", "if", "while", "return")


class _Parser:
    __slots__ = ("tokens", "i")

    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.i = 0

    def _peek(self) -> Token:
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        if self.tokens:
            last = self.tokens[-1]
            return Token("EOF", "", last.line, last.col + len(last.text))
        return Token("EOF", "", 1, 1)

    def _fail(self, expected: tuple[str, ...]) -> ParseError:
        tok = self._peek()
        found = tok.text if tok.kind != "EOF" else "end of input"
        msg = (f"{tok.line}:{tok.col}: expected "
               f"{' or '.join(expected)}, found {found}")
        return ParseError(msg, line=tok.line, col=tok.col, expected=expected,
                          found=tok.kind, index=self.i)

    def _at(self, kind: str) -> bool:
        return self._peek().kind == kind

    def _expect(self, kind: str) -> Token:
        tok = self._peek()
        if tok.kind != kind:
            raise self._fail((kind,))
        self.i += 1
        return tok

    def _accept(self, kind: str) -> Token | None:
        if self._at(kind):
            return self._expect(kind)
        return None

    # program := fndef+
    def program(self) -> Program:
        fns = [self.fndef()]
        while not self._at("EOF"):
            fns.append(self.fndef())
        return Program(tuple(fns))

    # fndef := "fn" IDENT "(" [IDENT {"," IDENT}] ")" block
    def fndef(self) -> FnDef:
        self._expect("fn")
        name = self._expect("IDENT").text
        self._expect("(")
        params: list[str] = []
        if self._at("IDENT"):
            params.append(self._expect("IDENT").text)
            while self._accept(","):
                params.append(self._expect("IDENT").text)
        self._expect(")")
        return FnDef(name, tuple(params), self.block())

    def block(self) -> Block:
        self._expect("{")
        stmts: list[Stmt] = []
        while not self._at("}"):
            if self._peek().kind not in _STMT_START:
                raise self._fail(_STMT_START + ("}",))
            stmts.append(self.stmt())
        self._expect("}")
        return Block(tuple(stmts))

    def stmt(self) -> Stmt:
        tok = self._peek()
        if tok.kind == "let":
            self.i += 1
            name = self._expect("IDENT").text
            self._expect("=")
            expr = self.expr()
            self._expect(";")
            return Let(name, expr)
        if tok.kind == "IDENT":
            self.i += 1
            name = tok.text
            self._expect("=")
            expr = self.expr()
            self._expect(";")
            return Assign(name, expr)
        if tok.kind == "if":
            self.i += 1
            self._expect("(")
            cond = self.expr()
            self._expect(")")
            then = self.block()
            orelse = self.block() if self._accept("else") else None
            return If(cond, then, orelse)
        if tok.kind == "while":
            self.i += 1
            self._expect("(")
            cond = self.expr()
            self._expect(")")
            return While(cond, self.block())
        if tok.kind == "return":
            self.i += 1
            expr = self.expr()
            self._expect(";")
            return Return(expr)
        raise self._fail(_STMT_START)

    def expr(self) -> Expr:
        return self.or_()

    def or_(self) -> Expr:
        node = self.and_()
        while self._accept("||"):
            node = Binary("||", node, self.and_())
        return node

    def and_(self) -> Expr:
        node = self.cmp()
        while self._accept("&&"):
            node = Binary("&&", node, self.cmp())
        return node

    def cmp(self) -> Expr:
        node = self.add()
        for op in _CMP_OPS:
            if self._at(op):
                self.i += 1
                return Binary(op, node, self.add())
        return node

    def add(self) -> Expr:
        node = self.mul()
        while True:
            if self._at("+"):
                self.i += 1
                node = Binary("+", node, self.mul())
            elif self._at("-"):
                self.i += 1
                node = Binary("-", node, self.mul())
            else:
                return node

    def mul(self) -> Expr:
        node = self.unary()
        while True:
            tok = self._peek()
            if tok.kind in ("*", "/", "%"):
                self.i += 1
                node = Binary(tok.kind, node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        tok = self._peek()
        if tok.kind in ("!", "-"):
            self.i += 1
            return Unary(tok.kind, self.unary())
        return self.primary()

    def primary(self) -> Expr:
        tok = self._peek()
        if tok.kind == "INT":
            value = int(tok.text)
            if value > INT64_MAX:
                raise ParseError(
                    f"{tok.line}:{tok.col}: integer literal out of range",
                    line=tok.line, col=tok.col, expected=("INT",),
                    found=tok.text, index=self.i)
            self.i += 1
            return IntLit(value)
        if tok.kind == "true":
            self.i += 1
            return BoolLit(True)
        if tok.kind == "false":
            self.i += 1
            return BoolLit(False)
        if tok.kind == "IDENT":
            self.i += 1
            if self._accept("("):
                args: list[Expr] = []
                if not self._at(")"):
                    args.append(self.expr())
                    while self._accept(","):
                        args.append(self.expr())
                self._expect(")")
                return Call(tok.text, tuple(args))
            return Ident(tok.text)
        if tok.kind == "(":
            self.i += 1
            node = self.expr()
            self._expect(")")
            return node
        raise self._fail(("INT", "true", "false", "IDENT", "("))


def parse_tokens(tokens: list[Token]) -> Program:
    return _Parser(tokens).program()


def parse(source: str) -> Program:
    return parse_tokens(lex(source))


def tokens_from_texts(texts: list[str]) -> list[Token]:
    """Build a synthetic token stream from bare spellings (col = position)."""
    return [token_from_text(t, 1, i + 1) for i, t in enumerate(texts)]


def prefix_viable(tokens: list[Token] | list[str]) -> bool:
    """True iff the token sequence extends (by zero or more tokens) to a
    complete valid program.

    Exact for this grammar: an LL(1) parse decision never depends on later
    tokens, so an error at token position k < len(tokens) can never be fixed
    by appending input, while an error at the end-of-input position always
    can (every partial production here is completable).
    """
    if tokens and isinstance(tokens[0], str):
        try:
            toks = tokens_from_texts(tokens)  # type: ignore[arg-type]
        except ValueError:
            return False
    else:
        toks = list(tokens)  # type: ignore[arg-type]
    try:
        parse_tokens(toks)
        return True
    except ParseError as exc:
        return exc.index >= len(toks)
