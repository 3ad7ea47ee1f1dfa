"""Canonical pretty-printer.

One statement per line, two-space indent, single spaces around binary
operators, and the minimum parentheses that keep re-parsing structurally
exact (left-associative chains stay flat; right-nested or comparison
children get parenthesized).
"""
from __future__ import annotations

from .ast import (
    Assign, Binary, Block, BoolLit, Call, Expr, FnDef, Ident, If, IntLit,
    Let, Program, Return, Unary, While,
)

_PREC = {
    "||": 1,
    "&&": 2,
    "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5, "%": 5,
}
_UNARY_PREC = 6
_ATOM_PREC = 7
_CMP_PREC = 3


def _prec(expr: Expr) -> int:
    if isinstance(expr, Binary):
        return _PREC[expr.op]
    if isinstance(expr, Unary):
        return _UNARY_PREC
    return _ATOM_PREC


def _expr(expr: Expr) -> str:
    match expr:
        case IntLit(value):
            return str(value)
        case BoolLit(value):
            return "true" if value else "false"
        case Ident(name):
            return name
        case Unary(op, operand):
            # Unary binds tighter than any binary op; chains like "--x" and
            # "!!x" re-lex unambiguously, so only weaker operands need parens.
            inner = _expr(operand)
            if _prec(operand) < _UNARY_PREC:
                inner = f"({inner})"
            return f"{op}{inner}"
        case Binary(op, left, right):
            prec = _PREC[op]
            lhs = _expr(left)
            # Comparison is non-associative, so an equal-precedence child
            # must be parenthesized on either side; elsewhere only the right
            # side re-associates.
            if _prec(left) < prec or (_prec(left) == prec and prec == _CMP_PREC):
                lhs = f"({lhs})"
            rhs = _expr(right)
            if _prec(right) < prec or _prec(right) == prec:
                rhs = f"({rhs})"
            return f"{lhs} {op} {rhs}"
        case Call(name, args):
            return f"{name}({', '.join(_expr(a) for a in args)})"
    raise TypeError(f"not an expression: {expr!r}")


def _stmt(stmt, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    match stmt:
        case Let(name, expr):
            out.append(f"{pad}let {name} = {_expr(expr)};")
        case Assign(name, expr):
            out.append(f"{pad}{name} = {_expr(expr)};")
        case Return(expr):
            out.append(f"{pad}return {_expr(expr)};")
        case If(cond, then, orelse):
            out.append(f"{pad}if ({_expr(cond)}) {{")
            _block_body(then, indent + 1, out)
            if orelse is None:
                out.append(f"{pad}}}")
            else:
                out.append(f"{pad}}} else {{")
                _block_body(orelse, indent + 1, out)
                out.append(f"{pad}}}")
        case While(cond, body):
            out.append(f"{pad}while ({_expr(cond)}) {{")
            _block_body(body, indent + 1, out)
            out.append(f"{pad}}}")
        case _:
            raise TypeError(f"not a statement: {stmt!r}")


def _block_body(block: Block, indent: int, out: list[str]) -> None:
    for stmt in block.stmts:
        _stmt(stmt, indent, out)


def pretty(program: Program) -> str:
    """Render a program in canonical form; parse(pretty(p)) == p."""
    out: list[str] = []
    for fn in program.functions:
        params = ", ".join(fn.params)
        out.append(f"fn {fn.name}({params}) {{")
        _block_body(fn.body, 1, out)
        out.append("}")
    return "\n".join(out) + "\n"
