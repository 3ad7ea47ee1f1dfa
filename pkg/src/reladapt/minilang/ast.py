"""AST node types plus path-based structural access.

All nodes are frozen dataclasses, so structural equality and hashing come for
free and transforms can share subtrees. A *path* is a tuple of child indices
from the root; `children` defines the index order for every node kind.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

Expr = Union["IntLit", "BoolLit", "Ident", "Unary", "Binary", "Call"]
Stmt = Union["Let", "Assign", "If", "While", "Return"]
Node = Union[Expr, Stmt, "Block", "FnDef", "Program"]

INT64_MAX = 2**63 - 1


@dataclass(frozen=True, slots=True)
class IntLit:
    value: int  # invariant: 0 <= value <= INT64_MAX; negatives are Unary("-")


@dataclass(frozen=True, slots=True)
class BoolLit:
    value: bool


@dataclass(frozen=True, slots=True)
class Ident:
    name: str


@dataclass(frozen=True, slots=True)
class Unary:
    op: str  # "!" or "-"
    operand: Expr


@dataclass(frozen=True, slots=True)
class Binary:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Call:
    name: str
    args: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class Let:
    name: str
    expr: Expr


@dataclass(frozen=True, slots=True)
class Assign:
    name: str
    expr: Expr


@dataclass(frozen=True, slots=True)
class Block:
    stmts: tuple[Stmt, ...]


@dataclass(frozen=True, slots=True)
class If:
    cond: Expr
    then: Block
    orelse: Block | None  # None means the source had no else clause


@dataclass(frozen=True, slots=True)
class While:
    cond: Expr
    body: Block


@dataclass(frozen=True, slots=True)
class Return:
    expr: Expr


@dataclass(frozen=True, slots=True)
class FnDef:
    name: str
    params: tuple[str, ...]
    body: Block


@dataclass(frozen=True, slots=True)
class Program:
    functions: tuple[FnDef, ...]


def children(node: Node) -> tuple[Node, ...]:
    """Ordered child nodes; the order fixes path indices."""
    match node:
        case Program(functions):
            return functions
        case FnDef(_, _, body):
            return (body,)
        case Block(stmts):
            return stmts
        case Let(_, expr) | Assign(_, expr) | Return(expr):
            return (expr,)
        case If(cond, then, orelse):
            return (cond, then) if orelse is None else (cond, then, orelse)
        case While(cond, body):
            return (cond, body)
        case Unary(_, operand):
            return (operand,)
        case Binary(_, left, right):
            return (left, right)
        case Call(_, args):
            return args
        case _:
            return ()


def _with_children(node: Node, new: tuple[Node, ...]) -> Node:
    match node:
        case Program():
            return Program(tuple(new))
        case FnDef(name, params, _):
            return FnDef(name, params, new[0])
        case Block():
            return Block(tuple(new))
        case Let(name, _):
            return Let(name, new[0])
        case Assign(name, _):
            return Assign(name, new[0])
        case Return(_):
            return Return(new[0])
        case If():
            if len(new) == 2:
                return If(new[0], new[1], None)
            return If(new[0], new[1], new[2])
        case While():
            return While(new[0], new[1])
        case Unary(op, _):
            return Unary(op, new[0])
        case Binary(op, _, _):
            return Binary(op, new[0], new[1])
        case Call(name, _):
            return Call(name, tuple(new))
        case _:
            raise TypeError(f"node {node!r} has no children")


def node_at(root: Node, path: tuple[int, ...]) -> Node:
    node = root
    for idx in path:
        node = children(node)[idx]
    return node


def replace_at(root: Node, path: tuple[int, ...], new_node: Node) -> Node:
    """Rebuild the spine above `path` with `new_node` substituted."""
    if not path:
        return new_node
    kids = list(children(root))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new_node)
    return _with_children(root, tuple(kids))


def walk(root: Node, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Node]]:
    """Preorder traversal yielding (path, node)."""
    yield path, root
    for i, child in enumerate(children(root)):
        yield from walk(child, path + (i,))
