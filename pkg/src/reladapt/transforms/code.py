"""Behavior-preserving program rewrites.

Each transform kind has an applicability predicate (conservative: when in
doubt, a site is not offered) and an application function. Applying any
enumerated site yields a program with identical interpret outcomes on every
argument vector, up to fuel consumption.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from ..errors import InapplicableTransform
from ..minilang.ast import (
    Assign, Binary, Block, BoolLit, Call, Expr, FnDef, Ident, If, IntLit,
    Let, Program, Return, Unary, While, children, node_at, replace_at, walk,
)
from ..minilang.interp import (
    ERR_DIV_BY_ZERO, ERR_TYPE, ERR_UNDEFINED_VAR, Outcome, _apply_binary,
    wrap64,
)
from ..minilang.lexer import KEYWORDS

T1_RENAME = "T1_RenameIdents"
T2_FLIP_IF = "T2_FlipIf"
T3_UNROLL = "T3_UnrollWhileOnce"
T4_SWAP = "T4_CommutativeSwap"
T5_DEAD_INSERT = "T5_DeadLetInsert"
T6_DEAD_REMOVE = "T6_DeadLetRemove"
T7_REORDER = "T7_StmtReorder"
T8_FOLD = "T8_ConstantFold"

CODE_KINDS = (T1_RENAME, T2_FLIP_IF, T3_UNROLL, T4_SWAP, T5_DEAD_INSERT,
              T6_DEAD_REMOVE, T7_REORDER, T8_FOLD)

_INT64_MIN = -(2**63)


@dataclass(frozen=True)
class TransformSite:
    """An applicable rewrite: kind, node path, and (for pair swaps) an index."""
    kind: str
    path: tuple[int, ...]
    index: int | None = None

    def ident(self) -> str:
        tail = "" if self.index is None else f"#{self.index}"
        return f"{self.kind}@{'.'.join(map(str, self.path))}{tail}"


def _contains_call(expr: Expr) -> bool:
    return any(isinstance(n, Call) for _, n in walk(expr))


def _idents_read(expr: Expr) -> set[str]:
    return {n.name for _, n in walk(expr) if isinstance(n, Ident)}


def _literal_value(expr: Expr):
    """Tagged runtime value for literal-like expressions, else None."""
    match expr:
        case IntLit(v):
            return ("int", v)
        case BoolLit(v):
            return ("bool", v)
        case Unary("-", IntLit(v)):
            return ("int", -v)
        case _:
            return None


def _const_eval(expr: Expr):
    """Value, error-kind string, or None when the expression reads state."""
    literal = _literal_value(expr)
    if literal is not None:
        return literal
    match expr:
        case Unary(op, operand):
            val = _const_eval(operand)
            if val is None or isinstance(val, str):
                return val
            tag, v = val
            if op == "-":
                return ("int", wrap64(-v)) if tag == "int" else ERR_TYPE
            return ("bool", not v) if tag == "bool" else ERR_TYPE
        case Binary(op, left, right):
            lv = _const_eval(left)
            if lv is None or isinstance(lv, str):
                return lv
            rv = _const_eval(right)
            if rv is None or isinstance(rv, str):
                return rv
            result = _apply_binary(op, lv, rv)
            return result.error if isinstance(result, Outcome) else result
        case _:
            return None


def _error_kinds(expr: Expr, params: frozenset[str]) -> set[str]:
    """Overapproximation of the error kinds a call-free expression can raise.

    Idents other than parameters may be unbound; any operator applied to an
    ident-bearing subtree may type-error. Constant subexpressions are decided
    exactly by evaluation.
    """
    kinds: set[str] = set()
    has_ident = False
    has_op = False
    for _, node in walk(expr):
        match node:
            case Ident(name):
                has_ident = True
                if name not in params:
                    kinds.add(ERR_UNDEFINED_VAR)
            case Binary(op, _, _):
                has_op = True
                if op in ("/", "%"):
                    kinds.add(ERR_DIV_BY_ZERO)
            case Unary():
                has_op = True
            case _:
                pass
    if has_op and has_ident:
        kinds.add(ERR_TYPE)
    elif has_op:
        const = _const_eval(expr)
        if isinstance(const, str):
            kinds.add(const)
    return kinds


def _order_insensitive(kinds_a: set[str], kinds_b: set[str]) -> bool:
    # Evaluation aborts at the first error, so sequencing two fallible
    # computations is order-sensitive unless their kinds cannot differ.
    return not kinds_a or not kinds_b or len(kinds_a | kinds_b) == 1


def _fold_result(expr: Binary):
    """Folded literal node for a constant subtree, or None when the fold is
    not exact (reads state, errors, or lands on the one unwritable value)."""
    result = _const_eval(expr)
    if result is None or isinstance(result, str):
        return None  # non-constant, or would error: keep the fault live
    tag, value = result
    if tag == "bool":
        return BoolLit(value)
    if value >= 0:
        return IntLit(value)
    if value == _INT64_MIN:
        return None  # magnitude not representable as a literal
    return Unary("-", IntLit(-value))


def _names_in_program(program: Program) -> set[str]:
    names: set[str] = set()
    for fn in program.functions:
        names.add(fn.name)
        names.update(fn.params)
    for _, node in walk(program):
        match node:
            case Ident(name) | Let(name, _) | Assign(name, _) | Call(name, _):
                names.add(name)
            case _:
                pass
    return names


def _stmt_error_kinds(stmt, params: frozenset[str]) -> set[str]:
    kinds = _error_kinds(stmt.expr, params)
    if isinstance(stmt, Assign) and stmt.name not in params:
        kinds.add(ERR_UNDEFINED_VAR)  # target slot may be unbound
    return kinds


def _contains_divmod(expr: Expr) -> bool:
    return any(isinstance(n, Binary) and n.op in ("/", "%")
               for _, n in walk(expr))


def _reorderable(first, second, params: frozenset[str]) -> bool:
    if not isinstance(first, (Let, Assign)) or not isinstance(second, (Let, Assign)):
        return False
    for stmt in (first, second):
        if _contains_call(stmt.expr) or _contains_divmod(stmt.expr):
            return False
    def_use = []
    for stmt in (first, second):
        defs = {stmt.name}
        uses = _idents_read(stmt.expr)
        if isinstance(stmt, Assign):
            uses = uses | {stmt.name}  # assignment requires the slot to exist
        def_use.append((defs, uses))
    (d1, u1), (d2, u2) = def_use
    if (d1 & (d2 | u2)) or (d2 & (d1 | u1)):
        return False
    return _order_insensitive(_stmt_error_kinds(first, params),
                              _stmt_error_kinds(second, params))


def _mentions(fn: FnDef, name: str, skip_path: tuple[int, ...],
              fn_path: tuple[int, ...]) -> bool:
    """Is `name` read or written anywhere in `fn` outside the statement at
    skip_path? Loop bodies make textual before/after unreliable, so every
    mention counts."""
    for path, node in walk(fn, fn_path):
        if path[:len(skip_path)] == skip_path:
            continue  # the statement being removed
        match node:
            case Ident(n) | Let(n, _) | Assign(n, _):
                if n == name:
                    return True
            case _:
                pass
    return False


def _removable(fn: FnDef, let: Let, path: tuple[int, ...],
               fn_path: tuple[int, ...]) -> bool:
    rhs_ok = isinstance(let.expr, (IntLit, BoolLit)) or (
        isinstance(let.expr, Ident) and let.expr.name in fn.params)
    if not rhs_ok:
        return False
    return not _mentions(fn, let.name, path, fn_path)


def enumerate_applicable(program: Program) -> list[TransformSite]:
    """All applicable sites in deterministic order: preorder position of the
    target node, then kind id ascending, then pair index."""
    sites: list[TransformSite] = []
    fn_of_path: dict[tuple[int, ...], FnDef] = {
        path: node for path, node in walk(program) if isinstance(node, FnDef)}

    def enclosing(path: tuple[int, ...]):
        best = max((p for p in fn_of_path if path[:len(p)] == p),
                   key=len, default=None)
        return best, frozenset(fn_of_path[best].params) if best is not None else frozenset()

    for path, node in walk(program):
        match node:
            case FnDef(_, params, _):
                binders = set(params) | {
                    n.name for _, n in walk(node) if isinstance(n, Let)}
                if binders:
                    sites.append(TransformSite(T1_RENAME, path))
            case If():
                sites.append(TransformSite(T2_FLIP_IF, path))
            case While():
                sites.append(TransformSite(T3_UNROLL, path))
            case Binary(op, left, right) if op in ("+", "*"):
                _, params = enclosing(path)
                if (not _contains_call(left) and not _contains_call(right)
                        and _order_insensitive(_error_kinds(left, params),
                                               _error_kinds(right, params))):
                    sites.append(TransformSite(T4_SWAP, path))
            case _:
                pass
        if isinstance(node, Binary) and _fold_result(node) is not None:
            sites.append(TransformSite(T8_FOLD, path))
        if isinstance(node, Block):
            sites.append(TransformSite(T5_DEAD_INSERT, path))
            _, params = enclosing(path)
            for i in range(len(node.stmts) - 1):
                if _reorderable(node.stmts[i], node.stmts[i + 1], params):
                    sites.append(TransformSite(T7_REORDER, path, i))
        if isinstance(node, Let):
            fn_path, _ = enclosing(path)
            if fn_path is not None and _removable(
                    fn_of_path[fn_path], node, path, fn_path):
                sites.append(TransformSite(T6_DEAD_REMOVE, path))

    kind_rank = {k: i for i, k in enumerate(CODE_KINDS)}
    order = {path: i for i, (path, _) in enumerate(walk(program))}
    sites.sort(key=lambda s: (order[s.path], kind_rank[s.kind],
                              -1 if s.index is None else s.index))
    return sites


def _fresh_names(count: int, seed: int, taken: set[str]) -> list[str]:
    names = []
    for i in range(count):
        candidate = f"v{seed}_{i}"
        bump = 0
        while candidate in taken or candidate in KEYWORDS:
            bump += 1
            candidate = f"v{seed}_{i}_{bump}"
        taken.add(candidate)
        names.append(candidate)
    return names


def _rename_expr(expr: Expr, mapping: dict[str, str]) -> Expr:
    match expr:
        case Ident(name):
            return Ident(mapping.get(name, name))
        case Unary(op, operand):
            return Unary(op, _rename_expr(operand, mapping))
        case Binary(op, left, right):
            return Binary(op, _rename_expr(left, mapping),
                          _rename_expr(right, mapping))
        case Call(name, args):
            # Call targets live in the function namespace, never renamed.
            return Call(name, tuple(_rename_expr(a, mapping) for a in args))
        case _:
            return expr


def _rename_block(block: Block, mapping: dict[str, str]) -> Block:
    out = []
    for stmt in block.stmts:
        match stmt:
            case Let(name, expr):
                out.append(Let(mapping.get(name, name),
                               _rename_expr(expr, mapping)))
            case Assign(name, expr):
                out.append(Assign(mapping.get(name, name),
                                  _rename_expr(expr, mapping)))
            case Return(expr):
                out.append(Return(_rename_expr(expr, mapping)))
            case If(cond, then, orelse):
                out.append(If(_rename_expr(cond, mapping),
                              _rename_block(then, mapping),
                              None if orelse is None
                              else _rename_block(orelse, mapping)))
            case While(cond, body):
                out.append(While(_rename_expr(cond, mapping),
                                 _rename_block(body, mapping)))
    return Block(tuple(out))


def apply_transform(program: Program, site: TransformSite, seed: int = 0) -> Program:
    """Apply one rewrite; raises InapplicableTransform unless `site` is
    currently enumerated for `program`."""
    if site not in enumerate_applicable(program):
        raise InapplicableTransform(site.ident())
    node = node_at(program, site.path)

    if site.kind == T1_RENAME:
        fn = node
        binders = list(fn.params)
        for _, n in walk(fn):
            if isinstance(n, Let) and n.name not in binders:
                binders.append(n.name)
        taken = _names_in_program(program)
        fresh = _fresh_names(len(binders), seed, taken)
        mapping = dict(zip(binders, fresh))
        renamed = FnDef(fn.name, tuple(mapping.get(p, p) for p in fn.params),
                        _rename_block(fn.body, mapping))
        return replace_at(program, site.path, renamed)

    if site.kind == T2_FLIP_IF:
        orelse = node.orelse if node.orelse is not None else Block(())
        flipped = If(Unary("!", node.cond), orelse, node.then)
        return replace_at(program, site.path, flipped)

    if site.kind == T3_UNROLL:
        unrolled = If(node.cond, Block(node.body.stmts + (node,)), None)
        return replace_at(program, site.path, unrolled)

    if site.kind == T4_SWAP:
        return replace_at(program, site.path,
                          Binary(node.op, node.right, node.left))

    if site.kind == T5_DEAD_INSERT:
        rng = random.Random(f"t5:{seed}")
        at = rng.randrange(len(node.stmts) + 1)
        taken = _names_in_program(program)
        name = _fresh_names(1, seed, taken)[0]
        stmt = Let(name, IntLit(rng.randrange(10)))
        new_stmts = node.stmts[:at] + (stmt,) + node.stmts[at:]
        return replace_at(program, site.path, Block(new_stmts))

    if site.kind == T6_DEAD_REMOVE:
        parent = node_at(program, site.path[:-1])
        idx = site.path[-1]
        new_stmts = parent.stmts[:idx] + parent.stmts[idx + 1:]
        return replace_at(program, site.path[:-1], Block(new_stmts))

    if site.kind == T7_REORDER:
        i = site.index
        stmts = list(node.stmts)
        stmts[i], stmts[i + 1] = stmts[i + 1], stmts[i]
        return replace_at(program, site.path, Block(tuple(stmts)))

    if site.kind == T8_FOLD:
        return replace_at(program, site.path, _fold_result(node))

    raise InapplicableTransform(f"unknown kind {site.kind}")
