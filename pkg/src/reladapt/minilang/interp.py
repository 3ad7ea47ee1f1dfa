"""Deterministic small-step interpreter with a fuel budget.

Runtime values are tagged tuples ("int", n) / ("bool", b) so that Ok(1) and
Ok(true) never compare equal. Integers wrap to 64-bit two's complement on
every arithmetic result. Execution is driven by an explicit work stack, so
call depth is bounded by fuel, not by the host recursion limit.

Fuel accounting: executing a statement costs 1 (a while statement costs 1
per iteration check), and every operator or call application costs 1.
Running out of fuel yields the FuelExhausted outcome, never an exception.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .ast import (
    Assign, Binary, Block, BoolLit, Call, FnDef, Ident, If, IntLit, Let,
    Program, Return, Unary, While,
)

DEFAULT_FUEL = 1_000_000

_U64 = 2**64
_I64_SIGN = 2**63

ERR_DIV_BY_ZERO = "DivByZero"
ERR_TYPE = "TypeError"
ERR_UNDEFINED_VAR = "UndefinedVar"
ERR_UNDEFINED_FN = "UndefinedFn"
ERR_ARITY = "ArityMismatch"
ERR_NO_RETURN = "NoReturn"
ERROR_KINDS = (ERR_DIV_BY_ZERO, ERR_TYPE, ERR_UNDEFINED_VAR,
               ERR_UNDEFINED_FN, ERR_ARITY, ERR_NO_RETURN)

Value = tuple  # ("int", int) | ("bool", bool)


def vint(n: int) -> Value:
    return ("int", wrap64(n))


def vbool(b: bool) -> Value:
    return ("bool", bool(b))


def wrap64(n: int) -> int:
    """Reduce to 64-bit two's complement."""
    return (n + _I64_SIGN) % _U64 - _I64_SIGN


@dataclass(frozen=True, slots=True)
class Outcome:
    """Result of interpretation: "ok", "error", or "fuel"."""
    status: str
    value: Value | None = None
    error: str | None = None

    def __str__(self) -> str:
        if self.status == "ok":
            tag, v = self.value  # type: ignore[misc]
            return f"Ok({tag} {str(v).lower()})"
        if self.status == "error":
            return f"Error({self.error})"
        return "FuelExhausted"


FUEL_EXHAUSTED = Outcome("fuel")


def _ok(value: Value) -> Outcome:
    return Outcome("ok", value=value)


def _err(kind: str) -> Outcome:
    return Outcome("error", error=kind)


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


@dataclass(slots=True)
class _Frame:
    env: dict[str, Value]
    work: list = field(default_factory=list)
    vals: list = field(default_factory=list)


def interpret(program: Program, entry: str, args: list[Value] | tuple,
              fuel: int = DEFAULT_FUEL) -> Outcome:
    """Run `entry(args)` and report the outcome as data.

    Missing entry, wrong arity, and every runtime fault come back as Error
    outcomes; only a non-positive fuel argument is a caller bug.
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    fns = {fn.name: fn for fn in program.functions}
    target = fns.get(entry)
    if target is None:
        return _err(ERR_UNDEFINED_FN)
    if len(args) != len(target.params):
        return _err(ERR_ARITY)

    frames = [_new_frame(target, list(args))]
    remaining = fuel

    while True:
        frame = frames[-1]
        if not frame.work:
            # Body finished without hitting a return statement.
            return _err(ERR_NO_RETURN)
        item = frame.work.pop()
        tag = item[0]

        if tag == "stmt":
            if remaining == 0:
                return FUEL_EXHAUSTED
            remaining -= 1
            stmt = item[1]
            match stmt:
                case Let(name, expr) | Assign(name, expr):
                    if isinstance(stmt, Assign) and name not in frame.env:
                        return _err(ERR_UNDEFINED_VAR)
                    frame.work.append(("store", name))
                    frame.work.append(("eval", expr))
                case Return(expr):
                    frame.work.append(("ret",))
                    frame.work.append(("eval", expr))
                case If(cond, then, orelse):
                    frame.work.append(("if", then, orelse))
                    frame.work.append(("eval", cond))
                case While(cond, _):
                    frame.work.append(("loop", stmt))
                    frame.work.append(("eval", cond))

        elif tag == "eval":
            expr = item[1]
            match expr:
                case IntLit(value):
                    frame.vals.append(("int", value))
                case BoolLit(value):
                    frame.vals.append(("bool", value))
                case Ident(name):
                    val = frame.env.get(name)
                    if val is None:
                        return _err(ERR_UNDEFINED_VAR)
                    frame.vals.append(val)
                case Unary(op, operand):
                    frame.work.append(("un", op))
                    frame.work.append(("eval", operand))
                case Binary(op, left, right):
                    frame.work.append(("bin", op))
                    frame.work.append(("eval", right))
                    frame.work.append(("eval", left))
                case Call(name, cargs):
                    frame.work.append(("call", name, len(cargs)))
                    for arg in reversed(cargs):
                        frame.work.append(("eval", arg))

        elif tag == "bin":
            if remaining == 0:
                return FUEL_EXHAUSTED
            remaining -= 1
            right = frame.vals.pop()
            left = frame.vals.pop()
            result = _apply_binary(item[1], left, right)
            if isinstance(result, Outcome):
                return result
            frame.vals.append(result)

        elif tag == "un":
            if remaining == 0:
                return FUEL_EXHAUSTED
            remaining -= 1
            val = frame.vals.pop()
            op = item[1]
            if op == "!":
                if val[0] != "bool":
                    return _err(ERR_TYPE)
                frame.vals.append(("bool", not val[1]))
            else:  # "-"
                if val[0] != "int":
                    return _err(ERR_TYPE)
                frame.vals.append(("int", wrap64(-val[1])))

        elif tag == "store":
            frame.env[item[1]] = frame.vals.pop()

        elif tag == "if":
            cond = frame.vals.pop()
            if cond[0] != "bool":
                return _err(ERR_TYPE)
            block = item[1] if cond[1] else item[2]
            if block is not None:
                for stmt in reversed(block.stmts):
                    frame.work.append(("stmt", stmt))

        elif tag == "loop":
            cond = frame.vals.pop()
            if cond[0] != "bool":
                return _err(ERR_TYPE)
            if cond[1]:
                loop = item[1]
                frame.work.append(("stmt", loop))
                for stmt in reversed(loop.body.stmts):
                    frame.work.append(("stmt", stmt))

        elif tag == "call":
            if remaining == 0:
                return FUEL_EXHAUSTED
            remaining -= 1
            name, argc = item[1], item[2]
            callee = fns.get(name)
            if callee is None:
                return _err(ERR_UNDEFINED_FN)
            if argc != len(callee.params):
                return _err(ERR_ARITY)
            callargs = frame.vals[len(frame.vals) - argc:]
            del frame.vals[len(frame.vals) - argc:]
            frames.append(_new_frame(callee, callargs))

        else:  # "ret"
            val = frame.vals.pop()
            frames.pop()
            if not frames:
                return _ok(val)
            frames[-1].vals.append(val)


def _new_frame(fn: FnDef, args: list[Value]) -> _Frame:
    frame = _Frame(env=dict(zip(fn.params, args)))
    for stmt in reversed(fn.body.stmts):
        frame.work.append(("stmt", stmt))
    return frame


def _apply_binary(op: str, left: Value, right: Value):
    """Type-check after both operands are evaluated, then apply."""
    lt, lv = left
    rt, rv = right
    if op in ("+", "-", "*", "/", "%"):
        if lt != "int" or rt != "int":
            return _err(ERR_TYPE)
        if op == "+":
            return ("int", wrap64(lv + rv))
        if op == "-":
            return ("int", wrap64(lv - rv))
        if op == "*":
            return ("int", wrap64(lv * rv))
        if rv == 0:
            return _err(ERR_DIV_BY_ZERO)
        q = _trunc_div(lv, rv)
        if op == "/":
            return ("int", wrap64(q))
        return ("int", wrap64(lv - q * rv))
    if op in ("<", "<=", ">", ">="):
        if lt != "int" or rt != "int":
            return _err(ERR_TYPE)
        if op == "<":
            return ("bool", lv < rv)
        if op == "<=":
            return ("bool", lv <= rv)
        if op == ">":
            return ("bool", lv > rv)
        return ("bool", lv >= rv)
    if op in ("==", "!="):
        if lt != rt:
            return _err(ERR_TYPE)
        return ("bool", (lv == rv) if op == "==" else (lv != rv))
    # "&&" and "||": both operands always evaluate (no short-circuit), which
    # keeps operand-order rewrites exact.
    if lt != "bool" or rt != "bool":
        return _err(ERR_TYPE)
    return ("bool", (lv and rv) if op == "&&" else (lv or rv))
