"""Lexer, parser, printer, interpreter, and prefix-viability tests."""
import itertools
import random

import pytest

from reladapt.errors import ParseError
from reladapt.minilang import (
    Assign, Binary, Block, BoolLit, Call, FnDef, Ident, If, IntLit, Let,
    Program, Return, Unary, While,
    interpret, lex, parse, prefix_viable, pretty, probe_vectors,
    run_outcomes, tokens_from_texts, vbool, vint, walk, wrap64,
)

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


def run(src, entry, *args, fuel=1_000_000):
    return interpret(parse(src), entry, list(args), fuel)


class TestLexer:
    def test_spans_are_one_based(self):
        toks = lex("fn f() {\n  return 1;\n}")
        assert (toks[0].line, toks[0].col) == (1, 1)
        ret = [t for t in toks if t.kind == "return"][0]
        assert (ret.line, ret.col) == (2, 3)

    def test_two_char_symbols_win(self):
        kinds = [t.kind for t in lex("a<=b==c&&d")]
        assert kinds == ["IDENT", "<=", "IDENT", "==", "IDENT", "&&", "IDENT"]

    def test_minus_minus_is_two_tokens(self):
        assert [t.kind for t in lex("--x")] == ["-", "-", "IDENT"]

    def test_stray_ampersand(self):
        with pytest.raises(ParseError) as exc:
            lex("a & b")
        assert exc.value.expected == ("&&",)

    def test_keywords_not_idents(self):
        assert [t.kind for t in lex("while whilex")] == ["while", "IDENT"]


class TestParser:
    def test_spec_error_example(self):
        # "fn f(){let;}" errors at ";" expecting IDENT
        with pytest.raises(ParseError) as exc:
            parse("fn f(){let;}")
        assert exc.value.expected == ("IDENT",)
        assert (exc.value.line, exc.value.col) == (1, 11)

    def test_precedence_chain(self):
        p = parse("fn f(){return 1 + 2 * 3;}")
        ret = p.functions[0].body.stmts[0]
        assert ret.expr == Binary("+", IntLit(1), Binary("*", IntLit(2), IntLit(3)))

    def test_left_associativity(self):
        p = parse("fn f(){return 10 - 3 - 2;}")
        ret = p.functions[0].body.stmts[0]
        assert ret.expr == Binary("-", Binary("-", IntLit(10), IntLit(3)), IntLit(2))

    def test_comparison_non_associative(self):
        with pytest.raises(ParseError):
            parse("fn f(){return 1 < 2 < 3;}")

    def test_parens_are_transparent(self):
        assert parse("fn f(){return (1);}") == parse("fn f(){return 1;}")

    def test_else_presence_is_structural(self):
        with_else = parse("fn f(a){if (a) {} else {}\nreturn 1;}")
        without = parse("fn f(a){if (a) {}\nreturn 1;}")
        assert with_else != without

    def test_call_versus_ident(self):
        p = parse("fn f(g){return g(1, 2) + g;}")
        expr = p.functions[0].body.stmts[0].expr
        assert expr.left == Call("g", (IntLit(1), IntLit(2)))
        assert expr.right == Ident("g")

    def test_int_literal_out_of_range(self):
        parse(f"fn f(){{return {INT64_MAX};}}")
        with pytest.raises(ParseError):
            parse(f"fn f(){{return {INT64_MAX + 1};}}")

    def test_empty_program_rejected(self):
        with pytest.raises(ParseError):
            parse("")


class TestPrinter:
    def test_spec_example(self):
        p = Program((FnDef("f", (), Block((Return(IntLit(1)),))),))
        assert pretty(p) == "fn f() {\n  return 1;\n}\n"

    def test_right_nesting_parenthesized(self):
        p = Program((FnDef("f", (), Block((
            Return(Binary("-", IntLit(1), Binary("-", IntLit(2), IntLit(3)))),
        )),),))
        assert "1 - (2 - 3)" in pretty(p)
        assert parse(pretty(p)) == p

    def test_not_of_comparison(self):
        p = parse("fn f(x){if (!(x < 0)) { return 1; } else { return 2; }}")
        assert "!(x < 0)" in pretty(p)

    def test_roundtrip_on_handwritten_sources(self, corpus_programs):
        for _, program in corpus_programs:
            assert parse(pretty(program)) == program

    def test_idempotent(self, corpus_programs):
        for _, program in corpus_programs:
            text = pretty(program)
            assert pretty(parse(text)) == text

    def test_roundtrip_on_random_asts(self):
        rng = random.Random(4021)
        for _ in range(300):
            program = random_program(rng)
            assert parse(pretty(program)) == program


class TestInterp:
    def test_arithmetic_wraps(self):
        assert str(run("fn main(){return 9223372036854775807+1;}", "main")) == \
            "Ok(int -9223372036854775808)"
        assert run("fn f(){return 0-9223372036854775807-1;}", "f").value == \
            ("int", INT64_MIN)
        assert run("fn f(a){return a*a;}", "f", vint(2**32)).value == ("int", 0)

    def test_truncating_division(self):
        assert run("fn f(){return 7/2;}", "f").value == ("int", 3)
        assert run("fn f(){return 0-7/2;}", "f").value == ("int", -3)
        assert run("fn f(a,b){return a/b;}", "f", vint(-7), vint(2)).value == ("int", -3)
        assert run("fn f(a,b){return a%b;}", "f", vint(-7), vint(2)).value == ("int", -1)
        assert run("fn f(a,b){return a%b;}", "f", vint(7), vint(-2)).value == ("int", 1)

    def test_int_min_division_edge(self):
        assert run("fn f(a,b){return a/b;}", "f",
                   vint(INT64_MIN), vint(-1)).value == ("int", INT64_MIN)
        assert run("fn f(a,b){return a%b;}", "f",
                   vint(INT64_MIN), vint(-1)).value == ("int", 0)

    def test_error_kinds(self):
        assert run("fn f(){return 1/0;}", "f").error == "DivByZero"
        assert run("fn f(){return 1%0;}", "f").error == "DivByZero"
        assert run("fn f(){return true+1;}", "f").error == "TypeError"
        assert run("fn f(){return x;}", "f").error == "UndefinedVar"
        assert run("fn f(){return g();}", "f").error == "UndefinedFn"
        assert run("fn f(){let x=1;}", "f").error == "NoReturn"
        assert run("fn g(a){return a;} fn f(){return g();}", "f").error == "ArityMismatch"
        assert interpret(parse("fn f(){return 1;}"), "nope", []).error == "UndefinedFn"
        assert interpret(parse("fn f(){return 1;}"), "f", [vint(1)]).error == "ArityMismatch"

    def test_assign_to_unbound_name(self):
        assert run("fn f(){x = 1; return 0;}", "f").error == "UndefinedVar"

    def test_let_rebinds(self):
        assert run("fn f(){let x=1; let x=2; return x;}", "f").value == ("int", 2)

    def test_no_short_circuit(self):
        # Both operands evaluate before the type check.
        assert run("fn f(){return true || (1/0 == 1);}", "f").error == "DivByZero"
        assert run("fn f(){return false && (1/0 == 1);}", "f").error == "DivByZero"

    def test_equality_is_typed(self):
        assert run("fn f(){return 1 == true;}", "f").error == "TypeError"
        assert run("fn f(){return true == true;}", "f").value == ("bool", True)

    def test_bool_int_distinct(self):
        a = run("fn f(){return 1;}", "f")
        b = run("fn f(){return true;}", "f")
        assert a != b

    def test_condition_must_be_bool(self):
        assert run("fn f(){if (1) { return 1; } return 2;}", "f").error == "TypeError"
        assert run("fn f(){while (1) {} return 2;}", "f").error == "TypeError"

    def test_fuel_exhaustion_and_monotonicity(self):
        src = "fn f(){let i=0; while (i < 10) { i = i + 1; } return i;}"
        program = parse(src)
        # Find the minimal fuel, then every larger budget must agree.
        outcome_big = interpret(program, "f", [], 10_000)
        assert outcome_big.value == ("int", 10)
        needed = next(f for f in range(1, 200)
                      if interpret(program, "f", [], f).status == "ok")
        for fuel in (needed, needed + 1, needed * 2, needed * 10):
            assert interpret(program, "f", [], fuel) == outcome_big
        assert interpret(program, "f", [], needed - 1).status == "fuel"

    def test_fuel_accounting_statement_and_ops(self):
        # return (1 stmt) + one binary op = 2 fuel.
        src = "fn f(){return 1+1;}"
        assert interpret(parse(src), "f", [], 2).status == "ok"
        assert interpret(parse(src), "f", [], 1).status == "fuel"

    def test_recursion_bounded_by_fuel_not_host_stack(self):
        assert run("fn f(){return f();}", "f", fuel=200_000).status == "fuel"

    def test_mutual_recursion(self):
        src = ("fn even(n){if (n == 0) { return true; } return odd(n - 1);}"
               "fn odd(n){if (n == 0) { return false; } return even(n - 1);}"
               "fn main(n){return even(n);}")
        assert run(src, "main", vint(10)).value == ("bool", True)
        assert run(src, "main", vint(7)).value == ("bool", False)

    def test_determinism(self, corpus_programs):
        for _, program in corpus_programs[:10]:
            entry = program.functions[0]
            vectors = probe_vectors(7, len(entry.params), count=5)
            first = run_outcomes(program, entry.name, vectors)
            second = run_outcomes(program, entry.name, vectors)
            assert first == second


class TestPrefixViability:
    def test_spec_examples(self):
        assert prefix_viable(["fn", "main", "("]) is True
        assert prefix_viable(["fn", "fn"]) is False

    def test_empty_prefix_viable(self):
        assert prefix_viable([]) is True

    def test_complete_program_viable(self):
        toks = [t.text for t in lex("fn f() { return 1; }")]
        assert prefix_viable(toks) is True

    def test_every_proper_prefix_of_corpus_viable(self, corpus_sources):
        for src in corpus_sources:
            toks = lex(src)
            for k in range(len(toks)):
                assert prefix_viable(toks[:k]) is True

    def test_monotone_dead_prefixes(self):
        rng = random.Random(99)
        alphabet = ["fn", "main", "x", "(", ")", "{", "}", ";", "=", "let",
                    "return", "1", "+", "if", "else", "while", "<", "!", ","]
        for _ in range(300):
            seq = [rng.choice(alphabet) for _ in range(rng.randint(1, 25))]
            dead = None
            for k in range(1, len(seq) + 1):
                if not prefix_viable(seq[:k]):
                    dead = k
                    break
            if dead is not None:
                # Extending a dead prefix can never revive it.
                for _ in range(5):
                    ext = seq[:dead] + [rng.choice(alphabet)
                                        for _ in range(rng.randint(1, 4))]
                    assert prefix_viable(ext) is False

    def test_agrees_with_bruteforce_extension(self):
        # On tiny programs, cross-check against exhaustive 3-token extension
        # over a restricted alphabet (program's own tokens plus else/,).
        sources = [
            "fn f() { return 1; }",
            "fn f(x) { let y = x + 1; return y; }",
            "fn f(a) { if (a < 1) { return 0; } return a; }",
        ]
        for src in sources:
            toks = [t.text for t in lex(src)]
            alphabet = sorted(set(toks) | {"else", ","})
            for k in range(1, len(toks) + 1):
                for tok in alphabet:
                    prefix = toks[:k] + [tok]
                    claimed = prefix_viable(prefix)
                    found = _completes_within(prefix, alphabet, depth=3)
                    if found:
                        assert claimed, f"rejects completable {prefix}"
                    if not claimed:
                        assert not found

    def test_fuzzed_sequences_never_crash(self):
        rng = random.Random(1234)
        vocab = ["fn", "let", "if", "else", "while", "return", "true",
                 "false", "main", "foo", "x", "0", "1", "42", "(", ")", "{",
                 "}", ",", ";", "=", "==", "!=", "<", "<=", ">", ">=", "+",
                 "-", "*", "/", "%", "&&", "||", "!"]
        for _ in range(1000):
            seq = [rng.choice(vocab) for _ in range(rng.randint(0, 30))]
            result = prefix_viable(seq)
            assert result in (True, False)


def _completes_within(prefix, alphabet, depth):
    """Does some extension of at most `depth` tokens parse completely?

    Prunes on errors strictly inside the sequence: the parse is
    deterministic left-to-right, so those fail identically under every
    extension (test_monotone_dead_prefixes checks that independently).
    """
    from reladapt.minilang import parse_tokens
    try:
        parse_tokens(tokens_from_texts(prefix))
        return True
    except ParseError as exc:
        if exc.index < len(prefix):
            return False
    if depth == 0:
        return False
    return any(_completes_within(prefix + [t], alphabet, depth - 1)
               for t in alphabet)


class TestProbe:
    def test_vectors_are_deterministic(self):
        assert probe_vectors(3, 2) == probe_vectors(3, 2)
        assert probe_vectors(3, 2) != probe_vectors(4, 2)

    def test_digest_separates_behavior(self):
        from reladapt.minilang import outcomes_digest
        p1 = parse("fn main(a){return a + 1;}")
        p2 = parse("fn main(a){return 1 + a;}")
        p3 = parse("fn main(a){return a + 2;}")
        assert outcomes_digest(p1, "main", 5) == outcomes_digest(p2, "main", 5)
        assert outcomes_digest(p1, "main", 5) != outcomes_digest(p3, "main", 5)


# --- random AST generation for round-trip fuzzing ---

_OPS = ["||", "&&", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/", "%"]
_NAMES = ["a", "b", "c", "x", "y", "total", "acc"]


def random_expr(rng, depth):
    if depth <= 0 or rng.random() < 0.3:
        return rng.choice([
            IntLit(rng.randint(0, 99)),
            BoolLit(rng.random() < 0.5),
            Ident(rng.choice(_NAMES)),
        ])
    roll = rng.random()
    if roll < 0.55:
        return Binary(rng.choice(_OPS), random_expr(rng, depth - 1),
                      random_expr(rng, depth - 1))
    if roll < 0.75:
        return Unary(rng.choice(["!", "-"]), random_expr(rng, depth - 1))
    args = tuple(random_expr(rng, depth - 1) for _ in range(rng.randint(0, 2)))
    return Call(rng.choice(["helper", "calc"]), args)


def random_stmt(rng, depth):
    roll = rng.random()
    if roll < 0.3:
        return Let(rng.choice(_NAMES), random_expr(rng, depth))
    if roll < 0.5:
        return Assign(rng.choice(_NAMES), random_expr(rng, depth))
    if roll < 0.7:
        return Return(random_expr(rng, depth))
    if roll < 0.85:
        orelse = random_block(rng, depth - 1) if rng.random() < 0.5 else None
        return If(random_expr(rng, depth - 1), random_block(rng, depth - 1), orelse)
    return While(random_expr(rng, depth - 1), random_block(rng, depth - 1))


def random_block(rng, depth):
    if depth <= 0:
        return Block(())
    return Block(tuple(random_stmt(rng, depth)
                       for _ in range(rng.randint(0, 3))))


def random_program(rng):
    fns = []
    for i in range(rng.randint(1, 2)):
        params = tuple(rng.sample(_NAMES, rng.randint(0, 3)))
        body = Block(tuple(random_stmt(rng, 3) for _ in range(rng.randint(1, 4))))
        fns.append(FnDef(f"fun{i}", params, body))
    return Program(tuple(fns))
