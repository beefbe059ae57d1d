import pytest

from intana.lang import (
    Binary,
    Call,
    Decl,
    IntLit,
    Nondet,
    ParseError,
    Unary,
    Var,
    While,
    build_cfg,
    expr_to_source,
    free_vars,
    parse_condition,
    parse_program,
    program_to_source,
    reverse_postorder,
    walk_stmts,
)

LOOP = """
fn main() {
    int i = 0;
    while (i < 10) {
        i = i + 1;
    }
}
"""


class TestParser:
    def test_basic_program(self):
        prog = parse_program(LOOP)
        body = prog.main.body
        assert isinstance(body[0], Decl) and body[0].name == "i"
        assert isinstance(body[1], While)
        assert prog.main.variables == ("i",)

    def test_operator_precedence(self):
        prog = parse_program("fn main() { int x = 1 + 2 * 3; }")
        init = prog.main.body[0].init
        assert isinstance(init, Binary) and init.op == "+"
        assert isinstance(init.right, Binary) and init.right.op == "*"

    def test_condition_connectives(self):
        prog = parse_program(
            "fn main() { int x = 0; if (x < 1 && x > -1 || !(x == 5)) { x = 1; } }")
        cond = prog.main.body[1].cond
        assert isinstance(cond, Binary) and cond.op == "||"
        assert cond.left.op == "&&"
        assert isinstance(cond.right, Unary) and cond.right.op == "not"

    def test_nondet_forms(self):
        prog = parse_program("fn main() { int a = nondet(); int b = nondet(-3, 3); }")
        a, b = prog.main.body
        assert isinstance(a.init, Nondet) and not a.init.bounded
        assert b.init == Nondet(-3, 3)

    def test_comments_ignored(self):
        prog = parse_program("fn main() { // nothing\n int x = 1; // init\n }")
        assert len(prog.main.body) == 1

    def test_calls(self):
        prog = parse_program("""
            fn f(a, b) { return a + b; }
            fn main() { int x = 1; x = f(x, 2); f(x, x); }
        """)
        value_call, plain_call = prog.main.body[1], prog.main.body[2]
        assert isinstance(value_call, Call) and value_call.result == "x"
        assert isinstance(plain_call, Call) and plain_call.result is None

    def test_sids_are_unique(self):
        prog = parse_program("""
            fn helper(p) { int h = 0; h = p; return h; }
            fn main() { int x = 1; if (x > 0) { x = 2; } while (x > 0) { x = x - 1; } }
        """)
        sids = [s.sid for fn in prog.functions.values() for s in walk_stmts(fn.body)]
        assert len(sids) == len(set(sids))
        assert all(sid >= 0 for sid in sids)


class TestParserErrors:
    @pytest.mark.parametrize("source,fragment", [
        ("fn main() { x = 1; }", "undeclared"),
        ("fn main() { int x = 1; int x = 2; }", "redeclaration"),
        ("fn main() { int a = nondet(3, 1); }", "bounds"),
        ("fn main() { int x = true; }", "int"),
        ("fn main() { if (1 + 2) { } }", "bool"),
        ("fn main() { int y; y = g(1); }", "g"),
        ("fn f(a) { return a; } fn main() { int y; y = f(1, 2); }", "argument"),
        ("fn f(a) { a = a; } fn main() { int y; y = f(1); }", "return"),
        ("fn f(a) { int y; y = f(a); return y; } fn main() { skip; }", "recursi"),
        ("fn main() { int x = ; }", "expression"),
    ])
    def test_rejected(self, source, fragment):
        with pytest.raises(ParseError) as err:
            parse_program(source)
        assert fragment.lower() in str(err.value).lower()

    def test_error_carries_location(self):
        with pytest.raises(ParseError) as err:
            parse_program("fn main() {\n    y = 1;\n}")
        assert err.value.line == 2

    def test_missing_main_rejected(self):
        with pytest.raises(ParseError):
            parse_program("fn helper(p) { return p; }")


class TestParseCondition:
    def test_standalone_condition(self):
        cond = parse_condition("x + y == 5", ["x", "y"])
        assert isinstance(cond, Binary) and cond.op == "=="
        assert free_vars(cond) == frozenset({"x", "y"})

    def test_unknown_variable_rejected(self):
        with pytest.raises(ParseError):
            parse_condition("x < z", ["x", "y"])


class TestPretty:
    @pytest.mark.parametrize("source", [
        "fn main() {\n    int x = 1 + 2 * 3;\n}\n",
        "fn main() {\n    int x = (1 + 2) * 3;\n}\n",
        "fn main() {\n    int x = 1 - (2 - 3);\n}\n",
        "fn main() {\n    int x = 0;\n    x = -(-x);\n}\n",
        "fn main() {\n    int x = 0;\n    if (!(x < 5) || x == 7 && x > 2) {\n        skip;\n    }\n}\n",
        "fn main() {\n    int x = nondet(-2, 2);\n    while (x < 2) {\n        x = x + 1;\n    }\n}\n",
    ])
    def test_round_trip_is_stable(self, source):
        once = program_to_source(parse_program(source))
        twice = program_to_source(parse_program(once))
        assert once == twice

    def test_expr_precedence_minimal_parens(self):
        e = Binary("*", Binary("+", Var("a"), IntLit(1)), Var("b"))
        assert expr_to_source(e) == "(a + 1) * b"
        e = Binary("+", Var("a"), Binary("*", IntLit(1), Var("b")))
        assert expr_to_source(e) == "a + 1 * b"

    def test_not_operand_parenthesized(self):
        e = Unary("not", Binary("<", Var("a"), IntLit(5)))
        assert expr_to_source(e) == "!(a < 5)"


class TestCfg:
    def test_loop_shape(self):
        prog = parse_program(LOOP)
        cfg = build_cfg(prog.main)
        assert len(cfg.loop_heads) == 1
        head = next(iter(cfg.loop_heads))
        assert cfg.nodes[head].kind == "cond"
        labels = sorted(label for _, label in cfg.successors(head))
        assert labels == ["branch-false", "branch-true"]

    def test_if_has_two_branches(self):
        prog = parse_program(
            "fn main() { int x = 0; if (x < 1) { x = 1; } else { x = 2; } x = 3; }")
        cfg = build_cfg(prog.main)
        conds = [n for n in cfg.nodes.values() if n.kind == "cond"]
        assert len(conds) == 1 and not cfg.loop_heads

    def test_statements_map_to_nodes(self):
        prog = parse_program(LOOP)
        cfg = build_cfg(prog.main)
        for stmt in walk_stmts(prog.main.body):
            assert stmt.sid in cfg.stmt_node

    def test_code_after_return_is_pruned(self):
        prog = parse_program(
            "fn f(a) { return a; int d = 1; } fn main() { int y; y = f(1); }")
        cfg = build_cfg(prog.functions["f"])
        kinds = [n.kind for n in cfg.nodes.values()]
        assert kinds.count("stmt") == 1  # only the return remains

    def test_reverse_postorder_starts_at_entry(self):
        prog = parse_program(LOOP)
        cfg = build_cfg(prog.main)
        order = reverse_postorder(cfg)
        assert order[0] == cfg.entry
        assert set(order) == set(cfg.nodes)
