"""Lexer and recursive-descent parser for the mini language.

Parsing also enforces well-formedness: declaration before use, unique
names per function, disjoint arithmetic/boolean expression sorts, call
arity, and absence of recursion.
"""

from __future__ import annotations

import re

from .ast import (
    ARITH_OPS,
    Assert,
    Assign,
    Assume,
    Binary,
    BoolLit,
    Call,
    CMP_OPS,
    Decl,
    Expr,
    Function,
    If,
    IntLit,
    Nondet,
    Program,
    Return,
    Skip,
    Stmt,
    Unary,
    Var,
    While,
    sort_of,
    walk_stmts,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__("%d:%d: %s" % (line, col, message))
        self.message = message
        self.line = line
        self.col = col


_KEYWORDS = {
    "fn", "int", "if", "else", "while", "assert", "assume",
    "return", "skip", "nondet", "true", "false",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>==|!=|<=|>=|&&|\|\||[-+*/<>=!(){},;])
    """,
    re.VERBOSE,
)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return "Token(%s, %r)" % (self.kind, self.text)


def tokenize(source: str):
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError("unexpected character %r" % source[pos], line, col)
        text = m.group(0)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            if kind == "ident" and text in _KEYWORDS:
                kind = text
            elif kind == "op" and text in "(){},;":
                kind = text
            tokens.append(Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# Precedence-climbing table over the unified expression grammar; sorts
# are checked after construction so arithmetic and boolean never mix.
_BINOPS = {
    "||": 1, "&&": 2,
    "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5, "*": 6, "/": 6,
}


class Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0
        self.next_sid = 0
        self.declared: "set[str]" = set()
        self.decl_order: "list[str]" = []

    # --- token plumbing ---

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError("expected %r, found %r" % (kind, tok.text or "end of input"),
                             tok.line, tok.col)
        return self.advance()

    def error(self, message: str, tok: "Token | None" = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    def fresh_sid(self) -> int:
        self.next_sid += 1
        return self.next_sid

    # --- grammar ---

    def parse_program(self) -> Program:
        functions = {}
        while self.peek().kind != "eof":
            tok = self.peek()
            fn = self.parse_function()
            if fn.name in functions:
                self.error("duplicate function %r" % fn.name, tok)
            functions[fn.name] = fn
        if "main" not in functions:
            tok = self.peek()
            raise ParseError("no entry function 'main'", tok.line, tok.col)
        prog = Program(functions=functions, entry="main")
        self._validate_calls(prog)
        return prog

    def parse_function(self) -> Function:
        self.expect("fn")
        name = self.expect("ident").text
        self.expect("(")
        params = []
        if self.peek().kind != ")":
            while True:
                ptok = self.expect("ident")
                if ptok.text in params:
                    self.error("duplicate parameter %r" % ptok.text, ptok)
                params.append(ptok.text)
                if self.peek().kind != ",":
                    break
                self.advance()
        self.expect(")")
        self.declared = set(params)
        self.decl_order = []
        body = self.parse_block()
        return Function(name=name, params=tuple(params), body=body,
                        locals=tuple(self.decl_order))

    def parse_block(self) -> "list[Stmt]":
        self.expect("{")
        stmts = []
        while self.peek().kind != "}":
            stmts.append(self.parse_item())
        self.expect("}")
        return stmts

    def parse_item(self) -> Stmt:
        tok = self.peek()
        if tok.kind == "int":
            return self.parse_decl()
        return self.parse_stmt()

    def parse_decl(self) -> Decl:
        self.expect("int")
        nametok = self.expect("ident")
        name = nametok.text
        if name in self.declared:
            self.error("redeclaration of %r" % name, nametok)
        init = None
        if self.peek().kind == "op" and self.peek().text == "=":
            self.advance()
            init = self.parse_rhs()
        self.expect(";")
        self.declared.add(name)
        self.decl_order.append(name)
        return Decl(name=name, init=init, sid=self.fresh_sid())

    def parse_rhs(self) -> Expr:
        # Assignment right-hand side: nondet(...) or an arithmetic expression.
        if self.peek().kind == "nondet":
            return self.parse_nondet()
        tok = self.peek()
        e = self.parse_expr()
        self._check_sort(e, "int", tok)
        return e

    def parse_nondet(self) -> Nondet:
        tok = self.expect("nondet")
        self.expect("(")
        lo = hi = None
        if self.peek().kind != ")":
            lo = self.parse_int_bound()
            self.expect(",")
            hi = self.parse_int_bound()
            if lo > hi:
                self.error("nondet bounds reversed: %d > %d" % (lo, hi), tok)
        self.expect(")")
        return Nondet(lo, hi)

    def parse_int_bound(self) -> int:
        neg = False
        if self.peek().kind == "op" and self.peek().text == "-":
            self.advance()
            neg = True
        tok = self.expect("int")
        v = int(tok.text)
        return -v if neg else v

    def parse_stmt(self) -> Stmt:
        tok = self.peek()
        if tok.kind == "if":
            return self.parse_if()
        if tok.kind == "while":
            return self.parse_while()
        if tok.kind == "assert":
            self.advance()
            self.expect("(")
            cond = self.parse_cond()
            self.expect(")")
            self.expect(";")
            return Assert(cond=cond, sid=self.fresh_sid())
        if tok.kind == "assume":
            self.advance()
            self.expect("(")
            cond = self.parse_cond()
            self.expect(")")
            self.expect(";")
            return Assume(cond=cond, sid=self.fresh_sid())
        if tok.kind == "return":
            self.advance()
            rtok = self.peek()
            value = self.parse_expr()
            self._check_sort(value, "int", rtok)
            self.expect(";")
            return Return(value=value, sid=self.fresh_sid())
        if tok.kind == "skip":
            self.advance()
            self.expect(";")
            return Skip(sid=self.fresh_sid())
        if tok.kind == "ident":
            return self.parse_assign_or_call()
        self.error("expected a statement, found %r" % (tok.text or "end of input"))

    def parse_assign_or_call(self) -> Stmt:
        nametok = self.expect("ident")
        name = nametok.text
        nxt = self.peek()
        if nxt.kind == "(":
            call = self.parse_call_tail(name, result=None, tok=nametok)
            return call
        if not (nxt.kind == "op" and nxt.text == "="):
            self.error("expected '=' or '(' after %r" % name, nxt)
        self.advance()
        if name not in self.declared:
            self.error("assignment to undeclared variable %r" % name, nametok)
        if self.peek().kind == "ident" and self.peek(1).kind == "(":
            calleetok = self.advance()
            call = self.parse_call_tail(calleetok.text, result=name, tok=calleetok)
            return call
        rhs = self.parse_rhs()
        self.expect(";")
        return Assign(target=name, rhs=rhs, sid=self.fresh_sid())

    def parse_call_tail(self, callee: str, result: "str | None", tok: Token) -> Call:
        self.expect("(")
        args = []
        if self.peek().kind != ")":
            while True:
                atok = self.peek()
                a = self.parse_expr()
                self._check_sort(a, "int", atok)
                args.append(a)
                if self.peek().kind != ",":
                    break
                self.advance()
        self.expect(")")
        self.expect(";")
        call = Call(callee=callee, args=tuple(args), result=result, sid=self.fresh_sid())
        call._loc = (tok.line, tok.col)
        return call

    def parse_if(self) -> If:
        self.expect("if")
        self.expect("(")
        cond = self.parse_cond()
        self.expect(")")
        then = self.parse_block()
        orelse = None
        if self.peek().kind == "else":
            self.advance()
            orelse = self.parse_block()
        return If(cond=cond, then=then, orelse=orelse, sid=self.fresh_sid())

    def parse_while(self) -> While:
        self.expect("while")
        self.expect("(")
        cond = self.parse_cond()
        self.expect(")")
        body = self.parse_block()
        return While(cond=cond, body=body, sid=self.fresh_sid())

    def parse_cond(self) -> Expr:
        tok = self.peek()
        e = self.parse_expr()
        self._check_sort(e, "bool", tok)
        return e

    # --- unified expressions (sorts checked afterwards) ---

    def parse_expr(self, min_prec: int = 1) -> Expr:
        left = self.parse_unary()
        while True:
            tok = self.peek()
            if tok.kind != "op" or tok.text not in _BINOPS:
                break
            prec = _BINOPS[tok.text]
            if prec < min_prec:
                break
            self.advance()
            right = self.parse_expr(prec + 1)
            left = Binary(tok.text, left, right)
        return left

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Unary("neg", self.parse_unary())
        if tok.kind == "op" and tok.text == "!":
            self.advance()
            return Unary("not", self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return IntLit(int(tok.text))
        if tok.kind == "true":
            self.advance()
            return BoolLit(True)
        if tok.kind == "false":
            self.advance()
            return BoolLit(False)
        if tok.kind == "ident":
            self.advance()
            if tok.text not in self.declared:
                self.error("use of undeclared variable %r" % tok.text, tok)
            return Var(tok.text)
        if tok.kind == "(":
            self.advance()
            e = self.parse_expr()
            self.expect(")")
            return e
        self.error("expected an expression, found %r" % (tok.text or "end of input"))

    def _check_sort(self, e: Expr, expected: str, tok: Token):
        try:
            actual = _deep_sort(e)
        except _SortError as exc:
            raise ParseError(str(exc), tok.line, tok.col) from None
        if actual != expected:
            self.error("expected %s expression, found %s expression" % (expected, actual), tok)

    # --- post-parse call validation ---

    def _validate_calls(self, prog: Program):
        calls = {name: [] for name in prog.functions}
        for fname, fn in prog.functions.items():
            for s in walk_stmts(fn.body):
                if isinstance(s, Call):
                    line, col = getattr(s, "_loc", (0, 0))
                    callee = prog.functions.get(s.callee)
                    if callee is None:
                        raise ParseError("call to undefined function %r" % s.callee, line, col)
                    if len(s.args) != len(callee.params):
                        raise ParseError(
                            "arity mismatch: %s takes %d arguments, got %d"
                            % (s.callee, len(callee.params), len(s.args)), line, col)
                    if s.result is not None and not callee.has_return:
                        raise ParseError(
                            "function %r does not return a value" % s.callee, line, col)
                    calls[fname].append((s.callee, line, col))
        # Reject recursion (including mutual) with a simple cycle check.
        state = {}

        def visit(name):
            state[name] = "active"
            for callee, line, col in calls[name]:
                if state.get(callee) == "active":
                    raise ParseError("recursive call via %r" % callee, line, col)
                if callee not in state:
                    visit(callee)
            state[name] = "done"

        for name in prog.functions:
            if name not in state:
                visit(name)


class _SortError(Exception):
    pass


def _deep_sort(e: Expr) -> str:
    if isinstance(e, Unary):
        inner = _deep_sort(e.operand)
        want = "int" if e.op == "neg" else "bool"
        if inner != want:
            raise _SortError("operand of %r must be %s" % ("-" if e.op == "neg" else "!", want))
        return want
    if isinstance(e, Binary):
        ls, rs = _deep_sort(e.left), _deep_sort(e.right)
        if e.op in ARITH_OPS:
            if ls != "int" or rs != "int":
                raise _SortError("arithmetic operator %r needs integer operands" % e.op)
            return "int"
        if e.op in CMP_OPS:
            if ls != "int" or rs != "int":
                raise _SortError("comparison %r needs integer operands" % e.op)
            return "bool"
        if ls != "bool" or rs != "bool":
            raise _SortError("logical operator %r needs boolean operands" % e.op)
        return "bool"
    return sort_of(e)


def parse_program(source: str) -> Program:
    return Parser(tokenize(source)).parse_program()


def parse_condition(source: str, varnames) -> Expr:
    """Parse a stand-alone condition over the given variable names."""
    parser = Parser(tokenize(source))
    parser.declared = set(varnames)
    cond = parser.parse_cond()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError("trailing input after condition", tok.line, tok.col)
    return cond
