"""Source rendering for the mini language; output re-parses to an equal AST."""

from __future__ import annotations

from .ast import (
    Assert,
    Assign,
    Assume,
    Binary,
    BoolLit,
    Call,
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
)

# Binding strength; children with strictly lower strength get parentheses.
_PREC = {
    "||": 1,
    "&&": 2,
    "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6,
}
# '!' binds tighter than comparisons in the grammar, so its operand is
# parenthesized unless it is a literal or another unary.
_UNARY_PREC = {"not": 7, "neg": 7}


def expr_to_source(e: Expr) -> str:
    return _expr(e, 0)


def _expr(e: Expr, parent_prec: int) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Nondet):
        if e.lo is None:
            return "nondet()"
        return "nondet(%d, %d)" % (e.lo, e.hi)
    if isinstance(e, Unary):
        prec = _UNARY_PREC[e.op]
        sym = "!" if e.op == "not" else "-"
        inner = _expr(e.operand, prec)
        # Guard "- -x" from lexing as a decrement-like token soup.
        if sym == "-" and inner.startswith("-"):
            inner = "(%s)" % inner
        text = sym + inner
        return text if prec >= parent_prec else "(%s)" % text
    if isinstance(e, Binary):
        prec = _PREC[e.op]
        # Left-associative: the right child needs parens at equal strength.
        left = _expr(e.left, prec)
        right = _expr(e.right, prec + 1)
        text = "%s %s %s" % (left, e.op, right)
        return text if prec >= parent_prec else "(%s)" % text
    raise TypeError(e)


def stmt_to_lines(s: Stmt, indent: int):
    pad = "    " * indent
    if isinstance(s, Decl):
        if s.init is None:
            yield "%sint %s;" % (pad, s.name)
        else:
            yield "%sint %s = %s;" % (pad, s.name, expr_to_source(s.init))
    elif isinstance(s, Assign):
        yield "%s%s = %s;" % (pad, s.target, expr_to_source(s.rhs))
    elif isinstance(s, Assume):
        yield "%sassume(%s);" % (pad, expr_to_source(s.cond))
    elif isinstance(s, Assert):
        yield "%sassert(%s);" % (pad, expr_to_source(s.cond))
    elif isinstance(s, If):
        yield "%sif (%s) {" % (pad, expr_to_source(s.cond))
        for sub in s.then:
            yield from stmt_to_lines(sub, indent + 1)
        if s.orelse is None:
            yield "%s}" % pad
        else:
            yield "%s} else {" % pad
            for sub in s.orelse:
                yield from stmt_to_lines(sub, indent + 1)
            yield "%s}" % pad
    elif isinstance(s, While):
        yield "%swhile (%s) {" % (pad, expr_to_source(s.cond))
        for sub in s.body:
            yield from stmt_to_lines(sub, indent + 1)
        yield "%s}" % pad
    elif isinstance(s, Call):
        args = ", ".join(expr_to_source(a) for a in s.args)
        if s.result is None:
            yield "%s%s(%s);" % (pad, s.callee, args)
        else:
            yield "%s%s = %s(%s);" % (pad, s.result, s.callee, args)
    elif isinstance(s, Return):
        yield "%sreturn %s;" % (pad, expr_to_source(s.value))
    elif isinstance(s, Skip):
        yield "%sskip;" % pad
    else:
        raise TypeError(s)


def function_to_source(fn: Function) -> str:
    lines = ["fn %s(%s) {" % (fn.name, ", ".join(fn.params))]
    for s in fn.body:
        lines.extend(stmt_to_lines(s, 1))
    lines.append("}")
    return "\n".join(lines)


def program_to_source(prog: Program) -> str:
    return "\n\n".join(function_to_source(fn) for fn in prog.functions.values()) + "\n"
