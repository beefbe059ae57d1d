"""Emit interval invariants as assume statements.

Assumptions are anchored at loops (before the condition and at the top
of the body), conditionals, assertions, and calls, and restricted to the
variables that occur in the anchor statement.  Because every emitted
bound comes from a sound analysis state, the assumptions never prune a
feasible execution: the instrumented program behaves identically.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .absint import AbstractState, AnalysisConfig, transfer_assume
from .lang import (
    Assert,
    Assume,
    Binary,
    Call,
    Expr,
    FALSE,
    Function,
    If,
    IntLit,
    Program,
    Stmt,
    Var,
    While,
    free_vars,
)

LOOP_BEFORE = "loop-before"
LOOP_INSIDE = "loop-inside"
CONDITIONAL = "conditional"
ASSERTION = "assertion"
CALL = "call"


@dataclass(frozen=True)
class InstrumentationPoint:
    function: str
    node: int
    kind: str
    vars: frozenset
    emitted: Expr


def _conjoin(parts: "list[Expr]") -> Expr:
    expr = parts[0]
    for p in parts[1:]:
        expr = Binary("&&", expr, p)
    return expr


def intervals_to_assume_expr(varnames, state: AbstractState) -> "Expr | None":
    """Bound conjunction over varnames, or None when nothing is known."""
    if state.is_bottom:
        return FALSE
    parts = []
    for name in sorted(varnames):
        iv = state.get(name)
        if not isinstance(iv.lo, float):
            parts.append(Binary(">=", Var(name), IntLit(iv.lo)))
        if not isinstance(iv.hi, float):
            parts.append(Binary("<=", Var(name), IntLit(iv.hi)))
    if not parts:
        return None
    return _conjoin(parts)


class _Instrumenter:
    def __init__(self, fname: str, analysis, config: AnalysisConfig):
        self.fname = fname
        self.cfg = analysis.cfg
        self.result = analysis.result
        self.config = config
        self.points: "list[InstrumentationPoint]" = []
        self.next_sid = 1 + max(
            (n.stmt.sid for n in self.cfg.nodes.values() if n.stmt is not None),
            default=0)

    def _assume(self, varnames, state, node: int, kind: str) -> "list[Stmt]":
        expr = intervals_to_assume_expr(varnames, state)
        if expr is None:
            return []
        self.points.append(InstrumentationPoint(
            self.fname, node, kind, frozenset(varnames), expr))
        stmt = Assume(cond=expr, sid=self.next_sid)
        self.next_sid += 1
        return [stmt]

    def _state_before(self, stmt: Stmt) -> "AbstractState | None":
        node = self.cfg.stmt_node.get(stmt.sid)
        if node is None:
            return None
        return self.result.before.get(node)

    def block(self, stmts) -> "list[Stmt]":
        out = []
        for stmt in stmts:
            out.extend(self.stmt(stmt))
        return out

    def stmt(self, stmt: Stmt) -> "list[Stmt]":
        node = self.cfg.stmt_node.get(stmt.sid)
        state = self._state_before(stmt)
        if state is None:
            return [stmt]
        if isinstance(stmt, While):
            head = self._assume(free_vars(stmt.cond), state, node, LOOP_BEFORE)
            inside_state = transfer_assume(state, stmt.cond, True, self.config)
            inside = self._assume(free_vars(stmt.cond), inside_state, node,
                                  LOOP_INSIDE)
            body = inside + self.block(stmt.body)
            return head + [replace(stmt, body=body)]
        if isinstance(stmt, If):
            pre = self._assume(free_vars(stmt.cond), state, node, CONDITIONAL)
            orelse = None if stmt.orelse is None else self.block(stmt.orelse)
            return pre + [replace(stmt, then=self.block(stmt.then), orelse=orelse)]
        if isinstance(stmt, Assert):
            return self._assume(free_vars(stmt.cond), state, node,
                                ASSERTION) + [stmt]
        if isinstance(stmt, Call):
            varnames = set()
            for a in stmt.args:
                varnames |= free_vars(a)
            return self._assume(varnames, state, node, CALL) + [stmt]
        return [stmt]


def instrument_program(prog: Program, analyses,
                       config: "AnalysisConfig | None" = None
                       ) -> "tuple[Program, list[InstrumentationPoint]]":
    config = config or AnalysisConfig()
    points: "list[InstrumentationPoint]" = []
    functions = {}
    for name, fn in prog.functions.items():
        worker = _Instrumenter(name, analyses[name], config)
        body = worker.block(fn.body)
        functions[name] = Function(fn.name, fn.params, body, fn.locals)
        points.extend(worker.points)
    return Program(functions, prog.entry), points
