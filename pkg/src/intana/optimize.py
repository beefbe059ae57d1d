"""Interval-driven program rewriting.

Three passes over an analyzed program: singleton propagation (replace a
variable read whose interval is a single value with that literal), guard
elimination (resolve conditions in three-valued logic, recursing into
boolean operands, and flatten the dead branches), and constant folding.

Every rewrite must preserve observable behavior, including failure
behavior: a condition is never replaced by a literal if doing so would
drop a division whose divisor may be zero, and division by a literal
zero is never folded.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .absint import (
    AbstractState,
    AnalysisConfig,
    analyze_program,
    eval_cond3,
    eval_expr,
)
from .contractor import classify_condition
from .interval import Truth3
from .lang import (
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
    FALSE,
    Function,
    If,
    IntLit,
    Program,
    Return,
    Stmt,
    TRUE,
    Unary,
    Var,
    While,
    subexprs,
    walk_stmts,
)


@dataclass
class RewriteReport:
    singletons_propagated: int = 0
    guards_true: int = 0
    guards_false: int = 0
    constants_folded: int = 0
    dead_branches_removed: int = 0

    @property
    def guards_eliminated(self) -> int:
        return self.guards_true + self.guards_false

    @property
    def changed(self) -> bool:
        return any((self.singletons_propagated, self.guards_true,
                    self.guards_false, self.constants_folded,
                    self.dead_branches_removed))

    def absorb(self, other: "RewriteReport") -> None:
        self.singletons_propagated += other.singletons_propagated
        self.guards_true += other.guards_true
        self.guards_false += other.guards_false
        self.constants_folded += other.constants_folded
        self.dead_branches_removed += other.dead_branches_removed


def has_division(e: Expr) -> bool:
    return any(isinstance(s, Binary) and s.op == "/" for s in subexprs(e))


def division_safe(e: Expr, state: AbstractState, arith: bool) -> bool:
    """True when no division in e can have a zero divisor under state."""
    for sub in subexprs(e):
        if isinstance(sub, Binary) and sub.op == "/":
            divisor = eval_expr(sub.right, state, arith)
            if divisor.is_bottom or 0 in divisor:
                return False
    return True


def _rebuild_function(fn: Function, body: "list[Stmt]") -> Function:
    locals_ = tuple(s.name for s in walk_stmts(body) if isinstance(s, Decl))
    return Function(fn.name, fn.params, body, locals_)


def _state_before(stmt: Stmt, analysis) -> "AbstractState | None":
    node = analysis.cfg.stmt_node.get(stmt.sid)
    if node is None:
        return None
    return analysis.result.before.get(node)


# --- singleton propagation ---------------------------------------------------

def _subst_singletons(e: Expr, state: AbstractState, report: RewriteReport) -> Expr:
    if isinstance(e, Var):
        iv = state.get(e.name)
        if iv.is_singleton:
            report.singletons_propagated += 1
            return IntLit(iv.lo)
        return e
    if isinstance(e, Unary):
        return Unary(e.op, _subst_singletons(e.operand, state, report))
    if isinstance(e, Binary):
        return Binary(e.op, _subst_singletons(e.left, state, report),
                      _subst_singletons(e.right, state, report))
    return e


def _propagate_stmt(stmt: Stmt, analysis, report: RewriteReport) -> Stmt:
    state = _state_before(stmt, analysis)
    usable = state is not None and not state.is_bottom
    sub = (lambda e: _subst_singletons(e, state, report)) if usable else (lambda e: e)
    if isinstance(stmt, Decl) and stmt.init is not None:
        return replace(stmt, init=sub(stmt.init))
    if isinstance(stmt, Assign):
        return replace(stmt, rhs=sub(stmt.rhs))
    if isinstance(stmt, (Assume, Assert)):
        return replace(stmt, cond=sub(stmt.cond))
    if isinstance(stmt, If):
        orelse = (None if stmt.orelse is None
                  else [_propagate_stmt(s, analysis, report) for s in stmt.orelse])
        return replace(stmt, cond=sub(stmt.cond),
                       then=[_propagate_stmt(s, analysis, report) for s in stmt.then],
                       orelse=orelse)
    if isinstance(stmt, While):
        return replace(stmt, cond=sub(stmt.cond),
                       body=[_propagate_stmt(s, analysis, report) for s in stmt.body])
    if isinstance(stmt, Call):
        return replace(stmt, args=tuple(sub(a) for a in stmt.args))
    if isinstance(stmt, Return):
        return replace(stmt, value=sub(stmt.value))
    return replace(stmt)


def singleton_propagate(prog: Program, analyses) -> "tuple[Program, RewriteReport]":
    report = RewriteReport()
    functions = {}
    for name, fn in prog.functions.items():
        body = [_propagate_stmt(s, analyses[name], report) for s in fn.body]
        functions[name] = _rebuild_function(fn, body)
    return Program(functions, prog.entry), report


# --- guard elimination -------------------------------------------------------

def _classify(cond: Expr, state: "AbstractState | None",
              config: AnalysisConfig) -> Truth3:
    if state is None or state.is_bottom:
        return Truth3.MAYBE
    if config.use_contractors:
        return classify_condition(cond, state.as_dict()).verdict
    return eval_cond3(cond, state, config.interval_arith)


def _literalize(cond: Expr, verdict: Truth3, state: AbstractState,
                config: AnalysisConfig, report: RewriteReport) -> "Expr | None":
    """The literal for a resolved condition, or None if it must stay."""
    if not division_safe(cond, state, config.interval_arith):
        return None
    if verdict is Truth3.TRUE:
        report.guards_true += 1
        return TRUE
    if verdict is Truth3.FALSE:
        report.guards_false += 1
        return FALSE
    return None


def _resolve_cond(cond: Expr, state: "AbstractState | None",
                  config: AnalysisConfig, report: RewriteReport) -> Expr:
    if isinstance(cond, BoolLit) or state is None or state.is_bottom:
        return cond
    verdict = _classify(cond, state, config)
    if verdict is not Truth3.MAYBE:
        lit = _literalize(cond, verdict, state, config, report)
        if lit is not None:
            return lit
    if isinstance(cond, Binary) and cond.op in ("&&", "||"):
        left = _resolve_cond(cond.left, state, config, report)
        right = _resolve_cond(cond.right, state, config, report)
        if left is not cond.left or right is not cond.right:
            rebuilt = Binary(cond.op, left, right)
            # One re-evaluation of the parent after operand substitution.
            verdict = _classify(rebuilt, state, config)
            if verdict is not Truth3.MAYBE:
                lit = _literalize(rebuilt, verdict, state, config, report)
                if lit is not None:
                    return lit
            return rebuilt
    if isinstance(cond, Unary) and cond.op == "not":
        inner = _resolve_cond(cond.operand, state, config, report)
        if inner is not cond.operand:
            return Unary("not", inner)
    return cond


def _eliminate_block(block, analysis, config, report) -> "list[Stmt]":
    out = []
    for stmt in block:
        out.extend(_eliminate_stmt(stmt, analysis, config, report))
    return out


def _eliminate_stmt(stmt: Stmt, analysis, config: AnalysisConfig,
                    report: RewriteReport) -> "list[Stmt]":
    if isinstance(stmt, (Assume, Assert)):
        state = _state_before(stmt, analysis)
        return [replace(stmt, cond=_resolve_cond(stmt.cond, state, config, report))]
    if isinstance(stmt, If):
        state = _state_before(stmt, analysis)
        cond = _resolve_cond(stmt.cond, state, config, report)
        if isinstance(cond, BoolLit):
            live = stmt.then if cond.value else (stmt.orelse or [])
            report.dead_branches_removed += 1
            return _eliminate_block(live, analysis, config, report)
        orelse = (None if stmt.orelse is None
                  else _eliminate_block(stmt.orelse, analysis, config, report))
        return [replace(stmt, cond=cond,
                        then=_eliminate_block(stmt.then, analysis, config, report),
                        orelse=orelse)]
    if isinstance(stmt, While):
        state = _state_before(stmt, analysis)
        cond = _resolve_cond(stmt.cond, state, config, report)
        if isinstance(cond, BoolLit) and not cond.value:
            report.dead_branches_removed += 1
            return []
        return [replace(stmt, cond=cond,
                        body=_eliminate_block(stmt.body, analysis, config, report))]
    return [replace(stmt)]


def guard_eliminate(prog: Program, analyses,
                    config: "AnalysisConfig | None" = None) -> "tuple[Program, RewriteReport]":
    config = config or AnalysisConfig()
    report = RewriteReport()
    functions = {}
    for name, fn in prog.functions.items():
        body = _eliminate_block(fn.body, analyses[name], config, report)
        functions[name] = _rebuild_function(fn, body)
    return Program(functions, prog.entry), report


# --- constant folding --------------------------------------------------------

def _fold_expr(e: Expr, report: RewriteReport) -> Expr:
    if isinstance(e, Unary):
        operand = _fold_expr(e.operand, report)
        if e.op == "neg" and isinstance(operand, IntLit):
            report.constants_folded += 1
            return IntLit(-operand.value)
        if e.op == "not" and isinstance(operand, BoolLit):
            report.constants_folded += 1
            return BoolLit(not operand.value)
        return Unary(e.op, operand) if operand is not e.operand else e
    if not isinstance(e, Binary):
        return e
    left = _fold_expr(e.left, report)
    right = _fold_expr(e.right, report)
    op = e.op
    if isinstance(left, IntLit) and isinstance(right, IntLit):
        if op in ARITH_OPS:
            if op == "/" and right.value == 0:
                pass  # left for the concrete checker to trap
            else:
                report.constants_folded += 1
                return IntLit(_fold_arith(op, left.value, right.value))
        elif op in CMP_OPS:
            report.constants_folded += 1
            return BoolLit(_fold_cmp(op, left.value, right.value))
    if op in ("&&", "||"):
        folded = _fold_bool(op, left, right, report)
        if folded is not None:
            return folded
    if left is not e.left or right is not e.right:
        return Binary(op, left, right)
    return e


def _fold_arith(op: str, a: int, b: int) -> int:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _fold_cmp(op: str, a: int, b: int) -> bool:
    return {"==": a == b, "!=": a != b, "<": a < b,
            "<=": a <= b, ">": a > b, ">=": a >= b}[op]


def _fold_bool(op: str, left: Expr, right: Expr,
               report: RewriteReport) -> "Expr | None":
    neutral = op == "&&"  # true is neutral for &&, false for ||
    for lit, other in ((left, right), (right, left)):
        if not isinstance(lit, BoolLit):
            continue
        if lit.value == neutral:
            report.constants_folded += 1
            return other
        # The absorbing literal discards the other operand entirely, which
        # is only behavior-preserving when it cannot divide by zero.
        if not has_division(other):
            report.constants_folded += 1
            return BoolLit(not neutral)
    return None


def _fold_block(block, report: RewriteReport) -> "list[Stmt]":
    out = []
    for stmt in block:
        out.extend(_fold_stmt(stmt, report))
    return out


def _fold_stmt(stmt: Stmt, report: RewriteReport) -> "list[Stmt]":
    if isinstance(stmt, Decl) and stmt.init is not None:
        return [replace(stmt, init=_fold_expr(stmt.init, report))]
    if isinstance(stmt, Assign):
        return [replace(stmt, rhs=_fold_expr(stmt.rhs, report))]
    if isinstance(stmt, (Assume, Assert)):
        return [replace(stmt, cond=_fold_expr(stmt.cond, report))]
    if isinstance(stmt, If):
        cond = _fold_expr(stmt.cond, report)
        if isinstance(cond, BoolLit):
            report.dead_branches_removed += 1
            return _fold_block(stmt.then if cond.value else (stmt.orelse or []),
                               report)
        orelse = None if stmt.orelse is None else _fold_block(stmt.orelse, report)
        return [replace(stmt, cond=cond, then=_fold_block(stmt.then, report),
                        orelse=orelse)]
    if isinstance(stmt, While):
        cond = _fold_expr(stmt.cond, report)
        if isinstance(cond, BoolLit) and not cond.value:
            report.dead_branches_removed += 1
            return []
        return [replace(stmt, cond=cond, body=_fold_block(stmt.body, report))]
    if isinstance(stmt, Call):
        return [replace(stmt, args=tuple(_fold_expr(a, report) for a in stmt.args))]
    if isinstance(stmt, Return):
        return [replace(stmt, value=_fold_expr(stmt.value, report))]
    return [replace(stmt)]


def const_fold(prog: Program) -> "tuple[Program, RewriteReport]":
    report = RewriteReport()
    functions = {}
    for name, fn in prog.functions.items():
        body = _fold_block(fn.body, report)
        functions[name] = _rebuild_function(fn, body)
    return Program(functions, prog.entry), report


# --- pipeline ----------------------------------------------------------------

def optimize_program(prog: Program,
                     config: "AnalysisConfig | None" = None) -> "tuple[Program, RewriteReport]":
    """analyze, propagate singletons, eliminate guards, fold constants."""
    config = config or AnalysisConfig()
    analyses = analyze_program(prog, config)
    # Statement ids survive rewriting, so one analysis serves both passes.
    propagated, report = singleton_propagate(prog, analyses)
    eliminated, r2 = guard_eliminate(propagated, analyses, config)
    folded, r3 = const_fold(eliminated)
    report.absorb(r2)
    report.absorb(r3)
    return folded, report
