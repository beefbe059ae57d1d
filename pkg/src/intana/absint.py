"""Worklist fixpoint over the interval domain.

One abstract state (a box over the function's variables) is kept before
and after every CFG node.  Loop heads join plainly for `widening_delay`
updates, then widen; after the ascending phase stabilizes, a bounded
number of descending passes narrows the infinite bounds back in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .contractor import box_is_empty, contract_condition, nnf
from .interval import BOTTOM, eval_cmp, Interval, not3, and3, or3, TOP, Truth3
from .lang import (
    Assert,
    Assign,
    Assume,
    Binary,
    BoolLit,
    BRANCH_TRUE,
    Call,
    Cfg,
    CMP_OPS,
    Decl,
    Expr,
    IntLit,
    Nondet,
    Program,
    reverse_postorder,
    Return,
    Skip,
    Unary,
    Var,
    build_cfg,
)


@dataclass(frozen=True)
class AnalysisConfig:
    widening_delay: int = 2
    narrowing_passes: int = 2
    interval_arith: bool = True
    use_contractors: bool = True

    def __post_init__(self):
        if self.widening_delay < 0 or self.narrowing_passes < 0:
            raise ValueError("widening_delay and narrowing_passes must be >= 0")


@dataclass(frozen=True)
class AbstractState:
    """Box over the function's variables; any bottom range means unreachable."""

    env: "tuple[tuple[str, Interval], ...]"

    @staticmethod
    def of(env: "dict[str, Interval]") -> "AbstractState":
        if any(iv.is_bottom for iv in env.values()):
            env = {v: BOTTOM for v in env}
        return AbstractState(tuple(sorted(env.items())))

    @staticmethod
    def top(varnames) -> "AbstractState":
        return AbstractState.of({v: TOP for v in varnames})

    @staticmethod
    def bottom(varnames) -> "AbstractState":
        return AbstractState.of({v: BOTTOM for v in varnames})

    def as_dict(self) -> "dict[str, Interval]":
        return dict(self.env)

    def get(self, name: str) -> Interval:
        return dict(self.env)[name]

    @property
    def reachable(self) -> bool:
        return not self.is_bottom

    @property
    def is_bottom(self) -> bool:
        return any(iv.is_bottom for _, iv in self.env)

    def set(self, name: str, iv: Interval) -> "AbstractState":
        d = self.as_dict()
        d[name] = iv
        return AbstractState.of(d)

    def join(self, other: "AbstractState") -> "AbstractState":
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        a, b = self.as_dict(), other.as_dict()
        return AbstractState.of({v: a[v].join(b[v]) for v in a})

    def widen(self, new: "AbstractState") -> "AbstractState":
        if self.is_bottom:
            return new
        if new.is_bottom:
            return self
        a, b = self.as_dict(), new.as_dict()
        return AbstractState.of({v: a[v].widen(b[v]) for v in a})

    def narrow(self, new: "AbstractState") -> "AbstractState":
        if self.is_bottom or new.is_bottom:
            return AbstractState.bottom([v for v, _ in self.env])
        a, b = self.as_dict(), new.as_dict()
        return AbstractState.of({v: a[v].narrow(b[v]) for v in a})

    def leq(self, other: "AbstractState") -> bool:
        if self.is_bottom:
            return True
        if other.is_bottom:
            return False
        a, b = self.as_dict(), other.as_dict()
        return all(a[v].leq(b[v]) for v in a)


def eval_expr(e: Expr, state: AbstractState, arith: bool = True) -> Interval:
    """Abstract evaluation of an arithmetic expression."""
    if state.is_bottom:
        return BOTTOM
    if isinstance(e, IntLit):
        return Interval.singleton(e.value)
    if isinstance(e, Var):
        return state.get(e.name)
    if isinstance(e, Nondet):
        if e.bounded:
            return Interval(e.lo, e.hi)
        return TOP
    if isinstance(e, Unary) and e.op == "neg":
        return eval_expr(e.operand, state, arith).negate()
    if isinstance(e, Binary):
        from .interval import interval_binop

        return interval_binop(e.op, eval_expr(e.left, state, arith),
                              eval_expr(e.right, state, arith), arith=arith)
    raise ValueError("not an arithmetic expression: %r" % (e,))


def eval_cond3(cond: Expr, state: AbstractState, arith: bool = True) -> Truth3:
    """Three-valued evaluation of a condition."""
    if isinstance(cond, BoolLit):
        return Truth3.of(cond.value)
    if isinstance(cond, Unary) and cond.op == "not":
        return not3(eval_cond3(cond.operand, state, arith))
    if isinstance(cond, Binary):
        if cond.op == "&&":
            return and3(eval_cond3(cond.left, state, arith),
                        eval_cond3(cond.right, state, arith))
        if cond.op == "||":
            return or3(eval_cond3(cond.left, state, arith),
                       eval_cond3(cond.right, state, arith))
        if cond.op in CMP_OPS:
            return eval_cmp(cond.op, eval_expr(cond.left, state, arith),
                            eval_expr(cond.right, state, arith))
    raise ValueError("not a condition: %r" % (cond,))


def _simple_prune(cond: Expr, state: AbstractState, arith: bool) -> AbstractState:
    """Contractor-free refinement of a single top-level comparison."""
    if not (isinstance(cond, Binary) and cond.op in CMP_OPS):
        return state
    for var_side, other, op in ((cond.left, cond.right, cond.op),
                                (cond.right, cond.left, _FLIPPED[cond.op])):
        if not isinstance(var_side, Var):
            continue
        x = state.get(var_side.name)
        o = eval_expr(other, state, arith)
        if o.is_bottom:
            continue
        if op == "<":
            bound = Interval.make(-float("inf"), o.hi - 1 if not isinstance(o.hi, float) else o.hi)
        elif op == "<=":
            bound = Interval.make(-float("inf"), o.hi)
        elif op == ">":
            bound = Interval.make(o.lo + 1 if not isinstance(o.lo, float) else o.lo, float("inf"))
        elif op == ">=":
            bound = Interval.make(o.lo, float("inf"))
        elif op == "==":
            bound = o
        else:  # '!='
            continue
        state = state.set(var_side.name, x.meet(bound))
        if state.is_bottom:
            return state
    return state


_FLIPPED = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}


def transfer_assume(state: AbstractState, cond: Expr, polarity: bool = True,
                    config: "AnalysisConfig | None" = None) -> AbstractState:
    """Refine a state by a condition (or its negation)."""
    config = config or AnalysisConfig()
    if state.is_bottom:
        return state
    if config.use_contractors:
        shaped = nnf(cond, negated=not polarity)
        box = contract_condition(shaped, state.as_dict())
        if box_is_empty(box):
            return AbstractState.bottom([v for v, _ in state.env])
        return AbstractState.of(box)
    effective = nnf(cond, negated=not polarity)
    verdict = eval_cond3(effective, state, config.interval_arith)
    if verdict is Truth3.FALSE:
        return AbstractState.bottom([v for v, _ in state.env])
    return _simple_prune(effective, state, config.interval_arith)


def transfer_assign(state: AbstractState, target: str, rhs: Expr,
                    config: "AnalysisConfig | None" = None) -> AbstractState:
    config = config or AnalysisConfig()
    if state.is_bottom:
        return state
    return state.set(target, eval_expr(rhs, state, config.interval_arith))


@dataclass
class AnalysisResult:
    before: "dict[int, AbstractState]"
    after: "dict[int, AbstractState]"
    iterations: int
    widened_nodes: "set[int]" = field(default_factory=set)


class UnknownNodeError(KeyError):
    pass


def state_at(result: AnalysisResult, node: int, position: str) -> AbstractState:
    table = {"before": result.before, "after": result.after}[position]
    try:
        return table[node]
    except KeyError:
        raise UnknownNodeError(node) from None


def _transfer_node(node, state: AbstractState, config: AnalysisConfig) -> AbstractState:
    if state.is_bottom:
        return state
    stmt = node.stmt
    if node.kind in ("entry", "exit") or node.kind == "cond":
        return state
    if isinstance(stmt, (Skip, Return, Assert)):
        # assert never refines: a violation must stay visible downstream
        return state
    if isinstance(stmt, Decl):
        if stmt.init is None:
            return state
        return transfer_assign(state, stmt.name, stmt.init, config)
    if isinstance(stmt, Assign):
        return transfer_assign(state, stmt.target, stmt.rhs, config)
    if isinstance(stmt, Assume):
        return transfer_assume(state, stmt.cond, True, config)
    if isinstance(stmt, Call):
        # Not context-aware: results from callees are unknown.
        if stmt.result is not None:
            return state.set(stmt.result, TOP)
        return state
    raise TypeError(stmt)


def _edge_state(node, after: AbstractState, label: str, config: AnalysisConfig) -> AbstractState:
    if node.kind == "cond":
        return transfer_assume(after, node.cond, label == BRANCH_TRUE, config)
    return after


def analyze(cfg: Cfg, init: AbstractState, config: "AnalysisConfig | None" = None) -> AnalysisResult:
    config = config or AnalysisConfig()
    varnames = [v for v, _ in init.env]
    bottom = AbstractState.bottom(varnames)
    rpo = reverse_postorder(cfg)
    rpo_index = {n: i for i, n in enumerate(rpo)}

    before = {n: bottom for n in cfg.nodes}
    after = {n: bottom for n in cfg.nodes}
    before[cfg.entry] = init
    head_updates = {}
    widened = set()
    updates = 0

    import heapq

    pending = [(rpo_index[cfg.entry], cfg.entry)]
    queued = {cfg.entry}
    while pending:
        _, n = heapq.heappop(pending)
        queued.discard(n)
        node = cfg.nodes[n]
        after[n] = _transfer_node(node, before[n], config)
        for m, label in cfg.successors(n):
            out = _edge_state(node, after[n], label, config)
            old = before[m]
            merged = old.join(out)
            if merged.leq(old):
                continue
            if m in cfg.loop_heads:
                head_updates[m] = head_updates.get(m, 0) + 1
                if head_updates[m] > config.widening_delay:
                    merged = old.widen(merged)
                    widened.add(m)
            before[m] = merged
            updates += 1
            if m not in queued and m in rpo_index:
                heapq.heappush(pending, (rpo_index[m], m))
                queued.add(m)

    # Descending phase: recover precision lost to widening.
    for n in rpo:
        after[n] = _transfer_node(cfg.nodes[n], before[n], config)
    for _ in range(config.narrowing_passes):
        changed = False
        for n in rpo:
            node = cfg.nodes[n]
            if n != cfg.entry:
                incoming = bottom
                for p, label in cfg.predecessors(n):
                    incoming = incoming.join(
                        _edge_state(cfg.nodes[p], after[p], label, config))
                new = before[n].narrow(incoming) if n in cfg.loop_heads else incoming
                if new != before[n]:
                    before[n] = new
                    changed = True
            after[n] = _transfer_node(node, before[n], config)
        if not changed:
            break
    for n in rpo:
        after[n] = _transfer_node(cfg.nodes[n], before[n], config)

    return AnalysisResult(before=before, after=after, iterations=updates,
                          widened_nodes=widened)


@dataclass
class FunctionAnalysis:
    cfg: Cfg
    result: AnalysisResult


def initial_state(func) -> AbstractState:
    # Parameters are untracked across calls, so they start unknown.
    return AbstractState.top(func.variables)


def analyze_program(prog: Program, config: "AnalysisConfig | None" = None) -> "dict[str, FunctionAnalysis]":
    config = config or AnalysisConfig()
    out = {}
    for name, fn in prog.functions.items():
        cfg = build_cfg(fn)
        out[name] = FunctionAnalysis(cfg, analyze(cfg, initial_state(fn), config))
    return out


def check_post_fixpoint(cfg: Cfg, result: AnalysisResult, config: AnalysisConfig) -> bool:
    """One extra pass: transfer applied to the final states changes nothing."""
    for n, node in cfg.nodes.items():
        if _transfer_node(node, result.before[n], config) != result.after[n]:
            return False
        for m, label in cfg.successors(n):
            out = _edge_state(node, result.after[n], label, config)
            if not out.leq(result.before[m]):
                return False
    return True
