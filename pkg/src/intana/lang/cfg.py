"""Control-flow graph construction for one function.

Structured statements are lowered to nodes and labeled edges; `while`
produces a back edge to its condition node.  Loop heads are the targets
of depth-first back edges from the entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast import Assert, Assign, Assume, Call, Decl, Function, If, Return, Skip, Stmt, While

FALLTHROUGH = "fallthrough"
BRANCH_TRUE = "branch-true"
BRANCH_FALSE = "branch-false"


@dataclass
class Node:
    id: int
    kind: str  # 'entry' | 'exit' | 'stmt' | 'cond'
    stmt: "Stmt | None" = None
    cond: "Expr | None" = None

    def describe(self) -> str:
        from .pretty import expr_to_source, stmt_to_lines

        if self.kind == "entry":
            return "<entry>"
        if self.kind == "exit":
            return "<exit>"
        if self.kind == "cond":
            return "cond %s" % expr_to_source(self.cond)
        return next(iter(stmt_to_lines(self.stmt, 0)))


@dataclass
class Cfg:
    func: Function
    nodes: "dict[int, Node]" = field(default_factory=dict)
    edges: "list[tuple[int, int, str]]" = field(default_factory=list)
    entry: int = 0
    exit: int = 0
    loop_heads: "set[int]" = field(default_factory=set)
    # Statement sid -> node id (condition node for if/while).
    stmt_node: "dict[int, int]" = field(default_factory=dict)
    succs: "dict[int, list[tuple[int, str]]]" = field(default_factory=dict)
    preds: "dict[int, list[tuple[int, str]]]" = field(default_factory=dict)

    def successors(self, n: int):
        return self.succs.get(n, [])

    def predecessors(self, n: int):
        return self.preds.get(n, [])


class _Builder:
    def __init__(self, func: Function):
        self.func = func
        self.cfg = Cfg(func=func)
        self.next_id = 0

    def new_node(self, kind, stmt=None, cond=None) -> Node:
        node = Node(id=self.next_id, kind=kind, stmt=stmt, cond=cond)
        self.next_id += 1
        self.cfg.nodes[node.id] = node
        return node

    def edge(self, src: int, dst: int, label: str):
        self.cfg.edges.append((src, dst, label))

    def build(self) -> Cfg:
        entry = self.new_node("entry")
        exit_ = self.new_node("exit")
        self.cfg.entry = entry.id
        self.cfg.exit = exit_.id
        dangling = self.lower_block(self.func.body, [(entry.id, FALLTHROUGH)])
        for src, label in dangling:
            self.edge(src, exit_.id, label)
        self._prune_unreachable()
        self._index_edges()
        self.cfg.loop_heads = self._back_edge_targets()
        return self.cfg

    def lower_block(self, block, incoming):
        """Lower a statement list; returns the dangling out-edges."""
        for stmt in block:
            incoming = self.lower_stmt(stmt, incoming)
        return incoming

    def connect(self, incoming, dst: int):
        for src, label in incoming:
            self.edge(src, dst, label)

    def lower_stmt(self, stmt: Stmt, incoming):
        if isinstance(stmt, (Decl, Assign, Assume, Assert, Call, Skip)):
            node = self.new_node("stmt", stmt=stmt)
            self.cfg.stmt_node[stmt.sid] = node.id
            self.connect(incoming, node.id)
            return [(node.id, FALLTHROUGH)]
        if isinstance(stmt, Return):
            node = self.new_node("stmt", stmt=stmt)
            self.cfg.stmt_node[stmt.sid] = node.id
            self.connect(incoming, node.id)
            self.edge(node.id, self.cfg.exit, FALLTHROUGH)
            return []
        if isinstance(stmt, If):
            cond = self.new_node("cond", stmt=stmt, cond=stmt.cond)
            self.cfg.stmt_node[stmt.sid] = cond.id
            self.connect(incoming, cond.id)
            out = self.lower_block(stmt.then, [(cond.id, BRANCH_TRUE)])
            if stmt.orelse is None:
                out = out + [(cond.id, BRANCH_FALSE)]
            else:
                out = out + self.lower_block(stmt.orelse, [(cond.id, BRANCH_FALSE)])
            return out
        if isinstance(stmt, While):
            cond = self.new_node("cond", stmt=stmt, cond=stmt.cond)
            self.cfg.stmt_node[stmt.sid] = cond.id
            self.connect(incoming, cond.id)
            back = self.lower_block(stmt.body, [(cond.id, BRANCH_TRUE)])
            self.connect(back, cond.id)
            return [(cond.id, BRANCH_FALSE)]
        raise TypeError(stmt)

    def _prune_unreachable(self):
        succs = {}
        for src, dst, _ in self.cfg.edges:
            succs.setdefault(src, []).append(dst)
        seen = set()
        stack = [self.cfg.entry]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(succs.get(n, []))
        seen.add(self.cfg.exit)
        self.cfg.nodes = {i: n for i, n in self.cfg.nodes.items() if i in seen}
        self.cfg.edges = [(s, d, l) for s, d, l in self.cfg.edges if s in seen and d in seen]
        self.cfg.stmt_node = {sid: n for sid, n in self.cfg.stmt_node.items() if n in seen}

    def _index_edges(self):
        self.cfg.succs = {i: [] for i in self.cfg.nodes}
        self.cfg.preds = {i: [] for i in self.cfg.nodes}
        for src, dst, label in self.cfg.edges:
            self.cfg.succs[src].append((dst, label))
            self.cfg.preds[dst].append((src, label))

    def _back_edge_targets(self):
        heads = set()
        color = {}  # 1 = on stack, 2 = done

        def visit(n):
            color[n] = 1
            for m, _ in self.cfg.succs.get(n, []):
                if color.get(m) == 1:
                    heads.add(m)
                elif m not in color:
                    visit(m)
            color[n] = 2

        import sys

        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 10000))
        try:
            visit(self.cfg.entry)
        finally:
            sys.setrecursionlimit(old)
        return heads


def build_cfg(func: Function) -> Cfg:
    return _Builder(func).build()


def reverse_postorder(cfg: Cfg):
    order = []
    seen = set()

    def visit(n):
        seen.add(n)
        for m, _ in cfg.successors(n):
            if m not in seen:
                visit(m)
        order.append(n)

    visit(cfg.entry)
    order.reverse()
    return order
