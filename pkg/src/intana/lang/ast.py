"""AST for the mini imperative language.

Expressions are immutable and freely shared between trees.  Statements
carry a program-unique id (`sid`) assigned by the parser so analysis
results can be mapped back onto rewritten trees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

ARITH_OPS = frozenset({"+", "-", "*", "/"})
CMP_OPS = frozenset({"==", "!=", "<", "<=", ">", ">="})
BOOL_OPS = frozenset({"&&", "||"})


# --- expressions -----------------------------------------------------------

class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # 'neg' or 'not'
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Nondet(Expr):
    lo: "int | None"
    hi: "int | None"

    @property
    def bounded(self) -> bool:
        return self.lo is not None and self.hi is not None


TRUE = BoolLit(True)
FALSE = BoolLit(False)


def sort_of(e: Expr) -> str:
    """'int' or 'bool'; the two expression sorts are disjoint."""
    if isinstance(e, (IntLit, Var, Nondet)):
        return "int"
    if isinstance(e, BoolLit):
        return "bool"
    if isinstance(e, Unary):
        return "int" if e.op == "neg" else "bool"
    if isinstance(e, Binary):
        return "int" if e.op in ARITH_OPS else "bool"
    raise TypeError(e)


def free_vars(e: Expr) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Unary):
        return free_vars(e.operand)
    if isinstance(e, Binary):
        return free_vars(e.left) | free_vars(e.right)
    return frozenset()


def subexprs(e: Expr):
    """Yield e and every subexpression."""
    yield e
    if isinstance(e, Unary):
        yield from subexprs(e.operand)
    elif isinstance(e, Binary):
        yield from subexprs(e.left)
        yield from subexprs(e.right)


# --- statements -------------------------------------------------------------

@dataclass
class Stmt:
    sid: int = field(default=-1, kw_only=True)


@dataclass
class Decl(Stmt):
    name: str = ""
    init: "Expr | None" = None


@dataclass
class Assign(Stmt):
    target: str = ""
    rhs: "Expr | None" = None


@dataclass
class Assume(Stmt):
    cond: "Expr | None" = None


@dataclass
class Assert(Stmt):
    cond: "Expr | None" = None


@dataclass
class If(Stmt):
    cond: "Expr | None" = None
    then: "list[Stmt]" = field(default_factory=list)
    orelse: "list[Stmt] | None" = None


@dataclass
class While(Stmt):
    cond: "Expr | None" = None
    body: "list[Stmt]" = field(default_factory=list)


@dataclass
class Call(Stmt):
    callee: str = ""
    args: "tuple[Expr, ...]" = ()
    result: "str | None" = None


@dataclass
class Return(Stmt):
    value: "Expr | None" = None


@dataclass
class Skip(Stmt):
    pass


@dataclass
class Function:
    name: str
    params: "tuple[str, ...]"
    body: "list[Stmt]"
    locals: "tuple[str, ...]" = ()

    @property
    def variables(self) -> "tuple[str, ...]":
        return self.params + self.locals

    @property
    def has_return(self) -> bool:
        return any(isinstance(s, Return) for s in walk_stmts(self.body))


@dataclass
class Program:
    functions: "dict[str, Function]"
    entry: str = "main"

    @property
    def main(self) -> Function:
        return self.functions[self.entry]


def walk_stmts(block):
    """Yield every statement in a block, recursing into bodies."""
    for s in block:
        yield s
        if isinstance(s, If):
            yield from walk_stmts(s.then)
            if s.orelse is not None:
                yield from walk_stmts(s.orelse)
        elif isinstance(s, While):
            yield from walk_stmts(s.body)


def stmt_exprs(s: Stmt):
    """The expressions directly held by a statement (not its sub-blocks)."""
    if isinstance(s, (Decl,)) and s.init is not None:
        yield s.init
    elif isinstance(s, Assign):
        yield s.rhs
    elif isinstance(s, (Assume, Assert, If, While)):
        yield s.cond
    elif isinstance(s, Call):
        yield from s.args
    elif isinstance(s, Return) and s.value is not None:
        yield s.value


def program_nondets(prog: Program):
    for fn in prog.functions.values():
        for s in walk_stmts(fn.body):
            for e in stmt_exprs(s):
                for sub in subexprs(e):
                    if isinstance(sub, Nondet):
                        yield sub
