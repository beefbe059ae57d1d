"""Forward-backward contraction of boxes under arithmetic constraints.

A constraint `lhs <rel> rhs` is rewritten as `lhs - rhs <rel> 0`, the
expression tree is evaluated bottom-up over the box (forward stage), the
root is met with the interval encoding the relation, and inverse
projections push the requirement back down to the variables (backward
stage).  Strict inequalities are tightened integer-wise (x < e becomes
x <= e - 1).
"""

from __future__ import annotations

from dataclasses import dataclass

from .interval import (
    BOTTOM,
    Interval,
    NEG_INF,
    POS_INF,
    TOP,
    Truth3,
    divisor_parts,
    ext_add,
    ext_mul,
    interval_binop,
    is_finite,
)
from .lang import Binary, BoolLit, CMP_OPS, Expr, free_vars, IntLit, Unary, Var

# Box: ordered map variable -> interval; empty iff any range is bottom.
Box = "dict[str, Interval]"

# Sibling intervals at most this many values wide are projected by exact
# enumeration; larger ones fall back to a sound rational hull.
ENUM_LIMIT = 2048

_NEGATED_CMP = {"==": "!=", "!=": "==", "<": ">=", ">=": "<", "<=": ">", ">": "<="}

_RELATION_RANGE = {
    "==": Interval(0, 0),
    "<=": Interval(NEG_INF, 0),
    "<": Interval(NEG_INF, -1),
    ">=": Interval(0, POS_INF),
    ">": Interval(1, POS_INF),
}


@dataclass(frozen=True)
class Constraint:
    relation: str
    lhs: Expr
    rhs: Expr

    @staticmethod
    def from_expr(e: Expr) -> "Constraint":
        if not (isinstance(e, Binary) and e.op in CMP_OPS):
            raise ValueError("not a comparison: %r" % (e,))
        return Constraint(e.op, e.left, e.right)

    def variables(self) -> frozenset:
        return free_vars(self.lhs) | free_vars(self.rhs)


def box_is_empty(box) -> bool:
    return any(iv.is_bottom for iv in box.values())


def empty_box(box) -> "dict":
    return {name: BOTTOM for name in box}


def box_leq(a, b) -> bool:
    if box_is_empty(a):
        return True
    return all(a[v].leq(b[v]) for v in b)


def box_join(a, b) -> "dict":
    if box_is_empty(a):
        return dict(b)
    if box_is_empty(b):
        return dict(a)
    return {v: a[v].join(b[v]) for v in a}


def box_render(box) -> str:
    if box_is_empty(box):
        return "empty"
    return ", ".join("%s:%s" % (v, iv.render()) for v, iv in box.items())


_BOX_ENTRY_RE = None


def parse_box(text: str) -> "dict":
    """Parse the dump syntax `x:[0,10], y:[2,4]` (with inf keywords)."""
    global _BOX_ENTRY_RE
    import re

    if _BOX_ENTRY_RE is None:
        _BOX_ENTRY_RE = re.compile(
            r"(?P<name>[A-Za-z_][A-Za-z_0-9]*)\s*:\s*"
            r"\[\s*(?P<lo>[+-]?(?:\d+|inf))\s*,\s*(?P<hi>[+-]?(?:\d+|inf))\s*\]")
    box = {}
    for m in _BOX_ENTRY_RE.finditer(text):
        box[m.group("name")] = Interval.make(
            _bound(m.group("lo")), _bound(m.group("hi")))
    rest = _BOX_ENTRY_RE.sub("", text).replace(",", "").strip()
    if rest or not box:
        raise ValueError("bad box syntax: %r" % text)
    return box


def _bound(text: str):
    if text.endswith("inf"):
        return NEG_INF if text.startswith("-") else POS_INF
    return int(text)


# --- forward evaluation ------------------------------------------------------

@dataclass
class AnnotatedExpr:
    expr: Expr
    itv: Interval
    children: "tuple[AnnotatedExpr, ...]" = ()


def forward_eval(e: Expr, box) -> AnnotatedExpr:
    """Bottom-up interval evaluation; every node gets an interval."""
    if isinstance(e, IntLit):
        return AnnotatedExpr(e, Interval.singleton(e.value))
    if isinstance(e, Var):
        return AnnotatedExpr(e, box[e.name])
    if isinstance(e, Unary) and e.op == "neg":
        child = forward_eval(e.operand, box)
        return AnnotatedExpr(e, child.itv.negate(), (child,))
    if isinstance(e, Binary) and e.op in ("+", "-", "*", "/"):
        left = forward_eval(e.left, box)
        right = forward_eval(e.right, box)
        return AnnotatedExpr(e, interval_binop(e.op, left.itv, right.itv), (left, right))
    raise ValueError("not an arithmetic expression: %r" % (e,))


# --- inverse projections -----------------------------------------------------

def _floor_div(a, b: int):
    if isinstance(a, float):
        return a if b > 0 else -a
    return a // b


def _ceil_div(a, b: int):
    if isinstance(a, float):
        return a if b > 0 else -a
    return -((-a) // b)


def _mul_preimage_exact(z: Interval, yv: int) -> Interval:
    """Hull of {x : x*yv in z} for a fixed nonzero yv."""
    if yv > 0:
        return Interval.make(_ceil_div(z.lo, yv), _floor_div(z.hi, yv))
    return Interval.make(_ceil_div(z.hi, yv), _floor_div(z.lo, yv))


def _ratio_corner(zb, yb):
    """Candidate endpoint of z/y at a corner; infinities by sign limit."""
    from fractions import Fraction

    if isinstance(zb, float) and isinstance(yb, float):
        return POS_INF if (zb > 0) == (yb > 0) else NEG_INF
    if isinstance(zb, float):
        return POS_INF if (zb > 0) == (yb > 0) else NEG_INF
    if isinstance(yb, float):
        return Fraction(0)
    return Fraction(zb, yb)


def _mul_preimage_hull(z: Interval, part: Interval) -> Interval:
    import math

    corners = [_ratio_corner(zb, yb)
               for zb in (z.lo, z.hi) for yb in (part.lo, part.hi)]
    lo, hi = min(corners), max(corners)
    lo = NEG_INF if lo == NEG_INF else math.ceil(lo)
    hi = POS_INF if hi == POS_INF else math.floor(hi)
    return Interval.make(lo, hi)


def inv_mul(z: Interval, y: Interval) -> Interval:
    """Hull of {x : exists y' in y with x*y' in z}."""
    if z.is_bottom or y.is_bottom:
        return BOTTOM
    if 0 in y and 0 in z:
        return TOP  # y' = 0 works for every x
    out = BOTTOM
    for part in divisor_parts(y):
        n = part.count()
        if n is not None and n <= ENUM_LIMIT:
            for yv in part.values():
                out = out.join(_mul_preimage_exact(z, yv))
        else:
            out = out.join(_mul_preimage_hull(z, part))
    return out


def _tdiv_preimage_pos(z: Interval, yv: int) -> Interval:
    """Hull of {x : trunc(x / yv) in z} for a fixed yv > 0."""
    if z.is_bottom:
        return BOTTOM
    if not is_finite(z.lo):
        lo = NEG_INF
    elif z.lo > 0:
        lo = z.lo * yv
    else:
        lo = z.lo * yv - (yv - 1)
    if not is_finite(z.hi):
        hi = POS_INF
    elif z.hi < 0:
        hi = z.hi * yv
    else:
        hi = z.hi * yv + (yv - 1)
    return Interval.make(lo, hi)


def _tdiv_preimage(z: Interval, yv: int) -> Interval:
    # trunc(x / -m) = -trunc(x / m): mirror through negation of z.
    if yv > 0:
        return _tdiv_preimage_pos(z, yv)
    return _tdiv_preimage_pos(z.negate(), -yv)


def _tdiv_preimage_hull(z: Interval, part: Interval) -> Interval:
    # The preimage endpoints are linear in yv, so part corners suffice.
    def lo_at(yv):
        if not is_finite(z.lo):
            return NEG_INF
        if z.lo > 0:
            return ext_mul(z.lo, yv)
        return ext_add(ext_mul(z.lo - 1, yv), 1) if isinstance(yv, float) else z.lo * yv - (yv - 1)

    def hi_at(yv):
        if not is_finite(z.hi):
            return POS_INF
        if z.hi < 0:
            return ext_mul(z.hi, yv)
        return ext_add(ext_mul(z.hi + 1, yv), -1) if isinstance(yv, float) else z.hi * yv + (yv - 1)

    if part.lo > 0:
        los = [lo_at(part.lo), lo_at(part.hi)]
        his = [hi_at(part.lo), hi_at(part.hi)]
        return Interval.make(min(los), max(his))
    # Negative part: mirror.
    mirrored = _tdiv_preimage_hull(z.negate(), part.negate())
    return mirrored.negate()


def inv_div_dividend(z: Interval, y: Interval) -> Interval:
    """Hull of {x : exists nonzero y' in y with trunc(x/y') in z}."""
    if z.is_bottom or y.is_bottom:
        return BOTTOM
    out = BOTTOM
    for part in divisor_parts(y):
        n = part.count()
        if n is not None and n <= ENUM_LIMIT:
            for yv in part.values():
                out = out.join(_tdiv_preimage(z, yv))
        else:
            out = out.join(_tdiv_preimage_hull(z, part))
    return out


def inv_div_divisor(z: Interval, x: Interval, y: Interval) -> Interval:
    """Hull of {y' in y nonzero : exists x' in x with trunc(x'/y') in z}."""
    if z.is_bottom or x.is_bottom or y.is_bottom:
        return BOTTOM
    out = BOTTOM
    for part in divisor_parts(y):
        n = part.count()
        if n is None or n > ENUM_LIMIT:
            out = out.join(part)  # too wide to tighten soundly by enumeration
            continue
        for yv in part.values():
            if not _tdiv_preimage(z, yv).meet(x).is_bottom:
                out = out.join(Interval.singleton(yv))
    return out


# --- backward propagation ----------------------------------------------------

def backward_prop(tree: AnnotatedExpr, required: Interval, box) -> "dict":
    """Push `required` down the annotated tree; returns the refined box."""
    out = dict(box)
    if _backward(tree, required, out):
        return out
    return empty_box(box)


def _backward(node: AnnotatedExpr, required: Interval, box) -> bool:
    itv = node.itv.meet(required)
    if itv.is_bottom:
        return False
    node.itv = itv
    e = node.expr
    if isinstance(e, Var):
        refined = box[e.name].meet(itv)
        if refined.is_bottom:
            return False
        box[e.name] = refined
        return True
    if isinstance(e, IntLit):
        return True
    if isinstance(e, Unary):
        return _backward(node.children[0], itv.negate(), box)
    left, right = node.children
    if e.op == "+":
        lreq = interval_binop("-", itv, right.itv)
        rreq = interval_binop("-", itv, left.itv)
    elif e.op == "-":
        lreq = interval_binop("+", itv, right.itv)
        rreq = interval_binop("-", left.itv, itv)
    elif e.op == "*":
        if left.expr == right.expr:
            # Syntactic square: both factors share one value in any point.
            sq = _inv_square(itv, left.itv)
            return _backward(left, sq, box) and _backward(right, sq, box)
        lreq = inv_mul(itv, right.itv)
        rreq = inv_mul(itv, left.itv)
    elif e.op == "/":
        lreq = inv_div_dividend(itv, right.itv)
        rreq = inv_div_divisor(itv, left.itv, right.itv)
    else:
        raise ValueError(e.op)
    return _backward(left, lreq, box) and _backward(right, rreq, box)


def _inv_square(z: Interval, x: Interval) -> Interval:
    """Hull of {x' : x'*x' in z}, restricted to x's sign when definite."""
    import math

    z = z.meet(Interval.make(0, POS_INF))
    if z.is_bottom or x.is_bottom:
        return BOTTOM
    hi = POS_INF if not is_finite(z.hi) else math.isqrt(z.hi)
    if z.lo > 0:
        lo = math.isqrt(z.lo - 1) + 1  # smallest s with s*s >= z.lo
    else:
        lo = 0
    positive = Interval.make(lo, hi)
    if x.lo >= 0:
        return positive
    if x.hi <= 0:
        return positive.negate()
    return positive.join(positive.negate())


# --- single-constraint contraction -------------------------------------------

def hc4_revise(c: Constraint, box) -> "dict":
    """One forward-backward pass; contracts box, preserving all solutions."""
    if box_is_empty(box):
        return empty_box(box)
    diff = Binary("-", c.lhs, c.rhs)
    tree = forward_eval(diff, box)
    if c.relation == "!=":
        if tree.itv == Interval(0, 0):
            return empty_box(box)
        return dict(box)
    required = _RELATION_RANGE[c.relation]
    return backward_prop(tree, required, box)


def contract_fixpoint(cs, box, max_rounds: int = 10) -> "dict":
    """Round-robin single-constraint contraction until stable."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    current = dict(box)
    for _ in range(max_rounds):
        previous = dict(current)
        for c in cs:
            current = hc4_revise(c, current)
            if box_is_empty(current):
                return current
        if current == previous:
            break
    return current


# --- condition classification ------------------------------------------------

def nnf(e: Expr, negated: bool = False) -> Expr:
    """Negation normal form; negation flips comparisons and connectives."""
    if isinstance(e, BoolLit):
        return BoolLit(e.value != negated)
    if isinstance(e, Unary) and e.op == "not":
        return nnf(e.operand, not negated)
    if isinstance(e, Binary) and e.op in ("&&", "||"):
        op = e.op
        if negated:
            op = "||" if op == "&&" else "&&"
        return Binary(op, nnf(e.left, negated), nnf(e.right, negated))
    if isinstance(e, Binary) and e.op in CMP_OPS:
        return Binary(_NEGATED_CMP[e.op], e.left, e.right) if negated else e
    raise ValueError("not a condition: %r" % (e,))


def _flatten_and(e: Expr):
    if isinstance(e, Binary) and e.op == "&&":
        yield from _flatten_and(e.left)
        yield from _flatten_and(e.right)
    else:
        yield e


def contract_condition(cond: Expr, box, max_rounds: int = 10) -> "dict":
    """Contract a condition already in NNF; disjunctions are hulled."""
    if box_is_empty(box):
        return empty_box(box)
    if isinstance(cond, BoolLit):
        return dict(box) if cond.value else empty_box(box)
    if isinstance(cond, Binary) and cond.op in CMP_OPS:
        return hc4_revise(Constraint.from_expr(cond), box)
    if isinstance(cond, Binary) and cond.op == "||":
        left = contract_condition(cond.left, box, max_rounds)
        right = contract_condition(cond.right, box, max_rounds)
        return box_join(left, right)
    if isinstance(cond, Binary) and cond.op == "&&":
        conjuncts = list(_flatten_and(cond))
        current = dict(box)
        for _ in range(max_rounds):
            previous = dict(current)
            for item in conjuncts:
                if isinstance(item, Binary) and item.op in CMP_OPS:
                    current = hc4_revise(Constraint.from_expr(item), current)
                else:
                    current = contract_condition(item, current, 1)
                if box_is_empty(current):
                    return current
            if current == previous:
                break
        return current
    raise ValueError("not an NNF condition: %r" % (cond,))


@dataclass
class Classification:
    verdict: Truth3
    box_in: "dict"
    box_out: "dict"


def classify_condition(cond: Expr, box, max_rounds: int = 10) -> Classification:
    """Refined boxes for a condition and its negation, plus the verdict.

    The verdict is TRUE iff the negation's box is empty, FALSE iff the
    condition's box is empty, MAYBE otherwise (including an empty input
    box, which must never drive a rewrite).
    """
    box_in = contract_condition(nnf(cond), box, max_rounds)
    box_out = contract_condition(nnf(cond, negated=True), box, max_rounds)
    if box_is_empty(box):
        verdict = Truth3.MAYBE
    elif box_is_empty(box_out):
        verdict = Truth3.TRUE
    elif box_is_empty(box_in):
        verdict = Truth3.FALSE
    else:
        verdict = Truth3.MAYBE
    return Classification(verdict, box_in, box_out)
