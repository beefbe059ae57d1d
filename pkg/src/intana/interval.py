"""Integer intervals with infinite endpoints.

The abstract domain is the lattice of closed integer intervals [lo, hi]
where endpoints may be -inf/+inf, plus a bottom element for the empty
interval.  Endpoints are plain Python ints; the infinities are the float
sentinels +-math.inf (mixed int/float comparisons are exact, and no finite
float value is ever produced).
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

NEG_INF = -math.inf
POS_INF = math.inf

# An endpoint: an int, or one of the infinity sentinels.
Bound = "int | float"

ARITH_OPS = ("+", "-", "*", "/")
CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")


def is_finite(b) -> bool:
    return not isinstance(b, float)


def _sign(b) -> int:
    return (b > 0) - (b < 0)


def ext_add(a, b):
    """a + b on extended ints; never called with opposing infinities."""
    if isinstance(a, float):
        return a
    if isinstance(b, float):
        return b
    return a + b


def ext_mul(a, b):
    """a * b on extended ints with the convention 0 * inf = 0."""
    if a == 0 or b == 0:
        return 0
    if isinstance(a, float) or isinstance(b, float):
        return POS_INF if _sign(a) == _sign(b) else NEG_INF
    return a * b


def ext_tdiv(a, b):
    """a / b truncated toward zero on extended ints, b != 0."""
    if isinstance(a, float):
        return POS_INF if _sign(a) == _sign(b) else NEG_INF
    if isinstance(b, float):
        return 0
    q = abs(a) // abs(b)
    return q if _sign(a) == _sign(b) else -q


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; lo > hi encodes bottom (use BOTTOM)."""

    lo: object
    hi: object

    @staticmethod
    def make(lo, hi) -> "Interval":
        if lo > hi or lo == POS_INF or hi == NEG_INF:
            return BOTTOM
        return Interval(lo, hi)

    @staticmethod
    def singleton(v: int) -> "Interval":
        return Interval(v, v)

    @property
    def is_bottom(self) -> bool:
        return self.lo > self.hi

    @property
    def is_top(self) -> bool:
        return self.lo == NEG_INF and self.hi == POS_INF

    @property
    def is_singleton(self) -> bool:
        return self.lo == self.hi and is_finite(self.lo)

    @property
    def is_finite(self) -> bool:
        return not self.is_bottom and is_finite(self.lo) and is_finite(self.hi)

    def __contains__(self, v: int) -> bool:
        return not self.is_bottom and self.lo <= v <= self.hi

    def values(self):
        """Iterate the members of a finite interval."""
        if self.is_bottom:
            return
        if not self.is_finite:
            raise ValueError("cannot enumerate an infinite interval")
        yield from range(self.lo, self.hi + 1)

    def count(self):
        """Number of members, or None when infinite."""
        if self.is_bottom:
            return 0
        if not self.is_finite:
            return None
        return self.hi - self.lo + 1

    def join(self, other: "Interval") -> "Interval":
        if self.is_bottom:
            return other
        if other.is_bottom:
            return self
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def meet(self, other: "Interval") -> "Interval":
        if self.is_bottom or other.is_bottom:
            return BOTTOM
        return Interval.make(max(self.lo, other.lo), min(self.hi, other.hi))

    def leq(self, other: "Interval") -> bool:
        """Lattice order: self contained in other."""
        if self.is_bottom:
            return True
        if other.is_bottom:
            return False
        return self.lo >= other.lo and self.hi <= other.hi

    def widen(self, new: "Interval") -> "Interval":
        """Extrapolate: bounds that grew jump to the infinities."""
        if self.is_bottom:
            return new
        if new.is_bottom:
            return self
        lo = NEG_INF if new.lo < self.lo else self.lo
        hi = POS_INF if new.hi > self.hi else self.hi
        return Interval(lo, hi)

    def narrow(self, new: "Interval") -> "Interval":
        """Interpolate: refine only the infinite bounds from `new`."""
        if self.is_bottom or new.is_bottom:
            return BOTTOM
        lo = new.lo if self.lo == NEG_INF else self.lo
        hi = new.hi if self.hi == POS_INF else self.hi
        return Interval.make(lo, hi)

    def negate(self) -> "Interval":
        if self.is_bottom:
            return BOTTOM
        return Interval(-self.hi, -self.lo)

    def shift(self, k: int) -> "Interval":
        if self.is_bottom:
            return BOTTOM
        return Interval(ext_add(self.lo, k), ext_add(self.hi, k))

    def render(self) -> str:
        if self.is_bottom:
            return "bottom"
        return "[%s,%s]" % (_fmt_bound(self.lo), _fmt_bound(self.hi))

    def __str__(self) -> str:
        return self.render()

    @staticmethod
    def parse(text: str) -> "Interval":
        text = text.strip()
        if text == "bottom":
            return BOTTOM
        m = re.fullmatch(r"\[\s*([^,\s]+)\s*,\s*([^,\s\]]+)\s*\]", text)
        if not m:
            raise ValueError("bad interval syntax: %r" % text)
        lo, hi = _parse_bound(m.group(1)), _parse_bound(m.group(2))
        if lo > hi:
            raise ValueError("reversed interval bounds: %r" % text)
        return Interval.make(lo, hi)


BOTTOM = Interval(1, 0)
TOP = Interval(NEG_INF, POS_INF)


def _fmt_bound(b) -> str:
    if b == NEG_INF:
        return "-inf"
    if b == POS_INF:
        return "+inf"
    return str(b)


def _parse_bound(text: str):
    if text in ("-inf",):
        return NEG_INF
    if text in ("inf", "+inf"):
        return POS_INF
    return int(text)


def _add_iv(a: Interval, b: Interval) -> Interval:
    return Interval(ext_add(a.lo, b.lo), ext_add(a.hi, b.hi))


def _sub_iv(a: Interval, b: Interval) -> Interval:
    return Interval(ext_add(a.lo, -b.hi), ext_add(a.hi, -b.lo))


def _mul_iv(a: Interval, b: Interval) -> Interval:
    corners = [ext_mul(x, y) for x in (a.lo, a.hi) for y in (b.lo, b.hi)]
    return Interval(min(corners), max(corners))


def divisor_parts(b: Interval):
    """Split a divisor interval into its negative and positive parts."""
    parts = []
    if b.lo <= -1:
        parts.append(Interval(b.lo, min(b.hi, -1)))
    if b.hi >= 1:
        parts.append(Interval(max(b.lo, 1), b.hi))
    return parts


def _div_iv(a: Interval, b: Interval) -> Interval:
    # Truncated toward zero; only nonzero divisors contribute.
    out = BOTTOM
    for part in divisor_parts(b):
        corners = [ext_tdiv(x, y) for x in (a.lo, a.hi) for y in (part.lo, part.hi)]
        out = out.join(Interval(min(corners), max(corners)))
    return out


def interval_binop(op: str, a: Interval, b: Interval, arith: bool = True) -> Interval:
    """Hull of {x op y | x in a, y in b}.

    With arith=False, any operation on a non-singleton operand is
    extrapolated to the full range (the imprecise fallback mode).
    """
    if a.is_bottom or b.is_bottom:
        return BOTTOM
    if op == "/" and b == Interval(0, 0):
        return BOTTOM
    if not arith and not (a.is_singleton and b.is_singleton):
        return TOP
    if op == "+":
        return _add_iv(a, b)
    if op == "-":
        return _sub_iv(a, b)
    if op == "*":
        return _mul_iv(a, b)
    if op == "/":
        return _div_iv(a, b)
    raise ValueError("unknown arithmetic operator: %r" % op)


class Truth3(enum.Enum):
    """Three-valued truth: definitely true, definitely false, or unknown."""

    TRUE = "true"
    FALSE = "false"
    MAYBE = "maybe"

    @staticmethod
    def of(b: bool) -> "Truth3":
        return Truth3.TRUE if b else Truth3.FALSE

    def negate(self) -> "Truth3":
        if self is Truth3.MAYBE:
            return Truth3.MAYBE
        return Truth3.of(self is Truth3.FALSE)


def not3(a: Truth3) -> Truth3:
    return a.negate()


def and3(a: Truth3, b: Truth3) -> Truth3:
    if a is Truth3.FALSE or b is Truth3.FALSE:
        return Truth3.FALSE
    if a is Truth3.TRUE and b is Truth3.TRUE:
        return Truth3.TRUE
    return Truth3.MAYBE


def or3(a: Truth3, b: Truth3) -> Truth3:
    if a is Truth3.TRUE or b is Truth3.TRUE:
        return Truth3.TRUE
    if a is Truth3.FALSE and b is Truth3.FALSE:
        return Truth3.FALSE
    return Truth3.MAYBE


def eval_cmp(op: str, a: Interval, b: Interval) -> Truth3:
    """Compare two intervals: TRUE/FALSE only when every/no pair agrees.

    Bottom operands yield MAYBE: an unreachable state must never drive a
    rewrite, and MAYBE is the no-action verdict.
    """
    if a.is_bottom or b.is_bottom:
        return Truth3.MAYBE
    if op == "<":
        if a.hi < b.lo:
            return Truth3.TRUE
        if a.lo >= b.hi:
            return Truth3.FALSE
        return Truth3.MAYBE
    if op == "<=":
        if a.hi <= b.lo:
            return Truth3.TRUE
        if a.lo > b.hi:
            return Truth3.FALSE
        return Truth3.MAYBE
    if op == ">":
        return eval_cmp("<", b, a)
    if op == ">=":
        return eval_cmp("<=", b, a)
    if op == "==":
        if a.is_singleton and a == b:
            return Truth3.TRUE
        if a.meet(b).is_bottom:
            return Truth3.FALSE
        return Truth3.MAYBE
    if op == "!=":
        return eval_cmp("==", a, b).negate()
    raise ValueError("unknown comparison operator: %r" % op)


def truth3_logic(op: str, a: Truth3, b: "Truth3 | None" = None) -> Truth3:
    if op == "not":
        if b is not None:
            raise ValueError("not is unary")
        return not3(a)
    if b is None:
        raise ValueError("%s is binary" % op)
    if op == "and":
        return and3(a, b)
    if op == "or":
        return or3(a, b)
    raise ValueError("unknown logic operator: %r" % op)
