import pytest
from hypothesis import given, strategies as st

from intana.interval import (
    BOTTOM,
    Interval,
    NEG_INF,
    POS_INF,
    TOP,
    Truth3,
    and3,
    divisor_parts,
    eval_cmp,
    interval_binop,
    not3,
    or3,
)


def iv(lo, hi):
    return Interval(lo, hi)


bounded = st.integers(-20, 20)


@st.composite
def intervals(draw):
    lo = draw(bounded)
    hi = draw(st.integers(lo, 20))
    return Interval(lo, hi)


class TestConstruction:
    def test_make_normalizes_empty_to_bottom(self):
        assert Interval.make(3, 2).is_bottom
        assert Interval.make(POS_INF, POS_INF).is_bottom
        assert Interval.make(NEG_INF, NEG_INF).is_bottom

    def test_singleton(self):
        s = Interval.singleton(7)
        assert s.is_singleton and s.lo == s.hi == 7
        assert not TOP.is_singleton
        assert not BOTTOM.is_singleton

    def test_top_and_bottom(self):
        assert TOP.is_top and not TOP.is_bottom
        assert BOTTOM.is_bottom and not BOTTOM.is_top
        assert not iv(0, 5).is_top

    def test_contains(self):
        assert 3 in iv(1, 5)
        assert 0 not in iv(1, 5)
        assert 10 ** 9 in TOP
        assert 0 not in BOTTOM

    def test_values_and_count(self):
        assert list(iv(2, 4).values()) == [2, 3, 4]
        assert iv(2, 4).count() == 3
        assert TOP.count() is None
        assert BOTTOM.count() == 0


class TestLattice:
    @given(intervals(), intervals())
    def test_join_is_upper_bound(self, a, b):
        j = a.join(b)
        assert a.leq(j) and b.leq(j)

    @given(intervals(), intervals())
    def test_meet_is_lower_bound(self, a, b):
        m = a.meet(b)
        assert m.leq(a) and m.leq(b)

    @given(intervals())
    def test_bottom_and_top_are_extremes(self, a):
        assert BOTTOM.leq(a) and a.leq(TOP)
        assert a.join(BOTTOM) == a
        assert a.meet(TOP) == a

    def test_disjoint_meet_is_bottom(self):
        assert iv(0, 2).meet(iv(5, 9)).is_bottom

    @given(intervals(), intervals(), intervals())
    def test_join_associative(self, a, b, c):
        assert a.join(b).join(c) == a.join(b.join(c))


class TestWidenNarrow:
    def test_widen_unstable_bounds_jump_to_infinity(self):
        w = iv(0, 5).widen(iv(0, 9))
        assert w.lo == 0 and w.hi == POS_INF
        w = iv(-1, 5).widen(iv(-3, 5))
        assert w.lo == NEG_INF and w.hi == 5

    def test_widen_stable_is_identity(self):
        assert iv(0, 5).widen(iv(1, 4)) == iv(0, 5)

    @given(intervals(), intervals())
    def test_widen_chain_stabilizes_fast(self, a, b):
        x = a
        for _ in range(3):
            nxt = x.widen(x.join(b))
            if nxt == x:
                break
            x = nxt
        assert x.widen(x.join(b)) == x

    def test_narrow_refines_only_infinite_bounds(self):
        assert Interval.make(0, POS_INF).narrow(iv(0, 10)) == iv(0, 10)
        assert iv(0, 10).narrow(iv(2, 5)) == iv(0, 10)
        assert TOP.narrow(iv(-3, 3)) == iv(-3, 3)


class TestArithmetic:
    def test_add_sub(self):
        assert interval_binop("+", iv(1, 2), iv(10, 20)) == iv(11, 22)
        assert interval_binop("-", iv(1, 2), iv(10, 20)) == iv(-19, -8)

    def test_mul_sign_cases(self):
        assert interval_binop("*", iv(-2, 3), iv(-5, 4)) == iv(-15, 12)
        assert interval_binop("*", iv(2, 3), iv(4, 5)) == iv(8, 15)

    def test_div_truncates_toward_zero(self):
        assert interval_binop("/", iv(-7, -7), iv(2, 2)) == iv(-3, -3)
        assert interval_binop("/", iv(7, 7), iv(-2, -2)) == iv(-3, -3)

    def test_div_by_exact_zero_is_bottom(self):
        assert interval_binop("/", iv(1, 5), iv(0, 0)).is_bottom

    def test_div_straddling_zero_uses_nonzero_divisors(self):
        assert interval_binop("/", iv(6, 6), iv(-2, 3)) == iv(-6, 6)

    def test_divisor_parts(self):
        assert divisor_parts(iv(-2, 3)) == [iv(-2, -1), iv(1, 3)]
        assert divisor_parts(iv(0, 0)) == []
        assert divisor_parts(iv(2, 5)) == [iv(2, 5)]

    def test_infinite_operands(self):
        assert interval_binop("+", TOP, iv(1, 1)) == TOP
        assert interval_binop("*", Interval.make(0, POS_INF), iv(2, 3)) \
            == Interval.make(0, POS_INF)

    def test_bottom_propagates(self):
        for op in "+-*/":
            assert interval_binop(op, BOTTOM, iv(1, 2)).is_bottom

    def test_arith_disabled_extrapolates_non_singletons(self):
        assert interval_binop("+", iv(1, 2), iv(3, 3), arith=False) == TOP
        assert interval_binop("+", iv(2, 2), iv(3, 3), arith=False) == iv(5, 5)

    @given(intervals(), intervals(), st.sampled_from("+-*/"))
    def test_soundness_on_samples(self, a, b, op):
        got = interval_binop(op, a, b)
        for x in list(a.values())[:7]:
            for y in list(b.values())[:7]:
                if op == "/" and y == 0:
                    continue
                if op == "/":
                    q = abs(x) // abs(y)
                    v = q if (x >= 0) == (y >= 0) else -q
                else:
                    v = eval(f"{x} {op} {y}")
                assert v in got


class TestNegateShift:
    def test_negate(self):
        assert iv(-2, 5).negate() == iv(-5, 2)
        assert Interval.make(0, POS_INF).negate() == Interval.make(NEG_INF, 0)

    def test_shift(self):
        assert iv(1, 3).shift(4) == iv(5, 7)


class TestRenderParse:
    @pytest.mark.parametrize("interval,text", [
        (iv(0, 5), "[0,5]"),
        (TOP, "[-inf,+inf]"),
        (Interval.make(3, POS_INF), "[3,+inf]"),
        (BOTTOM, "bottom"),
    ])
    def test_render(self, interval, text):
        assert interval.render() == text

    @given(intervals())
    def test_round_trip(self, a):
        assert Interval.parse(a.render()) == a

    def test_parse_infinities(self):
        assert Interval.parse("[-inf,+inf]") == TOP
        assert Interval.parse("bottom").is_bottom


class TestTruth3:
    def test_not3(self):
        assert not3(Truth3.TRUE) is Truth3.FALSE
        assert not3(Truth3.FALSE) is Truth3.TRUE
        assert not3(Truth3.MAYBE) is Truth3.MAYBE

    def test_and3_dominates(self):
        assert and3(Truth3.FALSE, Truth3.MAYBE) is Truth3.FALSE
        assert and3(Truth3.TRUE, Truth3.MAYBE) is Truth3.MAYBE
        assert and3(Truth3.TRUE, Truth3.TRUE) is Truth3.TRUE

    def test_or3_dominates(self):
        assert or3(Truth3.TRUE, Truth3.MAYBE) is Truth3.TRUE
        assert or3(Truth3.FALSE, Truth3.MAYBE) is Truth3.MAYBE
        assert or3(Truth3.FALSE, Truth3.FALSE) is Truth3.FALSE


class TestEvalCmp:
    def test_definite_true_and_false(self):
        assert eval_cmp("<", iv(0, 3), iv(5, 9)) is Truth3.TRUE
        assert eval_cmp("<", iv(5, 9), iv(0, 3)) is Truth3.FALSE
        assert eval_cmp("<", iv(0, 5), iv(3, 9)) is Truth3.MAYBE

    def test_equality(self):
        assert eval_cmp("==", iv(4, 4), iv(4, 4)) is Truth3.TRUE
        assert eval_cmp("==", iv(0, 3), iv(5, 9)) is Truth3.FALSE
        assert eval_cmp("==", iv(0, 3), iv(2, 9)) is Truth3.MAYBE

    def test_bottom_gives_maybe(self):
        assert eval_cmp("<", BOTTOM, iv(0, 1)) is Truth3.MAYBE

    def test_exhaustive_consistency_small(self):
        ops = {"==": lambda a, b: a == b, "!=": lambda a, b: a != b,
               "<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
               ">": lambda a, b: a > b, ">=": lambda a, b: a >= b}
        cases = [iv(lo, hi) for lo in range(-3, 4) for hi in range(lo, 4)]
        for a in cases:
            for b in cases:
                for op, f in ops.items():
                    outcomes = {f(x, y) for x in a.values() for y in b.values()}
                    want = (Truth3.MAYBE if len(outcomes) == 2
                            else Truth3.TRUE if True in outcomes else Truth3.FALSE)
                    assert eval_cmp(op, a, b) is want
