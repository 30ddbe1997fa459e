from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reflcheck.diffop import DiffOp, FunctionTable, dop_add_scale, dop_apply, dop_compose, dop_equals
from reflcheck.errors import ContextMismatch, InvalidInput, PoleError, RangeError
from reflcheck.rank1 import RealizationParams, printed_q2, realization_build
from reflcheck.scalar import DEFAULT, Context, RationalFunction

from strategies import polys, small_q

x, a, d, e = DEFAULT.vars("x", "a", "d", "e")
S = DiffOp.shift_op
Dp = DiffOp.delta_plus()
Dm = DiffOp.delta_minus()
ONE = DiffOp.scalar(1)


@st.composite
def ops(draw, max_shift=2):
    shifts = draw(st.lists(st.integers(-max_shift, max_shift), max_size=3, unique=True))
    terms = {}
    for k in shifts:
        c = draw(polys(vars=("x",), max_terms=2, max_deg=2))
        if not c.is_zero():
            terms[k] = RationalFunction.from_poly(c)
    return DiffOp(DEFAULT, terms)


def symbolic_case_a():
    return realization_build(RealizationParams(a, d, e, "a"))


class TestCompose:
    def test_shifted_coefficient(self):
        xs = S(1).scale(x)
        assert dop_compose(xs, xs) == S(2).scale(x * (x + 1))

    def test_forward_backward(self):
        lhs = dop_compose(Dp, Dm)
        assert lhs == -Dp - Dm
        assert lhs == DiffOp.scalar(2) - S(1) - S(-1)

    def test_case_a_commutator(self):
        r = symbolic_case_a()
        q2 = printed_q2("a", a, d, e)
        A1, A0 = r.data.A1, r.data.A0
        assert A1.commutator(A0) == A1 * A1 - A0 - DiffOp.scalar(q2)

    def test_context_mismatch(self):
        other = Context(("x", "y"))
        with pytest.raises((ContextMismatch, InvalidInput)):
            dop_compose(Dp, DiffOp.delta_plus(other))


class TestAddAndEquals:
    def test_zero_scale(self):
        assert dop_add_scale(Dp, Dm, 0) == Dp

    def test_shift_minus_one(self):
        assert dop_add_scale(S(1), ONE, -1) == Dp
        assert dop_equals(Dp, S(1) - 1)

    def test_shift_directions_differ(self):
        assert not dop_equals(S(1), S(-1))

    def test_case_a_b0(self):
        r = symbolic_case_a()
        A1, A0 = r.data.A1, r.data.A0
        assert dop_add_scale(A1 * A1 - A0, ONE, -printed_q2("a", a, d, e)) == r.data.B0

    def test_case_a_b0c0(self):
        r = symbolic_case_a()
        dd = r.data
        rhs = dd.A1.scale(2 * r.delta) - dd.A0 * dd.A0 - dd.B0.scale(Fraction(1, 4)) - DiffOp.scalar(r.center.Q0)
        assert dop_equals(dd.B0 * dd.C0, rhs)

    def test_no_stored_zeros(self):
        z = Dp + Dm - (S(1) + S(-1)) + 2
        assert z.is_zero() and z.terms == {}

    def test_equals_mismatch(self):
        with pytest.raises(ContextMismatch):
            dop_equals(DiffOp.delta_plus(var="x"), DiffOp.delta_plus(var="u"))


class TestApply:
    def test_backward_on_square(self):
        f = FunctionTable.tabulate(lambda t: t * t, 0, 6)
        assert dop_apply(Dm, f, 3) == -5

    def test_fragment(self):
        op = Dm.scale((x - 2) * (x - 3))
        f = FunctionTable.tabulate(lambda t: t, -1, 5)
        assert dop_apply(op, f, 1) == -2

    def test_c0_on_constants(self):
        r = realization_build(RealizationParams(1, 2, 3, "a"))
        f = FunctionTable(Fraction(-2), (1,) * 8)
        for t in range(-1, 5):
            assert dop_apply(r.data.C0, f, t) == -1

    def test_out_of_table(self):
        f = FunctionTable.tabulate(lambda t: t, 0, 3)
        with pytest.raises(RangeError):
            dop_apply(Dp, f, 2)

    def test_pole(self):
        f = FunctionTable.tabulate(lambda t: t, 0, 4)
        with pytest.raises(PoleError):
            dop_apply(Dp.scale(1 / (x - 1)), f, 1)

    def test_parameters_from_assignment(self):
        f = FunctionTable.tabulate(lambda t: t, 0, 4)
        assert dop_apply(Dp.scale(a), f, 1, {"a": 5}) == 5


class TestJson:
    def test_roundtrip(self):
        op = symbolic_case_a().data.A0
        assert DiffOp.from_json(op.to_json()) == op

    def test_form(self):
        assert sorted(t["shift"] for t in Dp.to_json()) == [0, 1]


class TestProperties:
    @settings(max_examples=50, deadline=None)
    @given(ops(), ops(), ops())
    def test_associativity(self, p, q, r):
        assert dop_compose(dop_compose(p, q), r) == dop_compose(p, dop_compose(q, r))

    @settings(max_examples=50, deadline=None)
    @given(ops())
    def test_identity(self, p):
        assert dop_compose(ONE, p) == p == dop_compose(p, ONE)

    @settings(max_examples=50, deadline=None)
    @given(ops(), ops())
    def test_faithfulness(self, p, q):
        # polynomials of degree 0..5 exceed the span of p - q; 13 sample points
        # exceed the degree of any nonzero result
        tables = [FunctionTable.tabulate(lambda t, j=j: (t + 3) ** j + t, -6, 26) for j in range(6)]
        agree = all(dop_apply(p, f, t) == dop_apply(q, f, t) for f in tables for t in range(-3, 10))
        assert agree == dop_equals(p, q)

    @settings(max_examples=30, deadline=None)
    @given(ops(), small_q)
    def test_shift_variable_is_conjugation(self, p, c):
        c = int(c)
        shifted = dop_compose(dop_compose(S(c), p), S(-c))
        assert shifted == p.shift_variable(c)
