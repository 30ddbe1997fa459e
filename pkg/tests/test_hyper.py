from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from reflcheck.diffop import dop_apply, dop_compose
from reflcheck.errors import ConvergenceError, InvalidInput, InvalidParameters, PoleError, RangeError
from reflcheck.hyper import (
    LADDERS,
    HahnParams,
    HypPoint,
    LadderFamily,
    annihilation_operator,
    annihilation_residual,
    contiguous_residual,
    eval_3f2,
    hahn_eval,
    hahn_residuals,
    ladder_bracket,
    ladder_coefficient,
    ladder_residual,
    pochhammer,
    relation_ids,
    relation_label,
)
from reflcheck.rank1 import RealizationParams, delta_minus, delta_plus
from reflcheck.scalar import DEFAULT

H = Fraction(1, 2)


def series_oracle(a, b, c, d, e):
    """Terminating sum with sympy's rising factorial."""
    n_max = min(-int(q) for q in (a, b, c) if q.denominator == 1 and q <= 0)
    R = lambda q: sympy.Rational(q.numerator, q.denominator)  # noqa: E731
    s = sum(
        sympy.rf(R(a), n) * sympy.rf(R(b), n) * sympy.rf(R(c), n) / (sympy.rf(R(d), n) * sympy.rf(R(e), n) * sympy.factorial(n))
        for n in range(n_max + 1)
    )
    return Fraction(int(s.p), int(s.q))


q_param = st.fractions(min_value=-5, max_value=5, max_denominator=6)
den_param = q_param.filter(lambda q: q.denominator != 1)


@st.composite
def terminating(draw):
    m = draw(st.integers(1, 8))
    return HypPoint(-m, draw(q_param), draw(q_param), draw(den_param), draw(den_param))


class TestPochhammer:
    def test_values(self):
        assert pochhammer(Fraction(7, 3), 0) == 1
        assert pochhammer(2, 3) == 24
        assert pochhammer(-2, 3) == 0

    def test_negative_index(self):
        with pytest.raises(InvalidInput):
            pochhammer(1, -1)


class TestEvaluate:
    def test_zero_numerator(self):
        assert eval_3f2(HypPoint(0, Fraction(3, 7), 2, Fraction(1, 2), 5)) == 1

    def test_two_terms(self):
        assert eval_3f2(HypPoint(-1, 2, 3, 4, 5)) == Fraction(7, 10)

    def test_three_terms(self):
        assert eval_3f2(HypPoint(-2, 1, 1, 2, 2)) == Fraction(11, 18)

    def test_not_terminating(self):
        with pytest.raises(InvalidParameters):
            eval_3f2(HypPoint(Fraction(1, 2), 1, 1, 3, 4))

    def test_denominator_vanishes(self):
        with pytest.raises(InvalidParameters):
            eval_3f2(HypPoint(-3, 1, 1, -1, 4))

    def test_denominator_after_termination(self):
        # (e)_k first vanishes at k = 3, after the series stops at k = 2
        assert eval_3f2(HypPoint(-2, 1, 1, 2, -2)) == 1 + H + Fraction(1, 3)

    @settings(max_examples=60, deadline=None)
    @given(terminating())
    def test_against_oracle(self, p):
        assert eval_3f2(p) == series_oracle(*p.params)

    def test_bad_mode(self):
        with pytest.raises(InvalidInput):
            HypPoint(1, 1, 1, 1, 1, mode="fast")


class TestApproximate:
    @pytest.mark.parametrize(
        "params",
        [
            (Fraction(1, 3), Fraction(-1, 2), 1, Fraction(17, 2), 20),
            (Fraction(5, 2), 2, Fraction(-7, 3), 16, Fraction(43, 2)),
            (2, Fraction(-3, 2), 1, 30, Fraction(51, 2)),
        ],
    )
    def test_against_nsum(self, params):
        v = eval_3f2(HypPoint.of(params, "approx", 40))
        with mpmath.workdps(60):
            a, b, c, d, e = (mpmath.mpf(Fraction(q).numerator) / Fraction(q).denominator for q in params)
            ref = mpmath.nsum(lambda n: mpmath.rf(a, n) * mpmath.rf(b, n) * mpmath.rf(c, n) / (mpmath.rf(d, n) * mpmath.rf(e, n) * mpmath.factorial(n)), [0, mpmath.inf])
            assert abs(v.value - ref) < mpmath.mpf(10) ** -38
            assert v.error_bound < mpmath.mpf(10) ** -40

    def test_against_hyper(self):
        params = (Fraction(1, 3), Fraction(-1, 2), 1, Fraction(17, 2), 20)
        v = eval_3f2(HypPoint.of(params, "approx", 40))
        with mpmath.workdps(60):
            ref = mpmath.hyp3f2(mpmath.mpf(1) / 3, -0.5, 1, 8.5, 20, 1)
            assert abs(v.value - ref) < mpmath.mpf(10) ** -38

    def test_terminating_in_approx_mode(self):
        v = eval_3f2(HypPoint(-2, 1, 1, 2, 2, "approx"))
        with mpmath.workdps(60):
            assert v.error_bound == 0 and abs(v.value - mpmath.mpf(11) / 18) < mpmath.mpf(10) ** -40

    def test_divergent(self):
        with pytest.raises(ConvergenceError):
            eval_3f2(HypPoint(1, 1, 1, 1, 1, "approx"))

    def test_too_slow(self):
        with pytest.raises(ConvergenceError):
            eval_3f2(HypPoint(1, 1, 1, 2, Fraction(203, 100), "approx"))

    def test_term_budget(self):
        # converges, but like n^-4: 40 digits are out of reach by direct summation
        with pytest.raises(ConvergenceError):
            eval_3f2(HypPoint(1, 1, 1, 3, 3, "approx"))


class TestRelations:
    def test_table(self):
        assert list(relation_ids()) == list(range(1, 46))
        assert len({relation_label(i) for i in relation_ids()}) == 45

    def test_id1(self):
        assert contiguous_residual(1, HypPoint(-2, 1, 1, 2, 2)) == 0

    def test_id41(self):
        assert contiguous_residual(41, HypPoint(-2, 1, 1, 3, 4)) == 0

    def test_forbidden_bump(self):
        with pytest.raises(InvalidParameters):
            contiguous_residual(10, HypPoint(-2, 1, 1, 1, 3))

    def test_unknown_id(self):
        with pytest.raises(InvalidInput):
            contiguous_residual(46, HypPoint(-2, 1, 1, 2, 2))

    @pytest.mark.parametrize("rel_id", range(1, 46))
    @settings(max_examples=5, deadline=None)
    @given(p=terminating())
    def test_exact_samples(self, rel_id, p):
        assert contiguous_residual(rel_id, p) == 0

    @pytest.mark.parametrize("rel_id", [1, 10, 20, 26, 38, 40, 43, 45])
    def test_approximate(self, rel_id):
        p = HypPoint(Fraction(1, 3), Fraction(-5, 4), Fraction(2, 7), Fraction(35, 2), Fraction(61, 3), "approx", 40)
        with mpmath.workdps(55):
            assert abs(contiguous_residual(rel_id, p)) < mpmath.mpf(10) ** -35

    def test_detects_wrong_function(self, monkeypatch):
        import reflcheck.hyper as hyper

        true_value = hyper._value
        monkeypatch.setattr(hyper, "_value", lambda p: true_value(p) + p.a * p.d * p.d + p.b * p.e)
        p = HypPoint(-3, Fraction(1, 3), Fraction(2, 5), Fraction(7, 2), Fraction(9, 4))
        assert all(contiguous_residual(i, p) != 0 for i in relation_ids())


FAMILY = LadderFamily(1, 2, 3, -3, 4, count=8)


class TestLadders:
    def test_spot_value(self):
        assert ladder_residual("down-minus", FAMILY, 3, 2) == 0

    def test_alias(self):
        assert ladder_residual(1, FAMILY, 3, 2) == ladder_residual("down-minus", FAMILY, 3, 2)

    @pytest.mark.parametrize("which", list(LADDERS))
    def test_grid(self, which):
        lo = 1 if which.startswith("down") else 0
        for u in range(1 + lo, 7):
            for x in range(-2, 3):
                assert ladder_residual(which, FAMILY, u, x) == 0

    def test_coefficient_vanishing(self):
        # u = e - a kills the lowering coefficient through (a - e + u)
        fam = LadderFamily(1, Fraction(1, 3), 3, -3, 3, count=4)
        u = fam.e - fam.a
        assert ladder_coefficient("down-minus", fam.a, fam.d, fam.e)({"u": u}) == 0
        assert ladder_residual("down-minus", fam, u, 0) == 0

    def test_constant_member(self):
        # u = a: F(u) is identically 1 and the lowering coefficient vanishes
        for which in ("down-minus", "down-plus"):
            b = ladder_bracket(which, 1, 2, 3).subs_values({"u": 1})
            assert sum(b.terms.values(), DEFAULT.zero()) == 0
            assert ladder_residual(which, FAMILY, 1, 0) == 0

    def test_pole(self):
        fam = LadderFamily(-H, 2, 3, -3, 3, count=4)
        with pytest.raises(PoleError):
            ladder_residual("down-minus", fam, H, 0)

    def test_removable_point(self):
        # a = 1/2 makes delta vanish; u = 1/2 is then a regular member
        fam = LadderFamily(H, Fraction(1, 3), Fraction(7, 4), -3, 3, count=4)
        assert ladder_residual("up-minus", fam, H, 0) == 0

    def test_grid_underflow(self):
        with pytest.raises(RangeError):
            ladder_residual("down-minus", FAMILY, 3, -3)

    def test_domain(self):
        with pytest.raises(RangeError):
            ladder_residual("down-minus", FAMILY, 20, 0)

    def test_unknown(self):
        with pytest.raises(InvalidInput):
            ladder_residual("sideways", FAMILY, 3, 0)

    @pytest.mark.parametrize("u", [2, 3, 5])
    def test_down_then_up(self, u):
        a, d, e = FAMILY.a, FAMILY.d, FAMILY.e
        down = ladder_bracket("down-minus", a, d, e).subs_values({"u": u})
        up = ladder_bracket("up-minus", a, d, e).subs_values({"u": u - 1})
        both = dop_compose(up, down)
        w = Fraction(u) - H
        p = RealizationParams(a, d, e, "a")
        factor = delta_plus(p)({"u": w}) * delta_minus(p)({"u": w})
        table = FAMILY.table(u)
        for x in range(-1, 3):
            assert dop_apply(both, table, x) == factor * table[x]


class TestAnnihilation:
    def test_spot_value(self):
        assert annihilation_residual(FAMILY, 3, 1) == 0

    def test_constant_member(self):
        assert annihilation_residual(FAMILY, 1, 0) == 0

    def test_grid(self):
        for u in range(1, 7):
            for x in range(-2, 4):
                assert annihilation_residual(FAMILY, u, x) == 0

    def test_perturbed_constant(self):
        c0 = annihilation_operator(FAMILY, 0) + 1
        for x in range(-2, 4):
            assert annihilation_residual(FAMILY, 3, x, c0=c0) == FAMILY.value(3, x)
        assert any(FAMILY.value(3, x) != 0 for x in range(-2, 4))


class TestHahn:
    def test_degree_zero(self):
        h = HahnParams(0, 1, 2, 5)
        assert [hahn_eval(h, x) for x in range(6)] == [1] * 6

    def test_origin(self):
        for n in range(6):
            assert hahn_eval(HahnParams(n, Fraction(1, 3), 2, 5), 0) == 1

    def test_degree_one(self):
        al, be, N = Fraction(1, 3), Fraction(5, 2), 6
        h = HahnParams(1, al, be, N)
        for x in range(N + 1):
            assert hahn_eval(h, x) == 1 - (al + be + 2) * x / ((al + 1) * N)

    def test_difference_equation(self):
        res = hahn_residuals(HahnParams(2, 1, 2, 5), "difference-eq")
        assert res[1] == 0 and all(r == 0 for r in res)

    def test_orthogonality(self):
        assert hahn_residuals(HahnParams(1, 0, 0, 4), "orthogonality", m=2) == (0,)

    def test_norm_nonzero(self):
        from reflcheck.hyper import hahn_weight

        h = HahnParams(2, 0, 0, 4)
        assert sum(hahn_weight(h, x) * hahn_eval(h, x) ** 2 for x in range(5)) > 0

    def test_lowering_at_bottom(self):
        res = hahn_residuals(HahnParams(0, 0, 0, 4), "ladder")
        assert all(r == 0 for r in res)

    @pytest.mark.parametrize("ab", [(1, 2), (H, Fraction(3, 2))])
    @pytest.mark.parametrize("check", ["difference-eq", "ladder", "orthogonality"])
    def test_sweep(self, ab, check):
        for N in (1, 4, 8):
            for n in range(min(5, N) + 1):
                assert all(r == 0 for r in hahn_residuals(HahnParams(n, *ab, N), check))

    def test_invalid(self):
        with pytest.raises(InvalidParameters):
            HahnParams(6, 1, 2, 5)
        with pytest.raises(InvalidParameters):
            HahnParams(1, -1, 2, 5)
        with pytest.raises(InvalidInput):
            hahn_residuals(HahnParams(1, 1, 2, 5), "recurrence")
