import json
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reflcheck.errors import InvalidInput, InvalidRule
from reflcheck.ncrewrite import (
    ORIGINAL_ORDER,
    TILDE_ORDER,
    NCPoly,
    RewriteSystem,
    ambiguity_defect,
    count_normal_monomials,
    is_confluent,
    normal_form,
    original_system,
    overlap_words,
    resolve_ambiguity,
    system_from_relations,
    tilde_system,
    tilde_system_derived,
)
from reflcheck.rank1 import Rank1Data, center_elements
from reflcheck.scalar import DEFAULT

from strategies import small_q

al, be, ga, de = DEFAULT.vars("alpha", "beta", "gamma", "delta")
T1, T0, TB, TC = NCPoly.gens(TILDE_ORDER)
X, Y, Z = NCPoly.gens("xyz")
LISTED = [("C0~", "B0~", "A0~"), ("C0~", "B0~", "A1~"), ("B0~", "A0~", "A1~"), ("C0~", "A0~", "A1~")]


def synthetic(zx_extra: bool) -> RewriteSystem:
    rules = {("y", "x"): X * Y + 1, ("z", "y"): Y * Z, ("z", "x"): X * Z + (X if zx_extra else 0)}
    return RewriteSystem(("x", "y", "z"), rules)


words = st.lists(st.sampled_from(TILDE_ORDER), min_size=0, max_size=4).map(tuple)


@st.composite
def ncpolys(draw):
    out = NCPoly(DEFAULT)
    for _ in range(draw(st.integers(0, 3))):
        out = out + NCPoly.word(draw(words), draw(small_q))
    return out


class TestNormalForm:
    def test_first_rule(self):
        assert normal_form(T0 * T1, tilde_system()) == T1 * T0 - TB.scale(ga) + TC.scale(be)

    def test_ordered_word_unchanged(self):
        w = T1 * T0 * TB
        assert normal_form(w, tilde_system()) == w

    def test_strategies_agree(self):
        w = TC * TB * T0
        rs = tilde_system()
        assert normal_form(w, rs, "leftmost") == normal_form(w, rs, "rightmost")

    def test_unknown_strategy(self):
        with pytest.raises(InvalidInput):
            normal_form(T1, tilde_system(), "random")

    def test_normal_words(self):
        rs = tilde_system()
        nf = normal_form(TC * TB * T0 * T1, rs)
        for w in nf.terms:
            assert all((w[i], w[i + 1]) not in rs.rules for i in range(len(w) - 1))

    @settings(max_examples=40, deadline=None)
    @given(ncpolys())
    def test_strategy_independence(self, p):
        rs = tilde_system()
        assert normal_form(p, rs, "leftmost") == normal_form(p, rs, "rightmost")

    @settings(max_examples=40, deadline=None)
    @given(ncpolys())
    def test_idempotent(self, p):
        rs = tilde_system()
        nf = normal_form(p, rs)
        assert normal_form(nf, rs) == nf

    @settings(max_examples=40, deadline=None)
    @given(ncpolys(), ncpolys(), small_q)
    def test_linear(self, p, q, c):
        rs = tilde_system()
        assert normal_form(p + q.scale(c * al), rs) == normal_form(p, rs) + normal_form(q, rs).scale(c * al)

    @settings(max_examples=25, deadline=None)
    @given(ncpolys(), ncpolys())
    def test_multiplicative_consistency(self, p, q):
        rs = tilde_system()
        assert normal_form(p * q, rs) == normal_form(normal_form(p, rs) * normal_form(q, rs), rs)


class TestDiamond:
    def test_listed_ambiguities(self):
        rs = tilde_system()
        assert sorted(overlap_words(rs)) == sorted(LISTED)
        assert all(resolve_ambiguity(w, rs) for w in LISTED)

    def test_derived_system_matches(self):
        assert tilde_system_derived().rules == tilde_system().rules

    def test_original_order(self):
        rs = original_system()
        assert rs.is_complete() and is_confluent(rs)

    def test_synthetic_detection(self):
        assert not resolve_ambiguity("zyx", synthetic(True))
        assert not is_confluent(synthetic(True))
        assert is_confluent(synthetic(False))

    def test_defect_value(self):
        # the Jacobi defect of the bracket table, [y, [x, z]] = -[y, x] = -1, up to sign
        assert ambiguity_defect("zyx", synthetic(True)) == NCPoly.scalar(1)

    def test_not_an_overlap(self):
        with pytest.raises(InvalidInput):
            resolve_ambiguity(("A1~", "A0~", "B0~"), tilde_system())

    def test_center_is_central(self):
        data = Rank1Data(*NCPoly.gens(ORIGINAL_ORDER), al, be, ga, de)
        rs = original_system()
        cp = center_elements(data)
        for g in NCPoly.gens(ORIGINAL_ORDER):
            assert normal_form(cp.Q2.commutator(g), rs).is_zero()
            assert normal_form(cp.Q0.commutator(g), rs).is_zero()


class TestCounting:
    @pytest.mark.parametrize("n", range(7))
    def test_pbw_counts(self, n):
        assert count_normal_monomials(tilde_system(), n) == comb(n + 3, 3)

    def test_examples(self):
        rs = tilde_system()
        assert [count_normal_monomials(rs, n) for n in (0, 2, 5)] == [1, 10, 56]

    def test_non_confluent_refused(self):
        with pytest.raises(InvalidRule):
            count_normal_monomials(synthetic(True), 3)
        assert count_normal_monomials(synthetic(True), 3, check=False) == comb(5, 2)

    def test_negative(self):
        with pytest.raises(InvalidInput):
            count_normal_monomials(tilde_system(), -1)


class TestRules:
    def test_ascending_lhs(self):
        with pytest.raises(InvalidRule):
            RewriteSystem(("x", "y"), {("x", "y"): Y * X})

    def test_rhs_not_smaller(self):
        with pytest.raises(InvalidRule):
            RewriteSystem(("x", "y"), {("y", "x"): X * X * Y})

    def test_undeclared(self):
        with pytest.raises(InvalidRule):
            RewriteSystem(("x", "y"), {("y", "x"): X * Z})

    def test_json_roundtrip(self):
        rs = tilde_system()
        back = RewriteSystem.from_json(json.loads(rs.dumps()))
        assert back.order == rs.order and back.rules == rs.rules

    def test_json_shape(self):
        data = tilde_system().to_json()
        assert data["order"] == list(TILDE_ORDER)
        assert {tuple(r["lhs"]) for r in data["rules"]} == set(tilde_system().rules)

    def test_malformed_json(self):
        with pytest.raises(InvalidRule):
            RewriteSystem.from_json({"order": ["x"]})

    def test_shared_leading_word(self):
        with pytest.raises(InvalidRule):
            system_from_relations(("x", "y"), [Y * X - X * Y, Y * X - X * Y - 1])


class TestNCPoly:
    def test_json_roundtrip(self):
        p = (T0 * T1).scale(al / (be + 1)) - 3
        assert NCPoly.from_json(p.to_json()) == p

    def test_no_zero_coefficients(self):
        p = T0 * T1 - T0 * T1
        assert p.is_zero() and p.terms == {}

    def test_substitute_generators(self):
        p = T0 * T1 + T1
        q = p.substitute_generators({"A0~": X, "A1~": Y + 1})
        assert q == X * Y + X + Y + 1
