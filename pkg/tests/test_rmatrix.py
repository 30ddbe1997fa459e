from fractions import Fraction

import pytest

from reflcheck.diffop import DiffOp
from reflcheck.errors import InvalidInput, PoleError
from reflcheck.rank1 import RealizationParams, determinant_polynomial, printed_delta, printed_q0, printed_q2, realization_build
from reflcheck.rmatrix import (
    COMMUTATOR_RELATIONS,
    UOperator,
    build_r,
    commutator_residual,
    commutator_residual_at,
    qdet_center_residuals,
    quantum_determinant,
    reflection_residual,
    unitarity_residual,
    ybe_residual,
)
from reflcheck.scalar import DEFAULT
from reflcheck.suites import _perturbed

u, v = DEFAULT.vars("u", "v")
POINT = (Fraction(1, 3), Fraction(7, 5), Fraction(-9, 4))


def scalar_u(c) -> UOperator:
    z = DiffOp.scalar(0)
    return UOperator(DiffOp.scalar(c), z, z, DiffOp.scalar(c))


def flat(res):
    return [e for row in res for e in row] if isinstance(res[0], list) else list(res)


@pytest.fixture(scope="module", params=["a", "b"])
def realization(request):
    return realization_build(RealizationParams(*POINT, request.param))


class TestRMatrix:
    def test_zero_is_permutation(self):
        P = build_r().at(0)
        assert P == [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]

    def test_at_two(self):
        R = build_r().at(2)
        assert [R[i][i] for i in range(4)] == [3, 2, 2, 3]
        assert R[1][2] == R[2][1] == 1
        assert sum(1 for row in R for x in row if x) == 6

    @pytest.mark.parametrize("kappa", [1, Fraction(-2, 3)])
    def test_yang_baxter(self, kappa):
        assert all(e.is_zero() for row in ybe_residual(kappa) for e in row)


class TestReflection:
    def test_zero_operator(self):
        assert all(e.is_zero() for e in flat(reflection_residual(scalar_u(0))))

    def test_scalar_operator(self):
        assert all(e.is_zero() for e in flat(reflection_residual(scalar_u(Fraction(5, 7) + u * u))))

    def test_realization(self, realization):
        assert all(e.is_zero() for e in flat(reflection_residual(realization.uoperator())))

    def test_spec_point(self):
        r = realization_build(RealizationParams(1, 2, 3, "a"))
        assert all(e.is_zero() for e in flat(reflection_residual(r.uoperator())))

    @pytest.mark.parametrize("kind", ["B0+1", "2*C0", "A0+x"])
    def test_perturbations_fail_both(self, kind):
        U = _perturbed(kind)
        assert not all(e.is_zero() for e in flat(reflection_residual(U)))
        assert not all(r.is_zero() for rid in COMMUTATOR_RELATIONS for r in commutator_residual(U, rid))


class TestQuantumDeterminant:
    def test_scalar(self):
        c = Fraction(3, 2)
        for form in range(1, 5):
            q = quantum_determinant(scalar_u(c), form)
            assert q == DiffOp.scalar(-c * c)

    def test_forms_agree_and_match(self, realization):
        a, d, e = POINT
        case = realization.params.case
        expected = determinant_polynomial(printed_q2(case, a, d, e), printed_q0(case, a, d, e), realization.delta)
        forms = [quantum_determinant(realization.uoperator(), f) for f in range(1, 5)]
        assert all(f == forms[0] for f in forms)
        assert forms[0] == DiffOp.scalar(expected)

    def test_spot_values(self):
        r = realization_build(RealizationParams(1, 2, 3, "a"))
        assert printed_q2("a", 1, 2, 3) == Fraction(11, 16)
        assert printed_delta("a", 1, 2, 3) == Fraction(3, 16)
        expected = -u**4 / 4 + Fraction(11, 16) * u**2 + printed_q0("a", 1, 2, 3) + Fraction(9, 256) / u**2
        assert quantum_determinant(r.uoperator(), 1) == DiffOp.scalar(expected)

    def test_even(self, realization):
        q = quantum_determinant(realization.uoperator())
        assert q.subs("u", -u) == q

    def test_central(self, realization):
        assert all(r.is_zero() for r in qdet_center_residuals(realization.uoperator()))

    def test_bad_form(self):
        with pytest.raises(InvalidInput):
            quantum_determinant(scalar_u(1), 5)


class TestUnitarity:
    def test_realization(self, realization):
        assert all(r.is_zero() for r in unitarity_residual(realization.uoperator()))

    def test_scalar_detected(self):
        c = Fraction(2)
        res = unitarity_residual(scalar_u(c))
        assert res[0] == DiffOp.scalar(-4 * c * u / (2 * u + 1))
        assert not res[0].is_zero()

    def test_constant_b(self):
        z = DiffOp.scalar(0)
        U = UOperator(z, DiffOp.scalar(7), z, z)
        assert unitarity_residual(U)[2].is_zero()


class TestCommutators:
    def test_constant_b(self):
        z = DiffOp.scalar(0)
        U = UOperator(DiffOp.scalar(u), DiffOp.shift_op(1), z, z)
        assert all(r.is_zero() for r in commutator_residual(U, 1))

    def test_all_ids(self, realization):
        U = realization.uoperator()
        assert sorted(COMMUTATOR_RELATIONS) == list(range(1, 16))
        for rid in COMMUTATOR_RELATIONS:
            assert all(r.is_zero() for r in commutator_residual(U, rid)), rid

    def test_id1_has_two_components(self, realization):
        assert len(commutator_residual(realization.uoperator(), 1)) == 2

    def test_uncleared_pole(self, realization):
        with pytest.raises(PoleError):
            commutator_residual_at(realization.uoperator(), 12, Fraction(1, 3), Fraction(1, 3))

    def test_pointwise_matches_symbolic(self, realization):
        U = realization.uoperator()
        assert all(r.is_zero() for r in commutator_residual_at(U, 12, Fraction(1, 3), Fraction(5, 2)))
        bad = _perturbed("B0+1")
        sym = commutator_residual(bad, 12, cleared=False)[0]
        assert commutator_residual_at(bad, 12, 3, Fraction(5, 2))[0] == sym.subs("u", 3).subs("v", Fraction(5, 2))

    def test_unknown_id(self):
        with pytest.raises(InvalidInput):
            commutator_residual(scalar_u(1), 16)
