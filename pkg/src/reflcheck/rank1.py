"""Rank-1 U-operators: ``(u - 1/2) U(u)`` polynomial of degree at most 3.

Generators ``A1, A0, B0, C0`` may be difference operators (a concrete
realization) or noncommutative polynomials (the abstract algebra); the
functions here only use ring operations so both work.  The constants
``alpha, beta, gamma, delta`` are scalars, except that ``delta`` may be a
central element of the generator ring.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Sequence

from .diffop import DiffOp
from .errors import InvalidInput, NoSolution
from .rmatrix import UOperator
from .scalar import DEFAULT, Context, MultiPoly, RationalFunction, as_fraction

__all__ = [
    "Rank1Data",
    "CenterPair",
    "RealizationParams",
    "Realization",
    "Classification",
    "build_u_rank1",
    "case_i_matrix",
    "relations_residual",
    "center_elements",
    "tilde_generators",
    "tilde_kkk_residual",
    "gl2_transform",
    "solve_beta_zero",
    "realization_build",
    "reduced_identity_residuals",
    "decompose_second_order",
    "classify_solutions",
    "delta_minus",
    "delta_plus",
    "determinant_polynomial",
    "delta_factorization_check",
    "CASE_CONSTANTS",
]

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


def _is_scalar(c) -> bool:
    return isinstance(c, (int, Fraction, MultiPoly, RationalFunction))


@dataclass(frozen=True)
class Rank1Data:
    A1: Any
    A0: Any
    B0: Any
    C0: Any
    alpha: Any = 0
    beta: Any = 0
    gamma: Any = 0
    delta: Any = 0

    @property
    def ctx(self) -> Context:
        return self.A0.ctx

    def scalar(self, c) -> RationalFunction:
        return self.ctx.const(0)._coerce(c)

    def consts(self):
        s = self.scalar
        delta = self.delta if not _is_scalar(self.delta) else s(self.delta)
        return s(self.alpha), s(self.beta), s(self.gamma), delta

    def one(self):
        return self.A0.scale(0) + 1


#: (alpha, beta, gamma) for the three normal forms after beta = 0.
CASE_CONSTANTS = {
    "i": (HALF, Fraction(0), Fraction(1)),
    "ii": (Fraction(0), Fraction(0), Fraction(1)),
    "iii": (Fraction(0), Fraction(0), Fraction(0)),
}


@dataclass(frozen=True)
class CenterPair:
    Q2: Any
    Q0: Any


def _times(obj, c):
    """``c * obj`` where ``obj`` is a ring element or a scalar."""
    if _is_scalar(obj):
        return obj * c
    return obj.scale(c)


def build_u_rank1(data: Rank1Data, var: str = "u") -> UOperator:
    ctx = data.ctx
    al, be, ga, de = data.consts()
    w = ctx.var(var) - HALF
    inv = w.inverse()
    u2 = ctx.var(var) ** 2
    A = data.A1.scale(w) + data.A0 + al * w * w
    D = (data.A1 - al * 2).scale(w) - data.A0 + data.A1.scale(2) - al * 2 - al * w * w
    delta_term = _times(de, inv)
    A = A + delta_term
    D = D + delta_term
    B = data.B0 + be * u2
    C = data.C0 + ga * u2
    return UOperator(A, B, C, D, var)


def case_i_matrix(A1, A0, B0, C0, delta, var: str = "u") -> UOperator:
    """The explicit case-i matrix (alpha = 1/2, beta = 0, gamma = 1)."""
    ctx = A0.ctx
    u = ctx.var(var)
    d = ctx.const(0)._coerce(delta) / (u - HALF)
    A = (u - HALF) ** 2 * HALF + A1.scale(u - HALF) + A0 + d
    D = -HALF * (u + HALF) ** 2 + A1.scale(u + Fraction(3, 2)) - A0 - HALF + d
    return UOperator(A, B0 + 0, C0 + u * u, D, var)


def relations_residual(data: Rank1Data):
    """LHS - RHS of the six quadratic relations between A1, A0, B0, C0."""
    A1, A0, B0, C0 = data.A1, data.A0, data.B0, data.C0
    al, be, ga, de = data.consts()

    def comm(x, y):
        return x * y - y * x

    def anti(x, y):
        return x * y + y * x

    one = data.one()
    d_op = _times(de, 1) if not _is_scalar(de) else one.scale(de)
    A1a = A1 - al
    return (
        comm(A1, A0) - B0.scale(ga) + C0.scale(be),
        comm(A1, B0) + B0.scale(2 * al) - (A0.scale(2) - A1.scale(2) + al * Fraction(3, 2)).scale(be),
        comm(A1, C0) - C0.scale(2 * al) - (-A0.scale(2) + A1.scale(2) - al * Fraction(3, 2)).scale(ga),
        comm(A0, B0) + anti(A1, B0) - (A0.scale(2) - A1.scale(Fraction(5, 2)) + al * 2 + d_op.scale(2)).scale(be),
        comm(A0, C0) - anti(A1, C0) - (-A0.scale(2) + A1.scale(Fraction(5, 2)) - al * 2 - d_op.scale(2)).scale(ga),
        comm(B0, C0) + anti(A0, A1).scale(2) - (A1a * A1a).scale(4) - A0.scale(4 * al) - d_op.scale(4 * al),
    )


def center_elements(data: Rank1Data) -> CenterPair:
    A1, A0, B0, C0 = data.A1, data.A0, data.B0, data.C0
    al, be, ga, de = data.consts()
    d_op = de if not _is_scalar(de) else data.one().scale(de)
    q2 = A1 * A1 - A0.scale(2 * al) - B0.scale(ga) - C0.scale(be) + be * ga * HALF
    q0 = (
        -(A0 * A0)
        - B0 * C0
        + (d_op * A1).scale(2)
        - B0.scale(ga * QUARTER)
        - C0.scale(be * QUARTER)
        - be * ga * Fraction(1, 16)
    )
    return CenterPair(q2, q0)


def tilde_generators(data: Rank1Data):
    """``(A1~, A0~, B0~, C0~) = (A1 - al, A0 - A1 + al, B0 + be/4, C0 + ga/4)``."""
    al, be, ga, _ = data.consts()
    return (
        data.A1 - al,
        data.A0 - data.A1 + al,
        data.B0 + be * QUARTER,
        data.C0 + ga * QUARTER,
    )


def tilde_kkk_residual(data: Rank1Data):
    """Residuals of the six relations in the shifted generators, printed order."""
    T1, T0, TB, TC = tilde_generators(data)
    al, be, ga, de = data.consts()
    d_op = de if not _is_scalar(de) else data.one().scale(de)
    return (
        T0 * T1 - (T1 * T0 - TB.scale(ga) + TC.scale(be)),
        TB * T1 - (T1 * TB + TB.scale(2 * al) - T0.scale(2 * be)),
        TC * T1 - (T1 * TC - TC.scale(2 * al) + T0.scale(2 * ga)),
        TB * T0 - (T0 * TB + (T1 * TB).scale(2) + TB.scale(2 * al) - T0.scale(2 * be) - d_op.scale(2 * be)),
        TC * T0 - (T0 * TC - (T1 * TC).scale(2) + TC.scale(2 * al) - T0.scale(2 * ga) + d_op.scale(2 * ga)),
        TC * TB - (TB * TC + (T1 * T0).scale(4) - TB.scale(2 * ga) + TC.scale(2 * be) - d_op.scale(4 * al)),
    )


def gl2_transform(U: UOperator, m: Sequence[Sequence]) -> UOperator:
    """``m U adj(m)`` for an invertible 2x2 rational matrix ``m``."""
    (p, q), (r, s) = [[as_fraction(x) for x in row] for row in m]
    if p * s - q * r == 0:
        raise InvalidInput("GL(2) transform needs det(m) != 0")
    M = [[p, q], [r, s]]
    adj = [[s, -q], [-r, p]]
    E = U.matrix
    out = [[None, None], [None, None]]
    for i in range(2):
        for j in range(2):
            acc = E[0][0].scale(0)
            for k in range(2):
                for l in range(2):
                    c = M[i][k] * adj[l][j]
                    if c:
                        acc = acc + E[k][l].scale(c)
            out[i][j] = acc
    return UOperator(out[0][0], out[0][1], out[1][0], out[1][1], U.var)


def _rational_sqrt(q: Fraction) -> Fraction | None:
    from math import isqrt

    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def solve_beta_zero(alpha, beta, gamma) -> list[list[Fraction]]:
    """A rational ``m`` whose transform has vanishing ``beta``.

    The new beta is ``p^2 beta - 2 p q alpha - q^2 gamma`` for ``m = [[p, q], [r, s]]``.
    """
    al, be, ga = (as_fraction(v) for v in (alpha, beta, gamma))
    if be == 0:
        return [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    if ga == 0:
        if al != 0:
            return [[Fraction(1), be / (2 * al)], [Fraction(0), Fraction(1)]]
        # beta' = -q^2 gamma = 0 with p = 0.
        return [[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]
    root = _rational_sqrt(al * al + be * ga)
    if root is None:
        raise InvalidInput("alpha^2 + beta*gamma is not a rational square; no rational transform")
    q = (-al + root) / ga
    return [[Fraction(1), q], [Fraction(0), Fraction(1)]]


def transformed_constants(alpha, beta, gamma, m) -> tuple[Fraction, Fraction, Fraction]:
    """(alpha, beta, gamma) of ``m U2 adj(m)`` for ``U2 = [[al, be], [ga, -al]]``."""
    al, be, ga = (as_fraction(v) for v in (alpha, beta, gamma))
    (p, q), (r, s) = [[as_fraction(x) for x in row] for row in m]
    M = [[p, q], [r, s]]
    adj = [[s, -q], [-r, p]]
    U2 = [[al, be], [ga, -al]]
    prod = [[sum(M[i][k] * U2[k][l] * adj[l][j] for k in range(2) for l in range(2)) for j in range(2)] for i in range(2)]
    return prod[0][0], prod[0][1], prod[1][0]


# ---------------------------------------------------------------------------
# Difference-operator realizations (case i)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RealizationParams:
    a: Any
    d: Any
    e: Any
    case: str = "a"

    def __post_init__(self):
        if self.case not in ("a", "b"):
            raise InvalidInput(f"realization case must be 'a' or 'b', got {self.case!r}")


@dataclass(frozen=True)
class Realization:
    params: RealizationParams
    data: Rank1Data
    center: CenterPair
    delta: RationalFunction
    printed_delta: RationalFunction
    x_shift: Fraction = Fraction(0)
    u: UOperator = field(default=None, repr=False, compare=False)

    def uoperator(self, var: str = "u") -> UOperator:
        return build_u_rank1(self.data, var)


def _param(ctx: Context, v) -> RationalFunction:
    if isinstance(v, RationalFunction):
        return v
    if isinstance(v, str):
        return ctx.var(v)
    return ctx.const(v)


def _exact(*vals):
    # plain ints would turn the printed divisions into floats
    return tuple(v if isinstance(v, RationalFunction) else as_fraction(v) for v in vals)


def printed_q2(case: str, a, d, e):
    a, d, e = _exact(a, d, e)
    if case == "a":
        return (a / 4 - d / 4 - e / 4 + 3 * a**2 / 4 - a * d / 2 - a * e / 2 + d**2 / 4 + e**2 / 4 + Fraction(3, 16))
    return (a / 4 - e / 4 - d / 4 + 3 * a**2 / 4 + e**2 / 4 - e * a / 2 + d**2 / 4 + Fraction(3, 16) - d * a / 2)


def printed_q0(case: str, a, d, e):
    a, d, e = _exact(a, d, e)
    if case == "a":
        return (
            -e * d / 4 - a / 8 + d / 8 + e / 8 - e * d * a - a**2 / 8 + a * d / 4 + a * e / 4 - d**2 / 8
            - e**2 / 8 + e * d**2 / 4 + e**2 * d / 4 + e * d**2 * a / 2 + e**2 * d * a / 2 - Fraction(3, 64)
            - 3 * a**4 / 4
            + a**2 * d / 2 + a**2 * e / 2 - a**3 / 2 + a**3 * d + a**3 * e - e**2 * d**2 / 4
            - a**2 * d**2 / 2 - a**2 * e**2 / 2 - a**2 * e * d
        )
    return (
        -d * e / 4 - a / 8 + e / 8 + d / 8 - a**2 / 8 - d * e * a - e**2 / 8 + e * a / 4 + d * a / 4
        - d**2 / 8
        + d * e**2 / 4 + d**2 * e / 4 - a**2 * d * e + d * e**2 * a / 2 + d**2 * e * a / 2 - 3 * a**4 / 4
        - Fraction(3, 64) + a**3 * e + a**3 * d
        - a**2 * d**2 / 2 - a**2 * e**2 / 2 - d**2 * e**2 / 4 + a**2 * e / 2 + a**2 * d / 2 - a**3 / 2
    )


def printed_delta(case: str, a, d, e):
    a, d, e = _exact(a, d, e)
    if case == "a":
        return HALF * (a - HALF) * ((a + HALF) * (a + HALF - d - e) + d * e)
    return Fraction(1, 16) * (2 * a - 1) * (2 * a + 1 - 2 * e) * (2 * a + 1 - 2 * d)


def realization_build(p: RealizationParams, ctx: Context = DEFAULT, lattice: str = "x", x_shift=0) -> Realization:
    """The two printed second-order realizations, optionally translated in x.

    Case (b) enters U(u) with ``delta = -printed_delta``: with the printed sign
    the sixth relation and the B0*C0 identity fail.  The printed value is kept
    in ``printed_delta``.
    """
    a, d, e = (_param(ctx, v) for v in (p.a, p.d, p.e))
    x = ctx.var(lattice)
    dm = DiffOp.delta_minus(ctx, lattice)
    dp = DiffOp.delta_plus(ctx, lattice)
    S = lambda k: DiffOp.shift_op(k, ctx, lattice)  # noqa: E731
    one = DiffOp.scalar(1, ctx, lattice)
    xd_xe = (x - d) * (x - e)
    xx = x * (x + 2 * a + 1 - d - e)
    C0 = -(dm.scale(xd_xe)) - dp.scale(xx) - one.scale(a * a)
    if p.case == "a":
        A1 = one.scale(-x + QUARTER + (d + e - a) / 2)
        A0 = one.scale(-HALF * (a + HALF) ** 2 + HALF * (-d * e + d + e) + x * (a - HALF)) - dm.scale(xd_xe)
        B0 = S(-1).scale(xd_xe)
    else:
        A1 = one.scale(x + Fraction(3, 4) - (d + e - a) / 2)
        A0 = one.scale(-HALF * (a - HALF) ** 2 + HALF * (d * e - d - e + 1) - x * (a - HALF)) - dp.scale(xx)
        B0 = S(1).scale(xx)
    pd = printed_delta(p.case, a, d, e)
    delta = pd if p.case == "a" else -pd
    q2, q0 = printed_q2(p.case, a, d, e), printed_q0(p.case, a, d, e)
    shift = as_fraction(x_shift)
    if shift:
        A1, A0, B0, C0 = (op.shift_variable(shift) for op in (A1, A0, B0, C0))
    al, be, ga = CASE_CONSTANTS["i"]
    data = Rank1Data(A1, A0, B0, C0, al, be, ga, delta)
    return Realization(p, data, CenterPair(q2, q0), delta, pd, shift)


def reduced_identity_residuals(data: Rank1Data, q2, q0):
    """The three reduced identities (commutator, B0 formula, B0*C0 formula)."""
    A1, A0, B0, C0 = data.A1, data.A0, data.B0, data.C0
    de = data.scalar(data.delta)
    target_b0 = A1 * A1 - A0 - q2
    return (
        A1 * A0 - A0 * A1 - target_b0,
        B0 - target_b0,
        B0 * C0 - (A1.scale(2 * de) - A0 * A0 - B0.scale(QUARTER) - q0),
    )


# ---------------------------------------------------------------------------
# Classification of second-order solutions
# ---------------------------------------------------------------------------


def decompose_second_order(A0: DiffOp):
    """``(A0-, A0+, A00)`` with ``A0 = A0- S^-1 + A0+ S + A00``."""
    lo, hi = A0.shifts()
    if lo < -1 or hi > 1:
        raise InvalidInput("operator is not of second order with shifts in {-1, 0, 1}")
    return A0.coeff(-1), A0.coeff(1), A0.coeff(0)


@dataclass(frozen=True)
class Classification:
    family: str
    c1: RationalFunction
    a10: RationalFunction

    def a00(self, q2) -> RationalFunction:
        """The forced scalar part ``A10^2 - Q2``."""
        return self.a10 * self.a10 - q2


def classify_solutions(a10: RationalFunction, a0plus: RationalFunction, a0minus: RationalFunction, var: str = "x") -> Classification:
    """Decide which of the two solution families ``(A10, A0+, A0-)`` belongs to."""
    if a0plus.is_zero() and a0minus.is_zero():
        raise InvalidInput("A0+ and A0- must not both vanish identically")
    down = a10 - a10.shift(var, -1) + 1
    up = a10 - a10.shift(var, 1) + 1
    ok_minus = a0minus.is_zero() or down.is_zero()
    ok_plus = a0plus.is_zero() or up.is_zero()
    if not (ok_minus and ok_plus):
        raise NoSolution("A0-(A10(x) - A10(x-1) + 1) = 0 or A0+(A10(x) - A10(x+1) + 1) = 0 fails")
    x = a10.ctx.var(var)
    if a0plus.is_zero():
        c1 = a10 + x
        family = "a"
    else:
        c1 = a10 - x
        family = "b"
    if var in c1.variable_names():
        raise NoSolution(f"A10 + -/+x = {c1} is not constant in {var}")
    return Classification(family, c1, a10)


# ---------------------------------------------------------------------------
# Factorization of the quantum determinant
# ---------------------------------------------------------------------------


def delta_minus(p: RealizationParams, ctx: Context = DEFAULT, var: str = "u") -> RationalFunction:
    """Lowering scalar as a function of its own argument w (Delta_-(w))."""
    a, d, e = (_param(ctx, v) for v in (p.a, p.d, p.e))
    w = ctx.var(var)
    val = (a - w - HALF) * (a - d + w + HALF) * (a - e + w + HALF) / (2 * w)
    return val if p.case == "a" else -val


def delta_plus(p: RealizationParams, ctx: Context = DEFAULT, var: str = "u") -> RationalFunction:
    a, d, e = (_param(ctx, v) for v in (p.a, p.d, p.e))
    w = ctx.var(var)
    val = (a + w - HALF) * (a - d - w + HALF) * (a - e - w + HALF) / (2 * w)
    return val if p.case == "a" else -val


def determinant_polynomial(q2, q0, delta, ctx: Context = DEFAULT, var: str = "u", alpha=HALF, beta=0, gamma=1):
    """``-(al^2 + be ga) u^4 + Q2 u^2 + Q0 + delta^2 u^-2``."""
    u = ctx.var(var)
    lead = as_fraction(alpha) ** 2 + as_fraction(beta) * as_fraction(gamma)
    return -lead * u**4 + q2 * u**2 + q0 + delta * delta / (u * u)


def delta_factorization_check(p: RealizationParams, ctx: Context = DEFAULT, var: str = "u"):
    """``(Delta+ Delta- - Delta, residual of first, residual of second)``.

    The operator residuals are ``-A(-u+1)A(u) - B(u-1)C(u) - Delta(u-1/2)`` and
    ``-A(u+1)A(-u) - B(u+1)C(u) - Delta(u+1/2)``.
    """
    real = realization_build(p, ctx)
    U = real.uoperator(var)
    u = ctx.var(var)
    big = determinant_polynomial(real.center.Q2, real.center.Q0, real.delta, ctx, var)
    product = delta_plus(p, ctx, var) * delta_minus(p, ctx, var) - big
    first = -(U.at(-u + 1).A * U.A) - U.at(u - 1).B * U.C - big.subs(var, u - HALF)
    second = -(U.at(u + 1).A * U.at(-u).A) - U.at(u + 1).B * U.C - big.subs(var, u + HALF)
    return product, first, second
