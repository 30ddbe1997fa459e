"""R-matrix ``R(u) = u + kappa P``, U-operators and their defining residuals.

A :class:`UOperator` is a 2x2 matrix whose entries are noncommuting
operators (``DiffOp`` or ``NCPoly``) with coefficients rational in a spectral
variable.  Residual functions return entries of the same type; an all-zero
result certifies the identity.

Tensor legs follow the row-major basis ``e1e1, e1e2, e2e1, e2e2``: leg 1 is
the left factor, ``U1 = U (x) I`` and ``U2 = I (x) U``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .errors import InvalidInput, PoleError
from .scalar import DEFAULT, Context, MultiPoly, RationalFunction, as_fraction, poly_gcd, rf_evaluate

__all__ = [
    "RMatrix",
    "UOperator",
    "build_r",
    "ybe_residual",
    "reflection_residual",
    "quantum_determinant",
    "unitarity_residual",
    "commutator_residual",
    "commutator_residual_at",
    "COMMUTATOR_RELATIONS",
    "RELATION_LABELS",
    "qdet_center_residuals",
]

HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# Matrices with scalar (RationalFunction) or operator entries.  ``None`` is 0.
# ---------------------------------------------------------------------------


def _madd(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def _prune(x):
    return None if x is None or x.is_zero() else x


def _mul_scalar_op(S, X):
    n = len(S)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for m in range(n):
            s = S[i][m]
            if s is None:
                continue
            for j in range(n):
                x = X[m][j]
                if x is not None:
                    out[i][j] = _madd(out[i][j], x.scale(s))
    return [[_prune(e) for e in row] for row in out]


def _mul_op_scalar(X, S):
    n = len(S)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for m in range(n):
            x = X[i][m]
            if x is None:
                continue
            for j in range(n):
                s = S[m][j]
                if s is not None:
                    out[i][j] = _madd(out[i][j], x.scale(s))
    return [[_prune(e) for e in row] for row in out]


def _mul_op_op(X, Y):
    n = len(X)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for m in range(n):
            x = X[i][m]
            if x is None:
                continue
            for j in range(n):
                y = Y[m][j]
                if y is not None:
                    out[i][j] = _madd(out[i][j], x * y)
    return [[_prune(e) for e in row] for row in out]


def _mul_scalar_scalar(S, T):
    n = len(S)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for m in range(n):
            s = S[i][m]
            if s is None:
                continue
            for j in range(n):
                t = T[m][j]
                if t is not None:
                    out[i][j] = _madd(out[i][j], s * t)
    return [[_prune(e) for e in row] for row in out]


# ---------------------------------------------------------------------------
# R-matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RMatrix:
    kappa: Fraction
    var: str
    ctx: Context

    def entries(self, arg: RationalFunction | None = None) -> list[list[RationalFunction | None]]:
        """4x4 entries of ``R(arg)`` (``arg`` defaults to the spectral variable)."""
        z = self.ctx.var(self.var) if arg is None else arg
        k = self.ctx.const(self.kappa)
        diag = z + k
        R = [[None] * 4 for _ in range(4)]
        R[0][0] = R[3][3] = _prune(diag)
        R[1][1] = R[2][2] = _prune(z)
        if self.kappa:
            R[1][2] = R[2][1] = k
        return R

    def at(self, value) -> list[list[Fraction]]:
        """Numeric 4x4 matrix at a rational spectral value."""
        val = as_fraction(value)
        return [
            [Fraction(0) if e is None else e({self.var: val}) for e in row]
            for row in self.entries()
        ]


def build_r(kappa=1, var: str = "u", ctx: Context = DEFAULT) -> RMatrix:
    ctx.slot(var)
    return RMatrix(as_fraction(kappa), var, ctx)


def _perm_8(i: int, j: int):
    """Flip of tensor legs i and j (0-based) on C2 x C2 x C2."""
    P = [[None] * 8 for _ in range(8)]
    for col in range(8):
        bits = [(col >> (2 - t)) & 1 for t in range(3)]
        bits[i], bits[j] = bits[j], bits[i]
        row = (bits[0] << 2) | (bits[1] << 1) | bits[2]
        P[row][col] = 1
    return P


def _r_8(z: RationalFunction, kappa: Fraction, i: int, j: int):
    P = _perm_8(i, j)
    k = z.ctx.const(kappa)
    out = [[None] * 8 for _ in range(8)]
    for r in range(8):
        for c in range(8):
            e = None
            if r == c:
                e = z
            if P[r][c]:
                e = k if e is None else e + k
            out[r][c] = _prune(e)
    return out


def ybe_residual(kappa=1, ctx: Context = DEFAULT, vars: Sequence[str] = ("u", "v", "w")):
    """``R12(u-v) R13(u-w) R23(v-w) - R23(v-w) R13(u-w) R12(u-v)`` (8x8)."""
    kappa = as_fraction(kappa)
    u, v, w = (ctx.var(n) for n in vars)
    r12, r13, r23 = _r_8(u - v, kappa, 0, 1), _r_8(u - w, kappa, 0, 2), _r_8(v - w, kappa, 1, 2)
    lhs = _mul_scalar_scalar(_mul_scalar_scalar(r12, r13), r23)
    rhs = _mul_scalar_scalar(_mul_scalar_scalar(r23, r13), r12)
    zero = ctx.zero()
    return [
        [(lhs[i][j] or zero) - (rhs[i][j] or zero) for j in range(8)]
        for i in range(8)
    ]


# ---------------------------------------------------------------------------
# U-operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UOperator:
    """``[[A(u), B(u)], [C(u), D(u)]]`` with operator entries."""

    A: Any
    B: Any
    C: Any
    D: Any
    var: str = "u"

    @property
    def ctx(self) -> Context:
        return self.A.ctx

    @property
    def matrix(self):
        return [[self.A, self.B], [self.C, self.D]]

    def map(self, fn) -> UOperator:
        return UOperator(fn(self.A), fn(self.B), fn(self.C), fn(self.D), self.var)

    def at(self, expr) -> UOperator:
        """Substitute the spectral variable by ``expr`` (result keeps ``var``)."""
        expr = self.ctx.const(0)._coerce(expr)
        return self.map(lambda e: e.subs(self.var, expr))

    def scale(self, s) -> UOperator:
        return self.map(lambda e: e.scale(s))

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in (self.A, self.B, self.C, self.D))

    def __sub__(self, other: UOperator) -> UOperator:
        return UOperator(self.A - other.A, self.B - other.B, self.C - other.C, self.D - other.D, self.var)

    def spectral_denominator(self) -> RationalFunction:
        """Least common multiple of coefficient denominators free of operator variables.

        Multiplying ``U`` by it gives a polynomial in the spectral variable.
        Denominators that involve the lattice variable are left alone.
        """
        lattice = getattr(self.A, "var", None)
        acc = MultiPoly.constant(self.ctx, 1)
        for e in (self.A, self.B, self.C, self.D):
            for den in e.denominators():
                if den.is_one() or (lattice and lattice in den.variable_names()):
                    continue
                g = poly_gcd(acc, den)
                acc = acc * den.divexact(g)
        return RationalFunction.from_poly(acc)

    def cleared(self) -> tuple[UOperator, RationalFunction]:
        p = self.spectral_denominator()
        if p.is_constant():
            return self, p
        return self.scale(p), p


def _kron1(M):
    """``M (x) I``."""
    return [[(M[i // 2][j // 2] if i % 2 == j % 2 else None) for j in range(4)] for i in range(4)]


def _kron2(M):
    """``I (x) M``."""
    return [[(M[i % 2][j % 2] if i // 2 == j // 2 else None) for j in range(4)] for i in range(4)]


def _nonzero_matrix(U: UOperator):
    return [[_prune(e) for e in row] for row in U.matrix]


def reflection_residual(U: UOperator, kappa=1, second_var: str = "v", cleared: bool = True):
    """``R(u-v) U1(u) R(u+v-k) U2(v) - U2(v) R(u+v-k) U1(u) R(u-v)`` (4x4).

    With ``cleared`` (the default) the residual is multiplied by the scalar
    ``p(u) p(v)`` that makes ``p(u) U(u)`` polynomial in ``u``; this does not
    change which entries vanish.
    """
    ctx = U.ctx
    kappa = as_fraction(kappa)
    Up, p = U.cleared()
    u, v = ctx.var(U.var), ctx.var(second_var)
    Uu = _nonzero_matrix(Up)
    Uv = _nonzero_matrix(Up.at(v))
    r = build_r(kappa, U.var, ctx)
    Ruv = r.entries(u - v)
    Rsum = r.entries(u + v - kappa)
    U1, U2 = _kron1(Uu), _kron2(Uv)
    lhs = _mul_scalar_op(Ruv, _mul_op_op(U1, _mul_scalar_op(Rsum, U2)))
    rhs = _mul_op_scalar(_mul_op_op(U2, _mul_scalar_op(Rsum, U1)), Ruv)
    zero = U.A.scale(0)
    out = [[(lhs[i][j] or zero) - (rhs[i][j] or zero) for j in range(4)] for i in range(4)]
    if not cleared and not p.is_constant():
        inv = (p * p.subs(U.var, v)).inverse()
        out = [[e.scale(inv) for e in row] for row in out]
    return out


def quantum_determinant(U: UOperator, form: int = 1):
    """One of the four equivalent expressions for the quantum determinant."""
    ctx = U.ctx
    u = ctx.var(U.var)
    P, M, N = U.at(u + HALF), U.at(-u + HALF), U.at(u - HALF)
    if form == 1:
        return -(M.D * P.D) - N.C * P.B
    if form == 2:
        return -(M.A * P.A) - N.B * P.C
    if form == 3:
        return -(P.D * M.D) - P.C * N.B
    if form == 4:
        return -(P.A * M.A) - P.B * N.C
    raise InvalidInput(f"quantum determinant form must be 1..4, got {form}")


def unitarity_residual(U: UOperator):
    """Residuals of the four sign-flip symmetry relations, in printed order."""
    ctx = U.ctx
    u = ctx.var(U.var)
    M = U.at(-u)
    s = (2 * u + 1).inverse()
    trace = (U.A + U.D).scale(s)
    return (
        -M.A - U.D + trace,
        -M.D - U.A + trace,
        M.B - U.B,
        M.C - U.C,
    )


# ---------------------------------------------------------------------------
# The fifteen commutator relations.  Each is a list of summands of
# LHS - RHS; a summand (coef, word) means coef(u,v) * X(u) Y(v) for word "XY"
# and coef(u,v) * X(v) Y(u) for word "XY~".  Commutators [X,Y] expand to
# "XY" - "YX~".
# ---------------------------------------------------------------------------


_ONE, _MONE = "1", "-1"

COMMUTATOR_RELATIONS: dict[int, tuple[tuple[tuple[str, str], ...], ...]] = {
    1: (
        ((_ONE, "BB"), (_MONE, "BB~")),
        ((_ONE, "CC"), (_MONE, "CC~")),
    ),
    2: (((_ONE, "AA"), (_MONE, "AA~"), ("1/(u+v)", "BC"), ("-1/(u+v)", "BC~")),),
    3: (((_ONE, "DD"), (_MONE, "DD~"), ("1/(u+v)", "CB"), ("-1/(u+v)", "CB~")),),
    4: ((
        (_ONE, "AB"), (_MONE, "BA~"),
        ("1/(u-v)", "AB"), ("-1/(u-v)", "AB~"),
        ("1/(u+v-1)", "AB"), ("1/(u+v-1)", "BD"),
        ("1/((u-v)(u+v-1))", "AB"), ("1/((u-v)(u+v-1))", "BD"),
        ("-1/((u-v)(u+v-1))", "AB~"), ("-1/((u-v)(u+v-1))", "BD~"),
    ),),
    5: ((
        (_ONE, "BA"), (_MONE, "AB~"),
        ("1/(u-v)", "BA"), ("-1/(u-v)", "BA~"),
        ("-1/(u+v-1)", "AB~"), ("-1/(u+v-1)", "BD~"),
    ),),
    6: ((
        (_ONE, "AC"), (_MONE, "CA~"),
        ("1/(u-v)", "CA"), ("-1/(u-v)", "CA~"),
        ("-1/(u+v-1)", "CA~"), ("-1/(u+v-1)", "DC~"),
        ("1/((u-v)(u+v-1))", "CA"), ("1/((u-v)(u+v-1))", "DC"),
        ("-1/((u-v)(u+v-1))", "CA~"), ("-1/((u-v)(u+v-1))", "DC~"),
    ),),
    7: ((
        (_ONE, "CA"), (_MONE, "AC~"),
        ("1/(u-v)", "AC"), ("-1/(u-v)", "AC~"),
        ("1/(u+v-1)", "CA"), ("1/(u+v-1)", "DC"),
    ),),
    8: ((
        (_ONE, "DB"), (_MONE, "BD~"),
        ("1/(u-v)", "BD"), ("-1/(u-v)", "BD~"),
        ("-1/(u+v-1)", "AB~"), ("-1/(u+v-1)", "BD~"),
        ("1/((u-v)(u+v-1))", "AB"), ("1/((u-v)(u+v-1))", "BD"),
        ("-1/((u-v)(u+v-1))", "AB~"), ("-1/((u-v)(u+v-1))", "BD~"),
    ),),
    9: ((
        (_ONE, "BD"), (_MONE, "DB~"),
        ("1/(u-v)", "DB"), ("-1/(u-v)", "DB~"),
        ("1/(u+v-1)", "AB"), ("1/(u+v-1)", "BD"),
    ),),
    10: ((
        (_ONE, "DC"), (_MONE, "CD~"),
        ("1/(u-v)", "DC"), ("-1/(u-v)", "DC~"),
        ("1/(u+v-1)", "CA"), ("1/(u+v-1)", "DC"),
        ("1/((u-v)(u+v-1))", "CA"), ("1/((u-v)(u+v-1))", "DC"),
        ("-1/((u-v)(u+v-1))", "CA~"), ("-1/((u-v)(u+v-1))", "DC~"),
    ),),
    11: ((
        (_ONE, "CD"), (_MONE, "DC~"),
        ("1/(u-v)", "CD"), ("-1/(u-v)", "CD~"),
        ("-1/(u+v-1)", "CA~"), ("-1/(u+v-1)", "DC~"),
    ),),
    12: (((_ONE, "AD"), (_MONE, "DA~"), ("(u+v+1)/((u-v)(u+v))", "CB"), ("-(u+v+1)/((u-v)(u+v))", "CB~")),),
    13: (((_ONE, "DA"), (_MONE, "AD~"), ("(u+v+1)/((u-v)(u+v))", "BC"), ("-(u+v+1)/((u-v)(u+v))", "BC~")),),
    14: ((
        (_ONE, "BC"), (_MONE, "CB~"),
        ("(u+v-1)/((u-v)(u+v))", "DA"), ("-(u+v-1)/((u-v)(u+v))", "DA~"),
        ("1/(u+v)", "AA"), ("-1/(u+v)", "DD~"),
    ),),
    15: ((
        (_ONE, "CB"), (_MONE, "BC~"),
        ("(u+v-1)/((u-v)(u+v))", "AD"), ("-(u+v-1)/((u-v)(u+v))", "AD~"),
        ("1/(u+v)", "DD"), ("-1/(u+v)", "AA~"),
    ),),
}

RELATION_LABELS = {
    1: "[B,B]=[C,C]=0",
    2: "[A,A]",
    3: "[D,D]",
    4: "[A,B]",
    5: "[B,A]",
    6: "[A,C]",
    7: "[C,A]",
    8: "[D,B]",
    9: "[B,D]",
    10: "[D,C]",
    11: "[C,D]",
    12: "[A,D]",
    13: "[D,A]",
    14: "[B,C]",
    15: "[C,B]",
}


def _coef(text: str, u: RationalFunction, v: RationalFunction) -> RationalFunction:
    one = u.ctx.one()
    table = {
        "1": one,
        "-1": -one,
        "1/(u+v)": (u + v).inverse(),
        "-1/(u+v)": -(u + v).inverse(),
        "1/(u-v)": (u - v).inverse(),
        "-1/(u-v)": -(u - v).inverse(),
        "1/(u+v-1)": (u + v - 1).inverse(),
        "-1/(u+v-1)": -(u + v - 1).inverse(),
        "1/((u-v)(u+v-1))": ((u - v) * (u + v - 1)).inverse(),
        "-1/((u-v)(u+v-1))": -((u - v) * (u + v - 1)).inverse(),
        "(u+v+1)/((u-v)(u+v))": (u + v + 1) / ((u - v) * (u + v)),
        "-(u+v+1)/((u-v)(u+v))": -(u + v + 1) / ((u - v) * (u + v)),
        "(u+v-1)/((u-v)(u+v))": (u + v - 1) / ((u - v) * (u + v)),
        "-(u+v-1)/((u-v)(u+v))": -(u + v - 1) / ((u - v) * (u + v)),
    }
    return table[text]


def _clearing_factor(summands, u, v) -> RationalFunction:
    acc = MultiPoly.constant(u.ctx, 1)
    for text, _ in summands:
        den = _coef(text, u, v).den
        g = poly_gcd(acc, den)
        acc = acc * den.divexact(g)
    return RationalFunction.from_poly(acc)


def commutator_residual(U: UOperator, relation_id: int, second_var: str = "v", cleared: bool = True):
    """Residuals of one printed commutator relation (a tuple; id 1 has two).

    ``cleared`` multiplies by the relation's printed denominators and by the
    scalar that makes ``U`` polynomial, giving a polynomial identity in u, v.
    Without clearing the coefficients keep their poles at ``u = v`` etc.
    """
    if relation_id not in COMMUTATOR_RELATIONS:
        raise InvalidInput(f"unknown commutator relation id {relation_id} (expected 1..15)")
    ctx = U.ctx
    u, v = ctx.var(U.var), ctx.var(second_var)
    if cleared:
        Up, _ = U.cleared()
    else:
        Up = U
    at_u = {"A": Up.A, "B": Up.B, "C": Up.C, "D": Up.D}
    Uv = Up.at(v)
    at_v = {"A": Uv.A, "B": Uv.B, "C": Uv.C, "D": Uv.D}
    products: dict[str, Any] = {}

    def product(word: str):
        if word not in products:
            if word.endswith("~"):
                products[word] = at_v[word[0]] * at_u[word[1]]
            else:
                products[word] = at_u[word[0]] * at_v[word[1]]
        return products[word]

    out = []
    for summands in COMMUTATOR_RELATIONS[relation_id]:
        factor = _clearing_factor(summands, u, v) if cleared else ctx.one()
        total = U.A.scale(0)
        for text, word in summands:
            total = total + product(word).scale(_coef(text, u, v) * factor)
        out.append(total)
    return tuple(out)


def commutator_residual_at(U: UOperator, relation_id: int, u_value, v_value):
    """Uncleared residual of one relation at spectral values ``(u, v)``.

    Each printed coefficient is evaluated before summing, so a point on one of
    the printed poles raises :class:`PoleError` even where the sum would have
    a finite limit.
    """
    if relation_id not in COMMUTATOR_RELATIONS:
        raise InvalidInput(f"unknown commutator relation id {relation_id} (expected 1..15)")
    ctx = U.ctx
    uu, vv = as_fraction(u_value), as_fraction(v_value)
    second = "v" if U.var != "v" else "w"
    u, v = ctx.var(U.var), ctx.var(second)
    env = {U.var: uu, second: vv}
    Uu, Uv = U.at(ctx.const(uu)), U.at(ctx.const(vv))
    at_u = {"A": Uu.A, "B": Uu.B, "C": Uu.C, "D": Uu.D}
    at_v = {"A": Uv.A, "B": Uv.B, "C": Uv.C, "D": Uv.D}
    out = []
    for summands in COMMUTATOR_RELATIONS[relation_id]:
        total = U.A.scale(0)
        for text, word in summands:
            try:
                c = rf_evaluate(_coef(text, u, v), env)
            except PoleError:
                raise PoleError(f"relation {relation_id}: coefficient {text} is singular at u={uu}, v={vv}") from None
            X, Y = (at_v[word[0]], at_u[word[1]]) if word.endswith("~") else (at_u[word[0]], at_v[word[1]])
            total = total + (X * Y).scale(c)
        out.append(total)
    return tuple(out)


def qdet_center_residuals(U: UOperator, form: int = 1, second_var: str = "v"):
    """``[Delta(u), X(v)]`` for X in A, B, C, D."""
    delta = quantum_determinant(U, form)
    Uv = U.at(U.ctx.var(second_var))
    return tuple(delta * X - X * delta for X in (Uv.A, Uv.B, Uv.C, Uv.D))
