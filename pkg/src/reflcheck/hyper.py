"""Terminating and convergent 3F2(1), its contiguity relations and ladders.

``F(a, b, c; d, e) = sum_n (a)_n (b)_n (c)_n / ((d)_n (e)_n n!)``.

Exact mode sums a terminating series in :class:`fractions.Fraction`.
Approximate mode sums a convergent series with mpmath and reports a tail
bound alongside the value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable

import mpmath

from .diffop import DiffOp, FunctionTable, dop_apply
from .errors import ConvergenceError, InvalidInput, InvalidParameters, PoleError, RangeError, SingularSubstitution
from .scalar import DEFAULT, Context, as_fraction

__all__ = [
    "pochhammer",
    "HypPoint",
    "ApproxValue",
    "eval_3f2",
    "RELATIONS",
    "relation_ids",
    "relation_label",
    "contiguous_residual",
    "LADDERS",
    "LadderFamily",
    "ladder_bracket",
    "ladder_coefficient",
    "ladder_residual",
    "annihilation_operator",
    "annihilation_residual",
    "HahnParams",
    "hahn_eval",
    "hahn_weight",
    "hahn_residuals",
]

HALF = Fraction(1, 2)
NAMES = ("a", "b", "c", "d", "e")


def pochhammer(alpha, n: int):
    if n < 0:
        raise InvalidInput("Pochhammer index must be non-negative")
    out = Fraction(1) if isinstance(alpha, (int, Fraction)) else mpmath.mpf(1)
    for k in range(n):
        out *= alpha + k
    return out


def _nonpos_int(q: Fraction) -> bool:
    return q.denominator == 1 and q <= 0


@dataclass(frozen=True)
class HypPoint:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction
    mode: str = "exact"
    digits: int = 40

    def __post_init__(self):
        for n in NAMES:
            object.__setattr__(self, n, as_fraction(getattr(self, n)))
        if self.mode not in ("exact", "approx"):
            raise InvalidInput(f"mode must be 'exact' or 'approx', got {self.mode!r}")
        if self.digits < 1:
            raise InvalidInput("digits must be positive")

    @classmethod
    def of(cls, params: Iterable, mode: str = "exact", digits: int = 40) -> HypPoint:
        a, b, c, d, e = params
        return cls(a, b, c, d, e, mode, digits)

    @property
    def params(self) -> tuple[Fraction, ...]:
        return (self.a, self.b, self.c, self.d, self.e)

    def bump(self, **steps) -> HypPoint:
        return replace(self, **{k: getattr(self, k) + v for k, v in steps.items()})

    def termination_index(self) -> int | None:
        """Smallest ``N`` with a vanishing numerator factor at step ``N``."""
        ks = [-int(q) for q in (self.a, self.b, self.c) if _nonpos_int(q)]
        return min(ks) if ks else None

    def excess(self) -> Fraction:
        """``d + e - a - b - c``; the series at 1 converges when it exceeds 0."""
        return self.d + self.e - self.a - self.b - self.c


@dataclass(frozen=True)
class ApproxValue:
    value: mpmath.mpf
    error_bound: mpmath.mpf
    terms: int


def _check_denominators(p: HypPoint, upto: int) -> None:
    for q, name in ((p.d, "d"), (p.e, "e")):
        if _nonpos_int(q) and -q < upto:
            raise InvalidParameters(f"(({name}))_k vanishes at k={-q + 1} before the series terminates")


def _exact(p: HypPoint) -> Fraction:
    N = p.termination_index()
    if N is None:
        raise InvalidParameters(f"{p.params} does not terminate; use approximate mode")
    _check_denominators(p, N)
    a, b, c, d, e = p.params
    total = term = Fraction(1)
    for n in range(N):
        term = term * (a + n) * (b + n) * (c + n) / ((d + n) * (e + n) * (n + 1))
        total += term
    return total


MIN_EXCESS = Fraction(105, 100)


def _approx(p: HypPoint, max_terms: int = 200_000) -> ApproxValue:
    if p.termination_index() is not None:
        exact = _exact(p)
        with mpmath.workdps(p.digits + 15):
            return ApproxValue(mpmath.mpf(exact.numerator) / exact.denominator, mpmath.mpf(0), p.termination_index() + 1)
    s = p.excess()
    if s < MIN_EXCESS:
        raise ConvergenceError(f"d+e-a-b-c = {s} < {MIN_EXCESS}; series at 1 diverges or converges too slowly")
    _check_denominators(p, max_terms)
    with mpmath.workdps(p.digits + 15):
        a, b, c, d, e = (mpmath.mpf(q.numerator) / q.denominator for q in p.params)
        sm = mpmath.mpf(s.numerator) / s.denominator
        target = mpmath.mpf(10) ** (-p.digits)
        small = mpmath.mpf(10) ** (-p.digits - 10)
        total = term = mpmath.mpf(1)
        n = 0
        while n < max_terms:
            term = term * (a + n) * (b + n) * (c + n) / ((d + n) * (e + n) * (n + 1))
            n += 1
            total += term
            if n > 50 and abs(term) < small * abs(total) and n > 2 * (abs(a) + abs(b) + abs(c)):
                # Terms decay like n^-(s+1): bound the tail by an integral,
                # with a factor 2 for the prefactor still drifting.
                tail = 2 * abs(term) * n / sm
                if tail < target:
                    return ApproxValue(+total, tail, n + 1)
        raise ConvergenceError(f"tail bound not below 1e-{p.digits} after {max_terms} terms")


def eval_3f2(p: HypPoint):
    """Exact rational (exact mode) or :class:`ApproxValue` (approx mode)."""
    if p.mode == "exact":
        return _exact(p)
    return _approx(p)


def _value(p: HypPoint):
    v = eval_3f2(p)
    return v if p.mode == "exact" else v.value


# ---------------------------------------------------------------------------
# Contiguity relations
# ---------------------------------------------------------------------------


class _Eval:
    """Memoized F at bumped parameters, with forward and backward differences."""

    def __init__(self, p: HypPoint):
        self.p = p
        self.P = dict(zip(NAMES, p.params))
        self.memo: dict = {}

    def F(self, name: str | None = None, step: int = 0):
        key = (name, step) if step else None
        if key not in self.memo:
            self.memo[key] = _value(self.p.bump(**{name: step}) if step else self.p)
        return self.memo[key]

    def up(self, name: str):
        return self.F(name, 1) - self.F()

    def down(self, name: str):
        return self.F(name, -1) - self.F()


_CYCLIC = (("a", "b", "c"), ("b", "c", "a"), ("c", "a", "b"))


def _T(P, de):
    return (P["a"] - P[de]) * (P["b"] - P[de]) * (P["c"] - P[de]) / P[de]


def _abc(P):
    return P["a"] * P["b"] * P["c"]


def _s(P):
    return P["a"] + P["b"] + P["c"] + 1 - P["d"] - P["e"]


def _build_relations() -> list[tuple[str, Callable[[_Eval], object]]]:
    R: list = []
    for al, be in (("a", "b"), ("a", "c"), ("b", "c")):
        R.append((f"{al} D{al}+ F = {be} D{be}+ F", lambda E, al=al, be=be: E.P[al] * E.up(al) - E.P[be] * E.up(be)))
    for al in "abc":
        for de in "de":
            R.append((
                f"{al} D{al}+ F = ({de}-1) D{de}- F",
                lambda E, al=al, de=de: E.P[al] * E.up(al) - (E.P[de] - 1) * E.down(de),
            ))
    R.append(("(d-1) Dd- F = (e-1) De- F", lambda E: (E.P["d"] - 1) * E.down("d") - (E.P["e"] - 1) * E.down("e")))
    for al, be, ga in _CYCLIC:
        def rel(E, al=al, be=be, ga=ga):
            P = E.P
            lhs = (P[al] - P["d"]) * (P[al] - P["e"]) * E.down(al) - P[al] * P[ga] * E.F()
            rhs = (P[be] - P["d"]) * (P[be] - P["e"]) * E.down(be) - P[be] * P[ga] * E.F()
            return lhs - rhs
        R.append((f"({al}-d)({al}-e) D{al}- F - {al}{ga} F = ({be}-d)({be}-e) D{be}- F - {be}{ga} F", rel))
    for al, be, ga in _CYCLIC:
        for de, ep in (("d", "e"), ("e", "d")):
            def rel(E, al=al, be=be, ga=ga, de=de, ep=ep):
                P = E.P
                rhs = (P[be] - P[de]) * (P[ga] - P[de]) / P[de] * E.up(de) + P[be] * P[ga] / P[de] * E.F()
                return (P[al] - P[ep]) * E.down(al) - rhs
            R.append((f"({al}-{ep}) D{al}- F = ({be}-{de})({ga}-{de})/{de} D{de}+ F + {be}{ga}/{de} F", rel))
    R.append((
        "T(d) Dd+ F + abc/d F = T(e) De+ F + abc/e F",
        lambda E: _T(E.P, "d") * E.up("d") + _abc(E.P) / E.P["d"] * E.F()
        - (_T(E.P, "e") * E.up("e") + _abc(E.P) / E.P["e"] * E.F()),
    ))
    for al, be, ga in itertools.permutations("abc"):
        R.append((
            f"({al}-d)({al}-e) D{al}- F + {be} s D{be}+ F + {be}{ga} F = 0",
            lambda E, al=al, be=be, ga=ga: (E.P[al] - E.P["d"]) * (E.P[al] - E.P["e"]) * E.down(al)
            + E.P[be] * _s(E.P) * E.up(be) + E.P[be] * E.P[ga] * E.F(),
        ))
    for al, be, ga in _CYCLIC:
        for de in "de":
            R.append((
                f"({al}-d)({al}-e) D{al}- F + ({de}-1) s D{de}- F + {be}{ga} F = 0",
                lambda E, al=al, be=be, ga=ga, de=de: (E.P[al] - E.P["d"]) * (E.P[al] - E.P["e"]) * E.down(al)
                + (E.P[de] - 1) * _s(E.P) * E.down(de) + E.P[be] * E.P[ga] * E.F(),
            ))
    for al in "abc":
        for de in "de":
            R.append((
                f"T({de}) D{de}+ F + abc/{de} F + {al} s D{al}+ F = 0",
                lambda E, al=al, de=de: _T(E.P, de) * E.up(de) + _abc(E.P) / E.P[de] * E.F()
                + E.P[al] * _s(E.P) * E.up(al),
            ))
    for de, ep in (("d", "e"), ("e", "d")):
        R.append((
            f"T({de}) D{de}+ F + abc/{de} F + ({ep}-1) s D{ep}- F = 0",
            lambda E, de=de, ep=ep: _T(E.P, de) * E.up(de) + _abc(E.P) / E.P[de] * E.F()
            + (E.P[ep] - 1) * _s(E.P) * E.down(ep),
        ))
    for al, be, ga in _CYCLIC:
        R.append((
            f"({al}-d)({al}-e) D{al}- F + {al} s D{al}+ F + {be}{ga} F = 0",
            lambda E, al=al, be=be, ga=ga: (E.P[al] - E.P["d"]) * (E.P[al] - E.P["e"]) * E.down(al)
            + E.P[al] * _s(E.P) * E.up(al) + E.P[be] * E.P[ga] * E.F(),
        ))
    for de in "de":
        R.append((
            f"T({de}) D{de}+ F + abc/{de} F + ({de}-1) s D{de}- F = 0",
            lambda E, de=de: _T(E.P, de) * E.up(de) + _abc(E.P) / E.P[de] * E.F()
            + (E.P[de] - 1) * _s(E.P) * E.down(de),
        ))
    return R


#: Relation ``i`` (1-based) is ``RELATIONS[i - 1]`` as ``(label, residual)``.
#: Labels use ``s = a+b+c+1-d-e`` and ``T(t) = (a-t)(b-t)(c-t)/t``.
RELATIONS = tuple(_build_relations())
assert len(RELATIONS) == 45


def relation_ids() -> range:
    return range(1, len(RELATIONS) + 1)


def relation_label(rel_id: int) -> str:
    _check_id(rel_id)
    return RELATIONS[rel_id - 1][0]


def _check_id(rel_id: int) -> None:
    if not isinstance(rel_id, int) or not 1 <= rel_id <= len(RELATIONS):
        raise InvalidInput(f"relation id must be in 1..{len(RELATIONS)}, got {rel_id!r}")


def contiguous_residual(rel_id: int, p: HypPoint):
    """LHS - RHS of relation ``rel_id`` at ``p`` (exact or mpf)."""
    _check_id(rel_id)
    E = _Eval(p)
    try:
        return RELATIONS[rel_id - 1][1](E)
    except ZeroDivisionError:
        raise InvalidParameters(f"relation {rel_id} has a vanishing coefficient denominator at {p.params}") from None


# ---------------------------------------------------------------------------
# Ladders in the third parameter
# ---------------------------------------------------------------------------

#: Ladder ids: direction of the u shift and the difference used in c.
LADDERS = {
    "down-minus": (-1, "minus"),
    "up-minus": (1, "minus"),
    "down-plus": (-1, "plus"),
    "up-plus": (1, "plus"),
}


def _ladder_key(which) -> str:
    aliases = {1: "down-minus", 2: "up-minus", 3: "down-plus", 4: "up-plus"}
    if isinstance(which, str) and which.isdigit():
        which = int(which)
    key = aliases.get(which, which)
    if key not in LADDERS:
        raise InvalidInput(f"unknown ladder {which!r}; expected one of {sorted(LADDERS)} or 1..4")
    return key


def ladder_delta(which: str, a, d, e):
    """The constant in the ``delta/(u -+ 1/2)`` term of each bracket, as printed."""
    if LADDERS[_ladder_key(which)][1] == "minus":
        return HALF * (a - HALF) * ((a + HALF) * (a + HALF - d - e) + d * e)
    return Fraction(1, 16) * (2 * a - 1) * (2 * a + 1 - 2 * e) * (2 * a + 1 - 2 * d)


def ladder_bracket(which, a, d, e, ctx: Context = DEFAULT, spectral: str = "u", lattice: str = "x") -> DiffOp:
    """The first-order operator in ``x`` (the third parameter) as printed."""
    key = _ladder_key(which)
    a, d, e = (ctx.const(0)._coerce(v) for v in (a, d, e))
    u, x = ctx.var(spectral), ctx.var(lattice)
    dl = ladder_delta(key, a, d, e)
    one = DiffOp.scalar(1, ctx, lattice)
    dm = DiffOp.delta_minus(ctx, lattice)
    dp = DiffOp.delta_plus(ctx, lattice)
    ab = (x - d) * (x - e)
    cc = x * (x + 2 * a - d - e + 1)
    if key == "down-minus":
        w = u - HALF
        s = HALF * w**2 + (-x + Fraction(1, 4) + (d + e - a) / 2) * w - HALF * (a + HALF) ** 2 + HALF * (-d * e + d + e) + x * (a - HALF)
        return one.scale(s + dl / w) - dm.scale(ab)
    if key == "up-minus":
        w = u + HALF
        s = -HALF * w**2 + (-x + Fraction(1, 4) + (d + e - a) / 2) * w + HALF * (a + HALF) ** 2 - HALF * (-d * e + d + e) - x * (a - HALF)
        return one.scale(s + dl / w) + dm.scale(ab)
    if key == "down-plus":
        w = u - HALF
        s = -HALF * w**2 + (-x - Fraction(3, 4) + (d + e - a) / 2) * w + HALF * (a - HALF) ** 2 - HALF * (d * e - d - e + 1) + x * (a - HALF)
        return one.scale(s + dl / w) + dp.scale(cc)
    w = u + HALF
    s = HALF * w**2 + (-x - Fraction(3, 4) + (d + e - a) / 2) * w - HALF * (a - HALF) ** 2 + HALF * (d * e - d - e + 1) - x * (a - HALF)
    return one.scale(s + dl / w) - dp.scale(cc)


def ladder_coefficient(which, a, d, e, ctx: Context = DEFAULT, spectral: str = "u"):
    """Right-hand coefficient multiplying ``F(u -+ 1)``."""
    key = _ladder_key(which)
    a, d, e = (ctx.const(0)._coerce(v) for v in (a, d, e))
    u = ctx.var(spectral)
    if LADDERS[key][0] < 0:
        return (a - u) * (a - d + u) * (a - e + u) / (2 * u - 1)
    return (a + u) * (a - d - u) * (a - e - u) / (2 * u + 1)


@dataclass(frozen=True)
class LadderFamily:
    """``F(u)(x) = 3F2(a + u, a - u, x; d, e; 1)`` on an integer x-window.

    ``u`` ranges over ``u0 + m`` for ``0 <= m < count``; with ``u0 = a`` every
    member terminates.
    """

    a: Fraction
    d: Fraction
    e: Fraction
    x_lo: int = -3
    x_hi: int = 3
    u0: Fraction | None = None
    count: int = 6
    _tables: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for n in ("a", "d", "e"):
            object.__setattr__(self, n, as_fraction(getattr(self, n)))
        object.__setattr__(self, "u0", self.a if self.u0 is None else as_fraction(self.u0))
        if self.x_lo > self.x_hi:
            raise InvalidInput("empty x window")

    def domain(self) -> list[Fraction]:
        return [self.u0 + m for m in range(self.count)]

    def in_domain(self, u) -> bool:
        off = as_fraction(u) - self.u0
        return off.denominator == 1 and 0 <= off < self.count

    def grid(self) -> range:
        return range(self.x_lo, self.x_hi + 1)

    def value(self, u, x) -> Fraction:
        u = as_fraction(u)
        return eval_3f2(HypPoint(self.a + u, self.a - u, x, self.d, self.e))

    def table(self, u) -> FunctionTable:
        u = as_fraction(u)
        if u not in self._tables:
            self._tables[u] = FunctionTable.tabulate(lambda x: self.value(u, x), self.x_lo, self.x_hi - self.x_lo + 1)
        return self._tables[u]

    def _check_x(self, x, lo: int, hi: int) -> Fraction:
        x = as_fraction(x)
        if x.denominator != 1 or x + lo < self.x_lo or x + hi > self.x_hi:
            raise RangeError(f"x={x} with stencil [{lo}, {hi}] leaves the grid [{self.x_lo}, {self.x_hi}]")
        return x


def ladder_residual(which, fam: LadderFamily, u, x, ctx: Context = DEFAULT):
    """Bracket applied to ``F(u)`` at ``x`` minus coefficient times ``F(u -+ 1)``."""
    key = _ladder_key(which)
    step, kind = LADDERS[key]
    u = as_fraction(u)
    x = fam._check_x(x, -1 if kind == "minus" else 0, 1 if kind == "plus" else 0)
    if not fam.in_domain(u):
        raise RangeError(f"u={u} outside the family domain {fam.domain()}")
    try:
        bracket = ladder_bracket(key, fam.a, fam.d, fam.e, ctx).subs_values({"u": u})
    except SingularSubstitution:
        raise PoleError(f"bracket coefficient has a pole at u={u}") from None
    lhs = dop_apply(bracket, fam.table(u), x)
    coeff = ladder_coefficient(key, fam.a, fam.d, fam.e, ctx)({"u": u})
    if coeff == 0:
        return lhs
    target = u + step
    if not fam.in_domain(target):
        raise RangeError(f"u{'+' if step > 0 else '-'}1 = {target} outside the family domain")
    return lhs - coeff * fam.table(target)[x]


def annihilation_operator(fam: LadderFamily, u, ctx: Context = DEFAULT, c0: DiffOp | None = None) -> DiffOp:
    """``u^2 + C0`` with the realization's ``C0`` in the lattice variable."""
    if c0 is None:
        from .rank1 import RealizationParams, realization_build

        c0 = realization_build(RealizationParams(fam.a, fam.d, fam.e, "a"), ctx).data.C0
    return c0 + as_fraction(u) ** 2


def annihilation_residual(fam: LadderFamily, u, x, ctx: Context = DEFAULT, c0: DiffOp | None = None):
    x = fam._check_x(x, -1, 1)
    if not fam.in_domain(u):
        raise RangeError(f"u={u} outside the family domain")
    return dop_apply(annihilation_operator(fam, u, ctx, c0), fam.table(u), x)


# ---------------------------------------------------------------------------
# Hahn polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HahnParams:
    n: int
    alpha: Fraction
    beta: Fraction
    N: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        object.__setattr__(self, "beta", as_fraction(self.beta))
        if not (isinstance(self.N, int) and self.N >= 1):
            raise InvalidParameters("N must be a positive integer")
        if not (isinstance(self.n, int) and 0 <= self.n <= self.N):
            raise InvalidParameters(f"degree n={self.n} must lie in [0, N={self.N}]")
        if _nonpos_int(self.alpha + 1):
            raise InvalidParameters("alpha + 1 must not be a non-positive integer")

    def with_degree(self, n: int) -> HahnParams:
        return replace(self, n=n)

    def family_parameters(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """``(a, u, d, e)`` with the third parameter ``c = -x``."""
        a = (self.alpha + self.beta + 1) / 2
        return a, self.n + a, self.alpha + 1, Fraction(-self.N)

    def family(self, pad: int = 1) -> LadderFamily:
        a, u, d, e = self.family_parameters()
        return LadderFamily(a, d, e, -self.N - pad, pad, u0=a, count=self.N + 1)


def hahn_eval(h: HahnParams, x: int) -> Fraction:
    if not 0 <= x <= h.N:
        raise RangeError(f"x={x} outside [0, {h.N}]")
    return eval_3f2(HypPoint(-h.n, h.n + h.alpha + h.beta + 1, -x, h.alpha + 1, -h.N))


def hahn_weight(h: HahnParams, x: int) -> Fraction:
    from math import factorial

    return pochhammer(h.alpha + 1, x) / factorial(x) * pochhammer(h.beta + 1, h.N - x) / factorial(h.N - x)


def hahn_residuals(h: HahnParams, check: str, m: int | None = None, ctx: Context = DEFAULT) -> tuple:
    """Residuals over ``x = 0..N`` (or over degrees ``m != n`` for orthogonality)."""
    if check == "orthogonality":
        others = [m] if m is not None else [k for k in range(h.N + 1) if k != h.n]
        out = []
        for k in others:
            hk = h.with_degree(k)
            if k == h.n:
                raise InvalidInput("orthogonality needs two distinct degrees")
            out.append(sum(hahn_weight(h, x) * hahn_eval(h, x) * hahn_eval(hk, x) for x in range(h.N + 1)))
        return tuple(out)
    fam = h.family()
    _, u, _, _ = h.family_parameters()
    if check == "difference-eq":
        return tuple(annihilation_residual(fam, u, -x, ctx) for x in range(h.N + 1))
    if check == "ladder":
        out = []
        for key in LADDERS:
            for x in range(h.N + 1):
                out.append(ladder_residual(key, fam, u, -x, ctx))
        return tuple(out)
    raise InvalidInput(f"unknown Hahn check {check!r}; expected difference-eq, ladder or orthogonality")
