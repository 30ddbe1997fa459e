"""Difference operators ``sum_k c_k(x) S^k`` in one lattice variable.

``S`` is the unit shift ``(S f)(x) = f(x + 1)``.  Coefficients are
:class:`~reflcheck.scalar.RationalFunction` values and may involve any other
indeterminate of the context (parameters, spectral variables), all of which
commute with ``S``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import ContextMismatch, InvalidInput, PoleError, RangeError
from .scalar import DEFAULT, Context, MultiPoly, RationalFunction, as_fraction, rf_evaluate

__all__ = [
    "DiffOp",
    "FunctionTable",
    "dop_compose",
    "dop_add_scale",
    "dop_equals",
    "dop_apply",
]


class DiffOp:
    __slots__ = ("ctx", "var", "terms")

    def __init__(self, ctx: Context, terms: Mapping[int, RationalFunction] | None = None, var: str = "x"):
        ctx.slot(var)
        self.ctx = ctx
        self.var = var
        self.terms = {k: c for k, c in (terms or {}).items() if not c.is_zero()}

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, ctx: Context = DEFAULT, var: str = "x") -> DiffOp:
        return cls(ctx, {}, var)

    @classmethod
    def scalar(cls, c, ctx: Context = DEFAULT, var: str = "x") -> DiffOp:
        if not isinstance(c, RationalFunction):
            c = ctx.const(c)
        return cls(c.ctx, {0: c}, var)

    @classmethod
    def shift_op(cls, k: int = 1, ctx: Context = DEFAULT, var: str = "x") -> DiffOp:
        return cls(ctx, {k: ctx.one()}, var)

    @classmethod
    def delta_plus(cls, ctx: Context = DEFAULT, var: str = "x") -> DiffOp:
        """Forward difference ``S - 1``."""
        return cls(ctx, {1: ctx.one(), 0: -ctx.one()}, var)

    @classmethod
    def delta_minus(cls, ctx: Context = DEFAULT, var: str = "x") -> DiffOp:
        """Backward difference ``S^-1 - 1``."""
        return cls(ctx, {-1: ctx.one(), 0: -ctx.one()}, var)

    def _like(self, terms: Mapping[int, RationalFunction]) -> DiffOp:
        out = DiffOp.__new__(DiffOp)
        out.ctx, out.var, out.terms = self.ctx, self.var, dict(terms)
        return out

    def _coerce(self, other) -> DiffOp:
        if isinstance(other, DiffOp):
            if other.ctx != self.ctx or other.var != self.var:
                raise ContextMismatch("difference operators over different contexts")
            return other
        if isinstance(other, (int, Fraction, MultiPoly, RationalFunction)):
            c = other if isinstance(other, RationalFunction) else self.ctx.const(0)._coerce(other)
            if c.ctx != self.ctx:
                raise ContextMismatch("scalar from a different context")
            return self._like({0: c} if not c.is_zero() else {})
        raise TypeError(f"cannot combine DiffOp with {type(other).__name__}")

    # -- structure ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return set(self.terms) <= {0}

    def scalar_part(self) -> RationalFunction:
        return self.terms.get(0, self.ctx.zero())

    def coeff(self, k: int) -> RationalFunction:
        return self.terms.get(k, self.ctx.zero())

    def shifts(self) -> tuple[int, int]:
        if not self.terms:
            return (0, 0)
        return min(self.terms), max(self.terms)

    def denominators(self):
        return [c.den for c in self.terms.values()]

    def span(self) -> int:
        lo, hi = self.shifts()
        return hi - lo

    def __eq__(self, other):
        if isinstance(other, DiffOp):
            return dop_equals(self, other)
        try:
            return dop_equals(self, self._coerce(other))
        except TypeError:
            return NotImplemented

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            c = self.terms[k]
            if k == 0:
                parts.append(f"({c})")
            else:
                parts.append(f"({c})*S^{k}")
        return " + ".join(parts)

    # -- arithmetic --------------------------------------------------------
    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out[k] + c if k in out else c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return self._like(out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, s) -> DiffOp:
        """Left multiplication by a scalar function ``s``."""
        if isinstance(s, (int, Fraction)):
            if s == 0:
                return self._like({})
            return self._like({k: c * s for k, c in self.terms.items()})
        s = self.ctx.const(0)._coerce(s)
        if s.is_zero():
            return self._like({})
        return self._like({k: s * c for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return dop_compose(self, other)
        if isinstance(other, (int, Fraction, MultiPoly, RationalFunction)):
            # Right multiplication by a function still shifts it.
            return dop_compose(self, self._coerce(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly, RationalFunction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        out = DiffOp.scalar(1, self.ctx, self.var)
        for _ in range(n):
            out = out * self
        return out

    def commutator(self, other) -> DiffOp:
        other = self._coerce(other)
        return self * other - other * self

    def anticommutator(self, other) -> DiffOp:
        other = self._coerce(other)
        return self * other + other * self

    # -- coefficient maps --------------------------------------------------
    def map_coeffs(self, fn: Callable[[RationalFunction], RationalFunction]) -> DiffOp:
        return self._like({k: fn(c) for k, c in self.terms.items()}).prune()

    def prune(self) -> DiffOp:
        return self._like({k: c for k, c in self.terms.items() if not c.is_zero()})

    def subs(self, name: str, expr) -> DiffOp:
        """Substitute in every coefficient; the lattice variable is not allowed."""
        if name == self.var:
            raise InvalidInput("substituting the lattice variable breaks the shift structure")
        return self.map_coeffs(lambda c: c.subs(name, expr))

    def subs_values(self, assignment: Mapping[str, object]) -> DiffOp:
        if self.var in assignment:
            raise InvalidInput("use dop_apply to evaluate at a lattice point")
        return self.map_coeffs(lambda c: c.subs_values(assignment))

    def shift_variable(self, k) -> DiffOp:
        """Conjugate by the translation ``x -> x + k`` (coefficients shifted)."""
        return self.map_coeffs(lambda c: c.shift(self.var, k))

    def gauge(self, g: RationalFunction) -> DiffOp:
        """Return ``g(x) * D * g(x)^{-1}``."""
        return dop_compose(dop_compose(DiffOp.scalar(g, self.ctx, self.var), self), DiffOp.scalar(g.inverse(), self.ctx, self.var))

    def to_json(self) -> list:
        return [{"shift": k, "coeff": c.to_json()} for k, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, data: Sequence[Mapping], ctx: Context = DEFAULT, var: str = "x") -> DiffOp:
        return cls(ctx, {int(t["shift"]): RationalFunction.from_json(t["coeff"], ctx) for t in data}, var)


def dop_compose(d1: DiffOp, d2: DiffOp) -> DiffOp:
    """Normal form of ``d1 o d2`` via ``(p S^k)(q S^m) = p q(x+k) S^(k+m)``."""
    d2 = d1._coerce(d2)
    out: dict[int, RationalFunction] = {}
    shifted: dict[tuple[int, int], RationalFunction] = {}
    for k, p in d1.terms.items():
        for m, q in d2.terms.items():
            key = (k, m)
            qk = shifted.get(key)
            if qk is None:
                qk = q.shift(d1.var, k)
                shifted[key] = qk
            t = p * qk
            j = k + m
            out[j] = out[j] + t if j in out else t
    return d1._like({k: c for k, c in out.items() if not c.is_zero()})


def dop_add_scale(d1: DiffOp, d2: DiffOp, s) -> DiffOp:
    """Normal form of ``d1 + s * d2``."""
    return d1 + d1._coerce(d2).scale(s)


def dop_equals(d1: DiffOp, d2: DiffOp) -> bool:
    if d1.ctx != d2.ctx or d1.var != d2.var:
        raise ContextMismatch("difference operators over different contexts")
    return d1.terms == d2.terms


@dataclass(frozen=True)
class FunctionTable:
    """Samples ``F(x0 + m)`` for ``m = 0..len(values)-1``."""

    x0: Fraction
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "x0", as_fraction(self.x0))
        object.__setattr__(self, "values", tuple(self.values))

    @classmethod
    def tabulate(cls, fn: Callable[[Fraction], object], x0, count: int) -> FunctionTable:
        x0 = as_fraction(x0)
        return cls(x0, tuple(fn(x0 + m) for m in range(count)))

    def points(self) -> list[Fraction]:
        return [self.x0 + m for m in range(len(self.values))]

    def __getitem__(self, x):
        off = as_fraction(x) - self.x0
        if off.denominator != 1 or not 0 <= off < len(self.values):
            raise RangeError(f"x={x} outside table starting at {self.x0} of length {len(self.values)}")
        return self.values[int(off)]

    def __contains__(self, x) -> bool:
        off = as_fraction(x) - self.x0
        return off.denominator == 1 and 0 <= off < len(self.values)


def dop_apply(d: DiffOp, f: FunctionTable, x, assignment: Mapping[str, object] | None = None):
    """``sum_k c_k(x) f(x + k)`` at a lattice point.

    ``assignment`` supplies values for any indeterminate other than the lattice
    variable that still occurs in a coefficient.
    """
    x = as_fraction(x)
    env = dict(assignment or {})
    env[d.var] = x
    total = 0
    for k in sorted(d.terms):
        sample = f[x + k]
        try:
            c = rf_evaluate(d.terms[k], env)
        except PoleError:
            raise PoleError(f"coefficient of S^{k} has a pole at {d.var}={x}") from None
        total = total + c * sample
    return total
