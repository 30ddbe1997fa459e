"""Exact multivariate polynomials and rational functions over Q.

Every value lives in a :class:`Context`, a fixed ordered tuple of commuting
indeterminates.  Polynomials are sparse maps from exponent vectors to
:class:`fractions.Fraction`; rational functions are kept in a canonical
reduced form so that equality of functions is equality of representations.

>>> ctx = Context(("x", "u"))
>>> x = ctx.var("x")
>>> (x**2 - 1) / (x - 1)
x + 1
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping

from .errors import ContextMismatch, InvalidInput, PoleError, SingularSubstitution

__all__ = [
    "Context",
    "MultiPoly",
    "RationalFunction",
    "DEFAULT",
    "as_fraction",
    "format_rational",
    "parse_rational",
    "poly_gcd",
    "rf_normalize",
    "rf_substitute",
    "rf_evaluate",
]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise InvalidInput(f"not an exact rational: {value!r}")


def format_rational(q: Fraction) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    q = as_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"bad rational literal {text!r}") from exc


class Context:
    """An ordered, immutable set of indeterminate names."""

    __slots__ = ("names", "index", "_zero_exp")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise InvalidInput(f"duplicate indeterminates in {names}")
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}
        self._zero_exp = (0,) * len(names)

    def __eq__(self, other):
        return isinstance(other, Context) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Context({self.names!r})"

    def __reduce__(self):
        return (Context, (self.names,))

    def slot(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise InvalidInput(f"unknown indeterminate {name!r} for {self!r}") from None

    def poly(self, value) -> MultiPoly:
        return MultiPoly.constant(self, value)

    def poly_var(self, name: str) -> MultiPoly:
        exp = [0] * len(self.names)
        exp[self.slot(name)] = 1
        return MultiPoly(self, {tuple(exp): Fraction(1)})

    def var(self, name: str) -> RationalFunction:
        return RationalFunction.from_poly(self.poly_var(name))

    def vars(self, *names: str):
        return tuple(self.var(n) for n in names)

    def const(self, value) -> RationalFunction:
        return RationalFunction.from_poly(self.poly(value))

    def zero(self) -> RationalFunction:
        return self.const(0)

    def one(self) -> RationalFunction:
        return self.const(1)


#: parameters a, d, e; rank-1 constants; lattice variable x; spectral u, v, w.
DEFAULT = Context(("a", "d", "e", "alpha", "beta", "gamma", "delta", "x", "u", "v", "w"))


def _check_ctx(p, q):
    if p.ctx is not q.ctx and p.ctx != q.ctx:
        raise ContextMismatch(f"{p.ctx!r} vs {q.ctx!r}")


class MultiPoly:
    """Sparse polynomial with Fraction coefficients; treat as immutable."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: Context, terms: Mapping[tuple, Fraction]):
        # Callers guarantee no zero coefficients and correct exponent arity.
        self.ctx = ctx
        self.terms = terms
        self._hash = None

    # -- construction ----------------------------------------------------
    @classmethod
    def constant(cls, ctx: Context, value) -> MultiPoly:
        value = as_fraction(value)
        if value == 0:
            return cls(ctx, {})
        return cls(ctx, {ctx._zero_exp: value})

    @classmethod
    def from_terms(cls, ctx: Context, terms: Iterable[tuple[tuple, object]]) -> MultiPoly:
        n = len(ctx.names)
        acc: dict[tuple, Fraction] = {}
        for exp, c in terms:
            exp = tuple(int(e) for e in exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise InvalidInput(f"bad exponent vector {exp}")
            acc[exp] = acc.get(exp, 0) + as_fraction(c)
        return cls(ctx, {e: c for e, c in acc.items() if c != 0})

    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            _check_ctx(self, other)
            return other
        return MultiPoly.constant(self.ctx, other)

    # -- predicates ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ctx._zero_exp in self.terms)

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get(self.ctx._zero_exp) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise InvalidInput(f"{self} is not constant")
        return self.terms.get(self.ctx._zero_exp, Fraction(0))

    def variables(self) -> frozenset[int]:
        used = set()
        for exp in self.terms:
            for i, e in enumerate(exp):
                if e:
                    used.add(i)
        return frozenset(used)

    def variable_names(self) -> frozenset[str]:
        return frozenset(self.ctx.names[i] for i in self.variables())

    def degree(self, var: str | int) -> int:
        i = var if isinstance(var, int) else self.ctx.slot(var)
        return max((e[i] for e in self.terms), default=-1)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def lead(self) -> tuple[tuple, Fraction]:
        """Leading term in lexicographic order of the context's variables."""
        e = max(self.terms)
        return e, self.terms[e]

    # -- arithmetic ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == MultiPoly.constant(self.ctx, other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.terms.items())))
        return self._hash

    def __neg__(self):
        return MultiPoly(self.ctx, {e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        other = self._coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s += c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return MultiPoly(self.ctx, out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> MultiPoly:
        c = as_fraction(c)
        if c == 0:
            return MultiPoly(self.ctx, {})
        if c == 1:
            return self
        return MultiPoly(self.ctx, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if isinstance(other, (int, Fraction)):
                return self.scale(other)
            return NotImplemented
        _check_ctx(self, other)
        a, b = self.terms, other.terms
        if not a or not b:
            return MultiPoly(self.ctx, {})
        if len(a) > len(b):
            a, b = b, a
        out: dict[tuple, Fraction] = {}
        get = out.get
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = get(e, 0) + ca * cb
        return MultiPoly(self.ctx, {e: c for e, c in out.items() if c})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise InvalidInput("negative power of a polynomial")
        result = MultiPoly.constant(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- structure -------------------------------------------------------
    def split(self, slots: Iterable[int]) -> dict[tuple, MultiPoly]:
        """Group by the exponents in ``slots``; coefficients omit those variables."""
        slots = tuple(slots)
        groups: dict[tuple, dict] = {}
        for exp, c in self.terms.items():
            key = tuple(exp[i] for i in slots)
            rest = list(exp)
            for i in slots:
                rest[i] = 0
            groups.setdefault(key, {})[tuple(rest)] = c
        return {k: MultiPoly(self.ctx, t) for k, t in groups.items()}

    def coeff(self, var: str, k: int) -> MultiPoly:
        """Coefficient of ``var**k`` as a polynomial in the other variables."""
        i = self.ctx.slot(var)
        return self.split((i,)).get((k,), MultiPoly(self.ctx, {}))

    def rational_content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        from math import gcd

        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    def monic(self) -> MultiPoly:
        if not self.terms:
            return self
        return self.scale(1 / self.lead()[1])

    # -- substitution / evaluation --------------------------------------
    def shift(self, var: str | int, k) -> MultiPoly:
        """Return self with ``var -> var + k`` for a rational constant k."""
        k = as_fraction(k)
        i = var if isinstance(var, int) else self.ctx.slot(var)
        if k == 0 or not self.terms:
            return self
        out: dict[tuple, Fraction] = {}
        for exp, c in self.terms.items():
            n = exp[i]
            if n == 0:
                out[exp] = out.get(exp, 0) + c
                continue
            base = list(exp)
            for j, bc in enumerate(_binomials(n)):
                base[i] = j
                e = tuple(base)
                out[e] = out.get(e, 0) + c * bc * k ** (n - j)
        return MultiPoly(self.ctx, {e: c for e, c in out.items() if c})

    def subs_poly(self, var: str, expr: MultiPoly) -> MultiPoly:
        """Substitute a polynomial for ``var``."""
        _check_ctx(self, expr)
        i = self.ctx.slot(var)
        groups = self.split((i,))
        result = MultiPoly(self.ctx, {})
        powers = {0: MultiPoly.constant(self.ctx, 1)}
        for (n,) in sorted(groups):
            if n not in powers:
                m = max(powers)
                p = powers[m]
                while m < n:
                    p = p * expr
                    m += 1
                    powers[m] = p
            result = result + groups[(n,)] * powers[n]
        return result

    def evaluate(self, values: Mapping[int, Fraction]) -> MultiPoly:
        """Partially evaluate the slots in ``values`` (slot index -> Fraction)."""
        out: dict[tuple, Fraction] = {}
        for exp, c in self.terms.items():
            e = list(exp)
            for i, val in values.items():
                if e[i]:
                    c = c * val ** e[i]
                    e[i] = 0
            if c:
                t = tuple(e)
                out[t] = out.get(t, 0) + c
        return MultiPoly(self.ctx, {e: c for e, c in out.items() if c})

    def __call__(self, assignment: Mapping[str, object]) -> Fraction:
        vals = {self.ctx.slot(k): as_fraction(v) for k, v in assignment.items()}
        missing = self.variables() - set(vals)
        if missing:
            names = sorted(self.ctx.names[i] for i in missing)
            raise InvalidInput(f"assignment misses indeterminates {names}")
        total = Fraction(0)
        for exp, c in self.terms.items():
            for i, e in enumerate(exp):
                if e:
                    c = c * vals[i] ** e
            total += c
        return total

    # -- exact division ----------------------------------------------------
    def divexact(self, other: MultiPoly) -> MultiPoly:
        _check_ctx(self, other)
        if not other.terms:
            raise ZeroDivisionError("polynomial division by zero")
        if other.is_constant():
            return self.scale(1 / other.constant_value())
        lead_e, lead_c = other.lead()
        rem = dict(self.terms)
        quot: dict[tuple, Fraction] = {}
        oterms = other.terms.items()
        while rem:
            e = max(rem)
            q_e = tuple(a - b for a, b in zip(e, lead_e))
            if any(x < 0 for x in q_e):
                raise InvalidInput("polynomial division is not exact")
            q_c = rem[e] / lead_c
            quot[q_e] = q_c
            for oe, oc in oterms:
                t = tuple(a + b for a, b in zip(q_e, oe))
                s = rem.get(t, 0) - q_c * oc
                if s:
                    rem[t] = s
                else:
                    rem.pop(t, None)
        return MultiPoly(self.ctx, quot)

    # -- display -----------------------------------------------------------
    def sorted_terms(self) -> list[tuple[tuple, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0])))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        names = self.ctx.names
        for exp, c in self.sorted_terms():
            mono = "*".join(
                names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(exp) if e
            )
            mag = abs(c)
            if not mono:
                body = format_rational(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_rational(mag)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> dict:
        return {
            "vars": list(self.ctx.names),
            "terms": [[list(e), format_rational(c)] for e, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping, ctx: Context | None = None) -> MultiPoly:
        names = tuple(data["vars"])
        if ctx is None:
            ctx = DEFAULT if names == DEFAULT.names else Context(names)
        elif ctx.names != names:
            raise ContextMismatch(f"JSON polynomial over {names}, expected {ctx.names}")
        return cls.from_terms(ctx, ((tuple(e), parse_rational(c)) for e, c in data["terms"]))


@lru_cache(maxsize=64)
def _binomials(n: int) -> tuple[int, ...]:
    return tuple(comb(n, j) for j in range(n + 1))


# ---------------------------------------------------------------------------
# GCD: content extraction plus recursive primitive remainder sequences.
# ---------------------------------------------------------------------------


def _univariate_gcd(f: MultiPoly, g: MultiPoly, i: int) -> MultiPoly:
    ctx = f.ctx

    def dense(p):
        coeffs = [Fraction(0)] * (p.degree(i) + 1)
        for e, c in p.terms.items():
            coeffs[e[i]] = c
        return coeffs

    a, b = dense(f), dense(g)
    while b:
        inv = 1 / b[-1]
        while len(a) >= len(b) and a:
            q = a[-1] * inv
            off = len(a) - len(b)
            for j, c in enumerate(b):
                a[off + j] -= q * c
            while a and a[-1] == 0:
                a.pop()
        a, b = b, a
    inv = 1 / a[-1]
    exp = list(ctx._zero_exp)
    terms = {}
    for k, c in enumerate(a):
        if c:
            exp[i] = k
            terms[tuple(exp)] = c * inv
    return MultiPoly(ctx, terms)


def _coeff_gcd(polys: Iterable[MultiPoly], seed: MultiPoly | None = None) -> MultiPoly | None:
    g = seed
    for p in polys:
        g = p if g is None else poly_gcd(g, p)
        if g.is_constant():
            return MultiPoly.constant(g.ctx, 1)
    return g


def _as_univariate(p: MultiPoly, i: int) -> dict[int, MultiPoly]:
    return {k[0]: c for k, c in p.split((i,)).items()}


def _prem(f: dict[int, MultiPoly], g: dict[int, MultiPoly], xi: MultiPoly) -> dict[int, MultiPoly]:
    dg = max(g)
    lcg = g[dg]
    r = dict(f)
    while r and max(r) >= dg:
        dr = max(r)
        lcr = r[dr]
        shift = dr - dg
        new: dict[int, MultiPoly] = {}
        for k, c in r.items():
            new[k] = c * lcg
        for k, c in g.items():
            t = k + shift
            new[t] = new.get(t, MultiPoly(c.ctx, {})) - c * lcr
        r = {k: c for k, c in new.items() if not c.is_zero()}
    return r


def _primitive(u: dict[int, MultiPoly]) -> tuple[MultiPoly, dict[int, MultiPoly]]:
    cont = _coeff_gcd(u.values())
    if cont.is_one():
        return cont, u
    return cont, {k: c.divexact(cont) for k, c in u.items()}


def _from_univariate(u: dict[int, MultiPoly], i: int, ctx: Context) -> MultiPoly:
    out = {}
    for k, c in u.items():
        for e, v in c.terms.items():
            e = list(e)
            e[i] = k
            out[tuple(e)] = v
    return MultiPoly(ctx, out)


def poly_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Monic (lex-leading coefficient 1) greatest common divisor over Q."""
    _check_ctx(f, g)
    ctx = f.ctx
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    if f.is_constant() or g.is_constant():
        return MultiPoly.constant(ctx, 1)
    if f == g:
        return f.monic()
    if len(f.terms) == 1 or len(g.terms) == 1:
        mono, other = (f, g) if len(f.terms) == 1 else (g, f)
        e = list(next(iter(mono.terms)))
        for oe in other.terms:
            e = [min(x, y) for x, y in zip(e, oe)]
        return MultiPoly(ctx, {tuple(e): Fraction(1)})
    vf, vg = f.variables(), g.variables()
    only_f, only_g = vf - vg, vg - vf
    if only_f:
        return _coeff_gcd(f.split(sorted(only_f)).values(), g).monic()
    if only_g:
        return _coeff_gcd(g.split(sorted(only_g)).values(), f).monic()
    if len(vf) == 1:
        return _univariate_gcd(f, g, next(iter(vf)))
    # Main variable: the one of lowest combined degree keeps the PRS short.
    i = min(vf, key=lambda j: (f.degree(j) + g.degree(j), j))
    uf, ug = _as_univariate(f, i), _as_univariate(g, i)
    cf, uf = _primitive(uf)
    cg, ug = _primitive(ug)
    cont = poly_gcd(cf, cg)
    if max(uf) < max(ug):
        uf, ug = ug, uf
    xi = ctx.poly_var(ctx.names[i])
    while True:
        r = _prem(uf, ug, xi)
        if not r:
            break
        if max(r) == 0:
            ug = {0: MultiPoly.constant(ctx, 1)}
            break
        _, r = _primitive(r)
        uf, ug = ug, r
    _, ug = _primitive(ug)
    return (_from_univariate(ug, i, ctx) * cont).monic()


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


_SCALARS = (int, Fraction, MultiPoly)


class RationalFunction:
    """Canonical num/den: coprime, den with lex-leading coefficient 1."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None, *, _canonical=False):
        if den is None:
            den = MultiPoly.constant(num.ctx, 1)
            _canonical = True
        _check_ctx(num, den)
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def from_poly(cls, p: MultiPoly) -> RationalFunction:
        return cls(p, MultiPoly.constant(p.ctx, 1), _canonical=True)

    @property
    def ctx(self) -> Context:
        return self.num.ctx

    def _coerce(self, other) -> RationalFunction:
        if isinstance(other, RationalFunction):
            _check_ctx(self.num, other.num)
            return other
        if isinstance(other, MultiPoly):
            return RationalFunction.from_poly(self.num._coerce(other))
        return RationalFunction.from_poly(MultiPoly.constant(self.ctx, other))

    # -- predicates ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num.terms

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.den.is_one() and self.num.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise InvalidInput(f"{self} is not constant")
        return self.num.constant_value()

    def variable_names(self) -> frozenset[str]:
        return self.num.variable_names() | self.den.variable_names()

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, MultiPoly)):
            return self == self._coerce(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # -- arithmetic ------------------------------------------------------
    def __neg__(self):
        return RationalFunction(-self.num, self.den, _canonical=True)

    def __add__(self, other):
        if not isinstance(other, (RationalFunction, *_SCALARS)):
            return NotImplemented
        other = self._coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            if self.den.is_one():
                return RationalFunction(self.num + other.num, self.den, _canonical=True)
            return RationalFunction(self.num + other.num, self.den)
        if other.den.is_one():
            return RationalFunction(self.num + other.num * self.den, self.den, _canonical=True)
        if self.den.is_one():
            return RationalFunction(self.num * other.den + other.num, other.den, _canonical=True)
        g = poly_gcd(self.den, other.den)
        da, db = self.den.divexact(g), other.den.divexact(g)
        return RationalFunction(self.num * db + other.num * da, self.den * db)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, (RationalFunction, *_SCALARS)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return RationalFunction.from_poly(MultiPoly(self.ctx, {}))
            return RationalFunction(self.num.scale(other), self.den, _canonical=True)
        if not isinstance(other, (RationalFunction, MultiPoly)):
            return NotImplemented
        other = self._coerce(other)
        if self.den.is_one() and other.den.is_one():
            return RationalFunction(self.num * other.num, self.den, _canonical=True)
        if self.is_zero() or other.is_zero():
            return RationalFunction.from_poly(MultiPoly(self.ctx, {}))
        # Cross-cancel before multiplying; inputs are already reduced.
        n1, d2 = _cancel(self.num, other.den)
        n2, d1 = _cancel(other.num, self.den)
        num, den = n1 * n2, d1 * d2
        lc = den.lead()[1]
        if lc != 1:
            num, den = num.scale(1 / lc), den.scale(1 / lc)
        return RationalFunction(num, den, _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> RationalFunction:
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        num, den = self.den, self.num
        lc = den.lead()[1]
        return RationalFunction(num.scale(1 / lc), den.scale(1 / lc), _canonical=True)

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.num**n, self.den**n, _canonical=True)

    # -- substitution ----------------------------------------------------
    def shift(self, var: str, k) -> RationalFunction:
        if not self.variable_names() or var not in self.variable_names():
            return self
        num, den = self.num.shift(var, k), self.den.shift(var, k)
        lc = den.lead()[1]
        if lc != 1:
            num, den = num.scale(1 / lc), den.scale(1 / lc)
        return RationalFunction(num, den, _canonical=True)

    def subs(self, var: str, expr) -> RationalFunction:
        return rf_substitute(self, var, expr)

    def subs_values(self, assignment: Mapping[str, object]) -> RationalFunction:
        """Replace some indeterminates by rational numbers."""
        vals = {self.ctx.slot(k): as_fraction(v) for k, v in assignment.items()}
        num, den = self.num.evaluate(vals), self.den.evaluate(vals)
        if den.is_zero():
            raise SingularSubstitution(f"denominator of {self} vanishes at {dict(assignment)}")
        return RationalFunction(num, den)

    def __call__(self, assignment: Mapping[str, object]) -> Fraction:
        return rf_evaluate(self, assignment)

    def coeff(self, var: str, k: int) -> RationalFunction:
        """Coefficient of ``var**k``; requires a denominator free of ``var``."""
        if self.den.degree(var) > 0:
            raise InvalidInput(f"denominator of {self} depends on {var}")
        return RationalFunction(self.num.coeff(var, k), self.den)

    def degree(self, var: str) -> int:
        if self.den.degree(var) > 0:
            raise InvalidInput(f"denominator of {self} depends on {var}")
        return self.num.degree(var)

    def __repr__(self):
        if self.den.is_one():
            return repr(self.num)
        num = repr(self.num)
        den = repr(self.den)
        if len(self.num.terms) > 1:
            num = f"({num})"
        if len(self.den.terms) > 1:
            den = f"({den})"
        return f"{num}/{den}"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: Mapping, ctx: Context | None = None) -> RationalFunction:
        num = MultiPoly.from_json(data["num"], ctx)
        den = MultiPoly.from_json(data["den"], num.ctx)
        return rf_normalize(cls(num, den, _canonical=True))


def _cancel(a: MultiPoly, b: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    if b.is_one() or a.is_constant() or b.is_constant():
        return a, b
    g = poly_gcd(a, b)
    if g.is_one():
        return a, b
    return a.divexact(g), b.divexact(g)


def _canonicalize(num: MultiPoly, den: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    if den.is_zero():
        raise InvalidInput("rational function with zero denominator")
    if num.is_zero():
        return num, MultiPoly.constant(num.ctx, 1)
    if den.is_constant():
        c = den.constant_value()
        return num.scale(1 / c), MultiPoly.constant(num.ctx, 1)
    num, den = _cancel(num, den)
    lc = den.lead()[1]
    if lc != 1:
        num, den = num.scale(1 / lc), den.scale(1 / lc)
    return num, den


def rf_normalize(f: RationalFunction) -> RationalFunction:
    """Return the canonical representative of ``f``."""
    num, den = _canonicalize(f.num, f.den)
    return RationalFunction(num, den, _canonical=True)


def rf_substitute(f: RationalFunction, var: str, expr) -> RationalFunction:
    """Replace ``var`` by ``expr`` (a rational function, polynomial or number)."""
    expr = f._coerce(expr)
    if var not in f.variable_names():
        return f
    if expr.is_constant():
        return f.subs_values({var: expr.constant_value()})
    if expr.den.is_one():
        num = f.num.subs_poly(var, expr.num)
        den = f.den.subs_poly(var, expr.num)
        if den.is_zero():
            raise SingularSubstitution(f"{var} -> {expr} makes the denominator of {f} vanish")
        return RationalFunction(num, den)
    num = _subs_rf(f.num, var, expr)
    den = _subs_rf(f.den, var, expr)
    if den.is_zero():
        raise SingularSubstitution(f"{var} -> {expr} makes the denominator of {f} vanish")
    return num / den


def _subs_rf(p: MultiPoly, var: str, expr: RationalFunction) -> RationalFunction:
    i = p.ctx.slot(var)
    groups = p.split((i,))
    top = max(k for (k,) in groups)
    # Homogenize over expr.den**top so that only polynomial steps are needed.
    n, d = expr.num, expr.den
    acc = MultiPoly(p.ctx, {})
    npow = MultiPoly.constant(p.ctx, 1)
    dpows = [MultiPoly.constant(p.ctx, 1)]
    for _ in range(top):
        dpows.append(dpows[-1] * d)
    for k in range(top + 1):
        c = groups.get((k,))
        if c is not None:
            acc = acc + c * npow * dpows[top - k]
        npow = npow * n
    return RationalFunction(acc, dpows[top])


def rf_evaluate(f: RationalFunction, assignment: Mapping[str, object]) -> Fraction:
    """Exact value of ``f`` at a point covering all its indeterminates."""
    den = f.den(assignment)
    if den == 0:
        raise PoleError(f"{f} has a pole at {dict(assignment)}")
    return f.num(assignment) / den
